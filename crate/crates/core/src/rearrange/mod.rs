//! Distribution functions and decreasing rearrangements of `y -> x . y`
//! under the normalized Lebesgue measure on a body.

pub mod ball;
pub mod slab;

use std::collections::HashMap;
use std::io::Write;
use std::sync::{Arc, Mutex, OnceLock};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::bodies::sampling::UniformSampler;
use crate::bodies::{Body, Representation};
use crate::error::{Error, Result};
use crate::linalg::{dot, norm};
use crate::tol::MONOTONE_TOL;
use slab::SlabTable;

pub const DEFAULT_EMPIRICAL_SAMPLES: usize = 1_000_000;
pub const DEFAULT_EMPIRICAL_SEED: u64 = 0x00c0_ffee;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Backend {
    ExactSlab,
    EmpiricalQuantile,
}

impl std::fmt::Display for Backend {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Backend::ExactSlab => "exact_slab",
            Backend::EmpiricalQuantile => "empirical_quantile",
        })
    }
}

fn check_nonincreasing(values: &[f64], at: impl Fn(usize) -> f64) -> Result<()> {
    for k in 1..values.len() {
        if values[k] > values[k - 1] + MONOTONE_TOL {
            return Err(Error::MonotonicityViolation { t: at(k), prev: values[k - 1], next: values[k] });
        }
    }
    Ok(())
}

const GRADING_POWER: i32 = 6;

/// Cells of (0, 1) for the norm quadrature: width `1/cells` on `[1/16, 1]` and
/// edges `t0 (j/J)^6`, `J = cells/4`, on `[0, t0 = 1/16]`. The grading smooths
/// the cusp of `f*` and a singular weight at `t = 0`. Cached.
pub fn quadrature_cells(cells: usize) -> Arc<Vec<(f64, f64)>> {
    static CACHE: OnceLock<Mutex<HashMap<usize, Arc<Vec<(f64, f64)>>>>> = OnceLock::new();
    let cache = CACHE.get_or_init(Default::default);
    if let Some(v) = cache.lock().unwrap().get(&cells) {
        return v.clone();
    }
    let h = 1.0 / cells as f64;
    let k0 = (cells / 16).max(1);
    let t0 = k0 as f64 * h;
    let graded = (cells / 4).max(1);
    let edge = |j: usize| t0 * (j as f64 / graded as f64).powi(GRADING_POWER);
    let mut out: Vec<(f64, f64)> = (0..graded).map(|j| (edge(j), edge(j + 1))).collect();
    out.extend((k0..cells).map(|k| (k as f64 * h, (k + 1) as f64 * h)));
    let out = Arc::new(out);
    cache.lock().unwrap().insert(cells, out.clone());
    out
}

/// Normalized measure of `{|x . y| > s}`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SlabVolumeResult {
    pub threshold: f64,
    pub value: f64,
    pub error: f64,
}

#[derive(Clone, Debug)]
enum Eval {
    /// f*_u(t) = radius * f*_{e_1, B}(t)
    Ball { n: usize, radius: f64 },
    Slab { table: SlabTable, breaks: Vec<f64>, mu_breaks: Vec<f64> },
    /// |u . Y_i| in decreasing order
    Empirical { sorted: Vec<f64>, seed: u64 },
}

/// `t -> f*_{x,K}(t)`. Everything is computed for the unit direction
/// `x / |x|` and scaled by `|x|`, so scaling `x` acts exactly.
#[derive(Clone, Debug)]
pub struct RearrangementProfile {
    x: Vec<f64>,
    scale: f64,
    /// max |u . y| over K, i.e. f*(0+) for the unit direction
    top: f64,
    eval: Eval,
}

impl RearrangementProfile {
    /// Exact backend when the body has one, empirical otherwise.
    pub fn new(body: &Body, x: &[f64]) -> Result<Self> {
        match Self::exact(body, x) {
            Err(Error::DimensionUnsupported { .. }) => {
                Self::empirical(body, x, DEFAULT_EMPIRICAL_SAMPLES, DEFAULT_EMPIRICAL_SEED)
            }
            r => r,
        }
    }

    pub fn exact(body: &Body, x: &[f64]) -> Result<Self> {
        let (u, scale) = unit(body, x)?;
        let eval = match body.repr() {
            Representation::Ball { radius } => Eval::Ball { n: body.dim(), radius: *radius },
            Representation::Ellipsoid(e) => Eval::Ball { n: body.dim(), radius: e.quadratic(&u).sqrt() },
            Representation::Polytope(p) => slab_eval(p, &u)?,
            Representation::SupportSampled(s) => match s.polytope() {
                Some(p) => slab_eval(p, &u)?,
                None => return Err(Error::DimensionUnsupported { dim: body.dim(), what: "exact slab volumes" }),
            },
        };
        let top = match &eval {
            Eval::Ball { radius, .. } => *radius,
            Eval::Slab { breaks, .. } => breaks[breaks.len() - 1],
            Eval::Empirical { .. } => unreachable!(),
        };
        Ok(Self { x: x.to_vec(), scale, top, eval })
    }

    /// Order statistics of `|x . Y|` for `samples` uniform points `Y`.
    pub fn empirical(body: &Body, x: &[f64], samples: usize, seed: u64) -> Result<Self> {
        if samples == 0 {
            return Err(Error::Domain("empirical profile needs at least one sample".into()));
        }
        let (u, scale) = unit(body, x)?;
        let sampler = UniformSampler::new(body)?;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut y = vec![0.0; body.dim()];
        let mut sorted: Vec<f64> = (0..samples)
            .map(|_| {
                sampler.sample_into(&mut rng, &mut y);
                dot(&u, &y).abs()
            })
            .collect();
        sorted.sort_by(|a, b| b.total_cmp(a));
        let top = body.radii().outer;
        Ok(Self { x: x.to_vec(), scale, top, eval: Eval::Empirical { sorted, seed } })
    }

    pub fn backend(&self) -> Backend {
        match self.eval {
            Eval::Empirical { .. } => Backend::EmpiricalQuantile,
            _ => Backend::ExactSlab,
        }
    }

    pub fn x(&self) -> &[f64] {
        &self.x
    }

    /// Seed and sample count of the empirical backend.
    pub fn sample_info(&self) -> Option<(u64, usize)> {
        match &self.eval {
            Eval::Empirical { sorted, seed } => Some((*seed, sorted.len())),
            _ => None,
        }
    }

    /// Upper bound for f*: `max_{y in K} |x . y|`, or `R_K |x|` for samples.
    pub fn bound(&self) -> f64 {
        self.top * self.scale
    }

    fn mu_unit(&self, s: f64) -> f64 {
        match &self.eval {
            Eval::Ball { n, radius } => ball::ball_mu(*n, s / radius),
            Eval::Slab { table, .. } => table.mu(s),
            Eval::Empirical { sorted, .. } => {
                sorted.partition_point(|&v| v > s) as f64 / sorted.len() as f64
            }
        }
    }

    /// `mu(s) = mu^K{|x . y| > s}`.
    pub fn distribution(&self, s: f64) -> Result<SlabVolumeResult> {
        if !(s >= 0.0) {
            return Err(Error::Domain(format!("threshold must be nonnegative, got {s}")));
        }
        let value = self.mu_unit(s / self.scale);
        let error = match &self.eval {
            Eval::Empirical { sorted, .. } => (value * (1.0 - value) / sorted.len() as f64).sqrt(),
            _ => 1e-12,
        };
        Ok(SlabVolumeResult { threshold: s, value, error })
    }

    fn fstar_unit(&self, t: f64) -> f64 {
        match &self.eval {
            Eval::Ball { n, radius } => radius * ball::ball_fstar(*n, t),
            Eval::Slab { table, breaks, mu_breaks } => invert_slab(table, breaks, mu_breaks, t),
            Eval::Empirical { sorted, .. } => {
                let k = ((t * sorted.len() as f64).ceil() as usize).clamp(1, sorted.len());
                sorted[k - 1]
            }
        }
    }

    /// `f*(t) = inf{s >= 0 : mu(s) <= t}` for `0 < t < 1`.
    pub fn fstar(&self, t: f64) -> Result<f64> {
        if !(t > 0.0 && t < 1.0) {
            return Err(Error::Domain(format!("t must lie in (0, 1), got {t}")));
        }
        Ok(self.scale * self.fstar_unit(t))
    }

    /// f* at the midpoints of [`quadrature_cells`], checked to be nonincreasing.
    pub fn cell_values(&self, cells: usize) -> Result<Vec<f64>> {
        let layout = quadrature_cells(cells);
        let values: Vec<f64> = match &self.eval {
            Eval::Ball { n, radius } => ball::ball_cell_values(*n, cells).iter().map(|v| self.scale * radius * v).collect(),
            _ => layout.iter().map(|(a, b)| self.scale * self.fstar_unit(0.5 * (a + b))).collect(),
        };
        check_nonincreasing(&values, |k| 0.5 * (layout[k].0 + layout[k].1))?;
        Ok(values)
    }

    /// f* at the midpoints of `cells` equal cells of (0, 1), checked to be nonincreasing.
    pub fn midpoints(&self, cells: usize) -> Result<Vec<f64>> {
        let values: Vec<f64> = match &self.eval {
            Eval::Ball { n, radius } => {
                ball::ball_midpoints(*n, cells).iter().map(|v| self.scale * radius * v).collect()
            }
            _ => (0..cells).map(|k| self.scale * self.fstar_unit((k as f64 + 0.5) / cells as f64)).collect(),
        };
        check_nonincreasing(&values, |k| (k as f64 + 0.5) / cells as f64)?;
        Ok(values)
    }

    /// Exact kinks of f* as `(t, f*(t))`, for the polytope backend.
    pub fn kinks(&self) -> Option<Vec<(f64, f64)>> {
        match &self.eval {
            Eval::Slab { breaks, mu_breaks, .. } => {
                Some(breaks.iter().zip(mu_breaks).map(|(s, m)| (*m, s * self.scale)).collect())
            }
            _ => None,
        }
    }
}

fn unit(body: &Body, x: &[f64]) -> Result<(Vec<f64>, f64)> {
    if x.len() != body.dim() {
        return Err(Error::DimensionMismatch { expected: body.dim(), got: x.len() });
    }
    let scale = norm(x);
    if !(scale > 0.0) || !scale.is_finite() {
        return Err(Error::ZeroDirection);
    }
    Ok((x.iter().map(|c| c / scale).collect(), scale))
}

fn slab_eval(p: &crate::bodies::Polytope, u: &[f64]) -> Result<Eval> {
    let table = SlabTable::new(p, u)?;
    let breaks = table.mu_breakpoints().to_vec();
    let mu_breaks = table.mu_at_breaks();
    Ok(Eval::Slab { table, breaks, mu_breaks })
}

/// Generalized inverse on the piece of the breakpoint table that contains it.
fn invert_slab(table: &SlabTable, breaks: &[f64], mu_breaks: &[f64], t: f64) -> f64 {
    let j = mu_breaks.partition_point(|&m| m > t).clamp(1, breaks.len() - 1);
    table.invert_piece(j - 1, t)
}

/// `mu^K{|x . y| > s}`; exact where a slab backend exists, Monte Carlo otherwise.
pub fn distribution(body: &Body, x: &[f64], s: f64) -> Result<SlabVolumeResult> {
    RearrangementProfile::new(body, x)?.distribution(s)
}

pub fn rearrangement(profile: &RearrangementProfile, t: f64) -> Result<f64> {
    profile.fstar(t)
}

/// Tabulation `(t_k, f*(t_k))` at cell midpoints.
pub fn rearrangement_breakpoints(profile: &RearrangementProfile, grid_size: usize) -> Result<Vec<(f64, f64)>> {
    if grid_size < 2 {
        return Err(Error::Domain(format!("grid size must be at least 2, got {grid_size}")));
    }
    let values = profile.midpoints(grid_size)?;
    Ok(values.into_iter().enumerate().map(|(k, v)| ((k as f64 + 0.5) / grid_size as f64, v)).collect())
}

pub fn write_csv<W: Write>(mut w: W, rows: &[(f64, f64)]) -> std::io::Result<()> {
    writeln!(w, "t,fstar")?;
    for (t, f) in rows {
        writeln!(w, "{t:.11e},{f:.11e}")?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bodies::Polytope;
    use crate::linalg::LinearMap;

    fn square() -> Body {
        Polytope::cube(2, 1.0).unwrap().into()
    }

    #[test]
    fn distribution_examples() {
        let disk = Body::ball(2, 1.0).unwrap();
        assert_eq!(distribution(&disk, &[1.0, 0.0], 0.0).unwrap().value, 1.0);
        let v = distribution(&disk, &[1.0, 0.0], 0.5).unwrap().value;
        assert!((v - 0.39100).abs() < 1e-5);
        for s in [0.0, 0.2, 0.7, 1.0] {
            let v = distribution(&square(), &[1.0, 0.0], s).unwrap().value;
            assert!((v - (1.0 - s)).abs() < 1e-14);
        }
        assert!(matches!(distribution(&disk, &[0.0, 0.0], 0.1), Err(Error::ZeroDirection)));
    }

    #[test]
    fn rearrangement_examples() {
        let p = RearrangementProfile::exact(&square(), &[1.0, 0.0]).unwrap();
        assert!((p.fstar(0.25).unwrap() - 0.75).abs() < 1e-9);
        let d = RearrangementProfile::exact(&Body::ball(2, 1.0).unwrap(), &[1.0, 0.0]).unwrap();
        assert!((d.fstar(1e-12).unwrap() - 1.0).abs() < 1e-6);
        assert!((d.fstar(0.5).unwrap() - 0.40397).abs() < 1e-5);
        assert!(matches!(p.fstar(0.0), Err(Error::Domain(_))));
        assert!(matches!(p.fstar(1.0), Err(Error::Domain(_))));
    }

    #[test]
    fn breakpoints_examples() {
        let p = RearrangementProfile::exact(&square(), &[1.0, 0.0]).unwrap();
        let tab = rearrangement_breakpoints(&p, 5).unwrap();
        let expect = [(0.1, 0.9), (0.3, 0.7), (0.5, 0.5), (0.7, 0.3), (0.9, 0.1)];
        for ((t, f), (te, fe)) in tab.iter().zip(expect) {
            assert!((t - te).abs() < 1e-15 && (f - fe).abs() < 1e-9);
        }
        let e = Body::ellipsoid_diagonal(&[4.0, 1.0]).unwrap();
        let pe = RearrangementProfile::exact(&e, &[1.0, 0.0]).unwrap();
        let pb = RearrangementProfile::exact(&Body::ball(2, 1.0).unwrap(), &[1.0, 0.0]).unwrap();
        for t in [0.1, 0.4, 0.8] {
            assert!((pe.fstar(t).unwrap() - 2.0 * pb.fstar(t).unwrap()).abs() < 1e-12);
        }
        assert!(rearrangement_breakpoints(&p, 1).is_err());
    }

    #[test]
    fn ellipsoid_pullback_matches_polygon_free_oracle() {
        // f*_{x, AB} = f*_{A^t x, B}
        let a = LinearMap::from_rows(&[vec![1.5, 0.4], vec![-0.2, 0.7]]).unwrap();
        let e = Body::ball(2, 1.0).unwrap().apply_linear(&a).unwrap();
        let x = [0.3, -1.1];
        let lhs = RearrangementProfile::exact(&e, &x).unwrap();
        let rhs = RearrangementProfile::exact(&Body::ball(2, 1.0).unwrap(), &a.apply_transpose(&x)).unwrap();
        for t in [0.05, 0.3, 0.6, 0.95] {
            assert!((lhs.fstar(t).unwrap() - rhs.fstar(t).unwrap()).abs() < 1e-12);
        }
    }

    #[test]
    fn empirical_matches_exact_on_square() {
        let p = RearrangementProfile::empirical(&square(), &[1.0, 0.0], 100_000, 42).unwrap();
        assert_eq!(p.backend(), Backend::EmpiricalQuantile);
        for t in [0.1, 0.5, 0.9] {
            assert!((p.fstar(t).unwrap() - (1.0 - t)).abs() < 0.01);
        }
    }

    #[test]
    fn four_dimensional_bodies_use_samples() {
        let c: Body = Polytope::cube(4, 1.0).unwrap().into();
        let p = RearrangementProfile::empirical(&c, &[0.0, 0.0, 0.0, 1.0], 50_000, 1).unwrap();
        assert!((p.fstar(0.5).unwrap() - 0.5).abs() < 0.02);
        assert!(matches!(
            RearrangementProfile::exact(&c, &[1.0, 0.0, 0.0, 0.0]),
            Err(Error::DimensionUnsupported { .. })
        ));
    }

    #[test]
    fn csv_export() {
        let p = RearrangementProfile::exact(&square(), &[1.0, 0.0]).unwrap();
        let mut buf = Vec::new();
        write_csv(&mut buf, &rearrangement_breakpoints(&p, 2).unwrap()).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(text.starts_with("t,fstar\n2.50000000000e-1,7.5000000000"), "{text}");
    }
}
