//! Statistical and inequality checks around Steiner symmetrization.

use serde::Serialize;
use statrs::distribution::{ChiSquared, ContinuousCDF};

use super::{steiner_symmetrize, ChordDecomposition};
use crate::bodies::sampling::{bounding_box, UniformSampler};
use crate::bodies::{Body, Representation};
use crate::centroid::{build_on_grid, centroid_support_report, CentroidBody};
use crate::error::{Error, Result};
use crate::linalg::{axpy, dot, Direction};
use crate::orlicz::{OrliczFunction, SolverConfig, WeightFunction};

pub const MAPS_P_THRESHOLD: f64 = 0.01;
const MAPS_SEED: u64 = 0x5eed_0001;

/// Two-sample chi-square comparisons of mapped and target samples.
#[derive(Clone, Debug, Serialize)]
pub struct MapsReport {
    pub samples: usize,
    pub bins: usize,
    pub s_statistic: f64,
    pub s_dof: usize,
    pub s_p_value: f64,
    pub t_statistic: f64,
    pub t_dof: usize,
    pub t_p_value: f64,
    /// `max |T(T(y)) - y|` over the samples.
    pub involution_error: f64,
    /// `max |S(y) - y|`, zero for bodies already symmetric in `u`.
    pub s_displacement: f64,
}

impl MapsReport {
    pub fn passed(&self) -> bool {
        self.s_p_value > MAPS_P_THRESHOLD && self.t_p_value > MAPS_P_THRESHOLD && self.involution_error < 1e-12
    }
}

pub fn maps_s_t_check(body: &Body, u: &Direction, sample_count: usize) -> Result<MapsReport> {
    maps_s_t_check_seeded(body, u, sample_count, MAPS_SEED)
}

/// `S(y' + (m + t) u) = y' + t u` pushes `mu^K` to `mu^{S_u K}`; the midpoint
/// reflection `T` preserves `mu^K`.
pub fn maps_s_t_check_seeded(body: &Body, u: &Direction, sample_count: usize, seed: u64) -> Result<MapsReport> {
    let n = body.dim();
    let sym = steiner_symmetrize(body, u)?;
    let dec = ChordDecomposition::new(body, u)?;
    let uv = u.as_slice();
    let source = UniformSampler::new(body)?.sample_flat(sample_count, seed);
    let mut s_img = Vec::with_capacity(source.len());
    let mut t_img = Vec::with_capacity(source.len());
    let mut involution_error: f64 = 0.0;
    let mut s_displacement: f64 = 0.0;
    for y in source.chunks(n) {
        let (z, tau) = dec.coords(y);
        let m = dec.chord(&z).map_or(tau, |(lo, hi)| 0.5 * (lo + hi));
        let s = axpy(y, -m, uv);
        let t = axpy(y, 2.0 * (m - tau), uv);
        let (zt, taut) = dec.coords(&t);
        let mt = dec.chord(&zt).map_or(taut, |(lo, hi)| 0.5 * (lo + hi));
        let tt = axpy(&t, 2.0 * (mt - taut), uv);
        involution_error = involution_error.max(tt.iter().zip(y).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max));
        s_displacement = s_displacement.max(m.abs());
        s_img.extend(s);
        t_img.extend(t);
    }
    let s_target = UniformSampler::new(&sym)?.sample_flat(sample_count, seed ^ 0x9e37_79b9);
    let t_target = UniformSampler::new(body)?.sample_flat(sample_count, seed ^ 0x7f4a_7c15);
    let shape: Vec<usize> = if n == 2 { vec![10, 10] } else { vec![5, 5, 4] };
    let (s_statistic, s_dof, s_p_value) = chi_square(&s_img, &s_target, &bounding_box(&sym), &shape);
    let (t_statistic, t_dof, t_p_value) = chi_square(&t_img, &t_target, &bounding_box(body), &shape);
    Ok(MapsReport {
        samples: sample_count,
        bins: shape.iter().product(),
        s_statistic,
        s_dof,
        s_p_value,
        t_statistic,
        t_dof,
        t_p_value,
        involution_error,
        s_displacement,
    })
}

fn chi_square(a: &[f64], b: &[f64], bbox: &[(f64, f64)], shape: &[usize]) -> (f64, usize, f64) {
    let n = shape.len();
    let bins: usize = shape.iter().product();
    let index = |p: &[f64]| {
        let mut k = 0;
        for i in 0..n {
            let (lo, hi) = bbox[i];
            let c = (((p[i] - lo) / (hi - lo) * shape[i] as f64).floor().max(0.0) as usize).min(shape[i] - 1);
            k = k * shape[i] + c;
        }
        k
    };
    let (mut ca, mut cb) = (vec![0.0f64; bins], vec![0.0f64; bins]);
    for p in a.chunks(n) {
        ca[index(p)] += 1.0;
    }
    for p in b.chunks(n) {
        cb[index(p)] += 1.0;
    }
    let mut stat = 0.0;
    let mut used = 0;
    for (x, y) in ca.iter().zip(&cb) {
        if x + y > 0.0 {
            stat += (x - y).powi(2) / (x + y);
            used += 1;
        }
    }
    let dof = used.max(2) - 1;
    let p = ChiSquared::new(dof as f64).map_or(0.0, |d| d.sf(stat));
    (stat, dof, p)
}

/// Both sides of the Steiner support inequality, `slack = rhs - lhs`.
#[derive(Clone, Debug, Serialize)]
pub struct SteinerInequality {
    pub lhs: f64,
    pub rhs: f64,
    pub slack: f64,
    /// Absolute solver uncertainty of `rhs - lhs`.
    pub uncertainty: f64,
}

/// Contract on the slack.
pub const STEINER_SLACK_TOL: f64 = 1e-6;

impl SteinerInequality {
    pub fn passed(&self) -> bool {
        self.slack >= -STEINER_SLACK_TOL
    }
}

/// `h(Gamma S_u K, (x'_1 + x'_2)/2 + u) <= (h(Gamma K, x'_1 + u) + h(Gamma K, x'_2 - u)) / 2`.
pub fn lemma41_inequality_check(
    body: &Body,
    u: &Direction,
    x1: &[f64],
    x2: &[f64],
    phi: &OrliczFunction,
    omega: &WeightFunction,
) -> Result<SteinerInequality> {
    let sym = steiner_symmetrize(body, u)?;
    lemma41_with(body, &sym, u, x1, x2, phi, omega, &SolverConfig::default())
}

/// As [`lemma41_inequality_check`] with a precomputed symmetral.
#[allow(clippy::too_many_arguments)]
pub fn lemma41_with(
    body: &Body,
    sym: &Body,
    u: &Direction,
    x1: &[f64],
    x2: &[f64],
    phi: &OrliczFunction,
    omega: &WeightFunction,
    config: &SolverConfig,
) -> Result<SteinerInequality> {
    let uv = u.as_slice();
    for x in [x1, x2] {
        if x.len() != uv.len() {
            return Err(Error::DimensionMismatch { expected: uv.len(), got: x.len() });
        }
        if dot(x, uv).abs() > 1e-9 * (1.0 + dot(x, x).sqrt()) {
            return Err(Error::Domain("x' must lie in the orthogonal complement of u".into()));
        }
    }
    let eval = |k: &Body, x: Vec<f64>| -> Result<(f64, f64)> {
        let r = centroid_support_report(k, phi, omega, &x, config)?;
        let v = r.lambda_refined.unwrap_or(r.lambda);
        Ok((v, v * (r.richardson_delta.unwrap_or(0.0) + r.residual + 1e-12)))
    };
    let mid: Vec<f64> = x1.iter().zip(x2).zip(uv).map(|((a, b), c)| 0.5 * (a + b) + c).collect();
    let (lhs, dl) = eval(sym, mid)?;
    let (h1, d1) = eval(body, axpy(x1, 1.0, uv))?;
    let (h2, d2) = eval(body, axpy(x2, -1.0, uv))?;
    let rhs = 0.5 * (h1 + h2);
    Ok(SteinerInequality { lhs, rhs, slack: rhs - lhs, uncertainty: dl + 0.5 * (d1 + d2) })
}

/// `Gamma(S_u K)` against `S_u` of the outer polytope of `Gamma K` on a grid.
#[derive(Clone, Debug, Serialize)]
pub struct InclusionReport {
    /// `max_i h(Gamma S_u K, v_i) - h(S_u P, v_i)`.
    pub max_violation: f64,
    pub worst_direction: usize,
    /// Allowed violation: solver uncertainty of both centroid bodies plus slack.
    pub epsilon_grid: f64,
    /// Relative solver uncertainty of each side.
    pub delta_symmetral: f64,
    pub delta_body: f64,
    /// Hausdorff-type margin between the outer polytope and `Gamma K` from the
    /// grid resolution; it loosens the comparison and is reported, not used.
    pub polytopal_margin: f64,
    /// `[inner, outer]` brackets of `|Gamma S_u K|` and `|Gamma K|`.
    pub volume_symmetral: (f64, f64),
    pub volume_body: (f64, f64),
}

impl InclusionReport {
    pub fn inclusion_holds(&self) -> bool {
        self.max_violation <= self.epsilon_grid
    }

    /// `inner(|Gamma S_u K|) <= outer(|Gamma K|)`.
    pub fn volume_monotone(&self) -> bool {
        self.volume_symmetral.0 <= self.volume_body.1
    }

    pub fn passed(&self) -> bool {
        self.inclusion_holds() && self.volume_monotone()
    }
}

pub fn lemma42_inclusion_check(
    body: &Body,
    u: &Direction,
    phi: &OrliczFunction,
    omega: &WeightFunction,
    directions: Vec<Direction>,
) -> Result<InclusionReport> {
    let config = SolverConfig::default();
    let sym = steiner_symmetrize(body, u)?;
    let gk = build_on_grid(body, phi, omega, directions.clone(), &config)?;
    let gs = build_on_grid(&sym, phi, omega, directions, &config)?;
    inclusion_from(&gk, &gs, u, 0.0)
}

/// Compares precomputed centroid bodies of `K` and of its symmetral on the same
/// grid. `extra_rel` widens the tolerance, e.g. for a simplified symmetral.
pub fn inclusion_from(gamma_k: &CentroidBody, gamma_sym: &CentroidBody, u: &Direction, extra_rel: f64) -> Result<InclusionReport> {
    if gamma_k.directions().len() != gamma_sym.directions().len() {
        return Err(Error::Domain("centroid bodies are on different grids".into()));
    }
    let outer = gamma_k.outer_body();
    let poly = match outer.repr() {
        Representation::SupportSampled(s) => s
            .polytope()
            .ok_or_else(|| Error::Unsupported("outer approximation has no polytope".into()))?
            .clone(),
        _ => unreachable!("centroid bodies are support-sampled"),
    };
    let resolution = match outer.repr() {
        Representation::SupportSampled(s) => s.resolution(),
        _ => 0.0,
    };
    let r_outer = outer.radii().outer;
    let target = steiner_symmetrize(&Body::from(poly), u)?;
    let (mut worst, mut worst_i, mut hmax) = (f64::NEG_INFINITY, 0, 0.0f64);
    for (i, (v, h)) in gamma_sym.directions().iter().zip(gamma_sym.support_values()).enumerate() {
        let rhs = target.support(v);
        hmax = hmax.max(h.max(rhs));
        if h - rhs > worst {
            worst = h - rhs;
            worst_i = i;
        }
    }
    let (ds, dk) = (gamma_sym.support_uncertainty(), gamma_k.support_uncertainty());
    let vs = gamma_sym.volume_bracket()?;
    let vk = gamma_k.volume_bracket()?;
    Ok(InclusionReport {
        max_violation: worst,
        worst_direction: worst_i,
        epsilon_grid: (ds + dk + extra_rel + 1e-9) * hmax,
        delta_symmetral: ds,
        delta_body: dk,
        polytopal_margin: 4.0 * r_outer * (0.5 * resolution).sin(),
        volume_symmetral: (vs.inner, vs.outer),
        volume_body: (vk.inner, vk.outer),
    })
}
