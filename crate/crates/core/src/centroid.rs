//! Orlicz-Lorentz centroid bodies: support evaluation on direction grids,
//! polytopal outer approximation and volume brackets.

use std::io::Write;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::bodies::{grid, Body, Polytope, Representation};
use crate::error::{Error, Result};
use crate::geom::polygon::{cross, P2};
use crate::linalg::{Direction, LinearMap};
use crate::orlicz::{norm_solve, NormSolveReport, OrliczFunction, SolverConfig, WeightFunction};
use crate::rearrange::RearrangementProfile;

/// `h(Gamma K, x)` with its solver report.
pub fn centroid_support_report(
    body: &Body,
    phi: &OrliczFunction,
    omega: &WeightFunction,
    x: &[f64],
    config: &SolverConfig,
) -> Result<NormSolveReport> {
    let profile = RearrangementProfile::new(body, x)?;
    norm_solve(&profile, body, phi, omega, config)
}

/// `h(Gamma K, x)`, the Orlicz-Lorentz norm of `y -> x . y` on `K`.
pub fn centroid_support(body: &Body, phi: &OrliczFunction, omega: &WeightFunction, x: &[f64]) -> Result<f64> {
    Ok(centroid_support_report(body, phi, omega, x, &SolverConfig::default())?.lambda)
}

/// Support value used for geometry: the refined-grid solution when available.
fn best(report: &NormSolveReport) -> f64 {
    report.lambda_refined.unwrap_or(report.lambda)
}

/// Relative uncertainty attached to a support value.
fn uncertainty(report: &NormSolveReport) -> f64 {
    report.richardson_delta.unwrap_or(0.0) + report.residual + 1e-12
}

#[derive(Clone, Debug)]
pub struct CentroidBody {
    phi: OrliczFunction,
    omega: WeightFunction,
    directions: Vec<Direction>,
    support: Vec<f64>,
    reports: Vec<NormSolveReport>,
    outer: Body,
    symmetry_gap: f64,
}

/// Two-sided bracket of `|Gamma K|`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct VolumeBracket {
    pub inner: f64,
    pub outer: f64,
    /// Relative support uncertainty folded into both ends.
    pub support_uncertainty: f64,
    /// One standard error when the volumes are Monte Carlo estimates.
    pub mc_error: f64,
}

impl VolumeBracket {
    pub fn width(&self) -> f64 {
        self.outer - self.inner
    }

    pub fn contains(&self, v: f64) -> bool {
        self.inner <= v && v <= self.outer
    }
}

/// `|Gamma K| / |K|` with its bracket.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct VolumeRatio {
    pub ratio: f64,
    pub inner: f64,
    pub outer: f64,
    pub error: f64,
}

pub fn min_grid_size(n: usize) -> usize {
    if n == 2 {
        8
    } else {
        64
    }
}

/// Solves the hemisphere of a centrally symmetric grid and mirrors the rest.
pub fn build_centroid_body(
    body: &Body,
    phi: &OrliczFunction,
    omega: &WeightFunction,
    grid_size: usize,
    config: &SolverConfig,
) -> Result<CentroidBody> {
    let n = body.dim();
    if grid_size < min_grid_size(n) {
        return Err(Error::Domain(format!("grid size {grid_size} is below {} for n = {n}", min_grid_size(n))));
    }
    let directions = grid::default_grid(n, grid_size)?;
    build_on_grid(body, phi, omega, directions, config)
}

pub fn build_on_grid(
    body: &Body,
    phi: &OrliczFunction,
    omega: &WeightFunction,
    directions: Vec<Direction>,
    config: &SolverConfig,
) -> Result<CentroidBody> {
    phi.validate()?;
    omega.validate()?;
    let anti = grid::antipodes(&directions);
    let solve_idx: Vec<usize> = (0..directions.len()).filter(|&i| anti[i].map_or(true, |j| i < j)).collect();
    let solved: Vec<NormSolveReport> = solve_idx
        .par_iter()
        .map(|&i| centroid_support_report(body, phi, omega, &directions[i], config))
        .collect::<Result<_>>()?;
    let mut reports: Vec<Option<NormSolveReport>> = vec![None; directions.len()];
    for (&i, r) in solve_idx.iter().zip(solved) {
        if let Some(j) = anti[i] {
            reports[j] = Some(r.clone());
        }
        reports[i] = Some(r);
    }
    let reports: Vec<NormSolveReport> = reports.into_iter().map(|r| r.unwrap()).collect();

    // spot-check h(u) = h(-u) on up to 8 mirrored pairs
    let mirrored: Vec<usize> = (0..directions.len()).filter(|&j| anti[j].map_or(false, |i| i < j)).collect();
    let picks: Vec<usize> = if mirrored.is_empty() {
        vec![]
    } else {
        let k = mirrored.len().min(8);
        (0..k).map(|s| mirrored[s * mirrored.len() / k]).collect()
    };
    let checks: Vec<(f64, f64)> = picks
        .par_iter()
        .map(|&j| {
            let r = centroid_support_report(body, phi, omega, &directions[j], config)?;
            Ok((best(&reports[j]), best(&r)))
        })
        .collect::<Result<_>>()?;
    let mut symmetry_gap: f64 = 0.0;
    for (plus, minus) in checks {
        let gap = (plus - minus).abs() / plus;
        if gap > 1e-6 {
            return Err(Error::SymmetryViolation { plus, minus });
        }
        symmetry_gap = symmetry_gap.max(gap);
    }

    let support: Vec<f64> = reports.iter().map(best).collect();
    if let Some(i) = support.iter().position(|h| !(*h > 0.0)) {
        return Err(Error::Domain(format!("support value {i} is not positive")));
    }
    let outer = Body::support_sampled(directions.clone(), support.clone())?;
    Ok(CentroidBody {
        phi: phi.clone(),
        omega: omega.clone(),
        directions,
        support,
        reports,
        outer,
        symmetry_gap,
    })
}

impl CentroidBody {
    pub fn phi(&self) -> &OrliczFunction {
        &self.phi
    }

    pub fn omega(&self) -> &WeightFunction {
        &self.omega
    }

    pub fn directions(&self) -> &[Direction] {
        &self.directions
    }

    pub fn support_values(&self) -> &[f64] {
        &self.support
    }

    pub fn reports(&self) -> &[NormSolveReport] {
        &self.reports
    }

    /// Largest relative `|h(u) - h(-u)|` among the spot-checked pairs.
    pub fn symmetry_gap(&self) -> f64 {
        self.symmetry_gap
    }

    /// `∩_i {y : u_i . y <= h_i}` as a body.
    pub fn outer_body(&self) -> &Body {
        &self.outer
    }

    pub fn outer_polytope(&self) -> Option<&Polytope> {
        match self.outer.repr() {
            Representation::SupportSampled(s) => s.polytope(),
            _ => None,
        }
    }

    /// Largest relative support uncertainty over the grid.
    pub fn support_uncertainty(&self) -> f64 {
        self.reports.iter().map(uncertainty).fold(0.0, f64::max)
    }

    /// Largest Richardson disagreement over the grid.
    pub fn quadrature_delta(&self) -> f64 {
        self.reports.iter().filter_map(|r| r.richardson_delta).fold(0.0, f64::max)
    }

    pub fn max_residual(&self) -> f64 {
        self.reports.iter().map(|r| r.residual).fold(0.0, f64::max)
    }

    /// Largest `h_i - h_P(u_i)`: zero when every sampled halfspace supports the
    /// outer polytope, positive when the samples are not a support function.
    pub fn consistency_gap(&self) -> f64 {
        self.directions
            .iter()
            .zip(&self.support)
            .map(|(u, h)| (h - self.outer.support(u)) / h)
            .fold(0.0, f64::max)
    }

    /// Support of the outer approximation at any `x`.
    pub fn outer_support(&self, x: &[f64]) -> f64 {
        self.outer.support(x)
    }

    pub fn volume_bracket(&self) -> Result<VolumeBracket> {
        let n = self.outer.dim() as i32;
        let eps = self.support_uncertainty();
        let (inner, outer, mc_error) = match self.outer_polytope() {
            Some(p) if n == 2 => {
                let poly = p.polygon().unwrap();
                (corner_cut_inner(&poly), p.volume_exact()?, 0.0)
            }
            Some(p) if n == 3 => (lipschitz_inner_3d(&self.directions, &self.support, p)?, p.volume_exact()?, 0.0),
            _ => {
                let v = self.outer.volume()?;
                (v.value, v.value, v.std_error)
            }
        };
        Ok(VolumeBracket {
            inner: inner * (1.0 - eps).powi(n) - 3.0 * mc_error,
            outer: outer * (1.0 + eps).powi(n) + 3.0 * mc_error,
            support_uncertainty: eps,
            mc_error,
        })
    }

    pub fn write_csv<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        let n = self.directions.first().map_or(0, |d| d.dim());
        let cols: Vec<String> = (0..n).map(|k| format!("u{k}")).collect();
        writeln!(w, "{},h,lambda_lo,lambda_hi,residual,backend", cols.join(","))?;
        for ((u, h), r) in self.directions.iter().zip(&self.support).zip(&self.reports) {
            let us: Vec<String> = u.iter().map(|c| format!("{c:.11e}")).collect();
            writeln!(
                w,
                "{},{h:.11e},{:.11e},{:.11e},{:.11e},{}",
                us.join(","),
                r.bracket.0,
                r.bracket.1,
                r.residual,
                r.backend
            )?;
        }
        Ok(())
    }
}

/// Smallest area of a polygon with one vertex on every edge of the convex
/// polygon `poly`; a lower bound for any convex body whose support function
/// agrees with that of `poly` on all edge normals.
///
/// The removed corner areas are bilinear in the contact positions, so the
/// optimum has each contact at an edge endpoint; corner `j` loses area only
/// when the contact on edge `j` sits at its start and the one on edge `j + 1`
/// at its end. A cyclic two-state dynamic program picks the best pattern.
pub fn corner_cut_inner(poly: &[P2]) -> f64 {
    let m = poly.len();
    let area = crate::geom::polygon::shoelace(poly);
    if m < 3 {
        return 0.0;
    }
    // edge i runs poly[i] -> poly[i+1]; corner i sits at poly[i+1]
    let corner: Vec<f64> = (0..m)
        .map(|i| {
            let a = poly[i];
            let v = poly[(i + 1) % m];
            let b = poly[(i + 2) % m];
            0.5 * cross(v, a, b).abs()
        })
        .collect();
    // state: contact of edge i at start (0) or end (1)
    let mut best = 0.0f64;
    for first in 0..2usize {
        let mut dp = [f64::NEG_INFINITY; 2];
        dp[first] = 0.0;
        for i in 0..m - 1 {
            let mut next = [f64::NEG_INFINITY; 2];
            for s in 0..2 {
                for t in 0..2 {
                    let gain = if s == 0 && t == 1 { corner[i] } else { 0.0 };
                    next[t] = next[t].max(dp[s] + gain);
                }
            }
            dp = next;
        }
        for s in 0..2 {
            let gain = if s == 0 && first == 1 { corner[m - 1] } else { 0.0 };
            best = best.max(dp[s] + gain);
        }
    }
    (area - best).max(0.0)
}

/// `{q : u_i . q <= h_i - 2 R d}` lies inside any convex body with support
/// `h_i` at `u_i` and outradius at most `R`, where `d` is the largest chord
/// distance from a sphere point to the grid.
fn lipschitz_inner_3d(directions: &[Direction], support: &[f64], outer: &Polytope) -> Result<f64> {
    let res = match Body::support_sampled(directions.to_vec(), support.to_vec())?.radii().grid_resolution {
        Some(r) => r,
        None => return Ok(0.0),
    };
    let d = 2.0 * (res / 2.0).sin();
    let margin = 2.0 * outer.outradius() * d;
    let shrunk: Vec<f64> = support.iter().map(|h| h - margin).collect();
    if shrunk.iter().any(|h| *h <= 1e-9) {
        return Ok(0.0);
    }
    Body::support_sampled(directions.to_vec(), shrunk)?.volume_exact()
}

pub fn volume_ratio(
    body: &Body,
    phi: &OrliczFunction,
    omega: &WeightFunction,
    grid_size: usize,
    config: &SolverConfig,
) -> Result<VolumeRatio> {
    let gamma = build_centroid_body(body, phi, omega, grid_size, config)?;
    ratio_of(&gamma, body)
}

pub fn ratio_of(gamma: &CentroidBody, body: &Body) -> Result<VolumeRatio> {
    let b = gamma.volume_bracket()?;
    let k = body.volume()?;
    let (lo_k, hi_k) = (k.value - 3.0 * k.std_error, k.value + 3.0 * k.std_error);
    let inner = b.inner / hi_k;
    let outer = b.outer / lo_k;
    Ok(VolumeRatio { ratio: outer, inner, outer, error: outer - inner })
}

/// `max_u |h(Gamma(AK), u) - h(Gamma K, A^t u)| / h(Gamma K, A^t u)`.
pub fn equivariance_check(
    body: &Body,
    a: &LinearMap,
    phi: &OrliczFunction,
    omega: &WeightFunction,
    directions: &[Direction],
    config: &SolverConfig,
) -> Result<f64> {
    let image = body.apply_linear(a)?;
    let gaps: Vec<f64> = directions
        .par_iter()
        .map(|u| {
            let lhs = centroid_support_report(&image, phi, omega, u, config)?.lambda;
            let rhs = centroid_support_report(body, phi, omega, &a.apply_transpose(u), config)?.lambda;
            Ok((lhs - rhs).abs() / rhs)
        })
        .collect::<Result<_>>()?;
    Ok(gaps.into_iter().fold(0.0, f64::max))
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn disk() -> Body {
        Body::ball(2, 1.0).unwrap()
    }

    fn id() -> (OrliczFunction, WeightFunction) {
        (OrliczFunction::identity(), WeightFunction::one())
    }

    #[test]
    fn support_examples() {
        let (phi, omega) = id();
        let r = 4.0 / (3.0 * PI);
        assert!((centroid_support(&disk(), &phi, &omega, &[1.0, 0.0]).unwrap() - r).abs() < 1e-7);
        assert!((centroid_support(&disk(), &phi, &omega, &[2.0, 0.0]).unwrap() - 2.0 * r).abs() < 2e-7);
        let sq: Body = Polytope::cube(2, 1.0).unwrap().into();
        let v = centroid_support(&sq, &OrliczFunction::Power { p: 2.0 }, &omega, &[1.0, 0.0]).unwrap();
        assert!((v - 1.0 / 3f64.sqrt()).abs() < 1e-7);
    }

    #[test]
    fn disk_centroid_body_is_a_disk() {
        let (phi, omega) = id();
        let m = 64;
        let g = build_centroid_body(&disk(), &phi, &omega, m, &SolverConfig::default()).unwrap();
        let r = 4.0 / (3.0 * PI);
        let p = g.outer_polytope().unwrap();
        assert_eq!(p.vertices().len(), m);
        let circ = r / (PI / m as f64).cos();
        assert!((p.outradius() - circ).abs() < 1e-7);
        let b = g.volume_bracket().unwrap();
        assert!(b.contains(PI * r * r), "{b:?}");
        assert!(g.consistency_gap() < 1e-12);
        assert!(build_centroid_body(&disk(), &phi, &omega, 4, &SolverConfig::default()).is_err());
    }

    #[test]
    fn corner_cut_on_square() {
        // a diagonal segment has the same four support values as the square
        let sq = [[-1.0, -1.0], [1.0, -1.0], [1.0, 1.0], [-1.0, 1.0]];
        assert!(corner_cut_inner(&sq).abs() < 1e-14);
        // regular hexagon: the worst inscribed set is the triangle on alternate vertices
        let hex: Vec<P2> = (0..6).map(|k| [(PI * k as f64 / 3.0).cos(), (PI * k as f64 / 3.0).sin()]).collect();
        let expect = 3.0 * 3f64.sqrt() / 4.0;
        assert!((corner_cut_inner(&hex) - expect).abs() < 1e-14);
    }

    #[test]
    fn equivariance_examples() {
        let (phi, omega) = id();
        let dirs = grid::circle(8);
        let cfg = SolverConfig { richardson: false, ..Default::default() };
        let e = equivariance_check(&disk(), &LinearMap::identity(2), &phi, &omega, &dirs, &cfg).unwrap();
        assert_eq!(e, 0.0);
        let e = equivariance_check(&disk(), &LinearMap::scaling(2, 3.0).unwrap(), &phi, &omega, &dirs, &cfg).unwrap();
        assert!(e <= 1e-6);
        let sq: Body = Polytope::cube(2, 1.0).unwrap().into();
        let shear = LinearMap::from_rows(&[vec![1.0, 1.0], vec![0.0, 1.0]]).unwrap();
        let e = equivariance_check(&sq, &shear, &phi, &omega, &dirs, &cfg).unwrap();
        assert!(e <= 1e-5, "{e}");
    }
}
