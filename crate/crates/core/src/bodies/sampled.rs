use minilp::{ComparisonOp, OptimizationDirection, Problem};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::polytope::Polytope;
use crate::error::{Error, Result};
use crate::geom::hull3::{convex_hull_3d, dot3, norm3, P3};
use crate::geom::polygon::{clip_halfplane, P2};
use crate::linalg::{dot, Direction, LinearMap};
use crate::tol::GEOM_EPS;

/// Body given by support values on a direction grid; the body is the
/// convex closure `{y : u_i . y <= h_i for all i}`.
#[derive(Clone, Debug)]
pub struct SupportSampled {
    dim: usize,
    directions: Vec<Direction>,
    values: Vec<f64>,
    outer: Option<Polytope>,
    resolution: f64,
}

impl SupportSampled {
    pub fn new(directions: Vec<Direction>, values: Vec<f64>) -> Result<Self> {
        if directions.len() != values.len() {
            return Err(Error::InvalidBody(format!(
                "{} directions but {} support values",
                directions.len(),
                values.len()
            )));
        }
        let dim = directions.first().map(|d| d.dim()).ok_or_else(|| Error::InvalidBody("empty grid".into()))?;
        for (i, (d, h)) in directions.iter().zip(&values).enumerate() {
            if d.dim() != dim {
                return Err(Error::InvalidBody(format!("direction {i} has dimension {}, expected {dim}", d.dim())));
            }
            if !h.is_finite() {
                return Err(Error::InvalidBody(format!("support value {i} is not finite")));
            }
            if !(*h > GEOM_EPS) {
                return Err(Error::OriginNotInterior(format!("support value {i} is {h:e}")));
            }
        }
        let resolution = match dim {
            2 => circle_resolution(&directions),
            3 => sphere_resolution(&directions)?,
            _ => sampled_resolution(&directions),
        };
        if !(resolution < std::f64::consts::FRAC_PI_2 - 1e-9) {
            return Err(Error::InvalidBody("direction grid does not bound the body".into()));
        }
        let outer = match dim {
            2 => Some(outer_polygon(&directions, &values, resolution)?),
            3 => Some(outer_polyhedron(&directions, &values)?),
            _ => None,
        };
        Ok(Self { dim, directions, values, outer, resolution })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn directions(&self) -> &[Direction] {
        &self.directions
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// The closure as an explicit polytope (n = 2, 3).
    pub fn polytope(&self) -> Option<&Polytope> {
        self.outer.as_ref()
    }

    /// Largest angle from any unit vector to its nearest grid direction.
    pub fn resolution(&self) -> f64 {
        self.resolution
    }

    pub fn support(&self, x: &[f64]) -> f64 {
        match &self.outer {
            Some(p) => p.support(x),
            None => self.lp_support(x),
        }
    }

    fn lp_support(&self, x: &[f64]) -> f64 {
        let mut problem = Problem::new(OptimizationDirection::Maximize);
        let vars: Vec<_> = x.iter().map(|&c| problem.add_var(c, (f64::NEG_INFINITY, f64::INFINITY))).collect();
        for (u, h) in self.directions.iter().zip(&self.values) {
            let expr: Vec<_> = vars.iter().copied().zip(u.iter().copied()).collect();
            problem.add_constraint(expr.as_slice(), ComparisonOp::Le, *h);
        }
        match problem.solve() {
            Ok(sol) => sol.objective(),
            Err(_) => f64::NAN,
        }
    }

    pub fn radial(&self, u: &[f64]) -> f64 {
        self.directions
            .iter()
            .zip(&self.values)
            .filter_map(|(d, h)| {
                let du = dot(d, u);
                (du > 0.0).then(|| h / du)
            })
            .fold(f64::INFINITY, f64::min)
    }

    pub fn inradius(&self) -> f64 {
        self.values.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn outradius(&self) -> f64 {
        match &self.outer {
            Some(p) => p.outradius(),
            None => self.directions.iter().map(|d| self.radial(d)).fold(0.0, f64::max),
        }
    }

    pub fn contains(&self, y: &[f64], tol: f64) -> bool {
        self.directions.iter().zip(&self.values).all(|(d, h)| dot(d, y) <= h + tol)
    }

    pub fn chord(&self, base: &[f64], dir: &[f64]) -> Option<(f64, f64)> {
        let (mut lo, mut hi) = (f64::NEG_INFINITY, f64::INFINITY);
        for (d, h) in self.directions.iter().zip(&self.values) {
            let ad = dot(d, dir);
            let slack = h - dot(d, base);
            if ad.abs() < 1e-15 {
                if slack < -GEOM_EPS {
                    return None;
                }
            } else if ad > 0.0 {
                hi = hi.min(slack / ad);
            } else {
                lo = lo.max(slack / ad);
            }
        }
        (lo <= hi).then_some((lo, hi))
    }

    pub fn volume_exact(&self) -> Result<f64> {
        match &self.outer {
            Some(p) => p.volume_exact(),
            None => Err(Error::DimensionUnsupported { dim: self.dim, what: "exact volume of a sampled body" }),
        }
    }

    /// Coordinate bounding box of the closure, by linear programming.
    pub fn bounding_box(&self) -> Vec<(f64, f64)> {
        (0..self.dim)
            .map(|k| {
                let mut e = vec![0.0; self.dim];
                e[k] = 1.0;
                let hi = self.support(&e);
                e[k] = -1.0;
                (-self.support(&e), hi)
            })
            .collect()
    }

    /// Re-evaluates `h(AK, u_i) = h(K, A^t u_i)` on the same grid.
    pub fn apply_linear(&self, a: &LinearMap) -> Result<Self> {
        let values = self.directions.iter().map(|u| self.support(&a.apply_transpose(u))).collect();
        Self::new(self.directions.clone(), values)
    }
}

fn circle_resolution(dirs: &[Direction]) -> f64 {
    let mut angles: Vec<f64> = dirs.iter().map(|d| d[1].atan2(d[0])).collect();
    angles.sort_by(f64::total_cmp);
    let mut gap: f64 = angles[0] + 2.0 * std::f64::consts::PI - angles[angles.len() - 1];
    for w in angles.windows(2) {
        gap = gap.max(w[1] - w[0]);
    }
    gap / 2.0
}

/// Covering radius of a spherical grid from the hull of its points: every
/// uncovered cap is centered on a hull-facet normal.
fn sphere_resolution(dirs: &[Direction]) -> Result<f64> {
    let pts: Vec<P3> = dirs.iter().map(|d| [d[0], d[1], d[2]]).collect();
    let hull = convex_hull_3d(&pts, 1e-12)
        .map_err(|_| Error::InvalidBody("direction grid does not span R^3".into()))?;
    let mut worst: f64 = 0.0;
    for t in &hull.triangles {
        let [a, b, c] = t.map(|i| hull.vertices[i]);
        let n = crate::geom::hull3::cross3(crate::geom::hull3::sub3(b, a), crate::geom::hull3::sub3(c, a));
        let len = norm3(n);
        let n = [n[0] / len, n[1] / len, n[2] / len];
        let d = dot3(n, a);
        if d <= 0.0 {
            return Ok(std::f64::consts::PI);
        }
        worst = worst.max(d.clamp(-1.0, 1.0).acos());
    }
    Ok(worst)
}

fn sampled_resolution(dirs: &[Direction]) -> f64 {
    use rand_distr::{Distribution, StandardNormal};
    let n = dirs[0].dim();
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
    let mut worst: f64 = 0.0;
    for _ in 0..20_000 {
        let v: Vec<f64> = (0..n).map(|_| StandardNormal.sample(&mut rng)).collect();
        let len = dot(&v, &v).sqrt();
        let best = dirs.iter().map(|d| dot(d, &v) / len).fold(-1.0, f64::max);
        worst = worst.max(best.clamp(-1.0, 1.0).acos());
    }
    worst
}

fn outer_polygon(dirs: &[Direction], values: &[f64], resolution: f64) -> Result<Polytope> {
    let hmax = values.iter().copied().fold(0.0, f64::max);
    let big = 2.0 * hmax / resolution.cos();
    let mut poly: Vec<P2> = vec![[-big, -big], [big, -big], [big, big], [-big, big]];
    for (d, h) in dirs.iter().zip(values) {
        poly = clip_halfplane(&poly, [d[0], d[1]], *h);
    }
    let pts: Vec<Vec<f64>> = poly.iter().map(|p| p.to_vec()).collect();
    Polytope::from_vertices(&pts)
}

/// `{y : u_i . y <= h_i}` is the polar of `conv{u_i / h_i}`: each facet
/// `n . p = d` of that hull yields the vertex `n / d`.
fn outer_polyhedron(dirs: &[Direction], values: &[f64]) -> Result<Polytope> {
    let pts: Vec<P3> = dirs.iter().zip(values).map(|(d, h)| [d[0] / h, d[1] / h, d[2] / h]).collect();
    let hull = convex_hull_3d(&pts, 1e-12)?;
    let vertices: Vec<Vec<f64>> = hull
        .facet_planes(1e-12)
        .into_iter()
        .map(|(n, d)| if d > 0.0 { Ok(vec![n[0] / d, n[1] / d, n[2] / d]) } else { Err(()) })
        .collect::<std::result::Result<_, _>>()
        .map_err(|_| Error::InvalidBody("direction grid does not bound the body".into()))?;
    Polytope::from_vertices(&vertices)
}
