//! Steiner symmetrization, chord decompositions and the overgraph/undergraph
//! apparatus.

mod checks;
mod planar;
mod schedule;
mod spatial;

pub use checks::{
    inclusion_from, lemma41_inequality_check, lemma41_with, lemma42_inclusion_check, maps_s_t_check,
    maps_s_t_check_seeded, InclusionReport, MapsReport, SteinerInequality, MAPS_P_THRESHOLD, STEINER_SLACK_TOL,
};
pub use schedule::{
    default_schedule, run_schedule, run_schedule_visit, symmetrization_schedule, symmetrization_schedule_with, ScheduleOptions,
    SymmetrizationTrace, TraceStep,
};

use crate::bodies::{Body, Polytope, Representation};
use crate::error::{Error, Result};
use crate::geom::hull3::P3;
use crate::geom::polygon::{convex_hull, cross, P2};
use crate::linalg::{axpy, dot, norm, orthonormal_complement, Direction};

/// Default simplification budget per step, relative to the body volume.
pub const DEFAULT_AREA_BUDGET: f64 = 1e-9;

/// Projection `K_u` in the coordinates of an orthonormal basis of `u⊥`.
#[derive(Clone, Debug)]
pub enum Projection {
    Interval { lo: f64, hi: f64 },
    Polygon(Vec<P2>),
    /// `{z : z^t S^{-1} z <= 1}`
    Ellipse { shape: [[f64; 2]; 2] },
}

/// `K` seen along `u`: the projection `K_u` and, over it, the overgraph `g`
/// and undergraph `f`, so `K = {y' + t u : -f(y') <= t <= g(y')}`.
#[derive(Clone, Debug)]
pub struct ChordDecomposition {
    body: Body,
    u: Direction,
    basis: Vec<Vec<f64>>,
    projection: Projection,
}

impl ChordDecomposition {
    pub fn new(body: &Body, u: &Direction) -> Result<Self> {
        let n = body.dim();
        if u.dim() != n {
            return Err(Error::DimensionMismatch { expected: n, got: u.dim() });
        }
        if !(n == 2 || n == 3) {
            return Err(Error::DimensionUnsupported { dim: n, what: "chord decompositions" });
        }
        let basis = orthonormal_complement(u.as_slice());
        let projection = if n == 2 {
            let w = &basis[0];
            let mw: Vec<f64> = w.iter().map(|c| -c).collect();
            Projection::Interval { lo: -body.support(&mw), hi: body.support(w) }
        } else {
            match body.repr() {
                Representation::Ball { radius } => {
                    let r2 = radius * radius;
                    Projection::Ellipse { shape: [[r2, 0.0], [0.0, r2]] }
                }
                Representation::Ellipsoid(e) => {
                    let m = e.shape();
                    let q = |a: &[f64], b: &[f64]| {
                        let mut s = 0.0;
                        for i in 0..3 {
                            for j in 0..3 {
                                s += a[i] * m[(i, j)] * b[j];
                            }
                        }
                        s
                    };
                    let off = q(&basis[0], &basis[1]);
                    Projection::Ellipse { shape: [[q(&basis[0], &basis[0]), off], [off, q(&basis[1], &basis[1])]] }
                }
                _ => {
                    let poly = polytope_of(body)?;
                    let pts: Vec<P2> =
                        poly.vertices().iter().map(|v| [dot(v, &basis[0]), dot(v, &basis[1])]).collect();
                    let scale = pts.iter().flat_map(|p| p.iter().map(|c| c.abs())).fold(0.0f64, f64::max);
                    Projection::Polygon(convex_hull(&pts, 1e-14 * scale * scale))
                }
            }
        };
        Ok(Self { body: body.clone(), u: u.clone(), basis, projection })
    }

    pub fn direction(&self) -> &Direction {
        &self.u
    }

    /// Orthonormal basis of `u⊥`.
    pub fn basis(&self) -> &[Vec<f64>] {
        &self.basis
    }

    pub fn projection(&self) -> &Projection {
        &self.projection
    }

    /// Splits `y = y' + t u` with `y'` in basis coordinates.
    pub fn coords(&self, y: &[f64]) -> (Vec<f64>, f64) {
        (self.basis.iter().map(|b| dot(b, y)).collect(), dot(self.u.as_slice(), y))
    }

    /// `y' + t u` from basis coordinates.
    pub fn lift(&self, z: &[f64], t: f64) -> Vec<f64> {
        let mut y: Vec<f64> = self.u.iter().map(|c| c * t).collect();
        for (b, c) in self.basis.iter().zip(z) {
            for (yi, bi) in y.iter_mut().zip(b) {
                *yi += c * bi;
            }
        }
        y
    }

    /// Signed distance from `z` to the relative boundary of `K_u`, positive inside.
    /// Exact for polytopal projections, a lower bound on the magnitude for ellipses.
    pub fn boundary_distance(&self, z: &[f64]) -> f64 {
        match &self.projection {
            Projection::Interval { lo, hi } => (z[0] - lo).min(hi - z[0]),
            Projection::Polygon(poly) => {
                let m = poly.len();
                (0..m)
                    .map(|i| {
                        let (a, b) = (poly[i], poly[(i + 1) % m]);
                        let len = ((b[0] - a[0]).powi(2) + (b[1] - a[1]).powi(2)).sqrt();
                        cross(a, b, [z[0], z[1]]) / len
                    })
                    .fold(f64::INFINITY, f64::min)
            }
            Projection::Ellipse { shape: s } => {
                let det = s[0][0] * s[1][1] - s[0][1] * s[1][0];
                let g2 = (s[1][1] * z[0] * z[0] - 2.0 * s[0][1] * z[0] * z[1] + s[0][0] * z[1] * z[1]) / det;
                let tr = s[0][0] + s[1][1];
                let lmin = 0.5 * (tr - (tr * tr - 4.0 * det).max(0.0).sqrt());
                (1.0 - g2.sqrt()) * lmin.sqrt()
            }
        }
    }

    /// `(-f(y'), g(y'))`, the chord parameters over basis coordinates `z`.
    pub fn chord(&self, z: &[f64]) -> Option<(f64, f64)> {
        self.body.chord(&self.lift(z, 0.0), self.u.as_slice())
    }

    /// Overgraph `g`.
    pub fn over(&self, z: &[f64]) -> Result<f64> {
        Ok(self.chord_checked(z)?.1)
    }

    /// Undergraph `f`.
    pub fn under(&self, z: &[f64]) -> Result<f64> {
        Ok(-self.chord_checked(z)?.0)
    }

    /// `sigma = (f + g) / 2`.
    pub fn sigma(&self, z: &[f64]) -> Result<f64> {
        let (lo, hi) = self.chord_checked(z)?;
        Ok(0.5 * (hi - lo))
    }

    /// `m = (g - f) / 2`.
    pub fn midpoint(&self, z: &[f64]) -> Result<f64> {
        let (lo, hi) = self.chord_checked(z)?;
        Ok(0.5 * (hi + lo))
    }

    fn chord_checked(&self, z: &[f64]) -> Result<(f64, f64)> {
        self.chord(z).ok_or_else(|| Error::Domain(format!("{z:?} is outside the projection")))
    }
}

fn polytope_of(body: &Body) -> Result<&Polytope> {
    match body.repr() {
        Representation::Polytope(p) => Ok(p),
        Representation::SupportSampled(s) => s
            .polytope()
            .ok_or_else(|| Error::Unsupported("support-sampled body without an explicit polytope".into())),
        _ => Err(Error::Unsupported(format!("{} bodies have no vertex description", body.kind()))),
    }
}

/// `S_u K` with the area removed by simplification.
#[derive(Clone, Debug)]
pub struct Symmetrized {
    pub body: Body,
    /// Volume removed by pruning `sigma` breakpoints, absolute.
    pub simplified: f64,
}

/// `S_u K = {y' + t u : |t| <= sigma(y'), y' in K_u}`.
pub fn steiner_symmetrize(body: &Body, u: &Direction) -> Result<Body> {
    Ok(steiner_symmetrize_with(body, u, 0.0)?.body)
}

/// Symmetrization with `sigma` simplified under a volume budget relative to `|K|`.
pub fn steiner_symmetrize_with(body: &Body, u: &Direction, budget: f64) -> Result<Symmetrized> {
    let n = body.dim();
    if u.dim() != n {
        return Err(Error::DimensionMismatch { expected: n, got: u.dim() });
    }
    if !(n == 2 || n == 3) {
        return Err(Error::DimensionUnsupported { dim: n, what: "Steiner symmetrization" });
    }
    match body.repr() {
        Representation::Ball { .. } => return Ok(Symmetrized { body: body.clone(), simplified: 0.0 }),
        Representation::Ellipsoid(e) => {
            let q = e.shape().clone().try_inverse().ok_or(Error::SingularMap(e.det()))?;
            let uv = nalgebra::DVector::from_column_slice(u.as_slice());
            let qu = &q * &uv;
            let quu = uv.dot(&qu);
            let proj = &q - &qu * qu.transpose() / quu;
            let sym = proj + &uv * uv.transpose() * quu;
            let shape = sym.try_inverse().ok_or(Error::SingularMap(0.0))?;
            let shape = (&shape + shape.transpose()) * 0.5;
            return Ok(Symmetrized { body: Body::ellipsoid(shape)?, simplified: 0.0 });
        }
        _ => {}
    }
    let poly = polytope_of(body)?;
    let uv = u.as_slice();
    let (vertices, simplified) = if n == 2 {
        let area = poly.volume_exact()?;
        let (pts, removed) = planar::symmetrize(&poly.polygon().unwrap(), [uv[0], uv[1]], budget * area);
        (pts.iter().map(|p| p.to_vec()).collect::<Vec<_>>(), removed)
    } else {
        let basis = orthonormal_complement(uv);
        let b: [P3; 2] = [[basis[0][0], basis[0][1], basis[0][2]], [basis[1][0], basis[1][1], basis[1][2]]];
        let (verts, tris) = poly.triangles().unwrap();
        let mut out = Vec::new();
        for z in spatial::breakpoints(&verts, tris, b) {
            let y: Vec<f64> = (0..3).map(|i| z[0] * basis[0][i] + z[1] * basis[1][i]).collect();
            let sig = poly.chord(&y, uv).map_or(0.0, |(lo, hi)| 0.5 * (hi - lo).max(0.0));
            out.push(axpy(&y, sig, uv));
            if sig > 0.0 {
                out.push(axpy(&y, -sig, uv));
            }
        }
        (out, 0.0)
    };
    let sym = Polytope::from_vertices(&vertices).map_err(|e| match e {
        Error::OriginNotInterior(m) => Error::OriginNotInterior(format!("symmetral: {m}")),
        e => e,
    })?;
    Ok(Symmetrized { body: sym.into(), simplified })
}

/// Overgraph and undergraph at `y'` computed from the chord and from the
/// support minimizations `min_{x'} h(K, x' ± u) - x' . y'`.
#[derive(Clone, Debug)]
pub struct GraphFunctions {
    pub over: f64,
    pub under: f64,
    pub over_dual: f64,
    pub under_dual: f64,
    /// Minimizer `x'_1` for the overgraph, in `u⊥`.
    pub minimizer_over: Vec<f64>,
    /// Minimizer `x'_2` for the undergraph, in `u⊥`.
    pub minimizer_under: Vec<f64>,
    /// `2 R / r` when `|y'| <= r / 2`.
    pub minimizer_bound: Option<f64>,
}

impl GraphFunctions {
    pub fn bound_holds(&self) -> bool {
        self.minimizer_bound.map_or(true, |b| {
            norm(&self.minimizer_over) <= b * (1.0 + 1e-6) && norm(&self.minimizer_under) <= b * (1.0 + 1e-6)
        })
    }
}

/// Tolerance between the chord and the minimization values.
pub const GRAPH_TOL: f64 = 1e-6;

/// `(g_u(y'), f_u(y'))` two ways; `y'` is a point of `u⊥` in ambient coordinates.
pub fn graph_functions(body: &Body, u: &Direction, y: &[f64]) -> Result<GraphFunctions> {
    let dec = ChordDecomposition::new(body, u)?;
    if y.len() != body.dim() {
        return Err(Error::DimensionMismatch { expected: body.dim(), got: y.len() });
    }
    if dot(y, u.as_slice()).abs() > 1e-9 * (1.0 + norm(y)) {
        return Err(Error::Domain("y' must lie in the orthogonal complement of u".into()));
    }
    let (z, _) = dec.coords(y);
    let dist = dec.boundary_distance(&z);
    if dist <= 1e-9 {
        if dist < -1e-9 {
            return Err(Error::Domain(format!("{y:?} lies outside the projection")));
        }
        return Err(Error::BoundaryPoint(format!("{y:?} is within {:e} of the boundary", dist.abs())));
    }
    let (lo, hi) = dec.chord(&z).ok_or_else(|| Error::BoundaryPoint(format!("{y:?}")))?;
    let radii = body.radii();
    let bound = 2.0 * radii.outer / radii.inner;
    let minimize = |sign: f64| -> (f64, Vec<f64>) {
        let objective = |x: &[f64]| body.support(&dec.lift(x, sign)) - dot(x, &z);
        let mut half = (4.0 * bound).max(1.0);
        loop {
            let (v, x) = minimize_box(&objective, z.len(), half);
            if x.iter().all(|c| c.abs() < 0.9 * half) || half > 1e12 {
                return (v, dec.lift(&x, 0.0));
            }
            half *= 4.0;
        }
    };
    let (over_dual, x1) = minimize(1.0);
    let (under_dual, x2) = minimize(-1.0);
    let over = hi;
    let under = -lo;
    for (chord, dual) in [(over, over_dual), (under, under_dual)] {
        if (chord - dual).abs() > GRAPH_TOL {
            return Err(Error::GraphMismatch { chord, dual });
        }
    }
    Ok(GraphFunctions {
        over,
        under,
        over_dual,
        under_dual,
        minimizer_over: x1,
        minimizer_under: x2,
        minimizer_bound: (norm(y) <= 0.5 * radii.inner).then_some(bound),
    })
}

/// Golden section on `[-half, half]^d` (nested for `d = 2`) of a convex function.
fn minimize_box(f: &dyn Fn(&[f64]) -> f64, d: usize, half: f64) -> (f64, Vec<f64>) {
    let tol = 1e-13 * half;
    match d {
        1 => {
            let (x, v) = golden(|t| f(&[t]), -half, half, tol);
            (v, vec![x])
        }
        _ => {
            let inner = |s: f64| golden(|t| f(&[s, t]), -half, half, tol);
            let (s, v) = golden(|s| inner(s).1, -half, half, tol);
            (v, vec![s, inner(s).0])
        }
    }
}

fn golden(f: impl Fn(f64) -> f64, mut a: f64, mut b: f64, tol: f64) -> (f64, f64) {
    let g = 0.5 * (5f64.sqrt() - 1.0);
    let mut c = b - g * (b - a);
    let mut d = a + g * (b - a);
    let (mut fc, mut fd) = (f(c), f(d));
    while b - a > tol {
        if fc <= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - g * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + g * (b - a);
            fd = f(d);
        }
    }
    let x = 0.5 * (a + b);
    let fx = f(x);
    if fc.min(fd) < fx {
        if fc <= fd {
            (c, fc)
        } else {
            (d, fd)
        }
    } else {
        (x, fx)
    }
}

/// Distance of `y` from the symmetric position: `max |h(K,x'+tu) - h(K,x'-tu)|`.
pub fn symmetry_defect(body: &Body, u: &Direction, probes: &[Vec<f64>]) -> f64 {
    let uv = u.as_slice();
    probes
        .iter()
        .map(|x| {
            let t = dot(x, uv);
            let reflected = axpy(x, -2.0 * t, uv);
            (body.support(x) - body.support(&reflected)).abs()
        })
        .fold(0.0, f64::max)
}
