//! Star and convex bodies: polytopes, balls, ellipsoids and bodies known
//! only through sampled support values.

pub mod grid;
pub mod json;
mod polytope;
pub mod sampling;
mod sampled;

use nalgebra::{DMatrix, SymmetricEigen};

pub use polytope::{Halfspace, Polytope};
pub use sampled::SupportSampled;

use crate::error::{Error, Result};
use crate::linalg::{dot, Direction, LinearMap};

/// Volume of the unit ball in R^n.
pub fn unit_ball_volume(n: usize) -> f64 {
    // omega_n = 2 pi / n * omega_{n-2}
    let mut w = if n % 2 == 0 { 1.0 } else { 2.0 };
    let mut k = 2 + n % 2;
    while k <= n {
        w *= 2.0 * std::f64::consts::PI / k as f64;
        k += 2;
    }
    w
}

/// Ellipsoid `{y : y^t M^{-1} y <= 1}` for a positive definite shape `M`.
#[derive(Clone, Debug)]
pub struct Ellipsoid {
    shape: DMatrix<f64>,
    inverse: DMatrix<f64>,
    eigenvalues: Vec<f64>,
}

impl Ellipsoid {
    pub fn new(shape: DMatrix<f64>) -> Result<Self> {
        let n = shape.nrows();
        if n == 0 || shape.ncols() != n {
            return Err(Error::InvalidBody("shape matrix must be square".into()));
        }
        let scale = shape.amax().max(f64::MIN_POSITIVE);
        for i in 0..n {
            for j in 0..i {
                if (shape[(i, j)] - shape[(j, i)]).abs() > 1e-12 * scale {
                    return Err(Error::InvalidBody(format!("shape matrix is not symmetric at ({i}, {j})")));
                }
            }
        }
        let sym = (&shape + shape.transpose()) * 0.5;
        let eig = SymmetricEigen::new(sym.clone());
        let mut eigenvalues: Vec<f64> = eig.eigenvalues.iter().copied().collect();
        eigenvalues.sort_by(f64::total_cmp);
        if !(eigenvalues[0] > 0.0) {
            return Err(Error::InvalidBody(format!(
                "shape matrix is not positive definite (eigenvalue {:e})",
                eigenvalues[0]
            )));
        }
        let inverse = sym.clone().try_inverse().ok_or_else(|| Error::InvalidBody("shape matrix is singular".into()))?;
        Ok(Self { shape: sym, inverse, eigenvalues })
    }

    pub fn diagonal(diag: &[f64]) -> Result<Self> {
        let n = diag.len();
        Self::new(DMatrix::from_fn(n, n, |i, j| if i == j { diag[i] } else { 0.0 }))
    }

    pub fn dim(&self) -> usize {
        self.shape.nrows()
    }

    pub fn shape(&self) -> &DMatrix<f64> {
        &self.shape
    }

    /// `x^t M x`, the squared support value.
    pub fn quadratic(&self, x: &[f64]) -> f64 {
        quad(&self.shape, x)
    }

    /// `y^t M^{-1} y`, the squared gauge.
    pub fn inverse_quadratic(&self, y: &[f64]) -> f64 {
        quad(&self.inverse, y)
    }

    pub fn det(&self) -> f64 {
        self.eigenvalues.iter().product()
    }

    fn image(&self, a: &LinearMap) -> Result<Self> {
        let m = a.matrix() * &self.shape * a.matrix().transpose();
        Self::new((&m + m.transpose()) * 0.5)
    }
}

fn quad(m: &DMatrix<f64>, x: &[f64]) -> f64 {
    let n = x.len();
    let mut s = 0.0;
    for i in 0..n {
        for j in 0..n {
            s += x[i] * m[(i, j)] * x[j];
        }
    }
    s
}

#[derive(Clone, Debug)]
pub enum Representation {
    Polytope(Polytope),
    Ball { radius: f64 },
    Ellipsoid(Ellipsoid),
    SupportSampled(SupportSampled),
}

/// Inradius and outradius about the origin.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Radii {
    pub inner: f64,
    pub outer: f64,
    /// Angular covering radius of the direction grid used, for sampled bodies.
    pub grid_resolution: Option<f64>,
}

/// A volume, possibly estimated by Monte Carlo.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Volume {
    pub value: f64,
    /// One standard error; zero for exact volumes.
    pub std_error: f64,
    pub exact: bool,
}

pub const DEFAULT_VOLUME_SAMPLES: usize = 1_000_000;
pub const DEFAULT_VOLUME_SEED: u64 = 0x0b0d_1e5;

/// A body in R^n containing the origin in its interior.
#[derive(Clone, Debug)]
pub struct Body {
    dim: usize,
    repr: Representation,
}

impl Body {
    pub fn ball(dim: usize, radius: f64) -> Result<Self> {
        if dim == 0 {
            return Err(Error::InvalidBody("dimension must be positive".into()));
        }
        if !(radius > 0.0 && radius.is_finite()) {
            return Err(Error::InvalidBody(format!("ball radius must be positive, got {radius}")));
        }
        Ok(Self { dim, repr: Representation::Ball { radius } })
    }

    pub fn ellipsoid(shape: DMatrix<f64>) -> Result<Self> {
        let e = Ellipsoid::new(shape)?;
        Ok(Self { dim: e.dim(), repr: Representation::Ellipsoid(e) })
    }

    pub fn ellipsoid_diagonal(diag: &[f64]) -> Result<Self> {
        let e = Ellipsoid::diagonal(diag)?;
        Ok(Self { dim: e.dim(), repr: Representation::Ellipsoid(e) })
    }

    pub fn polytope(vertices: &[Vec<f64>]) -> Result<Self> {
        Ok(Polytope::from_vertices(vertices)?.into())
    }

    pub fn support_sampled(directions: Vec<Direction>, values: Vec<f64>) -> Result<Self> {
        let s = SupportSampled::new(directions, values)?;
        Ok(Self { dim: s.dim(), repr: Representation::SupportSampled(s) })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn repr(&self) -> &Representation {
        &self.repr
    }

    pub fn as_polytope(&self) -> Option<&Polytope> {
        match &self.repr {
            Representation::Polytope(p) => Some(p),
            _ => None,
        }
    }

    fn check_dim(&self, x: &[f64]) -> Result<()> {
        if x.len() != self.dim {
            return Err(Error::DimensionMismatch { expected: self.dim, got: x.len() });
        }
        Ok(())
    }

    /// `h_K(x) = max_{y in K} x . y` for any (not necessarily unit) `x`.
    pub fn support(&self, x: &[f64]) -> f64 {
        match &self.repr {
            Representation::Polytope(p) => p.support(x),
            Representation::Ball { radius } => radius * dot(x, x).sqrt(),
            Representation::Ellipsoid(e) => e.quadratic(x).max(0.0).sqrt(),
            Representation::SupportSampled(s) => s.support(x),
        }
    }

    /// `rho_K(u) = max{lambda : lambda u in K}`.
    pub fn radial(&self, u: &Direction) -> Result<f64> {
        self.check_dim(u)?;
        Ok(match &self.repr {
            Representation::Polytope(p) => p.radial(u),
            Representation::Ball { radius } => *radius,
            Representation::Ellipsoid(e) => 1.0 / e.inverse_quadratic(u).sqrt(),
            Representation::SupportSampled(s) => s.radial(u),
        })
    }

    pub fn radii(&self) -> Radii {
        match &self.repr {
            Representation::Polytope(p) => Radii { inner: p.inradius(), outer: p.outradius(), grid_resolution: None },
            Representation::Ball { radius } => Radii { inner: *radius, outer: *radius, grid_resolution: None },
            Representation::Ellipsoid(e) => Radii {
                inner: e.eigenvalues[0].sqrt(),
                outer: e.eigenvalues[e.eigenvalues.len() - 1].sqrt(),
                grid_resolution: None,
            },
            Representation::SupportSampled(s) => {
                Radii { inner: s.inradius(), outer: s.outradius(), grid_resolution: Some(s.resolution()) }
            }
        }
    }

    /// Exact volume; fails for bodies that need Monte Carlo.
    pub fn volume_exact(&self) -> Result<f64> {
        match &self.repr {
            Representation::Polytope(p) => p.volume_exact(),
            Representation::Ball { radius } => Ok(unit_ball_volume(self.dim) * radius.powi(self.dim as i32)),
            Representation::Ellipsoid(e) => Ok(unit_ball_volume(self.dim) * e.det().sqrt()),
            Representation::SupportSampled(s) => s.volume_exact(),
        }
    }

    /// Exact volume where available, otherwise a Monte Carlo estimate with
    /// the default sample count and seed.
    pub fn volume(&self) -> Result<Volume> {
        self.volume_with(DEFAULT_VOLUME_SAMPLES, DEFAULT_VOLUME_SEED)
    }

    pub fn volume_with(&self, samples: usize, seed: u64) -> Result<Volume> {
        match self.volume_exact() {
            Ok(value) => Ok(Volume { value, std_error: 0.0, exact: true }),
            Err(Error::DimensionUnsupported { .. }) => {
                let (value, std_error) = sampling::monte_carlo_volume(self, samples, seed)?;
                Ok(Volume { value, std_error, exact: false })
            }
            Err(e) => Err(e),
        }
    }

    pub fn contains(&self, y: &[f64], tol: f64) -> bool {
        match &self.repr {
            Representation::Polytope(p) => p.contains(y, tol),
            Representation::Ball { radius } => dot(y, y).sqrt() <= radius + tol,
            Representation::Ellipsoid(e) => e.inverse_quadratic(y).sqrt() <= 1.0 + tol,
            Representation::SupportSampled(s) => s.contains(y, tol),
        }
    }

    /// Parameter interval `{t : base + t dir in K}`, if nonempty.
    pub fn chord(&self, base: &[f64], dir: &[f64]) -> Option<(f64, f64)> {
        match &self.repr {
            Representation::Polytope(p) => p.chord(base, dir),
            Representation::Ball { radius } => {
                quadratic_chord(dot(dir, dir), dot(base, dir), dot(base, base) - radius * radius)
            }
            Representation::Ellipsoid(e) => {
                let a = e.inverse_quadratic(dir);
                let b = {
                    let n = base.len();
                    let mut s = 0.0;
                    for i in 0..n {
                        for j in 0..n {
                            s += base[i] * e.inverse[(i, j)] * dir[j];
                        }
                    }
                    s
                };
                quadratic_chord(a, b, e.inverse_quadratic(base) - 1.0)
            }
            Representation::SupportSampled(s) => s.chord(base, dir),
        }
    }

    /// Image `AK`, kept in the same representation class where it is closed.
    pub fn apply_linear(&self, a: &LinearMap) -> Result<Self> {
        if a.dim() != self.dim {
            return Err(Error::DimensionMismatch { expected: self.dim, got: a.dim() });
        }
        Ok(match &self.repr {
            Representation::Polytope(p) => p.apply_linear(a)?.into(),
            Representation::Ball { radius } => match a.similarity_factor() {
                Some(c) => Self::ball(self.dim, c * radius)?,
                None => {
                    let m = a.matrix() * a.matrix().transpose() * (radius * radius);
                    Self::ellipsoid((&m + m.transpose()) * 0.5)?
                }
            },
            Representation::Ellipsoid(e) => {
                let img = e.image(a)?;
                Self { dim: self.dim, repr: Representation::Ellipsoid(img) }
            }
            Representation::SupportSampled(s) => {
                let img = s.apply_linear(a)?;
                Self { dim: self.dim, repr: Representation::SupportSampled(img) }
            }
        })
    }

    /// Short description used in outputs.
    pub fn kind(&self) -> &'static str {
        match &self.repr {
            Representation::Polytope(_) => "polytope",
            Representation::Ball { .. } => "ball",
            Representation::Ellipsoid(_) => "ellipsoid",
            Representation::SupportSampled(_) => "support_sampled",
        }
    }
}

/// Roots of `a t^2 + 2 b t + c <= 0` as an interval.
fn quadratic_chord(a: f64, b: f64, c: f64) -> Option<(f64, f64)> {
    let disc = b * b - a * c;
    if disc < 0.0 || a <= 0.0 {
        return None;
    }
    let r = disc.sqrt();
    Some(((-b - r) / a, (-b + r) / a))
}

impl From<Polytope> for Body {
    fn from(p: Polytope) -> Self {
        Self { dim: p.dim(), repr: Representation::Polytope(p) }
    }
}
