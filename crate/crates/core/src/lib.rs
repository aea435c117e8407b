//! Orlicz-Lorentz centroid bodies of convex bodies, Steiner symmetrization,
//! and numerical checks of the associated support-function inequalities.

pub mod bodies;
pub mod centroid;
pub mod error;
pub mod geom;
pub mod linalg;
pub mod orlicz;
pub mod rearrange;
pub mod steiner;
pub mod tol;

pub use bodies::{Body, Polytope};
pub use error::{Error, Result};
pub use linalg::{Direction, LinearMap};
