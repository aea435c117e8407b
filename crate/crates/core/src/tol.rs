//! Centralized numeric tolerances.

/// Absolute tolerance for geometric predicates (membership, facet offsets).
pub const GEOM_EPS: f64 = 1e-9;

/// Relative tolerance for comparing computed reals.
pub const REL_TOL: f64 = 1e-6;

/// Allowed deviation of a unit vector's norm from one.
pub const UNIT_TOL: f64 = 1e-12;

/// Smallest |det A| accepted for a GL(n) action.
pub const SINGULAR_DET: f64 = 1e-12;

/// Absolute tolerance of the bisection that inverts distribution functions.
pub const INVERSE_TOL: f64 = 1e-9;

/// Allowed increase between consecutive tabulated rearrangement values.
pub const MONOTONE_TOL: f64 = 1e-7;

/// Functional values above this are treated as saturated (+infinity).
pub const PHI_SATURATION: f64 = 1e12;
