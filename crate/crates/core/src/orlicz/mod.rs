//! Orlicz functions, weights and the Orlicz-Lorentz norm of a rearrangement.

mod solve;

use serde::{Deserialize, Serialize};

pub use solve::{lemma33_bounds, norm_solve, phi_functional, Lemma33Bounds, NormSolveReport, SolverConfig, WeightFault};

use crate::error::{Error, Result};

/// Convex increasing `phi` with `phi(0) = 0`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case", deny_unknown_fields)]
pub enum OrliczFunction {
    /// `s^p`, `p >= 1`
    Power { p: f64 },
    /// `e^{c s} - 1`
    ScaledExp { c: f64 },
    /// Linear interpolation of `(0, 0)` and the given `[s, phi(s)]` points,
    /// extended past the last point with the last slope.
    PiecewiseLinear { breakpoints: Vec<[f64; 2]> },
}

impl OrliczFunction {
    pub fn identity() -> Self {
        Self::Power { p: 1.0 }
    }

    pub fn power(p: f64) -> Result<Self> {
        let f = Self::Power { p };
        f.validate()?;
        Ok(f)
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            Self::Power { p } if !(*p >= 1.0 && p.is_finite()) => {
                Err(Error::InvalidFunction(format!("power phi needs p >= 1, got {p}")))
            }
            Self::ScaledExp { c } if !(*c > 0.0 && c.is_finite()) => {
                Err(Error::InvalidFunction(format!("exponential phi needs c > 0, got {c}")))
            }
            Self::PiecewiseLinear { breakpoints } => {
                if breakpoints.is_empty() {
                    return Err(Error::InvalidFunction("piecewise linear phi needs a breakpoint".into()));
                }
                let mut prev = [0.0, 0.0];
                let mut slope = 0.0;
                for (i, b) in breakpoints.iter().enumerate() {
                    if !(b[0] > prev[0]) || !b[0].is_finite() || !b[1].is_finite() {
                        return Err(Error::InvalidFunction(format!("breakpoint {i} is not increasing in s")));
                    }
                    let m = (b[1] - prev[1]) / (b[0] - prev[0]);
                    if !(m > 0.0) {
                        return Err(Error::InvalidFunction(format!("phi is not increasing before breakpoint {i}")));
                    }
                    if m < slope * (1.0 - 1e-12) {
                        return Err(Error::InvalidFunction(format!("phi is not convex at breakpoint {i}")));
                    }
                    slope = m;
                    prev = *b;
                }
                Ok(())
            }
            _ => Ok(()),
        }
    }

    pub fn eval(&self, s: f64) -> f64 {
        match self {
            Self::Power { p } => {
                if *p == 1.0 {
                    s
                } else if *p == 2.0 {
                    s * s
                } else {
                    s.powf(*p)
                }
            }
            Self::ScaledExp { c } => (c * s).min(700.0).exp_m1(),
            Self::PiecewiseLinear { breakpoints } => {
                let mut prev = [0.0, 0.0];
                for b in breakpoints {
                    if s <= b[0] {
                        return prev[1] + (b[1] - prev[1]) * (s - prev[0]) / (b[0] - prev[0]);
                    }
                    prev = *b;
                }
                let n = breakpoints.len();
                let before = if n >= 2 { breakpoints[n - 2] } else { [0.0, 0.0] };
                prev[1] + (prev[1] - before[1]) / (prev[0] - before[0]) * (s - prev[0])
            }
        }
    }

    pub fn inverse(&self, a: f64) -> f64 {
        match self {
            Self::Power { p } => {
                if *p == 1.0 {
                    a
                } else {
                    a.powf(1.0 / p)
                }
            }
            Self::ScaledExp { c } => a.ln_1p() / c,
            Self::PiecewiseLinear { breakpoints } => {
                let mut prev = [0.0, 0.0];
                for b in breakpoints {
                    if a <= b[1] {
                        return prev[0] + (b[0] - prev[0]) * (a - prev[1]) / (b[1] - prev[1]);
                    }
                    prev = *b;
                }
                let n = breakpoints.len();
                let before = if n >= 2 { breakpoints[n - 2] } else { [0.0, 0.0] };
                prev[0] + (prev[0] - before[0]) / (prev[1] - before[1]) * (a - prev[1])
            }
        }
    }

    pub fn label(&self) -> String {
        match self {
            Self::Power { p } => format!("power({p})"),
            Self::ScaledExp { c } => format!("scaled_exp({c})"),
            Self::PiecewiseLinear { breakpoints } => format!("piecewise_linear({})", breakpoints.len()),
        }
    }
}

/// Positive nonincreasing weight on (0, 1) with closed-form partial integrals.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case", deny_unknown_fields)]
pub enum WeightFunction {
    Constant {
        #[serde(default = "one")]
        value: f64,
    },
    /// `t^{-beta}`, `0 <= beta < 1`
    PowerSingular { beta: f64 },
    /// `[t_end, value]` steps covering (0, 1); the last `t_end` must be 1.
    PiecewiseConstant { steps: Vec<[f64; 2]> },
}

fn one() -> f64 {
    1.0
}

impl WeightFunction {
    pub fn one() -> Self {
        Self::Constant { value: 1.0 }
    }

    pub fn power_singular(beta: f64) -> Result<Self> {
        let w = Self::PowerSingular { beta };
        w.validate()?;
        Ok(w)
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            Self::Constant { value } if !(*value > 0.0 && value.is_finite()) => {
                Err(Error::InvalidFunction(format!("constant weight must be positive, got {value}")))
            }
            Self::PowerSingular { beta } if !(*beta >= 0.0 && *beta < 1.0) => {
                Err(Error::InvalidFunction(format!("singular weight needs 0 <= beta < 1, got {beta}")))
            }
            Self::PiecewiseConstant { steps } => {
                let mut prev = [0.0, f64::INFINITY];
                for (i, s) in steps.iter().enumerate() {
                    if !(s[0] > prev[0]) || s[0] > 1.0 {
                        return Err(Error::InvalidFunction(format!("step {i} does not advance within (0, 1]")));
                    }
                    if !(s[1] > 0.0) || !s[1].is_finite() {
                        return Err(Error::InvalidFunction(format!("step {i} has a nonpositive value")));
                    }
                    if s[1] > prev[1] {
                        return Err(Error::InvalidFunction(format!("weight increases at step {i}")));
                    }
                    prev = *s;
                }
                if prev[0] != 1.0 {
                    return Err(Error::InvalidFunction("steps must end at t = 1".into()));
                }
                Ok(())
            }
            _ => Ok(()),
        }
    }

    pub fn eval(&self, t: f64) -> f64 {
        match self {
            Self::Constant { value } => *value,
            Self::PowerSingular { beta } => t.powf(-beta),
            Self::PiecewiseConstant { steps } => {
                steps.iter().find(|s| t < s[0]).or(steps.last()).map(|s| s[1]).unwrap_or(0.0)
            }
        }
    }

    /// `W(0, t)`.
    pub fn cumulative(&self, t: f64) -> f64 {
        let t = t.clamp(0.0, 1.0);
        match self {
            Self::Constant { value } => value * t,
            Self::PowerSingular { beta } => t.powf(1.0 - beta) / (1.0 - beta),
            Self::PiecewiseConstant { steps } => {
                let mut acc = 0.0;
                let mut left = 0.0;
                for s in steps {
                    if t <= s[0] {
                        return acc + s[1] * (t - left);
                    }
                    acc += s[1] * (s[0] - left);
                    left = s[0];
                }
                acc
            }
        }
    }

    /// `W(a, b) = int_a^b omega`.
    pub fn integral(&self, a: f64, b: f64) -> f64 {
        match self {
            Self::Constant { value } => value * (b - a),
            _ => self.cumulative(b) - self.cumulative(a),
        }
    }

    pub fn label(&self) -> String {
        match self {
            Self::Constant { value } => format!("constant({value})"),
            Self::PowerSingular { beta } => format!("power_singular({beta})"),
            Self::PiecewiseConstant { steps } => format!("piecewise_constant({})", steps.len()),
        }
    }
}
