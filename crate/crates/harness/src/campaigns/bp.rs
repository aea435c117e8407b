use std::collections::BTreeSet;

use rayon::prelude::*;
use serde::Serialize;

use olcb::centroid::{build_centroid_body, ratio_of, VolumeRatio};
use olcb::orlicz::{OrliczFunction, WeightFunction};
use olcb::{Body, Error};

use super::{case, Context, Outcome};
use crate::corpus::BodyClass;
use crate::rows::{fmt, write_table, Budget, VerificationRow};
use crate::HarnessError;

/// Allowed relative distance of a regular polygon's ratio from the ball's.
pub const NEAR_BALL_TOL: f64 = 1e-3;

/// Volume-ratio bracket of the ball for one `(phi, omega, n)`.
#[derive(Clone, Debug, Serialize)]
pub struct BallReference {
    pub case: String,
    pub dim: usize,
    pub inner: f64,
    pub outer: f64,
    /// `|Gamma B| / |B|` in closed form, for `phi = s` and `omega = 1`.
    pub closed_form: Option<f64>,
}

/// `h(Gamma B, e_1)^n`: the mean of `|y_1|` over the ball is `4/(3 pi)` in
/// the plane and `3/8` in space.
pub fn ball_ratio_closed_form(dim: usize, phi: &OrliczFunction, omega: &WeightFunction) -> Option<f64> {
    if *phi != OrliczFunction::identity() || *omega != WeightFunction::one() {
        return None;
    }
    match dim {
        2 => Some((4.0 / (3.0 * std::f64::consts::PI)).powi(2)),
        3 => Some((3.0f64 / 8.0).powi(3)),
        _ => None,
    }
}

const HEADER: [&str; 10] =
    ["body_id", "class", "phi", "omega", "grid", "ratio_inner", "ratio_outer", "ball_inner", "ball_outer", "support_uncertainty"];

pub(super) fn run(ctx: &Context) -> Result<Outcome, HarnessError> {
    let m = ctx.cfg.grid_sizes[0];
    let dims: BTreeSet<usize> = ctx.corpus.iter().map(|c| c.body.dim()).collect();
    if let Some(&d) = dims.iter().find(|d| !matches!(d, 2 | 3)) {
        return Err(Error::DimensionUnsupported { dim: d, what: "volume-ratio campaigns" }.into());
    }
    let mut rows = Vec::new();
    let mut records = Vec::new();
    let mut refs = Vec::new();
    let mut report = String::new();
    for (phi, omega) in ctx.pairs() {
        let case = case(phi, omega);
        let solve = |b: &Body| -> Result<(VolumeRatio, f64, Budget), Error> {
            let g = build_centroid_body(b, phi, omega, m, &ctx.cfg.solver)?;
            let r = ratio_of(&g, b)?;
            let budget = Budget { solver_residual: g.max_residual(), quadrature: g.quadrature_delta(), bracket_width: r.error / r.outer };
            Ok((r, g.support_uncertainty(), budget))
        };
        let mut balls = Vec::new();
        for &d in &dims {
            let body = ctx
                .corpus
                .iter()
                .find(|c| c.class == BodyClass::Ball && c.body.dim() == d)
                .map_or_else(|| Body::ball(d, 1.0), |c| Ok(c.body.clone()))?;
            let (r, _, _) = solve(&body)?;
            let reference =
                BallReference { case: case.clone(), dim: d, inner: r.inner, outer: r.outer, closed_form: ball_ratio_closed_form(d, phi, omega) };
            report.push_str(&format!(
                "{case} n={d}: ball ratio in [{}, {}]{}\n",
                fmt(r.inner),
                fmt(r.outer),
                reference.closed_form.map_or(String::new(), |c| format!(", closed form {}", fmt(c)))
            ));
            balls.push(reference);
        }
        let ball_of = |d: usize| balls.iter().find(|b| b.dim == d).unwrap();
        let results: Vec<_> = ctx.corpus.par_iter().map(|c| solve(&c.body)).collect();
        let mut min_slack = f64::INFINITY;
        for (item, res) in ctx.corpus.iter().zip(results) {
            let id = item.id.as_str();
            let statistic = match item.class {
                BodyClass::Generic => "ratio_above_ball",
                BodyClass::Regular => "near_ball_ratio",
                BodyClass::Ellipsoid => "ellipsoid_matches_ball",
                BodyClass::Ball => "ball_closed_form",
            };
            let (r, unc, budget) = match res {
                Ok(x) => x,
                Err(e) => {
                    rows.push(VerificationRow::failed(id, statistic, case.clone(), e));
                    continue;
                }
            };
            let b = ball_of(item.body.dim());
            records.push(vec![
                id.to_string(),
                format!("{:?}", item.class).to_lowercase(),
                phi.label(),
                omega.label(),
                m.to_string(),
                fmt(r.inner),
                fmt(r.outer),
                fmt(b.inner),
                fmt(b.outer),
                fmt(unc),
            ]);
            let row = match item.class {
                BodyClass::Generic => {
                    min_slack = min_slack.min(r.inner - b.outer);
                    VerificationRow::new(id, statistic, case.clone(), r.inner, b.outer, r.inner - b.outer, 0.0)
                }
                BodyClass::Regular => {
                    let gap = (r.outer - b.inner).max(b.outer - r.inner) / b.inner;
                    VerificationRow::new(id, statistic, case.clone(), gap, NEAR_BALL_TOL, NEAR_BALL_TOL - gap, 0.0)
                }
                BodyClass::Ellipsoid => {
                    let overlap = (r.outer - b.inner).min(b.outer - r.inner) / b.outer;
                    VerificationRow::new(id, statistic, case.clone(), r.inner, b.outer, overlap, 0.0)
                }
                BodyClass::Ball => match b.closed_form {
                    Some(c) => VerificationRow::new(id, statistic, case.clone(), c, r.outer, (c - r.inner).min(r.outer - c), 0.0),
                    None => continue,
                },
            };
            rows.push(row.with_budget(budget));
        }
        if min_slack.is_finite() {
            report.push_str(&format!("{case}: min slack of generic bodies over the ball {}\n", fmt(min_slack)));
        }
        refs.extend(balls);
    }
    let path = write_table(&ctx.path(".csv"), &ctx.prov, &HEADER, &records)?;
    Ok(Outcome { rows, artifacts: vec![path], report, ball_references: refs, ..Outcome::default() })
}
