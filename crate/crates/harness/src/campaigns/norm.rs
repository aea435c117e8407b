use rayon::prelude::*;

use olcb::centroid::centroid_support_report;

use super::{directions, Context, Outcome};
use crate::rows::{fmt, fmt_opt, write_table, Budget};
use crate::HarnessError;

const HEADER: [&str; 15] = [
    "body_id", "direction", "x", "phi", "omega", "lambda", "bracket_lo", "bracket_hi", "residual", "cells", "backend",
    "iterations", "lambda_refined", "richardson_delta", "flagged",
];

pub(super) fn run(ctx: &Context) -> Result<Outcome, HarnessError> {
    let mut jobs = Vec::new();
    for item in &ctx.corpus {
        let dirs = directions(&ctx.cfg.directions, item.body.dim(), ctx.seed(0))?;
        for (k, x) in dirs.into_iter().enumerate() {
            for (phi, omega) in ctx.pairs() {
                jobs.push((item, k, x.clone(), phi, omega));
            }
        }
    }
    let reports = jobs
        .par_iter()
        .map(|(item, _, x, phi, omega)| centroid_support_report(&item.body, phi, omega, x, &ctx.cfg.solver))
        .collect::<Result<Vec<_>, _>>()?;
    let mut budget = Budget::default();
    let records: Vec<Vec<String>> = jobs
        .iter()
        .zip(&reports)
        .map(|((item, k, x, phi, omega), r)| {
            budget = budget.max(Budget {
                solver_residual: r.residual,
                quadrature: r.richardson_delta.unwrap_or(0.0),
                bracket_width: r.root_width,
            });
            vec![
                item.id.clone(),
                k.to_string(),
                x.iter().map(|c| fmt(*c)).collect::<Vec<_>>().join(";"),
                phi.label(),
                omega.label(),
                fmt(r.lambda),
                fmt(r.bracket.0),
                fmt(r.bracket.1),
                fmt(r.residual),
                r.cells.to_string(),
                r.backend.to_string(),
                r.iterations.to_string(),
                fmt_opt(r.lambda_refined),
                fmt_opt(r.richardson_delta),
                r.flagged.to_string(),
            ]
        })
        .collect();
    let path = write_table(&ctx.path(".csv"), &ctx.prov, &HEADER, &records)?;
    let flagged = reports.iter().filter(|r| r.flagged).count();
    let report = format!(
        "{} norms over {} bodies, {flagged} flagged by the refinement check\n\
         budget: solver_residual={} quadrature={} bracket_width={}\n",
        reports.len(),
        ctx.corpus.len(),
        fmt(budget.solver_residual),
        fmt(budget.quadrature),
        fmt(budget.bracket_width)
    );
    Ok(Outcome { artifacts: vec![path], report, ..Outcome::default() })
}
