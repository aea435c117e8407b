use serde::Serialize;

use olcb::bodies::grid;
use olcb::centroid::{build_on_grid, CentroidBody};
use olcb::steiner::{default_schedule, inclusion_from, run_schedule_visit, ScheduleOptions};
use olcb::Direction;

use super::lemmas::{inclusion_budget, rows_of_inclusion};
use super::{case, Context, Outcome};
use crate::rows::{fmt, fmt_opt, write_lines, write_table, VerificationRow};
use crate::HarnessError;

pub const DRIFT_TOL: f64 = 1e-7;

/// One schedule step with the `|Gamma K_i|` bracket.
#[derive(Clone, Debug, Serialize)]
pub struct ConvergeStep {
    pub step: usize,
    pub volume: f64,
    pub ball_distance: f64,
    pub vertex_count: usize,
    pub gamma_inner: f64,
    pub gamma_outer: f64,
    pub inclusion_violation: Option<f64>,
    pub epsilon_grid: Option<f64>,
    /// `inner_i <= outer_{i-1}`
    pub monotone: Option<bool>,
    /// `outer_i <= outer_{i-1}`; informational, the outer polytope is not
    /// guaranteed to shrink.
    pub outer_nonincreasing: Option<bool>,
}

const HEADER: [&str; 10] = [
    "step", "volume", "ball_distance", "vertex_count", "gamma_inner", "gamma_outer", "inclusion_violation", "epsilon_grid",
    "monotone", "outer_nonincreasing",
];

pub(super) fn run(ctx: &Context) -> Result<Outcome, HarnessError> {
    let m = ctx.cfg.grid_sizes[0];
    let steps = ctx.cfg.trials.schedule_steps;
    let opts = ScheduleOptions { seed: ctx.cfg.seed, ..ScheduleOptions::default() };
    let mut outcome = Outcome::default();
    for item in &ctx.corpus {
        let n = item.body.dim();
        let grid_dirs = grid::default_grid(n, m)?;
        let schedule = default_schedule(n, steps, opts.seed);
        for (j, (phi, omega)) in ctx.pairs().into_iter().enumerate() {
            let case = format!("{};m={m}", case(phi, omega));
            let mut prev: Option<CentroidBody> = None;
            let mut out: Vec<ConvergeStep> = Vec::new();
            let mut rows = Vec::new();
            let trace = run_schedule_visit(&item.body, &schedule, &opts, |s, k| {
                let g = build_on_grid(k, phi, omega, grid_dirs.clone(), &ctx.cfg.solver)?;
                let vb = g.volume_bracket()?;
                let mut st = ConvergeStep {
                    step: s.step,
                    volume: s.volume,
                    ball_distance: s.ball_distance,
                    vertex_count: s.vertex_count,
                    gamma_inner: vb.inner,
                    gamma_outer: vb.outer,
                    inclusion_violation: None,
                    epsilon_grid: None,
                    monotone: None,
                    outer_nonincreasing: None,
                };
                if let Some(p) = &prev {
                    let u = Direction::new(s.direction.clone())?;
                    let r = inclusion_from(p, &g, &u, 0.0)?;
                    st.inclusion_violation = Some(r.max_violation);
                    st.epsilon_grid = Some(r.epsilon_grid);
                    st.monotone = Some(r.volume_monotone());
                    st.outer_nonincreasing = Some(vb.outer <= r.volume_body.1);
                    rows.extend(rows_of_inclusion(&item.id, &format!("{case};step={}", s.step), &r, inclusion_budget(p, &g, &r)));
                }
                out.push(st);
                prev = Some(g);
                Ok(())
            })?;
            let drift = trace.volume_drift();
            rows.push(VerificationRow::new(&item.id, "volume_drift", case.clone(), drift, DRIFT_TOL, DRIFT_TOL - drift, 0.0));
            let mut lines = vec![serde_json::json!({"provenance": ctx.prov.json(), "body_id": item.id, "case": case}).to_string()];
            for s in &trace.steps {
                lines.push(serde_json::to_string(s).map_err(|e| HarnessError::Io(e.to_string()))?);
            }
            outcome.artifacts.push(write_lines(&ctx.path(&format!("_{}_p{j}_trace.jsonl", item.id)), &lines)?);
            let records: Vec<Vec<String>> = out
                .iter()
                .map(|s| {
                    vec![
                        s.step.to_string(),
                        fmt(s.volume),
                        fmt(s.ball_distance),
                        s.vertex_count.to_string(),
                        fmt(s.gamma_inner),
                        fmt(s.gamma_outer),
                        fmt_opt(s.inclusion_violation),
                        fmt_opt(s.epsilon_grid),
                        s.monotone.map_or(String::new(), |b| b.to_string()),
                        s.outer_nonincreasing.map_or(String::new(), |b| b.to_string()),
                    ]
                })
                .collect();
            outcome.artifacts.push(write_table(&ctx.path(&format!("_{}_p{j}_brackets.csv", item.id)), &ctx.prov, &HEADER, &records)?);
            let last = out.last().unwrap();
            outcome.report.push_str(&format!(
                "{} {case}: {} steps, drift {}, ball distance {} -> {}, |Gamma K| outer {} -> {}\n",
                item.id,
                steps,
                fmt(drift),
                fmt(out[0].ball_distance),
                fmt(last.ball_distance),
                fmt(out[0].gamma_outer),
                fmt(last.gamma_outer)
            ));
            outcome.rows.extend(rows);
            outcome.converge.push((format!("{}/{case}", item.id), out));
        }
    }
    Ok(outcome)
}
