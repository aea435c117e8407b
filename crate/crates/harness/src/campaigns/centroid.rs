use std::io::Write;

use rayon::prelude::*;

use olcb::centroid::{build_centroid_body, ratio_of, CentroidBody};

use super::{case, Context, Outcome};
use crate::corpus::CorpusItem;
use crate::rows::{fmt, write_table, Budget, VerificationRow};
use crate::HarnessError;

const HEADER: [&str; 14] = [
    "body_id", "phi", "omega", "grid", "support_file", "volume_inner", "volume_outer", "ratio_inner", "ratio_outer",
    "support_uncertainty", "quadrature_delta", "max_residual", "symmetry_gap", "consistency_gap",
];

pub(super) fn run(ctx: &Context) -> Result<Outcome, HarnessError> {
    let mut jobs = Vec::new();
    for item in &ctx.corpus {
        for (j, (phi, omega)) in ctx.pairs().into_iter().enumerate() {
            for &m in &ctx.cfg.grid_sizes {
                jobs.push((item, j, phi, omega, m));
            }
        }
    }
    let bodies = jobs
        .par_iter()
        .map(|(item, _, phi, omega, m)| build_centroid_body(&item.body, phi, omega, *m, &ctx.cfg.solver))
        .collect::<Result<Vec<CentroidBody>, _>>()?;
    let mut records = Vec::new();
    let mut rows = Vec::new();
    let mut artifacts = Vec::new();
    for ((item, j, phi, omega, m), gamma) in jobs.iter().zip(&bodies) {
        let file = format!("_{}_p{j}_m{m}.csv", item.id);
        let path = ctx.path(&file);
        let mut f = std::fs::File::create(&path).map_err(|e| HarnessError::Io(format!("{}: {e}", path.display())))?;
        writeln!(f, "{}", ctx.prov.comment()).and_then(|_| gamma.write_csv(&mut f)).map_err(|e| HarnessError::Io(e.to_string()))?;
        artifacts.push(path.clone());
        let vb = gamma.volume_bracket()?;
        let ratio = ratio_of(gamma, &item.body)?;
        records.push(vec![
            item.id.clone(),
            phi.label(),
            omega.label(),
            m.to_string(),
            path.file_name().unwrap().to_string_lossy().into_owned(),
            fmt(vb.inner),
            fmt(vb.outer),
            fmt(ratio.inner),
            fmt(ratio.outer),
            fmt(gamma.support_uncertainty()),
            fmt(gamma.quadrature_delta()),
            fmt(gamma.max_residual()),
            fmt(gamma.symmetry_gap()),
            fmt(gamma.consistency_gap()),
        ]);
        rows.push(bracket_row(item, gamma, vb.inner, vb.outer, format!("{};m={m}", case(phi, omega))));
    }
    artifacts.insert(0, write_table(&ctx.path(".csv"), &ctx.prov, &HEADER, &records)?);
    let report = format!("{} centroid bodies over {} bodies\n", bodies.len(), ctx.corpus.len());
    Ok(Outcome { rows, artifacts, report, ..Outcome::default() })
}

/// The outer polytope must contain the inner bracket's body: `inner <= outer`.
fn bracket_row(item: &CorpusItem, gamma: &CentroidBody, inner: f64, outer: f64, case: String) -> VerificationRow {
    VerificationRow::new(&item.id, "volume_bracket_ordered", case, inner, outer, outer - inner, 0.0).with_budget(Budget {
        solver_residual: gamma.max_residual(),
        quadrature: gamma.quadrature_delta(),
        bracket_width: (outer - inner) / outer,
    })
}
