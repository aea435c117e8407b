use rayon::prelude::*;

use olcb::bodies::json::BodySpec;
use olcb::steiner::{maps_s_t_check_seeded, steiner_symmetrize_with, DEFAULT_AREA_BUDGET, MAPS_P_THRESHOLD as MAPS_P};

use super::{unit_directions, Context, Outcome};
use crate::rows::{write_json, VerificationRow};
use crate::HarnessError;

pub(super) fn run(ctx: &Context) -> Result<Outcome, HarnessError> {
    let mut jobs = Vec::new();
    for item in &ctx.corpus {
        for (k, u) in unit_directions(&ctx.cfg.directions, item.body.dim(), ctx.seed(0))?.into_iter().enumerate() {
            jobs.push((item, k, u));
        }
    }
    let samples = ctx.cfg.trials.map_samples;
    let results = jobs
        .par_iter()
        .enumerate()
        .map(|(j, (item, _, u))| {
            let sym = steiner_symmetrize_with(&item.body, u, DEFAULT_AREA_BUDGET)?;
            let before = item.body.volume_exact()?;
            let after = sym.body.volume_exact()?;
            let maps = maps_s_t_check_seeded(&item.body, u, samples, ctx.seed(j + 1))?;
            Ok((sym, before, after, maps))
        })
        .collect::<Result<Vec<_>, olcb::Error>>()?;
    let mut rows = Vec::new();
    let mut artifacts = Vec::new();
    for ((item, k, u), (sym, before, after, maps)) in jobs.iter().zip(results) {
        let case = format!("u={k}");
        let id = item.id.as_str();
        rows.push(VerificationRow::new(
            id,
            "volume_preserved",
            case.clone(),
            after,
            before,
            -(after - before).abs() / before,
            sym.simplified / before + 1e-12,
        ));
        rows.push(VerificationRow::new(id, "s_map_uniform", case.clone(), maps.s_p_value, MAPS_P, maps.s_p_value - MAPS_P, 0.0));
        rows.push(VerificationRow::new(id, "t_map_uniform", case.clone(), maps.t_p_value, MAPS_P, maps.t_p_value - MAPS_P, 0.0));
        rows.push(VerificationRow::new(id, "t_involution", case, maps.involution_error, 1e-12, 1e-12 - maps.involution_error, 0.0));
        let value = serde_json::json!({
            "provenance": ctx.prov.json(),
            "body_id": id,
            "direction": u.as_slice(),
            "simplified_volume": sym.simplified,
            "body": BodySpec::from_body(&sym.body),
        });
        artifacts.push(write_json(&ctx.path(&format!("_{id}_u{k}.json")), &value)?);
    }
    let report = format!("{} symmetrals over {} bodies, {samples} samples per map check\n", jobs.len(), ctx.corpus.len());
    Ok(Outcome { rows, artifacts, report, ..Outcome::default() })
}
