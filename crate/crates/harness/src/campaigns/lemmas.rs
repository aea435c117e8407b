use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use olcb::bodies::grid;
use olcb::centroid::{build_on_grid, centroid_support_report, equivariance_check, CentroidBody};
use olcb::linalg::{axpy, dot, LinearMap};
use olcb::orlicz::{lemma33_bounds, SolverConfig};
use olcb::steiner::{inclusion_from, InclusionReport, lemma41_with, steiner_symmetrize_with, DEFAULT_AREA_BUDGET, STEINER_SLACK_TOL};
use olcb::{Body, Direction};

use super::{case, random_direction, unit_directions, Context, Outcome};
use crate::config::Campaign;
use crate::corpus::CorpusItem;
use crate::rows::{Budget, VerificationRow};
use crate::HarnessError;

/// Tolerance on `lambda <= upper`.
pub const SANDWICH_UPPER_TOL: f64 = 1e-6;
pub const EQUIVARIANCE_TOL: f64 = 1e-5;

pub(super) fn run(ctx: &Context) -> Result<Outcome, HarnessError> {
    let mut rows = Vec::new();
    let mut report = String::new();
    for c in ctx.cfg.campaigns() {
        let before = rows.len();
        match c {
            Campaign::Sandwich => rows.extend(sandwich(ctx)?),
            Campaign::Equivariance => rows.extend(equivariance(ctx)?),
            Campaign::SteinerInequality => rows.extend(steiner_inequality(ctx)?),
            Campaign::Inclusion => rows.extend(inclusion(ctx)?),
        }
        let new = &rows[before..];
        let failed = new.iter().filter(|r| !r.pass).count();
        report.push_str(&format!("{c:?}: {} rows, {failed} failed\n", new.len()));
    }
    Ok(Outcome { rows, report, ..Outcome::default() })
}

fn planar_or_spatial(item: &CorpusItem) -> bool {
    matches!(item.body.dim(), 2 | 3)
}

fn sandwich(ctx: &Context) -> Result<Vec<VerificationRow>, HarnessError> {
    let mut jobs = Vec::new();
    for item in &ctx.corpus {
        for (k, u) in unit_directions(&ctx.cfg.directions, item.body.dim(), ctx.seed(0))?.into_iter().enumerate() {
            for (phi, omega) in ctx.pairs() {
                jobs.push((item, k, u.clone(), phi, omega));
            }
        }
    }
    let out: Vec<Vec<VerificationRow>> = jobs
        .par_iter()
        .map(|(item, k, u, phi, omega)| {
            let case = format!("{};u={k}", case(phi, omega));
            let id = item.id.as_str();
            let bounds = match lemma33_bounds(&item.body, u, phi, omega) {
                Ok(b) => b,
                Err(e) => return vec![VerificationRow::failed(id, "sandwich_lower", case, e)],
            };
            match centroid_support_report(&item.body, phi, omega, u, &ctx.cfg.solver) {
                Ok(r) => {
                    let budget = Budget {
                        solver_residual: r.residual,
                        quadrature: r.richardson_delta.unwrap_or(0.0),
                        bracket_width: r.root_width,
                    };
                    let l = r.lambda;
                    vec![
                        VerificationRow::new(id, "sandwich_lower", case.clone(), bounds.lower, l, l - bounds.lower, 0.0)
                            .with_backend(r.backend)
                            .with_budget(budget),
                        VerificationRow::new(id, "sandwich_upper", case, l, bounds.upper, bounds.upper - l, SANDWICH_UPPER_TOL)
                            .with_backend(r.backend)
                            .with_budget(budget),
                    ]
                }
                Err(e) => vec![
                    VerificationRow::failed(id, "sandwich_lower", case.clone(), &e),
                    VerificationRow::failed(id, "sandwich_upper", case, e),
                ],
            }
        })
        .collect();
    Ok(out.into_iter().flatten().collect())
}

/// Rotation, anisotropic scaling, shear, then generic products, cycling.
pub fn random_linear_map(dim: usize, kind: usize, rng: &mut ChaCha8Rng) -> Result<LinearMap, olcb::Error> {
    let rotation = |rng: &mut ChaCha8Rng| -> Result<LinearMap, olcb::Error> {
        if dim == 2 {
            return Ok(LinearMap::rotation2(rng.gen_range(0.0..std::f64::consts::TAU)));
        }
        // Householder product of two reflections is a rotation
        let a = random_direction(dim, rng);
        let b = random_direction(dim, rng);
        let h = |v: &Direction| -> Vec<Vec<f64>> {
            (0..dim).map(|i| (0..dim).map(|j| f64::from(u8::from(i == j)) - 2.0 * v[i] * v[j]).collect()).collect()
        };
        let (ha, hb) = (h(&a), h(&b));
        let rows: Vec<Vec<f64>> =
            (0..dim).map(|i| (0..dim).map(|j| (0..dim).map(|k| ha[i][k] * hb[k][j]).sum()).collect()).collect();
        LinearMap::from_rows(&rows)
    };
    let scaling = |rng: &mut ChaCha8Rng| {
        let d: Vec<f64> = (0..dim).map(|_| rng.gen_range(0.4..2.5)).collect();
        LinearMap::diagonal(&d)
    };
    let shear = |rng: &mut ChaCha8Rng| {
        let rows: Vec<Vec<f64>> = (0..dim)
            .map(|i| (0..dim).map(|j| if i == j { 1.0 } else if j > i { rng.gen_range(-1.0..1.0) } else { 0.0 }).collect())
            .collect();
        LinearMap::from_rows(&rows)
    };
    match kind % 4 {
        0 => rotation(rng),
        1 => scaling(rng),
        2 => shear(rng),
        _ => {
            let (r, s, t) = (rotation(rng)?, scaling(rng)?, shear(rng)?);
            LinearMap::new(r.matrix() * s.matrix() * t.matrix())
        }
    }
}

fn map_label(kind: usize) -> &'static str {
    ["rotation", "scaling", "shear", "product"][kind % 4]
}

fn equivariance(ctx: &Context) -> Result<Vec<VerificationRow>, HarnessError> {
    let mut jobs = Vec::new();
    for (b, item) in ctx.corpus.iter().enumerate() {
        let mut rng = ChaCha8Rng::seed_from_u64(ctx.seed(10_000 + b));
        for k in 0..ctx.cfg.trials.equivariance_maps {
            let a = random_linear_map(item.body.dim(), k, &mut rng)?;
            let dirs = unit_directions(&ctx.cfg.directions, item.body.dim(), ctx.seed(0))?;
            for (phi, omega) in ctx.pairs() {
                jobs.push((item, k, a.clone(), dirs.clone(), phi, omega));
            }
        }
    }
    let config = SolverConfig { richardson: false, ..ctx.cfg.solver.clone() };
    Ok(jobs
        .par_iter()
        .map(|(item, k, a, dirs, phi, omega)| {
            let case = format!("{};map={k}:{}", case(phi, omega), map_label(*k));
            match equivariance_check(&item.body, a, phi, omega, dirs, &config) {
                Ok(gap) => VerificationRow::new(&item.id, "equivariance", case, gap, 0.0, -gap, EQUIVARIANCE_TOL),
                Err(e) => VerificationRow::failed(&item.id, "equivariance", case, e),
            }
        })
        .collect())
}

/// Random `x'` in `u⊥` with length uniform in `[0, scale]`.
fn random_orthogonal(u: &Direction, scale: f64, rng: &mut ChaCha8Rng) -> Vec<f64> {
    let v = random_direction(u.dim(), rng);
    let w = axpy(&v, -dot(&v, u), u);
    let len = dot(&w, &w).sqrt();
    let r = rng.gen_range(0.0..=scale);
    w.iter().map(|c| c * r / len).collect()
}

fn steiner_inequality(ctx: &Context) -> Result<Vec<VerificationRow>, HarnessError> {
    let eligible: Vec<&CorpusItem> = ctx.corpus.iter().filter(|i| planar_or_spatial(i)).collect();
    if eligible.is_empty() {
        return Ok(Vec::new());
    }
    let pairs = ctx.pairs();
    let seed = ctx.seed(20_000);
    Ok((0..ctx.cfg.trials.steiner_inequality)
        .into_par_iter()
        .map(|t| {
            let item = eligible[t % eligible.len()];
            let (phi, omega) = pairs[(t / eligible.len()) % pairs.len()];
            let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_add(t as u64));
            let u = random_direction(item.body.dim(), &mut rng);
            let scale = 1.5 * item.body.radii().outer;
            let (x1, x2) = if t < eligible.len() {
                (vec![0.0; u.dim()], vec![0.0; u.dim()])
            } else {
                (random_orthogonal(&u, scale, &mut rng), random_orthogonal(&u, scale, &mut rng))
            };
            let case = format!("{};trial={t}", case(phi, omega));
            let res = steiner_symmetrize_with(&item.body, &u, DEFAULT_AREA_BUDGET)
                .and_then(|sym| lemma41_with(&item.body, &sym.body, &u, &x1, &x2, phi, omega, &ctx.cfg.solver));
            match res {
                Ok(s) => VerificationRow::new(&item.id, "steiner_inequality", case, s.lhs, s.rhs, s.slack, STEINER_SLACK_TOL)
                    .with_budget(Budget { quadrature: s.uncertainty / s.rhs, ..Budget::default() }),
                Err(e) => VerificationRow::failed(&item.id, "steiner_inequality", case, e),
            }
        })
        .collect())
}

fn inclusion(ctx: &Context) -> Result<Vec<VerificationRow>, HarnessError> {
    let m = ctx.cfg.grid_sizes[0];
    let mut rows = Vec::new();
    for (b, item) in ctx.corpus.iter().enumerate().filter(|(_, i)| planar_or_spatial(i)) {
        let dirs = grid::default_grid(item.body.dim(), m)?;
        let mut rng = ChaCha8Rng::seed_from_u64(ctx.seed(30_000 + b));
        let us: Vec<Direction> =
            (0..ctx.cfg.trials.inclusion_directions).map(|_| random_direction(item.body.dim(), &mut rng)).collect();
        for (phi, omega) in ctx.pairs() {
            let gk = build_on_grid(&item.body, phi, omega, dirs.clone(), &ctx.cfg.solver)?;
            for (k, u) in us.iter().enumerate() {
                let case = format!("{};m={m};u={k}", case(phi, omega));
                let sym: Body = steiner_symmetrize_with(&item.body, u, DEFAULT_AREA_BUDGET)?.body;
                let gs = build_on_grid(&sym, phi, omega, dirs.clone(), &ctx.cfg.solver)?;
                rows.extend(inclusion_rows(&item.id, &case, &gk, &gs, u)?);
            }
        }
    }
    Ok(rows)
}

/// Support inclusion within `eps_grid` and `inner(|Gamma S_u K|) <= outer(|Gamma K|)`.
pub(crate) fn inclusion_rows(
    id: &str,
    case: &str,
    gk: &CentroidBody,
    gs: &CentroidBody,
    u: &Direction,
) -> Result<Vec<VerificationRow>, HarnessError> {
    let r = inclusion_from(gk, gs, u, 0.0)?;
    Ok(rows_of_inclusion(id, case, &r, inclusion_budget(gk, gs, &r)))
}

pub(crate) fn inclusion_budget(gk: &CentroidBody, gs: &CentroidBody, r: &InclusionReport) -> Budget {
    Budget {
        solver_residual: gk.max_residual().max(gs.max_residual()),
        quadrature: gk.quadrature_delta().max(gs.quadrature_delta()),
        bracket_width: (r.volume_body.1 - r.volume_body.0) / r.volume_body.1,
    }
}

pub(crate) fn rows_of_inclusion(id: &str, case: &str, r: &InclusionReport, budget: Budget) -> Vec<VerificationRow> {
    vec![
        VerificationRow::new(id, "inclusion", case.into(), r.max_violation, r.epsilon_grid, r.epsilon_grid - r.max_violation, 0.0)
            .with_budget(budget),
        VerificationRow::new(
            id,
            "volume_monotone",
            case.into(),
            r.volume_symmetral.0,
            r.volume_body.1,
            r.volume_body.1 - r.volume_symmetral.0,
            0.0,
        )
        .with_budget(budget),
    ]
}
