//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! nonzero when any criterion fails. Numeric arguments select criteria.

use std::f64::consts::PI;
use std::path::Path;
use std::time::{Duration, Instant};

use olcb::bodies::grid;
use olcb::bodies::sampling::UniformSampler;
use olcb::centroid::{centroid_support, centroid_support_report};
use olcb::geom::polygon::{clip_halfplane, shoelace, P2};
use olcb::orlicz::{OrliczFunction, SolverConfig, WeightFunction};
use olcb::rearrange::RearrangementProfile;
use olcb::steiner::symmetrization_schedule;
use olcb::{Body, Polytope};
use olcb_harness::corpus::{random_ellipse, random_polygon, random_polytope};
use olcb_harness::{run, Command, ExperimentConfig, Outcome};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

struct Verdict {
    pass: bool,
    detail: String,
}

type Check = fn(&Path) -> Result<Verdict, String>;

struct Criterion {
    id: u32,
    name: &'static str,
    limit: Duration,
    check: Check,
}

fn verdict(pass: bool, detail: String) -> Result<Verdict, String> {
    Ok(Verdict { pass, detail })
}

fn config(json: serde_json::Value) -> Result<ExperimentConfig, String> {
    ExperimentConfig::from_json(&json.to_string()).map_err(|e| e.to_string())
}

fn execute(cmd: Command, json: serde_json::Value, out: &Path) -> Result<Outcome, String> {
    let cfg = config(json)?;
    run(cmd, &cfg, &out.join(&cfg.name)).map_err(|e| e.to_string())
}

/// Rows of `statistic`, their failures and the minimum of `slack + tolerance`.
fn tally(o: &Outcome, statistic: &str) -> (usize, usize, f64) {
    let rows: Vec<_> = o.rows.iter().filter(|r| r.statistic == statistic).collect();
    let failed = rows.iter().filter(|r| !r.pass).count();
    let margin = rows.iter().map(|r| r.slack + r.tolerance).fold(f64::INFINITY, f64::min);
    (rows.len(), failed, margin)
}

fn first_failure(o: &Outcome) -> String {
    o.failures()
        .next()
        .map_or(String::new(), |r| format!("; first failure {} {} {} {}", r.body_id, r.statistic, r.case, r.error.clone().unwrap_or_default()))
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs()
}

fn criterion_1(_: &Path) -> Result<Verdict, String> {
    const TOL: f64 = 1e-6;
    let sq: Body = Polytope::cube(2, 1.0).map_err(|e| e.to_string())?.into();
    let mut worst: f64 = 0.0;
    for p in [1.0, 2.0, 3.0, 5.0] {
        let phi = OrliczFunction::power(p).map_err(|e| e.to_string())?;
        let r = centroid_support_report(&sq, &phi, &WeightFunction::one(), &[1.0, 0.0], &SolverConfig::default())
            .map_err(|e| e.to_string())?;
        let exact = (1.0 / (p + 1.0)).powf(1.0 / p);
        worst = worst.max(rel(r.lambda, exact));
    }
    verdict(worst <= TOL, format!("max rel err {worst:.2e} <= {TOL:.0e} over p in {{1,2,3,5}}"))
}

/// `int_T (a . y)^p` for integer `p` over a triangle on which `a . y` keeps its sign.
fn triangle_moment(t: [P2; 3], a: P2, p: u32) -> f64 {
    let l: Vec<f64> = t.iter().map(|v| a[0] * v[0] + a[1] * v[1]).collect();
    let area = 0.5 * ((t[1][0] - t[0][0]) * (t[2][1] - t[0][1]) - (t[1][1] - t[0][1]) * (t[2][0] - t[0][0])).abs();
    let mut sum = 0.0;
    for i in 0..=p {
        for j in 0..=p - i {
            sum += l[0].powi(i as i32) * l[1].powi(j as i32) * l[2].powi((p - i - j) as i32);
        }
    }
    let fact = |k: u32| (1..=k).map(f64::from).product::<f64>();
    2.0 * area * fact(p) / fact(p + 2) * sum
}

/// `((1/|K|) int_K |a . y|^p)^{1/p}`, split along `a . y = 0` and fanned into triangles.
fn polygon_moment(poly: &[P2], a: P2, p: u32) -> f64 {
    let mut total = 0.0;
    for sign in [1.0, -1.0] {
        let half = clip_halfplane(poly, [-sign * a[0], -sign * a[1]], 0.0);
        let b = [sign * a[0], sign * a[1]];
        for k in 1..half.len().saturating_sub(1) {
            total += triangle_moment([half[0], half[k], half[k + 1]], b, p);
        }
    }
    (total / shoelace(poly).abs()).powf(1.0 / p as f64)
}

fn criterion_2(_: &Path) -> Result<Verdict, String> {
    const TOL: f64 = 1e-4;
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let dirs = grid::circle(16);
    let mut worst: f64 = 0.0;
    let mut count = 0;
    for b in 0..20 {
        let body = random_polygon(&mut rng, 5 + b % 8, 0.1).map_err(|e| e.to_string())?;
        let poly = body.as_polytope().and_then(|p| p.polygon()).ok_or("polygon expected")?;
        for u in &dirs {
            for p in [1u32, 2, 4] {
                let phi = OrliczFunction::power(p as f64).map_err(|e| e.to_string())?;
                let lambda = centroid_support(&body, &phi, &WeightFunction::one(), u.as_slice()).map_err(|e| e.to_string())?;
                worst = worst.max(rel(lambda, polygon_moment(&poly, [u[0], u[1]], p)));
                count += 1;
            }
        }
    }
    verdict(worst <= TOL, format!("{count} solves, max rel err vs exact moment {worst:.2e} <= {TOL:.0e}"))
}

fn phis() -> serde_json::Value {
    serde_json::json!([{"family": "power", "p": 1}, {"family": "power", "p": 2}, {"family": "scaled_exp", "c": 1}])
}

fn omegas() -> serde_json::Value {
    serde_json::json!([{"family": "constant"}, {"family": "power_singular", "beta": 0.5}])
}

fn criterion_3(out: &Path) -> Result<Verdict, String> {
    let o = execute(
        Command::VerifyLemmas,
        serde_json::json!({
            "schema_version": 1, "name": "sandwich", "seed": 3,
            "bodies": [
                {"source": "random_polygon", "count": 50, "vertices": 8},
                {"source": "ball", "dim": 2},
                {"source": "random_ellipse", "count": 3}
            ],
            "phi": phis(), "omega": omegas(),
            "directions": {"grid": 360}, "campaigns": ["sandwich"]
        }),
        out,
    )?;
    let (lo, lo_failed, lo_margin) = tally(&o, "sandwich_lower");
    let (hi, hi_failed, hi_margin) = tally(&o, "sandwich_upper");
    let expected = 54 * 360 * 6;
    verdict(
        lo == expected && hi == expected && lo_failed + hi_failed == 0,
        format!(
            "{lo} lower / {hi} upper rows, {} violations, min lower slack {lo_margin:.3e}, min upper slack + 1e-6 {hi_margin:.3e}{}",
            lo_failed + hi_failed,
            first_failure(&o)
        ),
    )
}

fn criterion_4(out: &Path) -> Result<Verdict, String> {
    let o = execute(
        Command::VerifyLemmas,
        serde_json::json!({
            "schema_version": 1, "name": "equivariance", "seed": 4,
            "bodies": [
                {"source": "random_polygon", "count": 2, "vertices": 7},
                {"source": "random_ellipse", "count": 1},
                {"source": "ball", "dim": 2},
                {"source": "random_polytope", "count": 1, "vertices": 12}
            ],
            "phi": [{"family": "power", "p": 1}, {"family": "scaled_exp", "c": 1}],
            "omega": omegas(),
            "directions": {"grid": 16}, "campaigns": ["equivariance"],
            "trials": {"equivariance_maps": 4}
        }),
        out,
    )?;
    let (n, failed, _) = tally(&o, "equivariance");
    let worst = o.rows.iter().map(|r| r.lhs).fold(0.0, f64::max);
    verdict(
        n == 5 * 4 * 4 && failed == 0,
        format!("20 (body, A) pairs x 4 (phi, omega), max rel discrepancy {worst:.2e} <= 1e-5{}", first_failure(&o)),
    )
}

fn criterion_5(_: &Path) -> Result<Verdict, String> {
    const TOL: f64 = 1e-7;
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut worst: f64 = 0.0;
    for b in 0..10 {
        let body = random_polygon(&mut rng, 4 + b, 0.1).map_err(|e| e.to_string())?;
        let t = symmetrization_schedule(&body, 50).map_err(|e| e.to_string())?;
        if t.steps.len() != 51 {
            return verdict(false, format!("trace {b} has {} steps", t.steps.len()));
        }
        worst = worst.max(t.volume_drift());
    }
    verdict(worst <= TOL, format!("10 traces x 50 steps, max volume drift {worst:.2e} <= {TOL:.0e}"))
}

fn criterion_6(out: &Path) -> Result<Verdict, String> {
    let o = execute(
        Command::VerifyLemmas,
        serde_json::json!({
            "schema_version": 1, "name": "steiner-inequality", "seed": 6,
            "bodies": [
                {"source": "random_polygon", "count": 8, "vertices": 9},
                {"source": "random_ellipse", "count": 2},
                {"source": "ball", "dim": 2},
                {"source": "random_polytope", "count": 2, "vertices": 14},
                {"source": "ball", "dim": 3}
            ],
            "phi": [{"family": "power", "p": 1}, {"family": "power", "p": 2}, {"family": "scaled_exp", "c": 1}],
            "omega": omegas(),
            "campaigns": ["steiner_inequality"],
            "trials": {"steiner_inequality": 1000}
        }),
        out,
    )?;
    let (n, failed, margin) = tally(&o, "steiner_inequality");
    let min_slack = o.rows.iter().map(|r| r.slack).fold(f64::INFINITY, f64::min);
    verdict(
        n == 1000 && failed == 0,
        format!("{n} instances, {failed} violations, min slack {min_slack:.3e} (margin {margin:.3e}){}", first_failure(&o)),
    )
}

fn criterion_7(out: &Path) -> Result<Verdict, String> {
    let runs = [
        serde_json::json!({
            "schema_version": 1, "name": "trace-id", "seed": 7,
            "bodies": [{"source": "random_polygon", "count": 2, "vertices": 8}],
            "grid_sizes": [360], "trials": {"schedule_steps": 50}
        }),
        serde_json::json!({
            "schema_version": 1, "name": "trace-p2", "seed": 17,
            "bodies": [{"source": "random_polygon", "count": 1, "vertices": 6}],
            "phi": [{"family": "power", "p": 2}], "omega": [{"family": "power_singular", "beta": 0.5}],
            "grid_sizes": [360], "trials": {"schedule_steps": 50}
        }),
    ];
    let (mut inc, mut mono, mut failed) = (0, 0, 0);
    let mut worst: f64 = f64::INFINITY;
    let mut note = String::new();
    for cfg in runs {
        let o = execute(Command::Converge, cfg, out)?;
        let (a, fa, ma) = tally(&o, "inclusion");
        let (b, fb, _) = tally(&o, "volume_monotone");
        inc += a;
        mono += b;
        failed += fa + fb;
        worst = worst.min(ma);
        if note.is_empty() {
            note = first_failure(&o);
        }
    }
    verdict(
        inc == 150 && mono == 150 && failed == 0,
        format!("3 traces, {inc} inclusion + {mono} monotonicity steps, {failed} violations, min eps_grid - violation {worst:.3e}{note}"),
    )
}

fn ratio_case(name: &str, phi: serde_json::Value, omega: serde_json::Value, out: &Path) -> Result<Outcome, String> {
    execute(
        Command::VerifyBp,
        serde_json::json!({
            "schema_version": 1, "name": name, "seed": 8,
            "bodies": [
                {"source": "random_polygon", "count": 70, "vertices": 5},
                {"source": "random_polygon", "count": 70, "vertices": 9},
                {"source": "random_polygon", "count": 60, "vertices": 14},
                {"source": "regular_polygon", "vertices": 64, "count": 3},
                {"source": "ball", "dim": 2}
            ],
            "phi": [phi], "omega": [omega], "grid_sizes": [720]
        }),
        out,
    )
}

fn criterion_8(out: &Path) -> Result<Verdict, String> {
    let r = 4.0 / (3.0 * PI);
    let disk = Body::ball(2, 1.0).map_err(|e| e.to_string())?;
    let n = 1_000_000;
    let pts = UniformSampler::new(&disk).map_err(|e| e.to_string())?.sample_flat(n, 0x8888);
    let (s, s2) = pts.chunks_exact(2).fold((0.0, 0.0), |(a, b), y| (a + y[0].abs(), b + y[0] * y[0]));
    let mean = s / n as f64;
    let se = ((s2 / n as f64 - mean * mean) / n as f64).sqrt();
    let mc_ok = (mean - r).abs() <= 4.0 * se;
    let cases = [
        ("ratio-id", serde_json::json!({"family": "power", "p": 1}), serde_json::json!({"family": "constant"})),
        ("ratio-p2", serde_json::json!({"family": "power", "p": 2}), serde_json::json!({"family": "constant"})),
        ("ratio-sing", serde_json::json!({"family": "power", "p": 1}), serde_json::json!({"family": "power_singular", "beta": 0.5})),
    ];
    let mut pass = mc_ok;
    let mut parts = vec![format!("MC mean |y1| {mean:.5} vs 4/(3pi) {r:.5} (4 se = {:.1e})", 4.0 * se)];
    for (k, (name, phi, omega)) in cases.into_iter().enumerate() {
        let o = ratio_case(name, phi, omega, out)?;
        let (g, gf, gm) = tally(&o, "ratio_above_ball");
        let (reg, rf, rm) = tally(&o, "near_ball_ratio");
        let (ball, bf, _) = tally(&o, "ball_closed_form");
        let ok = g == 200 && reg == 3 && gf + rf + bf == 0 && (k > 0 || ball == 1);
        pass &= ok;
        let b = &o.ball_references[0];
        parts.push(format!(
            "{name}: ball [{:.6}, {:.6}], {} violations, min slack {gm:.2e}, regular margin {rm:.2e}{}",
            b.inner,
            b.outer,
            gf + rf + bf,
            first_failure(&o)
        ));
    }
    verdict(pass, parts.join("; "))
}

/// `sup_s |F_N(s) - F(s)|` for the sorted sample against `F(s) = 1 - mu(s)`.
fn ks_distance(sorted: &[f64], profile: &RearrangementProfile) -> Result<f64, String> {
    let n = sorted.len() as f64;
    let mut d: f64 = 0.0;
    for (i, &s) in sorted.iter().enumerate() {
        let f = 1.0 - profile.distribution(s).map_err(|e| e.to_string())?.value;
        d = d.max(((i + 1) as f64 / n - f).abs()).max((f - i as f64 / n).abs());
    }
    Ok(d)
}

fn criterion_9(_: &Path) -> Result<Verdict, String> {
    const SAMPLES: usize = 100_000;
    const ALPHA: f64 = 1e-4;
    let eps = ((2.0 / ALPHA).ln() / (2.0 * SAMPLES as f64)).sqrt();
    let phis = [
        OrliczFunction::identity(),
        OrliczFunction::Power { p: 2.5 },
        OrliczFunction::ScaledExp { c: 1.0 },
        OrliczFunction::PiecewiseLinear { breakpoints: vec![[0.2, 0.1], [0.5, 0.7], [1.0, 2.5]] },
    ];
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let (mut worst_ks, mut quantile_misses, mut order_misses) = (0.0f64, 0, 0);
    for t in 0..100 {
        let body = match t % 5 {
            0 | 1 => {
                let v = rng.gen_range(4..12);
                random_polygon(&mut rng, v, 0.1)
            }
            2 => random_polytope(&mut rng, 14, 0.1),
            3 => random_ellipse(&mut rng),
            _ => Ok(Body::ball(2 + t % 2, rng.gen_range(0.5..1.5)).unwrap()),
        }
        .map_err(|e| e.to_string())?;
        let n = body.dim();
        let len = rng.gen_range(0.5..2.0);
        let x: Vec<f64> = {
            let v: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect();
            let norm = v.iter().map(|c| c * c).sum::<f64>().sqrt();
            v.iter().map(|c| c * len / norm).collect()
        };
        let phi = &phis[t % phis.len()];
        let profile = RearrangementProfile::exact(&body, &x).map_err(|e| e.to_string())?;
        let pts = UniformSampler::new(&body).map_err(|e| e.to_string())?.sample_flat(SAMPLES, 0x9000 + t as u64);
        let g: Vec<f64> = pts.chunks_exact(n).map(|y| y.iter().zip(&x).map(|(a, b)| a * b).sum::<f64>()).collect();
        let mut abs_g: Vec<f64> = g.iter().map(|v| v.abs()).collect();
        abs_g.sort_by(f64::total_cmp);
        worst_ks = worst_ks.max(ks_distance(&abs_g, &profile)?);
        let mut phi_g: Vec<f64> = g.iter().map(|v| phi.eval(v.abs())).collect();
        phi_g.sort_by(|a, b| b.total_cmp(a));
        abs_g.reverse();
        if phi_g.iter().zip(&abs_g).any(|(a, b)| *a != phi.eval(*b)) {
            order_misses += 1;
        }
        for k in 1..100 {
            let q = k as f64 / 100.0;
            let emp = phi_g[((q * SAMPLES as f64).ceil() as usize).clamp(1, SAMPLES) - 1];
            let hi = phi.eval(profile.fstar((q - eps).max(1e-12)).map_err(|e| e.to_string())?);
            let lo = phi.eval(profile.fstar((q + eps).min(1.0 - 1e-12)).map_err(|e| e.to_string())?);
            if !(lo <= emp && emp <= hi) {
                quantile_misses += 1;
            }
        }
    }
    verdict(
        worst_ks <= eps && quantile_misses == 0 && order_misses == 0,
        format!(
            "100 triples at {SAMPLES} samples: max KS {worst_ks:.2e} <= DKW {eps:.2e}, {quantile_misses} quantile misses, {order_misses} (phi|g|)* mismatches"
        ),
    )
}

fn main() {
    let criteria = [
        Criterion { id: 1, name: "norm solver on square closed forms", limit: Duration::from_secs(1), check: criterion_1 },
        Criterion { id: 2, name: "L_p moments of random polygons", limit: Duration::from_secs(120), check: criterion_2 },
        Criterion { id: 3, name: "support sandwich", limit: Duration::from_secs(300), check: criterion_3 },
        Criterion { id: 4, name: "linear equivariance", limit: Duration::from_secs(120), check: criterion_4 },
        Criterion { id: 5, name: "Steiner volume preservation", limit: Duration::from_secs(60), check: criterion_5 },
        Criterion { id: 6, name: "Steiner support inequality", limit: Duration::from_secs(600), check: criterion_6 },
        Criterion { id: 7, name: "inclusion and volume monotonicity", limit: Duration::from_secs(600), check: criterion_7 },
        Criterion { id: 8, name: "volume ratio against the ball", limit: Duration::from_secs(1800), check: criterion_8 },
        Criterion { id: 9, name: "rearrangement correctness", limit: Duration::from_secs(120), check: criterion_9 },
    ];
    let wanted: Vec<u32> = std::env::args().skip(1).filter_map(|a| a.parse().ok()).collect();
    let dir = tempfile::tempdir().expect("temporary output directory");
    let mut failed = 0;
    for c in criteria.iter().filter(|c| wanted.is_empty() || wanted.contains(&c.id)) {
        let start = Instant::now();
        let result = (c.check)(dir.path());
        let elapsed = start.elapsed();
        let (pass, detail) = match result {
            Ok(v) => (v.pass && elapsed <= c.limit, v.detail),
            Err(e) => (false, format!("error: {e}")),
        };
        if !pass {
            failed += 1;
        }
        println!(
            "{} criterion {} {}: {} [{:.2} s, limit {} s]",
            if pass { "PASS" } else { "FAIL" },
            c.id,
            c.name,
            detail,
            elapsed.as_secs_f64(),
            c.limit.as_secs()
        );
    }
    if failed > 0 {
        println!("{failed} criteria failed");
        std::process::exit(1);
    }
}
