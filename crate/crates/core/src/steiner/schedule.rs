//! Iterated symmetrization along a direction schedule.

use std::io::Write;

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::{steiner_symmetrize_with, DEFAULT_AREA_BUDGET};
use crate::bodies::{grid, unit_ball_volume, Body, Representation};
use crate::error::Result;
use crate::linalg::{dot, unit_vector, Direction};

#[derive(Clone, Debug)]
pub struct ScheduleOptions {
    pub seed: u64,
    /// Simplification budget per step, relative to the volume.
    pub budget: f64,
    /// Rotation applied when a direction repeats its predecessor up to sign.
    pub jitter: f64,
    /// Keep every intermediate body rather than only the first and last.
    pub keep_bodies: bool,
}

impl Default for ScheduleOptions {
    fn default() -> Self {
        Self { seed: 0x57e1, budget: DEFAULT_AREA_BUDGET, jitter: 1e-3, keep_bodies: false }
    }
}

/// Coordinate axes first, then rational multiples of pi as angles.
pub fn default_schedule(n: usize, steps: usize, seed: u64) -> Vec<Direction> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let rational = |rng: &mut ChaCha8Rng| {
        let q: u32 = rng.gen_range(3..=97);
        let p: u32 = rng.gen_range(1..q);
        std::f64::consts::PI * p as f64 / q as f64
    };
    (0..steps)
        .map(|k| {
            if k < n {
                return Direction::axis(n, k);
            }
            let a = rational(&mut rng);
            if n == 2 {
                Direction::from_angle(a)
            } else {
                let b = 2.0 * rational(&mut rng);
                Direction::new(vec![a.sin() * b.cos(), a.sin() * b.sin(), a.cos()]).unwrap()
            }
        })
        .collect()
}

#[derive(Clone, Debug, Serialize)]
pub struct TraceStep {
    pub step: usize,
    pub direction: Vec<f64>,
    pub volume: f64,
    pub ball_distance: f64,
    pub vertex_count: usize,
    #[serde(skip)]
    pub simplified: f64,
    #[serde(skip)]
    pub jittered: bool,
}

/// `K_0 = K`, `K_i = S_{u_i} K_{i-1}` with per-step diagnostics.
#[derive(Clone, Debug)]
pub struct SymmetrizationTrace {
    /// All `K_i` with `keep_bodies`, otherwise `K_0` and the last body.
    pub bodies: Vec<Body>,
    pub steps: Vec<TraceStep>,
}

impl SymmetrizationTrace {
    /// `max_i |V_i - V_0| / V_0`.
    pub fn volume_drift(&self) -> f64 {
        let v0 = self.steps[0].volume;
        self.steps.iter().map(|s| (s.volume - v0).abs() / v0).fold(0.0, f64::max)
    }

    /// Total volume removed by simplification, relative to `V_0`.
    pub fn simplification_total(&self) -> f64 {
        self.steps.iter().map(|s| s.simplified).sum::<f64>() / self.steps[0].volume
    }

    /// Drift beyond what simplification accounts for.
    pub fn unexplained_drift(&self) -> f64 {
        let v0 = self.steps[0].volume;
        let mut removed = 0.0;
        let mut worst: f64 = 0.0;
        for s in &self.steps {
            removed += s.simplified;
            worst = worst.max((s.volume + removed - v0).abs() / v0);
        }
        worst
    }

    pub fn write_jsonl<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        for s in &self.steps {
            writeln!(w, "{}", serde_json::to_string(s).map_err(std::io::Error::other)?)?;
        }
        Ok(())
    }
}

pub fn symmetrization_schedule(body: &Body, step_count: usize) -> Result<SymmetrizationTrace> {
    symmetrization_schedule_with(body, step_count, &ScheduleOptions::default())
}

pub fn symmetrization_schedule_with(body: &Body, step_count: usize, opts: &ScheduleOptions) -> Result<SymmetrizationTrace> {
    run_schedule(body, &default_schedule(body.dim(), step_count, opts.seed), opts)
}

/// `max_v |h(K, v) - r|` with `r` the radius of the ball of volume `|K|`.
fn ball_distance(body: &Body, volume: f64, probes: &[Direction]) -> f64 {
    let n = body.dim();
    let r = (volume / unit_ball_volume(n)).powf(1.0 / n as f64);
    probes.iter().map(|v| (body.support(v) - r).abs()).fold(0.0, f64::max)
}

fn jitter(u: &Direction, angle: f64) -> Direction {
    let n = u.dim();
    // rotate toward the axis least aligned with u
    let axis = (0..n).min_by(|&a, &b| u[a].abs().total_cmp(&u[b].abs())).unwrap();
    let e = unit_vector(n, axis);
    let d = dot(&e, u);
    let w: Vec<f64> = e.iter().zip(u.iter()).map(|(a, b)| a - d * b).collect();
    let wn = dot(&w, &w).sqrt();
    let v: Vec<f64> = u.iter().zip(&w).map(|(a, b)| a * angle.cos() + b / wn * angle.sin()).collect();
    Direction::normalize(&v).unwrap()
}

pub fn run_schedule(body: &Body, directions: &[Direction], opts: &ScheduleOptions) -> Result<SymmetrizationTrace> {
    run_schedule_visit(body, directions, opts, |_, _| Ok(()))
}

/// Runs the schedule, handing each `(step, K_i)` to `visit` as it is produced,
/// including `K_0`.
pub fn run_schedule_visit(
    body: &Body,
    directions: &[Direction],
    opts: &ScheduleOptions,
    mut visit: impl FnMut(&TraceStep, &Body) -> Result<()>,
) -> Result<SymmetrizationTrace> {
    let n = body.dim();
    let probes = if n == 2 { grid::circle(360) } else { grid::icosphere(3) };
    let v0 = body.volume_exact()?;
    let count = |b: &Body| match b.repr() {
        Representation::Polytope(p) => p.vertices().len(),
        _ => 0,
    };
    let first = TraceStep {
        step: 0,
        direction: vec![0.0; n],
        volume: v0,
        ball_distance: ball_distance(body, v0, &probes),
        vertex_count: count(body),
        simplified: 0.0,
        jittered: false,
    };
    visit(&first, body)?;
    let mut steps = vec![first];
    let mut bodies = vec![body.clone()];
    let mut cur = body.clone();
    let mut prev: Option<Direction> = None;
    for (k, u) in directions.iter().enumerate() {
        let repeat = prev.as_ref().map_or(false, |p| dot(p, u).abs() > 1.0 - 1e-12);
        let u = if repeat { jitter(u, opts.jitter) } else { u.clone() };
        let sym = steiner_symmetrize_with(&cur, &u, opts.budget)?;
        let volume = sym.body.volume_exact()?;
        let step = TraceStep {
            step: k + 1,
            direction: u.as_slice().to_vec(),
            volume,
            ball_distance: ball_distance(&sym.body, volume, &probes),
            vertex_count: count(&sym.body),
            simplified: sym.simplified,
            jittered: repeat,
        };
        visit(&step, &sym.body)?;
        steps.push(step);
        if opts.keep_bodies {
            bodies.push(sym.body.clone());
        }
        cur = sym.body;
        prev = Some(u);
    }
    if !opts.keep_bodies && !directions.is_empty() {
        bodies.push(cur);
    }
    Ok(SymmetrizationTrace { bodies, steps })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bodies::Polytope;

    #[test]
    fn square_stalls_under_coordinate_schedule() {
        let sq: Body = Polytope::cube(2, 1.0).unwrap().into();
        let dirs: Vec<Direction> = (0..6).map(|k| Direction::axis(2, k % 2)).collect();
        let t = run_schedule(&sq, &dirs, &ScheduleOptions::default()).unwrap();
        let d0 = t.steps[0].ball_distance;
        assert!(t.steps.iter().all(|s| (s.ball_distance - d0).abs() < 1e-12));
        assert!(t.volume_drift() < 1e-14);
    }

    #[test]
    fn triangle_approaches_ball() {
        let tri = Body::polytope(&[vec![-0.25, -0.25], vec![0.75, -0.25], vec![-0.25, 0.75]]).unwrap();
        let t = symmetrization_schedule(&tri, 50).unwrap();
        let r = (t.steps[0].volume / std::f64::consts::PI).sqrt();
        let last = t.steps.last().unwrap();
        assert!(last.ball_distance < 0.05 * r, "{}", last.ball_distance / r);
        assert!(t.volume_drift() <= 1e-7);
        assert!(t.unexplained_drift() < 1e-12);
        let mut out = Vec::new();
        t.write_jsonl(&mut out).unwrap();
        let first: serde_json::Value = serde_json::from_str(std::str::from_utf8(&out).unwrap().lines().nth(1).unwrap()).unwrap();
        assert_eq!(first["step"], 1);
        assert!(first.get("vertex_count").is_some());
    }

    #[test]
    fn repeated_direction_is_jittered() {
        let sq: Body = Polytope::cube(2, 1.0).unwrap().into();
        let dirs = vec![Direction::axis(2, 0), Direction::axis(2, 0)];
        let t = run_schedule(&sq, &dirs, &ScheduleOptions::default()).unwrap();
        assert!(t.steps[2].jittered && !t.steps[1].jittered);
        assert!((dot(&t.steps[2].direction, &[1.0, 0.0]) - 1e-3f64.cos()).abs() < 1e-12);
    }

    #[test]
    fn ball_trace_is_flat() {
        let b = Body::ball(3, 1.0).unwrap();
        let t = symmetrization_schedule(&b, 5).unwrap();
        assert!(t.steps.iter().all(|s| s.ball_distance < 1e-12));
    }
}
