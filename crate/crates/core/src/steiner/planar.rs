//! Planar symmetrization from the chord sweep.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use crate::geom::polygon::{slices, P2};

/// Breakpoints `(s, sigma(s))` of the half-length profile over the
/// projection, parametrized along `w = (u_1, -u_0)`.
pub(super) fn sigma_profile(poly: &[P2], u: P2) -> Vec<(f64, f64)> {
    slices(poly, [u[1], -u[0]]).into_iter().map(|s| (s.z, 0.5 * (s.hi - s.lo).max(0.0))).collect()
}

/// Vertices of `S_u K` and the area removed by simplification.
pub(super) fn symmetrize(poly: &[P2], u: P2, area_budget: f64) -> (Vec<P2>, f64) {
    let mut profile = sigma_profile(poly, u);
    let removed = simplify(&mut profile, area_budget);
    let w = [u[1], -u[0]];
    let mut out = Vec::with_capacity(2 * profile.len());
    for &(s, sig) in &profile {
        let base = [s * w[0], s * w[1]];
        out.push([base[0] + sig * u[0], base[1] + sig * u[1]]);
        if sig > 0.0 {
            out.push([base[0] - sig * u[0], base[1] - sig * u[1]]);
        }
    }
    (out, removed)
}

#[derive(PartialEq)]
struct Candidate {
    area: f64,
    index: usize,
    stamp: u32,
}

impl Eq for Candidate {}

impl Ord for Candidate {
    fn cmp(&self, other: &Self) -> Ordering {
        other.area.total_cmp(&self.area).then(other.index.cmp(&self.index))
    }
}

impl PartialOrd for Candidate {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Drops interior breakpoints of a concave profile, smallest effective area
/// first, while the body area lost (twice the profile area) fits `budget`.
/// Returns the body area removed.
pub(super) fn simplify(profile: &mut Vec<(f64, f64)>, budget: f64) -> f64 {
    let m = profile.len();
    if m < 3 || budget <= 0.0 {
        return 0.0;
    }
    let tri = |a: (f64, f64), b: (f64, f64), c: (f64, f64)| {
        // area of the profile lost by cutting b, never negative for a concave profile
        (0.5 * ((b.0 - a.0) * (c.1 - a.1) - (c.0 - a.0) * (b.1 - a.1))).abs()
    };
    let mut prev: Vec<usize> = (0..m).map(|i| i.wrapping_sub(1)).collect();
    let mut next: Vec<usize> = (1..=m).collect();
    let mut alive = vec![true; m];
    let mut stamp = vec![0u32; m];
    let mut heap = BinaryHeap::with_capacity(m);
    for i in 1..m - 1 {
        heap.push(Candidate { area: tri(profile[i - 1], profile[i], profile[i + 1]), index: i, stamp: 0 });
    }
    let mut removed = 0.0;
    while let Some(c) = heap.pop() {
        if !alive[c.index] || c.stamp != stamp[c.index] {
            continue;
        }
        let cost = 2.0 * c.area;
        if removed + cost > budget {
            break;
        }
        removed += cost;
        let (p, n) = (prev[c.index], next[c.index]);
        alive[c.index] = false;
        next[p] = n;
        prev[n] = p;
        for j in [p, n] {
            if j == 0 || j == m - 1 {
                continue;
            }
            stamp[j] += 1;
            let area = tri(profile[prev[j]], profile[j], profile[next[j]]);
            heap.push(Candidate { area, index: j, stamp: stamp[j] });
        }
    }
    let mut k = 0;
    profile.retain(|_| {
        k += 1;
        alive[k - 1]
    });
    removed
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn triangle_profile() {
        let tri = [[0.0, 0.0], [1.0, 0.0], [0.0, 1.0]];
        let p = sigma_profile(&tri, [0.0, 1.0]);
        // w = (1, 0)
        assert_eq!(p.len(), 2);
        assert!((p[0].0).abs() < 1e-15 && (p[0].1 - 0.5).abs() < 1e-15);
        assert!((p[1].0 - 1.0).abs() < 1e-15 && p[1].1.abs() < 1e-15);
    }

    #[test]
    fn simplification_respects_budget() {
        let m = 2000;
        let mut prof: Vec<(f64, f64)> = (0..=m)
            .map(|k| {
                let s = -1.0 + 2.0 * k as f64 / m as f64;
                (s, (1.0 - s * s).max(0.0).sqrt())
            })
            .collect();
        let area = |p: &[(f64, f64)]| p.windows(2).map(|w| (w[1].0 - w[0].0) * (w[0].1 + w[1].1)).sum::<f64>();
        let before = area(&prof);
        let removed = simplify(&mut prof, 1e-6);
        assert!(removed <= 1e-6 && removed > 0.0);
        assert!(prof.len() < m);
        assert!((before - area(&prof) - removed).abs() < 1e-12);
    }
}
