//! Spatial symmetrization by lifting the overlay of projected edges.

use std::collections::BTreeSet;

use crate::geom::hull3::{dot3, P3};
use crate::geom::polygon::P2;

/// Intersection of segments `ab` and `cd` in the plane, if proper or touching.
fn crossing(a: P2, b: P2, c: P2, d: P2) -> Option<P2> {
    let r = [b[0] - a[0], b[1] - a[1]];
    let s = [d[0] - c[0], d[1] - c[1]];
    let den = r[0] * s[1] - r[1] * s[0];
    let scale = (r[0].abs() + r[1].abs()) * (s[0].abs() + s[1].abs());
    if den.abs() <= 1e-14 * scale {
        return None;
    }
    let q = [c[0] - a[0], c[1] - a[1]];
    let t = (q[0] * s[1] - q[1] * s[0]) / den;
    let v = (q[0] * r[1] - q[1] * r[0]) / den;
    let eps = 1e-12;
    ((-eps..=1.0 + eps).contains(&t) && (-eps..=1.0 + eps).contains(&v)).then(|| [a[0] + t * r[0], a[1] + t * r[1]])
}

/// Points of the projection where `sigma` may break: projected vertices and
/// crossings of projected edges. `basis` spans `u⊥`.
pub(super) fn breakpoints(vertices: &[P3], triangles: &[[usize; 3]], basis: [P3; 2]) -> Vec<P2> {
    let proj: Vec<P2> = vertices.iter().map(|v| [dot3(*v, basis[0]), dot3(*v, basis[1])]).collect();
    let mut edges = BTreeSet::new();
    for t in triangles {
        for k in 0..3 {
            let (a, b) = (t[k], t[(k + 1) % 3]);
            edges.insert((a.min(b), a.max(b)));
        }
    }
    let edges: Vec<(usize, usize)> = edges.into_iter().collect();
    let mut out = proj.clone();
    for (i, &(a, b)) in edges.iter().enumerate() {
        for &(c, d) in &edges[i + 1..] {
            if a == c || a == d || b == c || b == d {
                continue;
            }
            if let Some(p) = crossing(proj[a], proj[b], proj[c], proj[d]) {
                out.push(p);
            }
        }
    }
    let scale = proj.iter().flat_map(|p| p.iter().map(|c| c.abs())).fold(0.0f64, f64::max);
    dedup(out, 1e-12 * scale)
}

/// Drops points within `tol` (max norm) of an earlier kept point.
fn dedup(mut pts: Vec<P2>, tol: f64) -> Vec<P2> {
    pts.sort_by(|a, b| a[0].total_cmp(&b[0]).then(a[1].total_cmp(&b[1])));
    let mut kept: Vec<P2> = Vec::with_capacity(pts.len());
    for p in pts {
        let start = kept.partition_point(|q| q[0] < p[0] - tol);
        if !kept[start..].iter().any(|q| (q[0] - p[0]).abs() <= tol && (q[1] - p[1]).abs() <= tol) {
            kept.push(p);
        }
    }
    kept
}
