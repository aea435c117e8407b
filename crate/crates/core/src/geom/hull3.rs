//! Convex hull in R^3.

use std::collections::HashMap;

use crate::error::{Error, Result};

pub type P3 = [f64; 3];

const SLIVER: f64 = 1e-9;

#[inline]
pub fn sub3(a: P3, b: P3) -> P3 {
    [a[0] - b[0], a[1] - b[1], a[2] - b[2]]
}

#[inline]
pub fn dot3(a: P3, b: P3) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

#[inline]
pub fn cross3(a: P3, b: P3) -> P3 {
    [a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]]
}

#[inline]
pub fn norm3(a: P3) -> f64 {
    dot3(a, a).sqrt()
}

/// Boundary of a 3-D convex hull as outward oriented triangles.
#[derive(Clone, Debug)]
pub struct Hull3 {
    /// Hull vertices (a subset of the input points).
    pub vertices: Vec<P3>,
    /// Counter-clockwise (seen from outside) triangles indexing `vertices`.
    pub triangles: Vec<[usize; 3]>,
}

#[derive(Clone, Debug)]
struct Face {
    v: [usize; 3],
    alive: bool,
    /// Input points strictly outside this face, not yet inserted.
    outside: Vec<usize>,
}

fn coord(p: P3) -> robust::Coord3D<f64> {
    robust::Coord3D { x: p[0], y: p[1], z: p[2] }
}

/// Positive when `p` lies strictly outside the face `[a, b, c]`, which is
/// counter-clockwise seen from outside. Exact sign.
fn above(pts: &[P3], v: [usize; 3], p: P3) -> f64 {
    -robust::orient3d(coord(pts[v[0]]), coord(pts[v[1]]), coord(pts[v[2]]), coord(p))
}

/// Approximate distance of `p` above the face plane.
fn height(pts: &[P3], v: [usize; 3], p: P3) -> f64 {
    let n = cross3(sub3(pts[v[1]], pts[v[0]]), sub3(pts[v[2]], pts[v[0]]));
    dot3(n, sub3(p, pts[v[0]])) / norm3(n).max(f64::MIN_POSITIVE)
}

/// Computes the convex hull of `points` by Quickhull with exact orientation
/// tests. Points on the hull boundary but not at a corner may be dropped.
///
/// Fails with [`Error::Degenerate`] when the points are affinely dependent
/// up to `rel_eps` times their scale.
pub fn convex_hull_3d(points: &[P3], rel_eps: f64) -> Result<Hull3> {
    if points.len() < 4 {
        return Err(Error::Degenerate(format!("{} points cannot span R^3", points.len())));
    }
    let scale = points
        .iter()
        .flat_map(|p| p.iter().map(|c| c.abs()))
        .fold(0.0f64, f64::max)
        .max(f64::MIN_POSITIVE);
    let eps = rel_eps * scale;

    // initial simplex from extreme points
    let i0 = (0..points.len()).min_by(|&i, &j| points[i][0].total_cmp(&points[j][0])).unwrap();
    let i1 = argmax(points, |p| norm3(sub3(*p, points[i0])));
    let d01 = sub3(points[i1], points[i0]);
    if norm3(d01) <= eps {
        return Err(Error::Degenerate("all points coincide".into()));
    }
    let i2 = argmax(points, |p| norm3(cross3(d01, sub3(*p, points[i0]))) / norm3(d01));
    let n012 = cross3(d01, sub3(points[i2], points[i0]));
    if norm3(n012) / norm3(d01) <= eps {
        return Err(Error::Degenerate("points are collinear".into()));
    }
    let i3 = argmax(points, |p| (dot3(n012, sub3(*p, points[i0])) / norm3(n012)).abs());
    if (dot3(n012, sub3(points[i3], points[i0])) / norm3(n012)).abs() <= eps {
        return Err(Error::Degenerate("points are coplanar".into()));
    }
    let simplex = [i0, i1, i2, i3];
    let mut faces: Vec<Face> = Vec::new();
    for (k, &other) in simplex.iter().enumerate().rev() {
        let mut v = [0; 3];
        let mut j = 0;
        for (m, &i) in simplex.iter().enumerate() {
            if m != k {
                v[j] = i;
                j += 1;
            }
        }
        if above(points, v, points[other]) > 0.0 {
            v.swap(1, 2);
        }
        faces.push(Face { v, alive: true, outside: Vec::new() });
    }
    // directed edge -> face owning it
    let mut owner: HashMap<(usize, usize), usize> = HashMap::new();
    for (fi, f) in faces.iter().enumerate() {
        for k in 0..3 {
            owner.insert((f.v[k], f.v[(k + 1) % 3]), fi);
        }
    }
    for i in 0..points.len() {
        if simplex.contains(&i) {
            continue;
        }
        if let Some(f) = (0..4).find(|&f| above(points, faces[f].v, points[i]) > 0.0) {
            faces[f].outside.push(i);
        }
    }

    let mut pending: Vec<usize> = (0..4).collect();
    let mut visible: Vec<usize> = Vec::new();
    let mut seen: Vec<bool> = Vec::new();
    while let Some(f0) = pending.pop() {
        if !faces[f0].alive || faces[f0].outside.is_empty() {
            continue;
        }
        let fv = faces[f0].v;
        let p = *faces[f0]
            .outside
            .iter()
            .max_by(|&&a, &&b| height(points, fv, points[a]).total_cmp(&height(points, fv, points[b])))
            .unwrap();
        let pt = points[p];

        // visible region by flood fill across shared edges
        seen.clear();
        seen.resize(faces.len(), false);
        visible.clear();
        visible.push(f0);
        seen[f0] = true;
        let mut horizon: Vec<(usize, usize)> = Vec::new();
        let mut head = 0;
        while head < visible.len() {
            let fi = visible[head];
            head += 1;
            let v = faces[fi].v;
            for k in 0..3 {
                let (a, b) = (v[k], v[(k + 1) % 3]);
                let nb = owner[&(b, a)];
                if seen[nb] {
                    continue;
                }
                if above(points, faces[nb].v, pt) > 0.0 {
                    seen[nb] = true;
                    visible.push(nb);
                } else {
                    horizon.push((a, b));
                }
            }
        }

        let mut orphans = Vec::new();
        for &fi in &visible {
            faces[fi].alive = false;
            orphans.append(&mut faces[fi].outside);
            let v = faces[fi].v;
            for k in 0..3 {
                owner.remove(&(v[k], v[(k + 1) % 3]));
            }
        }
        let first = faces.len();
        for &(a, b) in &horizon {
            let fi = faces.len();
            for e in [(a, b), (b, p), (p, a)] {
                owner.insert(e, fi);
            }
            faces.push(Face { v: [a, b, p], alive: true, outside: Vec::new() });
        }
        for q in orphans {
            if q == p {
                continue;
            }
            if let Some(f) = (first..faces.len()).find(|&f| above(points, faces[f].v, points[q]) > 0.0) {
                faces[f].outside.push(q);
            }
        }
        pending.extend(first..faces.len());
    }

    let mut index = vec![usize::MAX; points.len()];
    let mut vertices = Vec::new();
    let mut triangles = Vec::new();
    for f in faces.iter().filter(|f| f.alive) {
        let mut tri = [0usize; 3];
        for (k, &v) in f.v.iter().enumerate() {
            if index[v] == usize::MAX {
                index[v] = vertices.len();
                vertices.push(points[v]);
            }
            tri[k] = index[v];
        }
        triangles.push(tri);
    }
    Ok(Hull3 { vertices, triangles })
}

fn argmax(points: &[P3], f: impl Fn(&P3) -> f64) -> usize {
    let mut best = 0;
    let mut best_val = f64::NEG_INFINITY;
    for (i, p) in points.iter().enumerate() {
        let v = f(p);
        if v > best_val {
            best = i;
            best_val = v;
        }
    }
    best
}

impl Hull3 {
    pub fn volume(&self) -> f64 {
        let o = self.centroid();
        self.triangles
            .iter()
            .map(|t| {
                let a = sub3(self.vertices[t[0]], o);
                let b = sub3(self.vertices[t[1]], o);
                let c = sub3(self.vertices[t[2]], o);
                dot3(a, cross3(b, c)) / 6.0
            })
            .sum()
    }

    pub fn centroid(&self) -> P3 {
        let n = self.vertices.len() as f64;
        let mut c = [0.0; 3];
        for v in &self.vertices {
            for k in 0..3 {
                c[k] += v[k] / n;
            }
        }
        c
    }

    /// Distinct facet planes `(unit normal, offset)`, merging coplanar triangles
    /// and skipping slivers.
    pub fn facet_planes(&self, tol: f64) -> Vec<(P3, f64)> {
        let mut planes: Vec<(P3, f64)> = Vec::new();
        for t in &self.triangles {
            let [a, b, c] = t.map(|i| self.vertices[i]);
            let n = cross3(sub3(b, a), sub3(c, a));
            let len = norm3(n);
            let longest = norm3(sub3(b, a)).max(norm3(sub3(c, b))).max(norm3(sub3(a, c)));
            // slivers from nearly collinear points have meaningless normals
            if len <= SLIVER * longest * longest {
                continue;
            }
            let n = [n[0] / len, n[1] / len, n[2] / len];
            let d = dot3(n, a);
            if !planes.iter().any(|(m, e)| dot3(*m, n) > 1.0 - tol && (e - d).abs() <= tol * d.abs().max(1.0)) {
                planes.push((n, d));
            }
        }
        planes
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cube_hull() {
        let mut pts = Vec::new();
        for i in 0..8 {
            pts.push([
                if i & 1 == 0 { -1.0 } else { 1.0 },
                if i & 2 == 0 { -1.0 } else { 1.0 },
                if i & 4 == 0 { -1.0 } else { 1.0 },
            ]);
        }
        pts.push([0.1, 0.2, -0.3]);
        pts.push([1.0, 0.0, 0.0]); // on a facet
        let h = convex_hull_3d(&pts, 1e-12).unwrap();
        assert_eq!(h.vertices.len(), 8);
        assert_eq!(h.triangles.len(), 12);
        assert!((h.volume() - 8.0).abs() < 1e-12);
        assert_eq!(h.facet_planes(1e-9).len(), 6);
    }

    #[test]
    fn coplanar_points_rejected() {
        let pts = [[0.0, 0.0, 0.0], [1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [1.0, 1.0, 0.0]];
        assert!(matches!(convex_hull_3d(&pts, 1e-12), Err(Error::Degenerate(_))));
    }

    #[test]
    fn sphere_points_hull_volume() {
        // Fibonacci points on the unit sphere: hull volume below 4pi/3 and close for many points
        let n = 400;
        let golden = std::f64::consts::PI * (3.0 - 5f64.sqrt());
        let pts: Vec<P3> = (0..n)
            .map(|i| {
                let z = 1.0 - (2.0 * i as f64 + 1.0) / n as f64;
                let r = (1.0 - z * z).sqrt();
                let a = golden * i as f64;
                [r * a.cos(), r * a.sin(), z]
            })
            .collect();
        let h = convex_hull_3d(&pts, 1e-12).unwrap();
        assert_eq!(h.vertices.len(), n);
        let v = h.volume();
        let ball = 4.0 * std::f64::consts::PI / 3.0;
        assert!(v < ball && v > 0.98 * ball, "{v}");
        // Euler: for a triangulated sphere F = 2V - 4
        assert_eq!(h.triangles.len(), 2 * n - 4);
    }
}
