//! Planar primitives: convex hull, shoelace area, halfplane clipping.

pub type P2 = [f64; 2];

#[inline]
pub fn cross(o: P2, a: P2, b: P2) -> f64 {
    (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])
}

/// Signed area (positive for counter-clockwise order).
pub fn shoelace(poly: &[P2]) -> f64 {
    let n = poly.len();
    if n < 3 {
        return 0.0;
    }
    // anchor at the first vertex to limit cancellation
    let o = poly[0];
    let mut area = 0.0;
    for i in 1..n - 1 {
        area += cross(o, poly[i], poly[i + 1]);
    }
    0.5 * area
}

/// Convex hull in counter-clockwise order, collinear points removed.
///
/// `eps` is an absolute threshold on the cross product used to drop
/// (nearly) collinear points.
pub fn convex_hull(points: &[P2], eps: f64) -> Vec<P2> {
    let mut pts: Vec<P2> = points.to_vec();
    pts.sort_by(|a, b| a[0].total_cmp(&b[0]).then(a[1].total_cmp(&b[1])));
    pts.dedup();
    if pts.len() < 3 {
        return pts;
    }
    let mut hull: Vec<P2> = Vec::with_capacity(2 * pts.len());
    for pass in 0..2 {
        let start = hull.len();
        let iter: Box<dyn Iterator<Item = &P2>> =
            if pass == 0 { Box::new(pts.iter()) } else { Box::new(pts.iter().rev()) };
        for &p in iter {
            while hull.len() >= start + 2 && cross(hull[hull.len() - 2], hull[hull.len() - 1], p) <= eps {
                hull.pop();
            }
            hull.push(p);
        }
        hull.pop();
    }
    hull
}

/// Clips a convex polygon to `a . y <= b` (Sutherland-Hodgman, one plane).
pub fn clip_halfplane(poly: &[P2], a: P2, b: f64) -> Vec<P2> {
    let n = poly.len();
    let mut out = Vec::with_capacity(n + 1);
    if n == 0 {
        return out;
    }
    let val = |p: P2| a[0] * p[0] + a[1] * p[1] - b;
    let mut prev = poly[n - 1];
    let mut prev_val = val(prev);
    for &cur in poly {
        let cur_val = val(cur);
        if cur_val <= 0.0 {
            if prev_val > 0.0 {
                out.push(intersect(prev, cur, prev_val, cur_val));
            }
            out.push(cur);
        } else if prev_val <= 0.0 {
            out.push(intersect(prev, cur, prev_val, cur_val));
        }
        prev = cur;
        prev_val = cur_val;
    }
    out
}

#[inline]
fn intersect(p: P2, q: P2, vp: f64, vq: f64) -> P2 {
    let tau = vp / (vp - vq);
    [p[0] + tau * (q[0] - p[0]), p[1] + tau * (q[1] - p[1])]
}

/// Area of `poly ∩ {x . y >= s}` for a counter-clockwise convex polygon.
///
/// Each boundary edge is clipped to the halfplane and integrated as a
/// triangle fan around a point on the cutting line, so the cap edge
/// contributes nothing.
pub fn area_above(poly: &[P2], x: P2, s: f64) -> f64 {
    let xx = x[0] * x[0] + x[1] * x[1];
    let o = [s * x[0] / xx, s * x[1] / xx];
    let n = poly.len();
    let mut area = 0.0;
    for i in 0..n {
        let p = poly[i];
        let q = poly[(i + 1) % n];
        let hp = x[0] * p[0] + x[1] * p[1] - s;
        let hq = x[0] * q[0] + x[1] * q[1] - s;
        if hp < 0.0 && hq < 0.0 {
            continue;
        }
        let (p2, q2) = if hp >= 0.0 && hq >= 0.0 {
            (p, q)
        } else if hp >= 0.0 {
            (p, intersect(p, q, hp, hq))
        } else {
            (intersect(p, q, hp, hq), q)
        };
        area += cross(o, p2, q2);
    }
    0.5 * area
}

/// Chord of a convex polygon on the line `dir . y = z`, as an interval of
/// the coordinate `perp . y` with `perp = dir` rotated by +90 degrees.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Slice {
    pub z: f64,
    pub lo: f64,
    pub hi: f64,
}

/// Chords at every vertex height `dir . v`, ascending, for a
/// counter-clockwise convex polygon. Linear time after sorting heights.
pub fn slices(poly: &[P2], dir: P2) -> Vec<Slice> {
    let n = poly.len();
    let perp = [-dir[1], dir[0]];
    let hq: Vec<(f64, f64)> =
        poly.iter().map(|p| (dir[0] * p[0] + dir[1] * p[1], perp[0] * p[0] + perp[1] * p[1])).collect();
    let imin = (0..n).min_by(|&a, &b| hq[a].0.total_cmp(&hq[b].0)).unwrap();
    let imax = (0..n).max_by(|&a, &b| hq[a].0.total_cmp(&hq[b].0)).unwrap();
    let walk = |step: usize| {
        let mut chain = vec![hq[imin]];
        let mut i = imin;
        while i != imax {
            i = (i + step) % n;
            let (h, q) = hq[i];
            // heights are monotone along each chain up to rounding
            let h = h.max(chain[chain.len() - 1].0);
            chain.push((h, q));
        }
        chain
    };
    let a = walk(1);
    let b = walk(n - 1);
    let mut zs = merge_sorted(a.iter().map(|p| p.0), b.iter().map(|p| p.0));
    zs.dedup();
    let (mut pa, mut pb) = (0usize, 0usize);
    zs.into_iter()
        .map(|z| {
            let (alo, ahi) = chain_at(&a, &mut pa, z);
            let (blo, bhi) = chain_at(&b, &mut pb, z);
            Slice { z, lo: alo.min(blo), hi: ahi.max(bhi) }
        })
        .collect()
}

/// Merges two nondecreasing sequences.
pub fn merge_sorted(a: impl Iterator<Item = f64>, b: impl Iterator<Item = f64>) -> Vec<f64> {
    let (mut a, mut b) = (a.peekable(), b.peekable());
    let mut out = Vec::with_capacity(a.size_hint().0 + b.size_hint().0);
    loop {
        let next = match (a.peek(), b.peek()) {
            (Some(x), Some(y)) => {
                if x <= y {
                    a.next()
                } else {
                    b.next()
                }
            }
            (Some(_), None) => a.next(),
            (None, Some(_)) => b.next(),
            (None, None) => break,
        };
        out.push(next.unwrap());
    }
    out
}

fn chain_at(chain: &[(f64, f64)], ptr: &mut usize, z: f64) -> (f64, f64) {
    let len = chain.len();
    while *ptr + 1 < len && chain[*ptr + 1].0 < z {
        *ptr += 1;
    }
    let j = *ptr;
    let flat = |start: usize| {
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        let mut k = start;
        while k < len && chain[k].0 <= z {
            lo = lo.min(chain[k].1);
            hi = hi.max(chain[k].1);
            k += 1;
        }
        (lo, hi)
    };
    if chain[j].0 >= z {
        flat(j)
    } else if j + 1 < len {
        let (h0, q0) = chain[j];
        let (h1, q1) = chain[j + 1];
        if h1 <= z {
            flat(j + 1)
        } else {
            let q = q0 + (q1 - q0) * (z - h0) / (h1 - h0);
            (q, q)
        }
    } else {
        (chain[j].1, chain[j].1)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn hull_drops_interior_and_collinear() {
        let pts = [[0.0, 0.0], [1.0, 0.0], [2.0, 0.0], [2.0, 2.0], [0.0, 2.0], [1.0, 1.0]];
        let h = convex_hull(&pts, 1e-12);
        assert_eq!(h.len(), 4);
        assert!((shoelace(&h) - 4.0).abs() < 1e-15);
    }

    #[test]
    fn area_above_square_slab() {
        let sq = [[-1.0, -1.0], [1.0, -1.0], [1.0, 1.0], [-1.0, 1.0]];
        for s in [-1.5, -0.3, 0.0, 0.25, 0.9, 1.2] {
            let expect = (2.0f64 * (1.0 - s)).clamp(0.0, 4.0);
            assert!((area_above(&sq, [1.0, 0.0], s) - expect).abs() < 1e-14, "s = {s}");
        }
        // diagonal direction, s = 0 cuts the square in half
        assert!((area_above(&sq, [1.0, 1.0], 0.0) - 2.0).abs() < 1e-14);
    }

    #[test]
    fn slices_of_a_pentagon() {
        let poly = [[-0.7, -0.4], [0.5, -0.9], [1.1, 0.2], [0.3, 0.8], [-0.6, 0.5]];
        let dir = [0.6, 0.8];
        let sl = slices(&poly, dir);
        // two vertices share the top height
        assert_eq!(sl.len(), 4);
        assert!(sl[3].hi - sl[3].lo > 0.5);
        for s in &sl {
            // endpoints lie on the boundary: clipping to the line's halfplanes leaves nothing beyond
            let perp = [-dir[1], dir[0]];
            for q in [s.lo, s.hi] {
                let p = [dir[0] * s.z + perp[0] * q, dir[1] * s.z + perp[1] * q];
                let inside = (0..5).all(|i| cross(poly[i], poly[(i + 1) % 5], p) >= -1e-12);
                assert!(inside, "{p:?}");
            }
        }
        // flat bottom and top edges
        let sq = [[-1.0, -1.0], [1.0, -1.0], [1.0, 1.0], [-1.0, 1.0]];
        let sl = slices(&sq, [0.0, 1.0]);
        assert_eq!(sl, vec![Slice { z: -1.0, lo: -1.0, hi: 1.0 }, Slice { z: 1.0, lo: -1.0, hi: 1.0 }]);
    }

    #[test]
    fn clip_square_by_halfplane() {
        let sq = [[-1.0, -1.0], [1.0, -1.0], [1.0, 1.0], [-1.0, 1.0]];
        let c = clip_halfplane(&sq, [1.0, 1.0], 0.0);
        assert!((shoelace(&c) - 2.0).abs() < 1e-14);
    }
}
