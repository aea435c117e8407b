//! Low-level planar and spatial geometry used by the body representations.

pub mod hull3;
pub mod polygon;

use hull3::{cross3, dot3, sub3, P3};

/// Volume of `{y in K : x . y >= s}` for a polytope given by its outward
/// oriented boundary triangles.
///
/// Every triangle is clipped to the halfspace and coned to a point on the
/// cutting plane; the cap facet lies in that plane and contributes zero.
pub fn volume_above_3d(vertices: &[P3], triangles: &[[usize; 3]], x: P3, s: f64) -> f64 {
    let xx = dot3(x, x);
    let o = [s * x[0] / xx, s * x[1] / xx, s * x[2] / xx];
    let mut vol = 0.0;
    let mut buf: [P3; 4] = [[0.0; 3]; 4];
    for t in triangles {
        let p = t.map(|i| vertices[i]);
        let h = p.map(|v| dot3(x, v) - s);
        let inside = h.iter().filter(|&&v| v >= 0.0).count();
        if inside == 0 {
            continue;
        }
        let n = if inside == 3 {
            buf[..3].copy_from_slice(&p);
            3
        } else {
            // Sutherland-Hodgman against one plane, at most 4 output points
            let mut k = 0;
            for i in 0..3 {
                let j = (i + 1) % 3;
                if h[i] >= 0.0 {
                    buf[k] = p[i];
                    k += 1;
                }
                if (h[i] >= 0.0) != (h[j] >= 0.0) {
                    let tau = h[i] / (h[i] - h[j]);
                    buf[k] = [
                        p[i][0] + tau * (p[j][0] - p[i][0]),
                        p[i][1] + tau * (p[j][1] - p[i][1]),
                        p[i][2] + tau * (p[j][2] - p[i][2]),
                    ];
                    k += 1;
                }
            }
            k
        };
        let a = sub3(buf[0], o);
        for i in 1..n - 1 {
            vol += dot3(a, cross3(sub3(buf[i], o), sub3(buf[i + 1], o)));
        }
    }
    vol / 6.0
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cube_slab_volume() {
        let mut pts = Vec::new();
        for i in 0..8 {
            pts.push([
                if i & 1 == 0 { -1.0 } else { 1.0 },
                if i & 2 == 0 { -1.0 } else { 1.0 },
                if i & 4 == 0 { -1.0 } else { 1.0 },
            ]);
        }
        let h = hull3::convex_hull_3d(&pts, 1e-12).unwrap();
        for s in [-2.0, -0.5, 0.0, 0.3, 1.0] {
            let expect = (4.0f64 * (1.0 - s)).clamp(0.0, 8.0);
            let got = volume_above_3d(&h.vertices, &h.triangles, [1.0, 0.0, 0.0], s);
            assert!((got - expect).abs() < 1e-12, "s={s} got={got}");
        }
        // corner cut: {x+y+z >= 2} is a tetrahedron with legs 1 at the corner (1,1,1)
        let got = volume_above_3d(&h.vertices, &h.triangles, [1.0, 1.0, 1.0], 2.0);
        assert!((got - 1.0 / 6.0).abs() < 1e-12);
    }
}
