//! Exact slab volumes of planar and spatial polytopes as piecewise polynomials.

use crate::bodies::Polytope;
use crate::error::{Error, Result};
use crate::geom::polygon::{merge_sorted, slices};
use crate::linalg::dot;

/// `V(s) = |K ∩ {u . y >= s}|` for a polytope and a fixed unit direction `u`.
///
/// Between consecutive vertex heights the cross-section varies affinely, so
/// `V` is a polynomial of degree n there. In the plane the pieces come from
/// chord widths; in space each piece is fitted from four clipped volumes.
#[derive(Clone, Debug)]
pub struct SlabTable {
    z: Vec<f64>,
    /// `V(z_k + tau (z_{k+1} - z_k)) = sum_j c_j tau^j`
    coef: Vec<[f64; 4]>,
    volume: f64,
    /// breakpoints of `mu` on `[0, max |u . y|]`
    breaks: Vec<f64>,
    /// `mu` on `[breaks[j], breaks[j+1]]` as a polynomial in `s - breaks[j]`
    mu_local: Vec<[f64; 4]>,
    /// The same pieces in `breaks[j+1] - s`, pinned to the next piece's value
    /// (zero at the top) so that small `mu` keeps its relative accuracy.
    mu_right: Vec<[f64; 4]>,
}

impl SlabTable {
    pub fn new(poly: &Polytope, u: &[f64]) -> Result<Self> {
        let (z, coef, volume) = match poly.dim() {
            2 => Self::planar(poly, u),
            3 => Self::spatial(poly, u)?,
            n => return Err(Error::DimensionUnsupported { dim: n, what: "exact slab volumes" }),
        };
        let mut t = Self { z, coef, volume, breaks: Vec::new(), mu_local: Vec::new(), mu_right: Vec::new() };
        t.build_mu();
        Ok(t)
    }

    fn planar(poly: &Polytope, u: &[f64]) -> (Vec<f64>, Vec<[f64; 4]>, f64) {
        let sl = slices(&poly.polygon().unwrap(), [u[0], u[1]]);
        let z: Vec<f64> = sl.iter().map(|s| s.z).collect();
        let w: Vec<f64> = sl.iter().map(|s| (s.hi - s.lo).max(0.0)).collect();
        let m = z.len();
        let mut above = vec![0.0; m];
        for k in (0..m - 1).rev() {
            above[k] = above[k + 1] + 0.5 * (z[k + 1] - z[k]) * (w[k] + w[k + 1]);
        }
        let coef = (0..m - 1)
            .map(|k| {
                let d = z[k + 1] - z[k];
                [above[k], -d * w[k], -0.5 * d * (w[k + 1] - w[k]), 0.0]
            })
            .collect();
        (z, coef, above[0])
    }

    fn spatial(poly: &Polytope, u: &[f64]) -> Result<(Vec<f64>, Vec<[f64; 4]>, f64)> {
        let mut z: Vec<f64> = poly.vertices().iter().map(|v| dot(v, u)).collect();
        z.sort_by(f64::total_cmp);
        let span = z[z.len() - 1] - z[0];
        z.dedup_by(|b, a| *b - *a <= 1e-13 * span);
        let volume = poly.volume_exact()?;
        let above = |s: f64| poly.volume_above(u, s).unwrap();
        let mut coef = Vec::with_capacity(z.len() - 1);
        let mut left = volume;
        for k in 0..z.len() - 1 {
            let (a, b) = (z[k], z[k + 1]);
            let right = if k + 2 == z.len() { 0.0 } else { above(b) };
            let f1 = above(a + (b - a) / 3.0);
            let f2 = above(a + 2.0 * (b - a) / 3.0);
            let (f0, f3) = (left, right);
            coef.push([
                f0,
                (-11.0 * f0 + 18.0 * f1 - 9.0 * f2 + 2.0 * f3) / 2.0,
                4.5 * (2.0 * f0 - 5.0 * f1 + 4.0 * f2 - f3),
                4.5 * (-f0 + 3.0 * f1 - 3.0 * f2 + f3),
            ]);
            left = right;
        }
        Ok((z, coef, volume))
    }

    fn piece(&self, s: f64) -> Option<usize> {
        let z = &self.z;
        if s < z[0] || s >= z[z.len() - 1] {
            return None;
        }
        Some(z.partition_point(|&h| h <= s) - 1)
    }

    fn build_mu(&mut self) {
        // |z| is decreasing over the negative heights and increasing over the rest
        let split = self.z.partition_point(|&h| h < 0.0);
        let neg = self.z[..split].iter().rev().map(|h| -h);
        let pos = self.z[split..].iter().copied();
        let mut s = merge_sorted(std::iter::once(0.0).chain(neg), pos);
        s.dedup();
        let a = self.volume;
        let z = &self.z;
        let top = z.len() - 1;
        let mut local = Vec::with_capacity(s.len().saturating_sub(1));
        // piece pointers: V(s) sweeps up from 0, V(-s) sweeps down
        let mut kp = z.partition_point(|&h| h <= 0.0).saturating_sub(1);
        let mut km = kp;
        for j in 0..s.len() - 1 {
            let s0 = s[j];
            let mid = 0.5 * (s0 + s[j + 1]);
            while kp < top && z[kp + 1] <= mid {
                kp += 1;
            }
            while km > 0 && z[km] > -mid {
                km -= 1;
            }
            // V(s) with s = s0 + r
            let plus = if mid >= z[top] {
                [0.0; 4]
            } else if mid < z[0] {
                [a, 0.0, 0.0, 0.0]
            } else {
                let d = z[kp + 1] - z[kp];
                compose(&self.coef[kp], (s0 - z[kp]) / d, 1.0 / d)
            };
            // V(-s) with -s = -s0 - r
            let minus = if -mid < z[0] {
                [a, 0.0, 0.0, 0.0]
            } else if -mid >= z[top] {
                [0.0; 4]
            } else {
                let d = z[km + 1] - z[km];
                compose(&self.coef[km], (-s0 - z[km]) / d, -1.0 / d)
            };
            local.push([
                (plus[0] + a - minus[0]) / a,
                (plus[1] - minus[1]) / a,
                (plus[2] - minus[2]) / a,
                (plus[3] - minus[3]) / a,
            ]);
        }
        self.mu_right = (0..local.len())
            .map(|j| {
                let mut c = compose(&local[j], s[j + 1] - s[j], -1.0);
                c[0] = local.get(j + 1).map_or(0.0, |n| n[0]);
                c
            })
            .collect();
        self.breaks = s;
        self.mu_local = local;
    }

    pub fn volume(&self) -> f64 {
        self.volume
    }

    /// Heights of the vertices, ascending.
    pub fn heights(&self) -> &[f64] {
        &self.z
    }

    /// `V(s)`.
    pub fn above(&self, s: f64) -> f64 {
        let z = &self.z;
        if s <= z[0] {
            return self.volume;
        }
        match self.piece(s) {
            None => 0.0,
            Some(k) => {
                let tau = (s - z[k]) / (z[k + 1] - z[k]);
                horner(&self.coef[k], tau).clamp(0.0, self.volume)
            }
        }
    }

    /// `mu(s) = |{|u . y| > s}| / |K|` for `s >= 0`.
    pub fn mu(&self, s: f64) -> f64 {
        ((self.above(s) + self.volume - self.above(-s)) / self.volume).clamp(0.0, 1.0)
    }

    /// Breakpoints of `mu` on `[0, max |u . y|]`, ascending.
    pub fn mu_breakpoints(&self) -> &[f64] {
        &self.breaks
    }

    /// `mu` at each breakpoint, from the local pieces.
    pub fn mu_at_breaks(&self) -> Vec<f64> {
        let mut out: Vec<f64> = self.mu_local.iter().map(|c| c[0].clamp(0.0, 1.0)).collect();
        out.push(self.mu(self.breaks[self.breaks.len() - 1]));
        out
    }

    /// `mu` on piece `j` at `breaks[j] + r`.
    pub fn mu_piece(&self, j: usize, r: f64) -> f64 {
        horner(&self.mu_local[j], r)
    }

    /// `inf{s : mu(s) <= t}` restricted to piece `j`, expanded about the end
    /// whose `mu` is closer to `t`.
    pub fn invert_piece(&self, j: usize, t: f64) -> f64 {
        let len = self.breaks[j + 1] - self.breaks[j];
        let tol = 1e-15 * self.breaks[self.breaks.len() - 1];
        let (left, right) = (&self.mu_local[j], &self.mu_right[j]);
        if t - right[0] < left[0] - t {
            let neg = [-right[0], -right[1], -right[2], -right[3]];
            self.breaks[j + 1] - root_decreasing(&neg, -t, len, tol)
        } else {
            self.breaks[j] + root_decreasing(left, t, len, tol)
        }
    }
}

/// Root of the decreasing polynomial `c(x) = t` on `[0, len]`: closed form
/// for quadratics, safeguarded Newton otherwise.
fn root_decreasing(c: &[f64; 4], t: f64, len: f64, tol: f64) -> f64 {
    let (f0, f1) = (horner(c, 0.0) - t, horner(c, len) - t);
    if f0 <= 0.0 {
        return 0.0;
    }
    if f1 >= 0.0 {
        return len;
    }
    if c[3] == 0.0 {
        return quadratic_root(c, t, len);
    }
    let (mut lo, mut hi) = (0.0, len);
    let mut x = len * f0 / (f0 - f1);
    for _ in 0..100 {
        let fx = horner(c, x) - t;
        if fx > 0.0 {
            lo = x;
        } else {
            hi = x;
        }
        let d = c[1] + x * (2.0 * c[2] + 3.0 * x * c[3]);
        let mut next = if d < 0.0 { x - fx / d } else { f64::NAN };
        if !(next > lo && next < hi) {
            next = 0.5 * (lo + hi);
        }
        if (next - x).abs() <= tol || hi - lo <= tol {
            return next;
        }
        x = next;
    }
    x
}

/// Root of `c0 + c1 r + c2 r^2 = t` in `[0, len]` for a decreasing quadratic.
fn quadratic_root(c: &[f64; 4], t: f64, len: f64) -> f64 {
    let (a, b, k) = (c[2], c[1], c[0] - t);
    let disc = (b * b - 4.0 * a * k).max(0.0).sqrt();
    let q = -0.5 * (b + b.signum() * disc);
    let mut best = f64::NAN;
    for r in [if q != 0.0 { k / q } else { f64::NAN }, if a != 0.0 { q / a } else { f64::NAN }] {
        if r.is_finite() && (best.is_nan() || (r.clamp(0.0, len) - r).abs() < (best.clamp(0.0, len) - best).abs()) {
            best = r;
        }
    }
    if best.is_nan() {
        best = if b != 0.0 { -k / b } else { 0.0 };
    }
    best.clamp(0.0, len)
}

#[inline]
fn horner(c: &[f64; 4], x: f64) -> f64 {
    c[0] + x * (c[1] + x * (c[2] + x * c[3]))
}

/// Coefficients of `r -> p(a + b r)`.
fn compose(p: &[f64; 4], a: f64, b: f64) -> [f64; 4] {
    let (a2, b2) = (a * a, b * b);
    [
        p[0] + p[1] * a + p[2] * a2 + p[3] * a2 * a,
        b * (p[1] + 2.0 * p[2] * a + 3.0 * p[3] * a2),
        b2 * (p[2] + 3.0 * p[3] * a),
        b2 * b * p[3],
    ]
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn square_slab_is_linear() {
        let sq = Polytope::cube(2, 1.0).unwrap();
        let t = SlabTable::new(&sq, &[1.0, 0.0]).unwrap();
        for s in [0.0, 0.1, 0.5, 0.99] {
            assert!((t.mu(s) - (1.0 - s)).abs() < 1e-14);
        }
        assert_eq!(t.mu(1.0), 0.0);
        assert_eq!(t.volume(), 4.0);
    }

    fn pentagon() -> Polytope {
        Polytope::from_vertices(&[
            vec![-0.7, -0.4],
            vec![0.5, -0.9],
            vec![1.1, 0.2],
            vec![0.3, 0.8],
            vec![-0.6, 0.5],
        ])
        .unwrap()
    }

    fn pyramid() -> Polytope {
        Polytope::from_vertices(&[
            vec![1.0, 0.1, -0.2],
            vec![-0.5, 0.9, 0.1],
            vec![-0.4, -0.8, 0.3],
            vec![0.1, 0.2, 1.0],
            vec![0.2, -0.1, -0.9],
        ])
        .unwrap()
    }

    #[test]
    fn pieces_match_direct_clipping() {
        let p = pentagon();
        let u = [0.6, 0.8];
        let t = SlabTable::new(&p, &u).unwrap();
        assert!((t.volume() - p.volume_exact().unwrap()).abs() < 1e-14);
        for k in 0..=200 {
            let s = -1.2 + 2.4 * k as f64 / 200.0;
            let direct = p.volume_above(&u, s).unwrap();
            assert!((t.above(s) - direct).abs() < 1e-13, "s = {s}");
        }
        let c = pyramid();
        let u = [0.48, 0.6, 0.64];
        let t = SlabTable::new(&c, &u).unwrap();
        for k in 0..=200 {
            let s = -1.0 + 2.0 * k as f64 / 200.0;
            let direct = c.volume_above(&u, s).unwrap();
            assert!((t.above(s) - direct).abs() < 1e-13, "s = {s}");
        }
    }

    #[test]
    fn local_mu_pieces_agree_with_global() {
        for (p, u) in [(pentagon(), vec![0.6, 0.8]), (pyramid(), vec![0.48, 0.6, 0.64])] {
            let t = SlabTable::new(&p, &u).unwrap();
            let b = t.mu_breakpoints().to_vec();
            for j in 0..b.len() - 1 {
                for f in [0.0, 0.3, 0.7, 1.0] {
                    let r = f * (b[j + 1] - b[j]);
                    assert!((t.mu_piece(j, r) - t.mu(b[j] + r)).abs() < 1e-12);
                }
            }
        }
    }
}
