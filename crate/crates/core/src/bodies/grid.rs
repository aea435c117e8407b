//! Deterministic direction grids on S^{n-1}.

use std::collections::HashMap;
use std::f64::consts::PI;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::error::{Error, Result};
use crate::geom::hull3::P3;
use crate::linalg::Direction;

/// `m` equally spaced angles `2 pi k / m`.
pub fn circle(m: usize) -> Vec<Direction> {
    (0..m).map(|k| Direction::from_angle(2.0 * PI * k as f64 / m as f64)).collect()
}

/// Fibonacci lattice of `m` points on S^2.
pub fn fibonacci(m: usize) -> Vec<Direction> {
    let golden = PI * (3.0 - 5f64.sqrt());
    (0..m)
        .map(|i| {
            let z = 1.0 - (2.0 * i as f64 + 1.0) / m as f64;
            let r = (1.0 - z * z).sqrt();
            let a = golden * i as f64;
            Direction::normalize(&[r * a.cos(), r * a.sin(), z]).unwrap()
        })
        .collect()
}

/// Geodesic icosphere with `10 * 4^level + 2` vertices; centrally symmetric.
pub fn icosphere(level: u32) -> Vec<Direction> {
    let t = (1.0 + 5f64.sqrt()) / 2.0;
    let mut verts: Vec<P3> = [
        [-1.0, t, 0.0],
        [1.0, t, 0.0],
        [-1.0, -t, 0.0],
        [1.0, -t, 0.0],
        [0.0, -1.0, t],
        [0.0, 1.0, t],
        [0.0, -1.0, -t],
        [0.0, 1.0, -t],
        [t, 0.0, -1.0],
        [t, 0.0, 1.0],
        [-t, 0.0, -1.0],
        [-t, 0.0, 1.0],
    ]
    .iter()
    .map(|&p| unit3(p))
    .collect();
    let mut faces: Vec<[usize; 3]> = vec![
        [0, 11, 5],
        [0, 5, 1],
        [0, 1, 7],
        [0, 7, 10],
        [0, 10, 11],
        [1, 5, 9],
        [5, 11, 4],
        [11, 10, 2],
        [10, 7, 6],
        [7, 1, 8],
        [3, 9, 4],
        [3, 4, 2],
        [3, 2, 6],
        [3, 6, 8],
        [3, 8, 9],
        [4, 9, 5],
        [2, 4, 11],
        [6, 2, 10],
        [8, 6, 7],
        [9, 8, 1],
    ];
    for _ in 0..level {
        let mut mid: HashMap<(usize, usize), usize> = HashMap::new();
        let mut next = Vec::with_capacity(faces.len() * 4);
        let mut midpoint = |a: usize, b: usize, verts: &mut Vec<P3>| {
            let key = (a.min(b), a.max(b));
            *mid.entry(key).or_insert_with(|| {
                let (p, q) = (verts[a], verts[b]);
                verts.push(unit3([p[0] + q[0], p[1] + q[1], p[2] + q[2]]));
                verts.len() - 1
            })
        };
        for [a, b, c] in faces {
            let ab = midpoint(a, b, &mut verts);
            let bc = midpoint(b, c, &mut verts);
            let ca = midpoint(c, a, &mut verts);
            next.extend([[a, ab, ca], [b, bc, ab], [c, ca, bc], [ab, bc, ca]]);
        }
        faces = next;
    }
    verts.into_iter().map(|p| Direction::normalize(&p).unwrap()).collect()
}

fn unit3(p: P3) -> P3 {
    let l = (p[0] * p[0] + p[1] * p[1] + p[2] * p[2]).sqrt();
    [p[0] / l, p[1] / l, p[2] / l]
}

/// Random centrally symmetric grid of `m` (even) directions in R^n.
pub fn random_symmetric(n: usize, m: usize, seed: u64) -> Vec<Direction> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(m);
    while out.len() + 1 < m {
        let v: Vec<f64> = (0..n).map(|_| StandardNormal.sample(&mut rng)).collect();
        if let Ok(d) = Direction::normalize(&v) {
            out.push(d.neg());
            out.push(d);
        }
    }
    out
}

/// The grid used for centroid bodies: uniform angles in the plane, an
/// icosphere when `m = 10 * 4^k + 2` in R^3 and a Fibonacci lattice otherwise.
pub fn default_grid(n: usize, m: usize) -> Result<Vec<Direction>> {
    match n {
        2 => Ok(circle(m)),
        3 => Ok((0..8).find(|&k| 10 * 4usize.pow(k) + 2 == m).map(icosphere).unwrap_or_else(|| fibonacci(m))),
        n if n >= 4 => Ok(random_symmetric(n, m, 0x5eed)),
        _ => Err(Error::DimensionUnsupported { dim: n, what: "direction grids" }),
    }
}

/// For every grid index its antipode's index, when present.
pub fn antipodes(grid: &[Direction]) -> Vec<Option<usize>> {
    let key = |v: &[f64]| v.iter().map(|c| (c * 1e9).round() as i64).collect::<Vec<_>>();
    let index: HashMap<Vec<i64>, usize> = grid.iter().enumerate().map(|(i, d)| (key(d), i)).collect();
    grid.iter().map(|d| index.get(&key(&d.neg())).copied()).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn icosphere_counts_and_symmetry() {
        for (level, count) in [(0, 12), (1, 42), (4, 2562)] {
            let g = icosphere(level);
            assert_eq!(g.len(), count);
            assert!(antipodes(&g).iter().all(|a| a.is_some()));
        }
    }

    #[test]
    fn circle_grid_is_antipodal_for_even_m() {
        let g = circle(16);
        let a = antipodes(&g);
        assert_eq!(a[0], Some(8));
        assert_eq!(a[3], Some(11));
        assert!(antipodes(&circle(7)).iter().all(|a| a.is_none()));
    }

    #[test]
    fn fibonacci_points_are_unit() {
        assert!(fibonacci(100).iter().all(|d| (crate::linalg::norm(d) - 1.0).abs() < 1e-12));
        assert_eq!(default_grid(3, 2562).unwrap().len(), 2562);
    }
}
