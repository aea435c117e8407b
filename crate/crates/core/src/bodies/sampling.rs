//! Uniform sampling from bodies and Monte Carlo volumes.

use nalgebra::DMatrix;
use rand::distributions::WeightedIndex;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Exp1, StandardNormal};

use super::{Body, Representation};
use crate::error::{Error, Result};

enum Kind {
    Ball { radius: f64 },
    Ellipsoid { chol: DMatrix<f64> },
    /// Simplices with the origin as apex, chosen proportionally to volume.
    Cones { simplices: Vec<Vec<Vec<f64>>>, pick: WeightedIndex<f64> },
    Rejection { lo: Vec<f64>, hi: Vec<f64> },
}

/// Draws independent uniform points from a body.
pub struct UniformSampler<'a> {
    body: &'a Body,
    dim: usize,
    kind: Kind,
}

impl<'a> UniformSampler<'a> {
    pub fn new(body: &'a Body) -> Result<Self> {
        let dim = body.dim();
        let kind = match body.repr() {
            Representation::Ball { radius } => Kind::Ball { radius: *radius },
            Representation::Ellipsoid(e) => {
                let chol = e
                    .shape()
                    .clone()
                    .cholesky()
                    .ok_or_else(|| Error::InvalidBody("shape matrix has no Cholesky factor".into()))?;
                Kind::Ellipsoid { chol: chol.l() }
            }
            repr => {
                let poly = match repr {
                    Representation::Polytope(p) => Some(p),
                    Representation::SupportSampled(s) => s.polytope(),
                    _ => None,
                };
                match poly.and_then(cone_simplices) {
                    Some(simplices) => {
                        let w: Vec<f64> = simplices.iter().map(|s| simplex_volume(s)).collect();
                        let pick = WeightedIndex::new(&w).map_err(|e| Error::Degenerate(e.to_string()))?;
                        Kind::Cones { simplices, pick }
                    }
                    None => {
                        let (lo, hi): (Vec<f64>, Vec<f64>) = bounding_box(body).into_iter().unzip();
                        Kind::Rejection { lo, hi }
                    }
                }
            }
        };
        Ok(Self { body, dim, kind })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Writes one uniform point into `out`.
    pub fn sample_into<R: Rng + ?Sized>(&self, rng: &mut R, out: &mut [f64]) {
        let n = self.dim;
        match &self.kind {
            Kind::Ball { radius } => ball_point(rng, n, *radius, out),
            Kind::Ellipsoid { chol } => {
                let mut z = vec![0.0; n];
                ball_point(rng, n, 1.0, &mut z);
                for i in 0..n {
                    out[i] = (0..=i).map(|j| chol[(i, j)] * z[j]).sum();
                }
            }
            Kind::Cones { simplices, pick } => {
                let s = &simplices[pick.sample(rng)];
                // barycentric weights from normalized exponentials; apex is the origin
                let w: Vec<f64> = (0..=n).map(|_| Exp1.sample(rng)).collect();
                let total: f64 = w.iter().sum();
                out.iter_mut().for_each(|c| *c = 0.0);
                for (k, v) in s.iter().enumerate() {
                    let b = w[k + 1] / total;
                    for i in 0..n {
                        out[i] += b * v[i];
                    }
                }
            }
            Kind::Rejection { lo, hi } => loop {
                for i in 0..n {
                    out[i] = rng.gen_range(lo[i]..hi[i]);
                }
                if self.body.contains(out, 0.0) {
                    break;
                }
            },
        }
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> Vec<f64> {
        let mut out = vec![0.0; self.dim];
        self.sample_into(rng, &mut out);
        out
    }

    /// `count` points, row-major in one buffer.
    pub fn sample_flat(&self, count: usize, seed: u64) -> Vec<f64> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut buf = vec![0.0; count * self.dim];
        for chunk in buf.chunks_exact_mut(self.dim) {
            self.sample_into(&mut rng, chunk);
        }
        buf
    }
}

fn ball_point<R: Rng + ?Sized>(rng: &mut R, n: usize, radius: f64, out: &mut [f64]) {
    loop {
        let mut s = 0.0;
        for c in out.iter_mut() {
            *c = StandardNormal.sample(rng);
            s += *c * *c;
        }
        if s > 0.0 {
            let r = radius * rng.gen::<f64>().powf(1.0 / n as f64) / s.sqrt();
            out.iter_mut().for_each(|c| *c *= r);
            return;
        }
    }
}

fn cone_simplices(p: &super::Polytope) -> Option<Vec<Vec<Vec<f64>>>> {
    if let Some(poly) = p.polygon() {
        let n = poly.len();
        return Some((0..n).map(|i| vec![poly[i].to_vec(), poly[(i + 1) % n].to_vec()]).collect());
    }
    let (v, tris) = p.triangles()?;
    Some(tris.iter().map(|t| t.iter().map(|&i| v[i].to_vec()).collect()).collect())
}

/// Volume of the simplex spanned by the origin and the given points.
fn simplex_volume(s: &[Vec<f64>]) -> f64 {
    let n = s.len();
    let m = DMatrix::from_fn(n, n, |i, j| s[j][i]);
    let fact: f64 = (1..=n).map(|k| k as f64).product();
    m.determinant().abs() / fact
}

/// Coordinate bounding box of a body.
pub fn bounding_box(body: &Body) -> Vec<(f64, f64)> {
    if let Representation::SupportSampled(s) = body.repr() {
        return s.bounding_box();
    }
    (0..body.dim())
        .map(|k| {
            let mut e = vec![0.0; body.dim()];
            e[k] = 1.0;
            let hi = body.support(&e);
            e[k] = -1.0;
            (-body.support(&e), hi)
        })
        .collect()
}

/// Hit-or-miss volume in the bounding box; returns (estimate, 1 sigma).
pub fn monte_carlo_volume(body: &Body, samples: usize, seed: u64) -> Result<(f64, f64)> {
    if samples == 0 {
        return Err(Error::Domain("Monte Carlo volume needs at least one sample".into()));
    }
    let bbox = bounding_box(body);
    if bbox.iter().any(|(lo, hi)| !(hi > lo) || !lo.is_finite() || !hi.is_finite()) {
        return Err(Error::InvalidBody("body has no finite bounding box".into()));
    }
    let box_vol: f64 = bbox.iter().map(|(lo, hi)| hi - lo).product();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut y = vec![0.0; body.dim()];
    let mut hits = 0usize;
    for _ in 0..samples {
        for (c, (lo, hi)) in y.iter_mut().zip(&bbox) {
            *c = rng.gen_range(*lo..*hi);
        }
        hits += body.contains(&y, 0.0) as usize;
    }
    let p = hits as f64 / samples as f64;
    Ok((box_vol * p, box_vol * (p * (1.0 - p) / samples as f64).sqrt()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bodies::Polytope;

    #[test]
    fn mc_volume_of_four_cube_and_cross_polytope() {
        let cube: Body = Polytope::cube(4, 1.0).unwrap().into();
        let v = cube.volume().unwrap();
        assert!(!v.exact);
        assert!((v.value - 16.0).abs() < 1e-9);
        let cross: Body = Polytope::cross_polytope(4, 1.0).unwrap().into();
        let v = cross.volume_with(400_000, 7).unwrap();
        let exact = 16.0 / 24.0;
        assert!((v.value - exact).abs() < 5.0 * v.std_error, "{} +- {}", v.value, v.std_error);
    }

    #[test]
    fn samples_stay_inside() {
        let bodies = [
            Body::ball(3, 2.0).unwrap(),
            Body::ellipsoid_diagonal(&[4.0, 1.0]).unwrap(),
            Body::polytope(&[vec![-0.2, -0.3], vec![1.0, 0.1], vec![-0.1, 0.8]]).unwrap(),
            Polytope::cube(3, 1.0).unwrap().into(),
            Polytope::cross_polytope(4, 1.0).unwrap().into(),
        ];
        for b in &bodies {
            let s = UniformSampler::new(b).unwrap();
            let pts = s.sample_flat(2000, 3);
            assert!(pts.chunks(b.dim()).all(|p| b.contains(p, 1e-12)), "{}", b.kind());
        }
    }

    #[test]
    fn polygon_sample_mean_matches_centroid() {
        // triangle centroid
        let b = Body::polytope(&[vec![-0.2, -0.3], vec![1.0, 0.1], vec![-0.1, 0.8]]).unwrap();
        let s = UniformSampler::new(&b).unwrap();
        let n = 200_000;
        let pts = s.sample_flat(n, 11);
        let mx: f64 = pts.chunks(2).map(|p| p[0]).sum::<f64>() / n as f64;
        let my: f64 = pts.chunks(2).map(|p| p[1]).sum::<f64>() / n as f64;
        assert!((mx - 0.7 / 3.0).abs() < 3e-3 && (my - 0.6 / 3.0).abs() < 3e-3, "{mx} {my}");
    }
}
