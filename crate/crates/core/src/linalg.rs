//! Small dense vector helpers, unit directions and GL(n) actions.

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::tol::{SINGULAR_DET, UNIT_TOL};

#[inline]
pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

#[inline]
pub fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

#[inline]
pub fn sub(a: &[f64], b: &[f64]) -> Vec<f64> {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

#[inline]
pub fn add(a: &[f64], b: &[f64]) -> Vec<f64> {
    a.iter().zip(b).map(|(x, y)| x + y).collect()
}

#[inline]
pub fn scale(a: &[f64], c: f64) -> Vec<f64> {
    a.iter().map(|x| x * c).collect()
}

/// `a + c * b`
#[inline]
pub fn axpy(a: &[f64], c: f64, b: &[f64]) -> Vec<f64> {
    a.iter().zip(b).map(|(x, y)| x + c * y).collect()
}

pub fn unit_vector(dim: usize, axis: usize) -> Vec<f64> {
    let mut e = vec![0.0; dim];
    e[axis] = 1.0;
    e
}

/// Orthonormal basis of the hyperplane orthogonal to the unit vector `u`.
///
/// In the plane the basis vector is `u` rotated by -90 degrees, so that
/// `(w, u)` is positively oriented.
pub fn orthonormal_complement(u: &[f64]) -> Vec<Vec<f64>> {
    let n = u.len();
    if n == 2 {
        return vec![vec![u[1], -u[0]]];
    }
    let mut basis: Vec<Vec<f64>> = Vec::with_capacity(n - 1);
    // Gram-Schmidt over the standard basis, skipping the axis most aligned with u.
    let skip = (0..n)
        .max_by(|&i, &j| u[i].abs().total_cmp(&u[j].abs()))
        .unwrap_or(0);
    for axis in (0..n).filter(|&i| i != skip) {
        let mut v = unit_vector(n, axis);
        let c = dot(&v, u);
        v = axpy(&v, -c, u);
        for b in &basis {
            let c = dot(&v, b);
            v = axpy(&v, -c, b);
        }
        let len = norm(&v);
        basis.push(scale(&v, 1.0 / len));
    }
    basis
}

/// A unit vector in R^n.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<f64>", into = "Vec<f64>")]
pub struct Direction(Vec<f64>);

impl Direction {
    /// Wraps `u`, which must already have unit length within 1e-12.
    pub fn new(u: Vec<f64>) -> Result<Self> {
        let len = norm(&u);
        if len == 0.0 {
            return Err(Error::ZeroDirection);
        }
        if (len - 1.0).abs() > UNIT_TOL {
            return Err(Error::Domain(format!("direction has norm {len}, expected 1")));
        }
        Ok(Self(u))
    }

    pub fn normalize(v: &[f64]) -> Result<Self> {
        let len = norm(v);
        if !(len > 0.0) || !len.is_finite() {
            return Err(Error::ZeroDirection);
        }
        Ok(Self(scale(v, 1.0 / len)))
    }

    pub fn axis(dim: usize, axis: usize) -> Self {
        Self(unit_vector(dim, axis))
    }

    /// Planar direction `(cos a, sin a)`.
    pub fn from_angle(angle: f64) -> Self {
        Self(vec![angle.cos(), angle.sin()])
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn neg(&self) -> Self {
        Self(self.0.iter().map(|x| -x).collect())
    }
}

impl std::ops::Deref for Direction {
    type Target = [f64];
    fn deref(&self) -> &[f64] {
        &self.0
    }
}

impl TryFrom<Vec<f64>> for Direction {
    type Error = Error;
    fn try_from(v: Vec<f64>) -> Result<Self> {
        Direction::normalize(&v)
    }
}

impl From<Direction> for Vec<f64> {
    fn from(d: Direction) -> Self {
        d.0
    }
}

/// An invertible linear map of R^n.
#[derive(Clone, Debug, PartialEq)]
pub struct LinearMap {
    matrix: DMatrix<f64>,
    det: f64,
}

impl LinearMap {
    pub fn new(matrix: DMatrix<f64>) -> Result<Self> {
        if !matrix.is_square() {
            return Err(Error::Domain(format!(
                "linear map must be square, got {}x{}",
                matrix.nrows(),
                matrix.ncols()
            )));
        }
        let det = matrix.determinant();
        if !(det.abs() > SINGULAR_DET) {
            return Err(Error::SingularMap(det.abs()));
        }
        Ok(Self { matrix, det })
    }

    /// Builds a map from row-major entries.
    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let n = rows.len();
        if rows.iter().any(|r| r.len() != n) {
            return Err(Error::Domain("linear map rows must all have length n".into()));
        }
        Self::new(DMatrix::from_fn(n, n, |i, j| rows[i][j]))
    }

    pub fn identity(dim: usize) -> Self {
        Self { matrix: DMatrix::identity(dim, dim), det: 1.0 }
    }

    pub fn scaling(dim: usize, c: f64) -> Result<Self> {
        Self::new(DMatrix::identity(dim, dim) * c)
    }

    pub fn diagonal(diag: &[f64]) -> Result<Self> {
        let n = diag.len();
        Self::new(DMatrix::from_fn(n, n, |i, j| if i == j { diag[i] } else { 0.0 }))
    }

    pub fn rotation2(angle: f64) -> Self {
        let (s, c) = angle.sin_cos();
        Self::new(DMatrix::from_row_slice(2, 2, &[c, -s, s, c])).expect("rotation is invertible")
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.matrix
    }

    pub fn det(&self) -> f64 {
        self.det
    }

    pub fn apply(&self, v: &[f64]) -> Vec<f64> {
        let n = self.dim();
        (0..n).map(|i| (0..n).map(|j| self.matrix[(i, j)] * v[j]).sum()).collect()
    }

    /// `A^t v`
    pub fn apply_transpose(&self, v: &[f64]) -> Vec<f64> {
        let n = self.dim();
        (0..n).map(|i| (0..n).map(|j| self.matrix[(j, i)] * v[j]).sum()).collect()
    }

    pub fn inverse(&self) -> Self {
        let inv = self.matrix.clone().try_inverse().expect("checked invertible at construction");
        Self { det: 1.0 / self.det, matrix: inv }
    }

    pub fn transpose(&self) -> Self {
        Self { matrix: self.matrix.transpose(), det: self.det }
    }

    /// If `A A^t = c^2 I`, returns `c`.
    pub fn similarity_factor(&self) -> Option<f64> {
        let g = &self.matrix * self.matrix.transpose();
        let n = self.dim();
        let c2 = g[(0, 0)];
        let tol = 1e-12 * c2.abs().max(1.0);
        for i in 0..n {
            for j in 0..n {
                let target = if i == j { c2 } else { 0.0 };
                if (g[(i, j)] - target).abs() > tol {
                    return None;
                }
            }
        }
        Some(c2.sqrt())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn complement_is_orthonormal() {
        for u in [vec![1.0, 0.0, 0.0], vec![0.6, 0.0, 0.8], vec![0.5, 0.5, 0.5f64.sqrt()]] {
            let basis = orthonormal_complement(&u);
            assert_eq!(basis.len(), 2);
            for (i, b) in basis.iter().enumerate() {
                assert!(dot(b, &u).abs() < 1e-14);
                assert!((norm(b) - 1.0).abs() < 1e-14);
                for c in &basis[i + 1..] {
                    assert!(dot(b, c).abs() < 1e-14);
                }
            }
        }
        let w = &orthonormal_complement(&[0.0, 1.0])[0];
        // (w, u) positively oriented
        assert!((w[0] * 1.0 - w[1] * 0.0 - 1.0).abs() < 1e-15);
    }

    #[test]
    fn rejects_singular_and_non_unit() {
        assert!(matches!(
            LinearMap::from_rows(&[vec![1.0, 2.0], vec![2.0, 4.0]]),
            Err(Error::SingularMap(_))
        ));
        assert!(Direction::new(vec![1.0, 1.0]).is_err());
        assert!(matches!(Direction::normalize(&[0.0, 0.0]), Err(Error::ZeroDirection)));
    }

    #[test]
    fn similarity_detection() {
        assert!((LinearMap::rotation2(0.3).similarity_factor().unwrap() - 1.0).abs() < 1e-12);
        assert!(LinearMap::diagonal(&[2.0, 1.0]).unwrap().similarity_factor().is_none());
        let a = LinearMap::scaling(3, 2.5).unwrap();
        assert!((a.similarity_factor().unwrap() - 2.5).abs() < 1e-12);
    }
}
