use crate::error::{Error, Result};
use crate::geom::hull3::{convex_hull_3d, P3};
use crate::geom::polygon::{convex_hull, shoelace, P2};
use crate::geom::volume_above_3d;
use crate::linalg::{dot, norm, LinearMap};
use crate::tol::GEOM_EPS;

/// Closed halfspace `normal . y <= offset` with a unit normal.
#[derive(Clone, Debug, PartialEq)]
pub struct Halfspace {
    pub normal: Vec<f64>,
    pub offset: f64,
}

#[derive(Clone, Debug)]
enum Boundary {
    /// vertices are in counter-clockwise order
    Polygon,
    Triangles(Vec<[usize; 3]>),
    Unstructured,
}

/// Convex polytope with both vertex and halfspace descriptions.
///
/// In the plane the vertices are stored counter-clockwise; in R^3 the
/// boundary is kept as outward oriented triangles. In higher dimensions
/// both descriptions must be supplied explicitly.
#[derive(Clone, Debug)]
pub struct Polytope {
    dim: usize,
    vertices: Vec<Vec<f64>>,
    facets: Vec<Halfspace>,
    boundary: Boundary,
}

impl Polytope {
    /// Convex hull of `points` (n = 2 or 3). Non-extreme points are dropped.
    pub fn from_vertices(points: &[Vec<f64>]) -> Result<Self> {
        let dim = points.first().map(|p| p.len()).ok_or_else(|| Error::Degenerate("no vertices".into()))?;
        for (i, p) in points.iter().enumerate() {
            if p.len() != dim {
                return Err(Error::InvalidBody(format!(
                    "vertex {i} has {} coordinates, expected {dim}",
                    p.len()
                )));
            }
            if let Some(j) = p.iter().position(|c| !c.is_finite()) {
                return Err(Error::InvalidBody(format!("vertex {i} coordinate {j} is not finite")));
            }
        }
        let scale = points.iter().flat_map(|p| p.iter().map(|c| c.abs())).fold(0.0f64, f64::max);
        match dim {
            2 => {
                let pts: Vec<P2> = points.iter().map(|p| [p[0], p[1]]).collect();
                let hull = convex_hull(&pts, 1e-14 * scale * scale);
                if hull.len() < 3 || shoelace(&hull) <= 1e-12 * scale * scale {
                    return Err(Error::Degenerate("vertices are affinely dependent".into()));
                }
                Self::from_ccw_polygon(hull)
            }
            3 => {
                let pts: Vec<P3> = points.iter().map(|p| [p[0], p[1], p[2]]).collect();
                let hull = convex_hull_3d(&pts, 1e-12)?;
                let planes = hull.facet_planes(1e-9);
                let facets = planes
                    .into_iter()
                    .map(|(n, d)| Halfspace { normal: n.to_vec(), offset: d })
                    .collect();
                let p = Self {
                    dim,
                    vertices: hull.vertices.iter().map(|v| v.to_vec()).collect(),
                    facets,
                    boundary: Boundary::Triangles(hull.triangles),
                };
                p.check_origin()?;
                Ok(p)
            }
            _ => Err(Error::DimensionUnsupported { dim, what: "convex hull of a vertex list" }),
        }
    }

    pub(crate) fn from_ccw_polygon(hull: Vec<P2>) -> Result<Self> {
        let n = hull.len();
        let facets = (0..n)
            .map(|i| {
                let p = hull[i];
                let q = hull[(i + 1) % n];
                let e = [q[0] - p[0], q[1] - p[1]];
                let len = (e[0] * e[0] + e[1] * e[1]).sqrt();
                let normal = vec![e[1] / len, -e[0] / len];
                let offset = normal[0] * p[0] + normal[1] * p[1];
                Halfspace { normal, offset }
            })
            .collect();
        let p = Self {
            dim: 2,
            vertices: hull.iter().map(|v| v.to_vec()).collect(),
            facets,
            boundary: Boundary::Polygon,
        };
        p.check_origin()?;
        Ok(p)
    }

    /// Builds a polytope from explicit V- and H-descriptions, checking that
    /// they describe the same set. Halfspace normals need not be unit.
    pub fn from_parts(vertices: Vec<Vec<f64>>, halfspaces: Vec<(Vec<f64>, f64)>) -> Result<Self> {
        let dim = vertices.first().map(|p| p.len()).ok_or_else(|| Error::Degenerate("no vertices".into()))?;
        if vertices.len() <= dim {
            return Err(Error::Degenerate(format!("{} vertices cannot span R^{dim}", vertices.len())));
        }
        let mut facets = Vec::with_capacity(halfspaces.len());
        for (j, (a, b)) in halfspaces.into_iter().enumerate() {
            if a.len() != dim {
                return Err(Error::InvalidBody(format!("halfspace {j} has dimension {}", a.len())));
            }
            let len = norm(&a);
            if !(len > 0.0) {
                return Err(Error::InvalidBody(format!("halfspace {j} has a zero normal")));
            }
            facets.push(Halfspace { normal: a.iter().map(|c| c / len).collect(), offset: b / len });
        }
        for (i, v) in vertices.iter().enumerate() {
            if v.len() != dim {
                return Err(Error::InvalidBody(format!("vertex {i} has {} coordinates, expected {dim}", v.len())));
            }
            let active = facets
                .iter()
                .enumerate()
                .filter_map(|(j, f)| {
                    let gap = dot(&f.normal, v) - f.offset;
                    (gap > GEOM_EPS).then_some(Err(j)).or(Some(Ok(gap.abs() <= GEOM_EPS)))
                })
                .try_fold(0usize, |n, r| r.map(|act| n + act as usize));
            match active {
                Err(j) => {
                    return Err(Error::InvalidBody(format!("vertex {i} violates halfspace {j}")));
                }
                Ok(n) if n < dim => {
                    return Err(Error::InvalidBody(format!(
                        "vertex {i} lies on only {n} halfspaces, expected at least {dim}"
                    )));
                }
                Ok(_) => {}
            }
        }
        for (j, f) in facets.iter().enumerate() {
            let count = vertices.iter().filter(|v| (dot(&f.normal, v) - f.offset).abs() <= GEOM_EPS).count();
            if count < dim {
                return Err(Error::InvalidBody(format!("halfspace {j} supports only {count} vertices")));
            }
        }
        let p = Self { dim, vertices, facets, boundary: Boundary::Unstructured };
        p.check_origin()?;
        Ok(p)
    }

    /// Axis-parallel cube `[-half, half]^n`.
    pub fn cube(dim: usize, half: f64) -> Result<Self> {
        let vertices: Vec<Vec<f64>> = (0..1usize << dim)
            .map(|mask| (0..dim).map(|k| if mask >> k & 1 == 1 { half } else { -half }).collect())
            .collect();
        if dim <= 3 {
            return Self::from_vertices(&vertices);
        }
        let mut hs = Vec::new();
        for k in 0..dim {
            for sign in [1.0, -1.0] {
                let mut a = vec![0.0; dim];
                a[k] = sign;
                hs.push((a, half));
            }
        }
        Self::from_parts(vertices, hs)
    }

    /// Cross-polytope `conv{±r e_k}`.
    pub fn cross_polytope(dim: usize, r: f64) -> Result<Self> {
        let mut vertices = Vec::new();
        for k in 0..dim {
            for sign in [1.0, -1.0] {
                let mut v = vec![0.0; dim];
                v[k] = sign * r;
                vertices.push(v);
            }
        }
        if dim <= 3 {
            return Self::from_vertices(&vertices);
        }
        let hs = (0..1usize << dim)
            .map(|mask| ((0..dim).map(|k| if mask >> k & 1 == 1 { 1.0 } else { -1.0 }).collect(), r))
            .collect();
        Self::from_parts(vertices, hs)
    }

    /// Regular m-gon inscribed in the circle of radius `circumradius`.
    pub fn regular_polygon(m: usize, circumradius: f64, phase: f64) -> Result<Self> {
        let pts: Vec<Vec<f64>> = (0..m)
            .map(|k| {
                let a = phase + 2.0 * std::f64::consts::PI * k as f64 / m as f64;
                vec![circumradius * a.cos(), circumradius * a.sin()]
            })
            .collect();
        Self::from_vertices(&pts)
    }

    fn check_origin(&self) -> Result<()> {
        for (j, f) in self.facets.iter().enumerate() {
            if !(f.offset > GEOM_EPS) {
                return Err(Error::OriginNotInterior(format!("facet {j} has offset {:e}", f.offset)));
            }
        }
        Ok(())
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn vertices(&self) -> &[Vec<f64>] {
        &self.vertices
    }

    pub fn facets(&self) -> &[Halfspace] {
        &self.facets
    }

    /// Counter-clockwise vertex loop (planar polytopes only).
    pub fn polygon(&self) -> Option<Vec<P2>> {
        matches!(self.boundary, Boundary::Polygon).then(|| self.vertices.iter().map(|v| [v[0], v[1]]).collect())
    }

    /// Outward oriented boundary triangles (spatial polytopes only).
    pub fn triangles(&self) -> Option<(Vec<P3>, &[[usize; 3]])> {
        match &self.boundary {
            Boundary::Triangles(t) => {
                Some((self.vertices.iter().map(|v| [v[0], v[1], v[2]]).collect(), t.as_slice()))
            }
            _ => None,
        }
    }

    pub fn support(&self, x: &[f64]) -> f64 {
        self.vertices.iter().map(|v| dot(v, x)).fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn radial(&self, u: &[f64]) -> f64 {
        self.facets
            .iter()
            .filter_map(|f| {
                let au = dot(&f.normal, u);
                (au > 0.0).then(|| f.offset / au)
            })
            .fold(f64::INFINITY, f64::min)
    }

    /// Distance from the origin to the nearest facet.
    pub fn inradius(&self) -> f64 {
        self.facets.iter().map(|f| f.offset).fold(f64::INFINITY, f64::min)
    }

    pub fn outradius(&self) -> f64 {
        self.vertices.iter().map(|v| norm(v)).fold(0.0, f64::max)
    }

    pub fn contains(&self, y: &[f64], tol: f64) -> bool {
        self.facets.iter().all(|f| dot(&f.normal, y) <= f.offset + tol)
    }

    /// Parameter interval `{t : base + t dir in K}`, if nonempty.
    pub fn chord(&self, base: &[f64], dir: &[f64]) -> Option<(f64, f64)> {
        let (mut lo, mut hi) = (f64::NEG_INFINITY, f64::INFINITY);
        for f in &self.facets {
            let ad = dot(&f.normal, dir);
            let slack = f.offset - dot(&f.normal, base);
            if ad.abs() < 1e-15 {
                if slack < -GEOM_EPS {
                    return None;
                }
            } else if ad > 0.0 {
                hi = hi.min(slack / ad);
            } else {
                lo = lo.max(slack / ad);
            }
        }
        (lo <= hi).then_some((lo, hi))
    }

    /// Exact volume for n = 2 (shoelace) and n = 3 (cone decomposition).
    pub fn volume_exact(&self) -> Result<f64> {
        match &self.boundary {
            Boundary::Polygon => Ok(shoelace(&self.polygon().unwrap())),
            Boundary::Triangles(t) => {
                let (v, _) = self.triangles().unwrap();
                // cones from the origin, which is interior
                Ok(t.iter()
                    .map(|tr| {
                        let [a, b, c] = tr.map(|i| v[i]);
                        (a[0] * (b[1] * c[2] - b[2] * c[1]) - a[1] * (b[0] * c[2] - b[2] * c[0])
                            + a[2] * (b[0] * c[1] - b[1] * c[0]))
                            / 6.0
                    })
                    .sum())
            }
            Boundary::Unstructured => Err(Error::DimensionUnsupported { dim: self.dim, what: "exact polytope volume" }),
        }
    }

    /// Volume of `{y in K : x . y >= s}` by exact halfspace clipping (n = 2, 3).
    pub fn volume_above(&self, x: &[f64], s: f64) -> Result<f64> {
        match &self.boundary {
            Boundary::Polygon => Ok(crate::geom::polygon::area_above(&self.polygon().unwrap(), [x[0], x[1]], s)),
            Boundary::Triangles(t) => {
                let (v, _) = self.triangles().unwrap();
                Ok(volume_above_3d(&v, t, [x[0], x[1], x[2]], s))
            }
            Boundary::Unstructured => Err(Error::DimensionUnsupported { dim: self.dim, what: "exact slab volume" }),
        }
    }

    pub fn apply_linear(&self, a: &LinearMap) -> Result<Self> {
        let vertices: Vec<Vec<f64>> = self.vertices.iter().map(|v| a.apply(v)).collect();
        match self.boundary {
            Boundary::Unstructured => {
                let inv_t = a.inverse().transpose();
                let hs = self.facets.iter().map(|f| (inv_t.apply(&f.normal), f.offset)).collect();
                Self::from_parts(vertices, hs)
            }
            _ => Self::from_vertices(&vertices),
        }
    }

    pub fn translate(&self, shift: &[f64]) -> Result<Self> {
        let vertices: Vec<Vec<f64>> =
            self.vertices.iter().map(|v| v.iter().zip(shift).map(|(a, b)| a + b).collect()).collect();
        match self.boundary {
            Boundary::Unstructured => {
                let hs = self.facets.iter().map(|f| (f.normal.clone(), f.offset + dot(&f.normal, shift))).collect();
                Self::from_parts(vertices, hs)
            }
            _ => Self::from_vertices(&vertices),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn square() -> Polytope {
        Polytope::cube(2, 1.0).unwrap()
    }

    #[test]
    fn square_queries() {
        let sq = square();
        assert_eq!(sq.vertices().len(), 4);
        assert_eq!(sq.facets().len(), 4);
        assert_eq!(sq.support(&[1.0, 0.0]), 1.0);
        let d = std::f64::consts::FRAC_1_SQRT_2;
        assert!((sq.radial(&[d, d]) - 2f64.sqrt()).abs() < 1e-15);
        assert_eq!(sq.inradius(), 1.0);
        assert!((sq.outradius() - 2f64.sqrt()).abs() < 1e-15);
        assert_eq!(sq.volume_exact().unwrap(), 4.0);
        assert_eq!(sq.chord(&[0.5, 0.0], &[0.0, 1.0]), Some((-1.0, 1.0)));
        assert_eq!(sq.chord(&[1.5, 0.0], &[0.0, 1.0]), None);
    }

    #[test]
    fn triangle_volume_and_origin_checks() {
        let tri = Polytope::from_vertices(&[vec![-0.2, -0.2], vec![1.0, -0.2], vec![-0.2, 1.0]]).unwrap();
        assert!((tri.volume_exact().unwrap() - 0.72).abs() < 1e-14);
        let err = Polytope::from_vertices(&[vec![0.0, 0.0], vec![1.0, 0.0], vec![0.0, 1.0]]).unwrap_err();
        assert!(matches!(err, Error::OriginNotInterior(_)), "{err}");
        let err = Polytope::from_vertices(&[vec![-1.0, -1.0], vec![0.0, 0.0], vec![1.0, 1.0]]).unwrap_err();
        assert!(matches!(err, Error::Degenerate(_)));
    }

    #[test]
    fn high_dimensional_parts_are_validated() {
        let c = Polytope::cube(4, 1.0).unwrap();
        assert_eq!(c.vertices().len(), 16);
        assert_eq!(c.facets().len(), 8);
        assert!(matches!(c.volume_exact(), Err(Error::DimensionUnsupported { .. })));
        let x = Polytope::cross_polytope(4, 1.0).unwrap();
        assert!((x.inradius() - 0.5).abs() < 1e-15);
        // a bogus H-description is caught
        let mut hs: Vec<(Vec<f64>, f64)> = (0..4)
            .flat_map(|k| {
                [1.0, -1.0].map(|s| {
                    let mut a = vec![0.0; 4];
                    a[k] = s;
                    (a, 1.0)
                })
            })
            .collect();
        hs[0].1 = 0.5;
        let err = Polytope::from_parts(c.vertices().to_vec(), hs).unwrap_err();
        assert!(err.to_string().contains("violates halfspace 0"), "{err}");
    }

    #[test]
    fn cube3_facets_and_volume() {
        let c = Polytope::cube(3, 0.5).unwrap();
        assert_eq!(c.facets().len(), 6);
        assert!((c.volume_exact().unwrap() - 1.0).abs() < 1e-14);
        assert!((c.volume_above(&[0.0, 0.0, 1.0], 0.25).unwrap() - 0.25).abs() < 1e-14);
    }
}
