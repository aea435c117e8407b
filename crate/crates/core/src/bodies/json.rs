//! JSON body schema.
//!
//! ```json
//! {"type": "polytope", "dim": 2, "vertices": [[-1, -1], [1, -1], [0, 1]]}
//! {"type": "ball", "dim": 3, "radius": 1.5}
//! {"type": "ellipsoid", "dim": 2, "shape": [[4, 0], [0, 1]]}
//! {"type": "support_sampled", "dim": 2, "directions": [[1, 0], ...], "values": [1, ...]}
//! ```
//!
//! Polytopes in R^4 and up also need `"halfspaces": [[a_1, ..., a_n, b], ...]`.

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use super::{Body, Polytope, Representation};
use crate::error::{Error, Result};
use crate::linalg::Direction;

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
#[serde(rename_all = "snake_case")]
pub enum BodyType {
    Polytope,
    Ball,
    Ellipsoid,
    SupportSampled,
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct BodySpec {
    #[serde(rename = "type")]
    pub kind: BodyType,
    pub dim: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub vertices: Option<Vec<Vec<f64>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub halfspaces: Option<Vec<Vec<f64>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub radius: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub shape: Option<Vec<Vec<f64>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub directions: Option<Vec<Vec<f64>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub values: Option<Vec<f64>>,
}

fn need<'a, T>(field: &'a Option<T>, name: &str) -> Result<&'a T> {
    field.as_ref().ok_or_else(|| Error::InvalidBody(format!("missing field \"{name}\"")))
}

fn check_rows(rows: &[Vec<f64>], width: usize, what: &str) -> Result<()> {
    for (i, r) in rows.iter().enumerate() {
        if r.len() != width {
            return Err(Error::InvalidBody(format!("{what} {i} has length {}, expected {width}", r.len())));
        }
        if let Some(j) = r.iter().position(|c| !c.is_finite()) {
            return Err(Error::InvalidBody(format!("{what} {i} entry {j} is not finite")));
        }
    }
    Ok(())
}

impl BodySpec {
    pub fn build(&self) -> Result<Body> {
        let n = self.dim;
        if n == 0 {
            return Err(Error::InvalidBody("dim must be positive".into()));
        }
        match self.kind {
            BodyType::Polytope => {
                let v = need(&self.vertices, "vertices")?;
                check_rows(v, n, "vertex")?;
                match &self.halfspaces {
                    Some(hs) => {
                        check_rows(hs, n + 1, "halfspace")?;
                        let hs = hs.iter().map(|r| (r[..n].to_vec(), r[n])).collect();
                        Ok(Polytope::from_parts(v.clone(), hs)?.into())
                    }
                    None => Body::polytope(v),
                }
            }
            BodyType::Ball => Body::ball(n, *need(&self.radius, "radius")?),
            BodyType::Ellipsoid => {
                let s = need(&self.shape, "shape")?;
                if s.len() != n {
                    return Err(Error::InvalidBody(format!("shape has {} rows, expected {n}", s.len())));
                }
                check_rows(s, n, "shape row")?;
                Body::ellipsoid(DMatrix::from_fn(n, n, |i, j| s[i][j]))
            }
            BodyType::SupportSampled => {
                let d = need(&self.directions, "directions")?;
                check_rows(d, n, "direction")?;
                let dirs = d
                    .iter()
                    .enumerate()
                    .map(|(i, u)| {
                        Direction::normalize(u).map_err(|_| Error::InvalidBody(format!("direction {i} is zero")))
                    })
                    .collect::<Result<Vec<_>>>()?;
                Body::support_sampled(dirs, need(&self.values, "values")?.clone())
            }
        }
    }

    pub fn from_body(body: &Body) -> Self {
        let mut spec = Self {
            kind: BodyType::Ball,
            dim: body.dim(),
            vertices: None,
            halfspaces: None,
            radius: None,
            shape: None,
            directions: None,
            values: None,
        };
        match body.repr() {
            Representation::Polytope(p) => {
                spec.kind = BodyType::Polytope;
                spec.vertices = Some(p.vertices().to_vec());
                if p.dim() > 3 {
                    spec.halfspaces = Some(
                        p.facets()
                            .iter()
                            .map(|f| f.normal.iter().copied().chain([f.offset]).collect())
                            .collect(),
                    );
                }
            }
            Representation::Ball { radius } => spec.radius = Some(*radius),
            Representation::Ellipsoid(e) => {
                spec.kind = BodyType::Ellipsoid;
                let m = e.shape();
                spec.shape = Some((0..m.nrows()).map(|i| (0..m.ncols()).map(|j| m[(i, j)]).collect()).collect());
            }
            Representation::SupportSampled(s) => {
                spec.kind = BodyType::SupportSampled;
                spec.directions = Some(s.directions().iter().map(|d| d.to_vec()).collect());
                spec.values = Some(s.values().to_vec());
            }
        }
        spec
    }
}

/// Parses and validates a body from JSON text.
pub fn body_from_json(text: &str) -> Result<Body> {
    let spec: BodySpec = serde_json::from_str(text)?;
    spec.build()
}

pub fn body_to_json(body: &Body) -> Result<String> {
    Ok(serde_json::to_string(&BodySpec::from_body(body))?)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip() {
        for text in [
            r#"{"type":"polytope","dim":2,"vertices":[[-1,-1],[1,-1],[0,1]]}"#,
            r#"{"type":"ball","dim":3,"radius":1.5}"#,
            r#"{"type":"ellipsoid","dim":2,"shape":[[4,0],[0,1]]}"#,
        ] {
            let b = body_from_json(text).unwrap();
            let back = body_from_json(&body_to_json(&b).unwrap()).unwrap();
            assert_eq!(b.kind(), back.kind());
            assert!((b.volume_exact().unwrap() - back.volume_exact().unwrap()).abs() < 1e-14);
        }
    }

    #[test]
    fn first_violation_is_reported() {
        let e = body_from_json(r#"{"type":"polytope","dim":2,"vertices":[[-1,-1],[1,-1,0],[0,1]]}"#).unwrap_err();
        assert!(e.to_string().contains("vertex 1 has length 3"), "{e}");
        let e = body_from_json(r#"{"type":"polytope","dim":2,"vertices":[[0,0],[1,0],[0,1]]}"#).unwrap_err();
        assert!(matches!(e, Error::OriginNotInterior(_)));
        let e = body_from_json(r#"{"type":"ellipsoid","dim":2,"shape":[[1,2],[2,1]]}"#).unwrap_err();
        assert!(e.to_string().contains("positive definite"), "{e}");
        let e = body_from_json(r#"{"type":"ball","dim":2}"#).unwrap_err();
        assert!(e.to_string().contains("radius"));
        assert!(body_from_json(r#"{"type":"cone","dim":2}"#).is_err());
    }
}
