//! Body corpora built from config sources.

use std::f64::consts::PI;

use olcb::bodies::json::body_from_json;
use olcb::bodies::Representation;
use olcb::linalg::LinearMap;
use olcb::{Body, Polytope};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, UnitSphere};

use crate::config::BodySource;
use crate::HarnessError;

#[derive(Clone, Debug)]
pub struct CorpusItem {
    pub id: String,
    pub body: Body,
    pub class: BodyClass,
}

/// Role of a body in the volume-ratio comparison.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BodyClass {
    Generic,
    /// Regular polygons, which approach the disk.
    Regular,
    Ellipsoid,
    Ball,
}

fn class_of(body: &Body) -> BodyClass {
    match body.repr() {
        Representation::Ball { .. } => BodyClass::Ball,
        Representation::Ellipsoid(_) => BodyClass::Ellipsoid,
        _ => BodyClass::Generic,
    }
}

/// Seed of source `index` derived from the experiment seed.
pub fn source_seed(seed: u64, index: usize) -> u64 {
    seed ^ (index as u64 + 1).wrapping_mul(0x9e37_79b9_7f4a_7c15)
}

const MAX_REJECTIONS: usize = 10_000;

/// Sorted uniform angles, radii uniform in `[0.3, 1]`, hulled; `None` when the
/// hull misses the inradius floor.
pub fn random_polygon_candidate(rng: &mut impl Rng, vertices: usize, floor: f64) -> Option<Body> {
    let mut angles: Vec<f64> = (0..vertices).map(|_| rng.gen_range(0.0..2.0 * PI)).collect();
    angles.sort_by(f64::total_cmp);
    let pts: Vec<Vec<f64>> = angles
        .iter()
        .map(|a| {
            let r = rng.gen_range(0.3..=1.0);
            vec![r * a.cos(), r * a.sin()]
        })
        .collect();
    let p = Polytope::from_vertices(&pts).ok()?;
    (p.inradius() >= floor).then(|| p.into())
}

pub fn random_polygon(rng: &mut impl Rng, vertices: usize, floor: f64) -> Result<Body, HarnessError> {
    (0..MAX_REJECTIONS)
        .find_map(|_| random_polygon_candidate(rng, vertices, floor))
        .ok_or_else(|| HarnessError::Config(format!("no {vertices}-point polygon reached inradius {floor}")))
}

pub fn random_polytope(rng: &mut impl Rng, vertices: usize, floor: f64) -> Result<Body, HarnessError> {
    for _ in 0..MAX_REJECTIONS {
        let pts: Vec<Vec<f64>> = (0..vertices)
            .map(|_| {
                let r = rng.gen_range(0.3..=1.0);
                let v: [f64; 3] = UnitSphere.sample(rng);
                v.iter().map(|c| r * c).collect()
            })
            .collect();
        if let Ok(p) = Polytope::from_vertices(&pts) {
            if p.inradius() >= floor {
                return Ok(p.into());
            }
        }
    }
    Err(HarnessError::Config(format!("no {vertices}-point polytope reached inradius {floor}")))
}

/// Ellipse with semi-axes uniform in `[0.4, 1.5]`, rotated by a uniform angle.
pub fn random_ellipse(rng: &mut impl Rng) -> Result<Body, HarnessError> {
    let a: f64 = rng.gen_range(0.4..=1.5);
    let b: f64 = rng.gen_range(0.4..=1.5);
    let rot = LinearMap::rotation2(rng.gen_range(0.0..PI));
    Ok(Body::ellipsoid_diagonal(&[a * a, b * b])?.apply_linear(&rot)?)
}

/// Builds every source; ids are prefixed by the source position so they sort
/// in config order.
pub fn build_corpus(sources: &[BodySource], seed: u64) -> Result<Vec<CorpusItem>, HarnessError> {
    let mut out = Vec::new();
    for (s, src) in sources.iter().enumerate() {
        let mut rng = ChaCha8Rng::seed_from_u64(source_seed(seed, s));
        let mut push = |name: String, body: Body| {
            let class = if matches!(src, BodySource::RegularPolygon { .. }) { BodyClass::Regular } else { class_of(&body) };
            out.push(CorpusItem { id: format!("{s:02}-{name}"), body, class })
        };
        match src {
            BodySource::File { path, id } => {
                let text = std::fs::read_to_string(path).map_err(|e| HarnessError::Io(format!("{}: {e}", path.display())))?;
                let name = id.clone().unwrap_or_else(|| path.file_stem().map_or("file".into(), |f| f.to_string_lossy().into_owned()));
                push(name, body_from_json(&text)?);
            }
            BodySource::Inline { id, body } => push(id.clone(), body.build()?),
            BodySource::RandomPolygon { count, vertices, inradius_floor } => {
                for k in 0..*count {
                    push(format!("polygon{vertices}-{k:03}"), random_polygon(&mut rng, *vertices, *inradius_floor)?);
                }
            }
            BodySource::RandomPolytope { count, vertices, inradius_floor } => {
                for k in 0..*count {
                    push(format!("polytope{vertices}-{k:03}"), random_polytope(&mut rng, *vertices, *inradius_floor)?);
                }
            }
            BodySource::RegularPolygon { vertices, circumradius, count } => {
                for k in 0..*count {
                    let phase = if k == 0 { 0.0 } else { rng.gen_range(0.0..2.0 * PI / *vertices as f64) };
                    push(format!("regular{vertices}-{k:03}"), Polytope::regular_polygon(*vertices, *circumradius, phase)?.into());
                }
            }
            BodySource::RandomEllipse { count } => {
                for k in 0..*count {
                    push(format!("ellipse-{k:03}"), random_ellipse(&mut rng)?);
                }
            }
            BodySource::Ball { dim, radius } => push(format!("ball{dim}"), Body::ball(*dim, *radius)?),
        }
    }
    out.sort_by(|a, b| a.id.cmp(&b.id));
    for w in out.windows(2) {
        if w[0].id == w[1].id {
            return Err(HarnessError::Config(format!("duplicate body id {}", w[0].id)));
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn generated_polygons_clear_the_floor() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..50 {
            let b = random_polygon(&mut rng, 8, 0.1).unwrap();
            assert!(b.radii().inner >= 0.1);
            assert!(b.radii().outer <= 1.0 + 1e-12);
        }
    }

    #[test]
    fn corpus_is_deterministic_and_sorted() {
        let src = vec![
            BodySource::RandomPolygon { count: 3, vertices: 7, inradius_floor: 0.1 },
            BodySource::Ball { dim: 2, radius: 1.0 },
            BodySource::RandomEllipse { count: 2 },
        ];
        let a = build_corpus(&src, 9).unwrap();
        let b = build_corpus(&src, 9).unwrap();
        let ids: Vec<&str> = a.iter().map(|c| c.id.as_str()).collect();
        assert_eq!(ids, ["00-polygon7-000", "00-polygon7-001", "00-polygon7-002", "01-ball2", "02-ellipse-000", "02-ellipse-001"]);
        for (x, y) in a.iter().zip(&b) {
            assert_eq!(x.body.support(&[0.3, 0.7]), y.body.support(&[0.3, 0.7]));
        }
        let c = build_corpus(&src, 10).unwrap();
        assert_ne!(a[0].body.support(&[1.0, 0.0]), c[0].body.support(&[1.0, 0.0]));
    }
}
