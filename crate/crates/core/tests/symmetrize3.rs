use olcb::*;
use rand::{Rng, SeedableRng};

fn outer_polytope() -> Body {
    let j: serde_json::Value = serde_json::from_str(include_str!("data/outer_polytope.json")).unwrap();
    let verts: Vec<Vec<f64>> = serde_json::from_value(j["vertices"].clone()).unwrap();
    Body::from(Polytope::from_vertices(&verts).unwrap())
}

// Outer centroid polytope with many near-coplanar facets.
#[test]
fn outer_polytope_symmetrizes_in_every_direction() {
    let body = outer_polytope();
    let v0 = body.volume_exact().unwrap();
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(3);
    for _ in 0..200 {
        let mut u: Vec<f64> = (0..3).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let n = u.iter().map(|c| c * c).sum::<f64>().sqrt();
        u.iter_mut().for_each(|c| *c /= n);
        let s = steiner::steiner_symmetrize(&body, &Direction::new(u).unwrap()).unwrap();
        assert!((s.volume_exact().unwrap() / v0 - 1.0).abs() < 1e-10);
        let p = s.as_polytope().unwrap();
        for f in p.facets() {
            let worst = p.vertices().iter().map(|v| v.iter().zip(&f.normal).map(|(a, b)| a * b).sum::<f64>() - f.offset).fold(f64::NEG_INFINITY, f64::max);
            assert!(worst < 1e-12, "vertex outside facet by {worst:e}");
        }
    }
}
