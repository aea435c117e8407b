use std::f64::consts::PI;

use olcb::centroid::centroid_support;
use olcb::orlicz::{OrliczFunction, WeightFunction};
use olcb::rearrange::RearrangementProfile;
use olcb::steiner::steiner_symmetrize;
use olcb::{Body, Direction};
use proptest::prelude::*;

fn polygon() -> impl Strategy<Value = Body> {
    prop::collection::vec((0.0..2.0 * PI, 0.3..1.0f64), 5..12).prop_filter_map("origin outside", |pts| {
        let v: Vec<Vec<f64>> = pts.iter().map(|(a, r)| vec![r * a.cos(), r * a.sin()]).collect();
        Body::polytope(&v).ok().filter(|b| b.radii().inner > 0.05)
    })
}

fn phi() -> impl Strategy<Value = OrliczFunction> {
    prop_oneof![
        (1.0..4.0f64).prop_map(|p| OrliczFunction::Power { p }),
        (0.5..2.0f64).prop_map(|c| OrliczFunction::ScaledExp { c }),
    ]
}

fn omega() -> impl Strategy<Value = WeightFunction> {
    prop_oneof![Just(WeightFunction::one()), (0.0..0.8f64).prop_map(|beta| WeightFunction::PowerSingular { beta })]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn rearrangement_is_monotone_and_equimeasurable(body in polygon(), a in 0.0..2.0 * PI) {
        let u = Direction::from_angle(a);
        let p = RearrangementProfile::exact(&body, u.as_slice()).unwrap();
        let mut prev = f64::INFINITY;
        for k in 1..50 {
            let t = k as f64 / 50.0;
            let f = p.fstar(t).unwrap();
            prop_assert!(f <= prev + 1e-12 && f >= 0.0 && f <= p.bound() + 1e-12);
            prop_assert!((p.distribution(f).unwrap().value - t).abs() < 1e-9);
            prev = f;
        }
    }

    #[test]
    fn support_is_homogeneous_and_subadditive(body in polygon(), a in 0.0..2.0 * PI, b in 0.0..2.0 * PI, c in 0.2..3.0f64, f in phi(), w in omega()) {
        let (x, y) = (Direction::from_angle(a), Direction::from_angle(b));
        let hx = centroid_support(&body, &f, &w, x.as_slice()).unwrap();
        let hy = centroid_support(&body, &f, &w, y.as_slice()).unwrap();
        let scaled: Vec<f64> = x.as_slice().iter().map(|v| v * c).collect();
        prop_assert!((centroid_support(&body, &f, &w, &scaled).unwrap() - c * hx).abs() <= 1e-9 * c * hx);
        let sum: Vec<f64> = x.as_slice().iter().zip(y.as_slice()).map(|(p, q)| p + q).collect();
        if sum.iter().any(|v| v.abs() > 1e-3) {
            prop_assert!(centroid_support(&body, &f, &w, &sum).unwrap() <= hx + hy + 1e-6 * (hx + hy));
        }
    }

    #[test]
    fn symmetral_keeps_area_and_shrinks_outradius(body in polygon(), a in 0.0..PI) {
        let u = Direction::from_angle(a);
        let s = steiner_symmetrize(&body, &u).unwrap();
        let (v0, v1) = (body.volume_exact().unwrap(), s.volume_exact().unwrap());
        prop_assert!((v0 - v1).abs() <= 1e-12 * v0);
        prop_assert!(s.support(u.as_slice()) <= 0.5 * (body.support(u.as_slice()) + body.support(u.neg().as_slice())) + 1e-12);
        prop_assert!((s.support(u.as_slice()) - s.support(u.neg().as_slice())).abs() < 1e-12);
    }
}
