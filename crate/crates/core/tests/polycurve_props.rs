use std::f64::consts::{PI, TAU};

use arealength::isoperimetric::{cap_area_bound, enclosed_area, random_closed_polygon, random_convex_polygon};
use arealength::polycurve::{Convexity, GeodesicPolygon};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn closed_polygon() -> impl Strategy<Value = GeodesicPolygon> {
    any::<u64>().prop_map(|s| random_closed_polygon(&mut ChaCha8Rng::seed_from_u64(s), TAU - 0.01))
}

fn convex_polygon() -> impl Strategy<Value = GeodesicPolygon> {
    (any::<u64>(), 0.05f64..1.5).prop_map(|(s, r)| random_convex_polygon(&mut ChaCha8Rng::seed_from_u64(s), r))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn convex_polygons_are_convex(p in convex_polygon()) {
        for e in p.edge_lengths() {
            prop_assert!(e < PI);
        }
        for v in 0..p.vertices().len() {
            prop_assert_ne!(p.is_convex_at(v).unwrap(), Convexity::NonConvex);
        }
    }

    #[test]
    fn convex_area_below_cap_bound(p in convex_polygon()) {
        let a = enclosed_area(&p);
        prop_assert!(a > 0.0);
        prop_assert!(a < cap_area_bound(p.length()).unwrap());
    }

    #[test]
    fn reversal_flips_turns(p in closed_polygon()) {
        let r = p.reversed();
        let n = p.vertices().len();
        for v in 0..n {
            let t = p.turn_at(v).unwrap();
            let u = r.turn_at((n - v) % n).unwrap();
            prop_assert!((t + u).abs() < 1e-9, "vertex {}: {} vs {}", v, t, u);
        }
        prop_assert!((enclosed_area(&p) + enclosed_area(&r) - 4.0 * PI).abs() < 1e-9);
        prop_assert!((p.length() - r.length()).abs() < 1e-12);
    }

    #[test]
    fn normalize_is_idempotent(p in closed_polygon()) {
        let once = p.normalize().unwrap();
        let twice = once.normalize().unwrap();
        prop_assert_eq!(once.vertices().len(), twice.vertices().len());
        for (a, b) in once.vertices().iter().zip(twice.vertices()) {
            prop_assert!(a.distance(b) < 1e-12);
        }
        prop_assert!((once.length() - p.length()).abs() < 1e-9);
    }

    #[test]
    fn natural_edges_sum_to_length(p in closed_polygon()) {
        let q = p.normalize().unwrap();
        let np = q.natural_partition();
        let sum: f64 = np.edges.iter().map(|e| e.length).sum();
        prop_assert!((sum - q.length()).abs() < 1e-9);
        let covered: usize = np.edges.iter().map(|e| e.edge_indices.len()).sum();
        prop_assert_eq!(covered, q.edges().len());
    }

    #[test]
    fn json_round_trip(p in closed_polygon()) {
        let back = GeodesicPolygon::from_json(&p.to_json()).unwrap();
        prop_assert_eq!(back.vertices().len(), p.vertices().len());
        prop_assert!((back.length() - p.length()).abs() < 1e-9);
    }
}
