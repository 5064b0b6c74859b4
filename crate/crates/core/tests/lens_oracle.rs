use arealength::lens::{find_h0, h, lens_from_length, zeta0};
use proptest::prelude::*;

#[test]
fn optimizer_matches_dense_grid() {
    let r = find_h0(1e-12).unwrap();
    let n = 1_000_000;
    let grid_max = (0..=n).map(|k| h(k as f64 / n as f64).unwrap()).fold(f64::MIN, f64::max);
    assert!(grid_max <= r.h0 + 1e-14);
    assert!(r.h0 - grid_max < 1e-9, "{} vs {}", r.h0, grid_max);
}

#[test]
fn h_rejects_outside_unit_interval() {
    assert!(h(-1e-9).is_err());
    assert!(h(1.0 + 1e-9).is_err());
    assert!(h(f64::NAN).is_err());
    assert!(find_h0(0.0).is_err());
}

proptest! {
    #[test]
    fn h_between_endpoint_and_max(tau in 0.0f64..=1.0) {
        let v = h(tau).unwrap();
        prop_assert!(v >= 3.0 * 2f64.sqrt() - 1.0 - 1e-12);
        prop_assert!(v <= 4.034_159_790_535_632);
    }

    #[test]
    fn lens_from_length_round_trip(tau in 1e-3f64..1.0) {
        let l = 2.0 * zeta0(tau).unwrap();
        let lens = lens_from_length(l).unwrap();
        prop_assert!((lens.tau - tau).abs() < 1e-9);
        prop_assert!((lens.ratio() - h(tau).unwrap()).abs() < 1e-9);
    }
}
