//! The m-fold lens coverings whose area/length ratio climbs to `h₀`.
//!
//! The image boundary of the m-th member runs from 0 to 1 along the real
//! axis, around the optimal `{1, ∞}` lens `m` times, and back to 0. Area and
//! length are exact: `A = m(4π + A₀)`, `L = π + m·l₀`.

use std::f64::consts::PI;

use serde::Serialize;

use crate::lens::{find_h0, zeta0, zeta1, AnchorPair, LensDomain, LensError};
use crate::polycurve::{GeodesicPolygon, PolyError};
use crate::quadrature::ParamCurve;
use crate::sphere::ExtPoint;

/// Bracket width used when solving for the optimal lens.
pub const H0_TOL: f64 = 1e-12;
/// Largest chord (radians) of the inscribed boundary polygon.
pub const BOUNDARY_CHORD: f64 = 2.5e-4;

/// Optimal lens data shared by all members of the family.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LensOptimum {
    pub tau0: f64,
    pub h0: f64,
    /// Boundary length of the optimal lens.
    pub l0: f64,
    /// Area of the optimal lens.
    pub a0: f64,
}

impl LensOptimum {
    pub fn compute() -> Result<Self, LensError> {
        let r = find_h0(H0_TOL)?;
        Ok(Self {
            tau0: r.tau0,
            h0: r.h0,
            l0: 2.0 * zeta0(r.tau0)?,
            a0: 2.0 * zeta1(r.tau0)?,
        })
    }

    /// `(4π + A₀)/l₀`, equal to `h₀` up to rounding.
    pub fn limit_ratio(&self) -> f64 {
        (4.0 * PI + self.a0) / self.l0
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ExtremalFamily {
    pub m: u64,
    pub optimum: LensOptimum,
    pub area: f64,
    pub length: f64,
}

impl ExtremalFamily {
    pub fn build(m: u64) -> Result<Self, LensError> {
        Ok(Self::with_optimum(LensOptimum::compute()?, m))
    }

    pub fn with_optimum(optimum: LensOptimum, m: u64) -> Self {
        assert!(m >= 1, "family index starts at 1");
        let mf = m as f64;
        Self {
            m,
            optimum,
            area: mf * (4.0 * PI + optimum.a0),
            length: PI + mf * optimum.l0,
        }
    }

    pub fn ratio(&self) -> f64 {
        self.area / self.length
    }

    /// `h₀ − ratio(m)`, evaluated as `π(4π + A₀)/(l₀(π + m·l₀))` so it keeps
    /// full relative precision for large `m`.
    pub fn deficit(&self) -> f64 {
        let o = &self.optimum;
        PI * o.limit_ratio() / (PI + self.m as f64 * o.l0)
    }

    /// The optimal lens in the `{1, ∞}` position.
    pub fn lens(&self) -> LensDomain {
        LensDomain::from_tau(self.optimum.tau0, AnchorPair::OneInfinity)
            .expect("tau0 lies in (0, 1)")
    }

    /// Closed image boundary starting and ending at 0.
    pub fn boundary_curve(&self) -> ParamCurve {
        let out = ParamCurve::segment(&ExtPoint::zero(), &ExtPoint::one()).expect("0 and 1 are not antipodal");
        let back = out.reversed();
        let lens = self.lens().boundary_curve();
        let mut pieces = vec![out];
        pieces.extend(std::iter::repeat_n(lens, self.m as usize));
        pieces.push(back);
        ParamCurve::concat(pieces)
    }

    /// Geodesic polygon inscribed in [`boundary_curve`](Self::boundary_curve)
    /// with chords of at most [`BOUNDARY_CHORD`] radians.
    pub fn boundary_polygon(&self) -> Result<GeodesicPolygon, PolyError> {
        GeodesicPolygon::inscribed(&self.boundary_curve(), true, BOUNDARY_CHORD)
    }
}

/// Ratio of the m-th member, in closed form.
pub fn ratio(optimum: &LensOptimum, m: u64) -> f64 {
    ExtremalFamily::with_optimum(*optimum, m).ratio()
}

/// Smallest `m` with `ratio(m) > threshold`, or `None` when the threshold is
/// at or above the limit.
pub fn first_m_exceeding(optimum: &LensOptimum, threshold: f64) -> Option<u64> {
    if threshold >= optimum.limit_ratio() {
        return None;
    }
    // ratio(m) > t  ⇔  m(4π + A₀ − t·l₀) > tπ
    let slope = 4.0 * PI + optimum.a0 - threshold * optimum.l0;
    let estimate = (threshold * PI / slope).floor().max(0.0) as u64;
    let mut m = estimate.saturating_sub(2).max(1);
    while ratio(optimum, m) <= threshold {
        m += 1;
    }
    Some(m)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quadrature::curve_length;

    // Reference values computed independently at 30 digits.
    const L0: f64 = 3.168_662_513_167_299_506_924_770_842_21;
    const A0: f64 = 0.216_520_286_037_927_429_724_959_497_806;
    const RATIO1: f64 = 2.025_732_805_186_444_464_086_760_172_23;

    fn opt() -> LensOptimum {
        LensOptimum::compute().unwrap()
    }

    #[test]
    fn optimum_matches_reference() {
        let o = opt();
        // τ₀ sits at a flat maximum, so it is only located to about √ε
        assert!((o.l0 - L0).abs() < 5e-8);
        assert!((o.a0 - A0).abs() < 5e-8);
        assert!((o.limit_ratio() - o.h0).abs() < 1e-12);
    }

    #[test]
    fn closed_forms() {
        let o = opt();
        let f1 = ExtremalFamily::with_optimum(o, 1);
        assert!((f1.area - (4.0 * PI + o.a0)).abs() < 1e-14);
        assert!((f1.length - (PI + o.l0)).abs() < 1e-14);
        assert!((f1.ratio() - RATIO1).abs() < 1e-9);
        let f2 = ExtremalFamily::with_optimum(o, 2);
        assert!((f2.area - (8.0 * PI + 2.0 * o.a0)).abs() < 1e-13);
        assert!((f2.length - (PI + 2.0 * o.l0)).abs() < 1e-13);
    }

    #[test]
    fn deficit_behaviour() {
        let o = opt();
        for m in 1..=1000u64 {
            let d = ExtremalFamily::with_optimum(o, m).deficit();
            let d2 = ExtremalFamily::with_optimum(o, 2 * m).deficit();
            assert!(d > 0.0 && d2 < d);
            let direct = o.h0 - ExtremalFamily::with_optimum(o, m).ratio();
            assert!((d - direct).abs() < 1e-12);
        }
        let a = 1e3 * ExtremalFamily::with_optimum(o, 1000).deficit();
        let b = 1e6 * ExtremalFamily::with_optimum(o, 1_000_000).deficit();
        assert!((a / b - 1.0).abs() < 0.01);
        assert!(ExtremalFamily::with_optimum(o, 1_000_000_000).deficit() < 1e-8);
    }

    #[test]
    fn crossing_four() {
        let o = opt();
        assert_eq!(first_m_exceeding(&o, 4.0), Some(117));
        assert!(ratio(&o, 116) <= 4.0 && ratio(&o, 117) > 4.0);
        assert_eq!(first_m_exceeding(&o, 5.0), None);
        assert_eq!(first_m_exceeding(&o, 1.0), Some(1));
    }

    #[test]
    fn boundary_length_matches() {
        let o = opt();
        for m in [1, 3] {
            let f = ExtremalFamily::with_optimum(o, m);
            let c = f.boundary_curve();
            assert!(c.point(0.0).distance(&ExtPoint::zero()) < 1e-12);
            assert!(c.point(1.0).distance(&ExtPoint::zero()) < 1e-12);
            let l = curve_length(&c, 1e-9).unwrap().value;
            assert!((l - f.length).abs() < 1e-6, "m = {m}: {l} vs {}", f.length);
        }
    }

    #[test]
    fn ray_ledger() {
        let f = ExtremalFamily::with_optimum(opt(), 2);
        let poly = f.boundary_polygon().unwrap();
        let cut = poly.cut_against_ray().unwrap();
        assert!((cut.on_ray_length() - PI).abs() < 1e-6);
        let off: f64 = cut.off_ray_lengths().iter().sum();
        assert!((off - 2.0 * f.optimum.l0).abs() < 1e-6);
        assert_eq!(cut.off_ray_lengths().len(), 4);
    }
}
