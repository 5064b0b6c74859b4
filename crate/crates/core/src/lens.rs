//! Circular-arc lenses spanned by two points of E, and the length/area ratio
//! function `h` whose maximum `h₀` drives the sharp constant.
//!
//! A lens with parameter `τ = sin θ` is bounded by two circular arcs that
//! meet its anchor points at half-angle `θ`. In the `{0, 1}` position the
//! upper arc is `α(t) = sin(θ − t)/sin θ · e^{it}`, `t ∈ [0, θ]`.

use std::f64::consts::{FRAC_PI_2, PI, SQRT_2};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::quadrature::ParamCurve;
use crate::sphere::Rotation;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum LensError {
    #[error("{name} = {value} is outside [{lo}, {hi}]")]
    Domain {
        name: &'static str,
        value: f64,
        lo: f64,
        hi: f64,
    },
    #[error("tolerance must be positive, got {0}")]
    InvalidTolerance(f64),
}

fn check(name: &'static str, value: f64, lo: f64, hi: f64) -> Result<(), LensError> {
    if value >= lo && value <= hi {
        Ok(())
    } else {
        Err(LensError::Domain { name, value, lo, hi })
    }
}

/// `π/2 − arctan x`, the branch of arccot with range `(0, π)`.
pub fn arccot(x: f64) -> f64 {
    FRAC_PI_2 - x.atan()
}

/// Spherical length of one lens arc from its half-angle `θ ∈ [0, π)`.
///
/// Agrees with [`zeta0`] at `θ = arcsin τ` and keeps increasing past `π/2`
/// toward `3π/2`.
pub fn arc_length_at_angle(theta: f64) -> f64 {
    let s = theta.sin();
    let q = (1.0 + s * s).sqrt();
    2.0 / q * arccot(theta.cos() / q)
}

/// Spherical area between the chord `[0, 1]` and the arc of half-angle `θ`.
pub fn segment_area_at_angle(theta: f64) -> f64 {
    2.0 * theta - theta.sin() * arc_length_at_angle(theta)
}

/// Half-angle `θ ∈ [0, π)` of the arc through `0` and `1` with the given
/// spherical length, which must lie in `[π/2, 3π/2)`.
pub fn angle_from_arc_length(length: f64) -> Result<f64, LensError> {
    check("arc length", length, FRAC_PI_2, 1.5 * PI)?;
    let (mut lo, mut hi) = (0.0_f64, PI);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if arc_length_at_angle(mid) < length {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo < 1e-16 {
            break;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// `ζ₀(τ)`: spherical length of one arc of the lens with parameter `τ`.
pub fn zeta0(tau: f64) -> Result<f64, LensError> {
    check("tau", tau, 0.0, 1.0)?;
    let q = (1.0 + tau * tau).sqrt();
    let c = (1.0 - tau * tau).sqrt();
    Ok(2.0 / q * arccot(c / q))
}

/// `ζ₁(τ) = 2 arcsin τ − τ ζ₀(τ)`: area enclosed by one arc and the chord.
pub fn zeta1(tau: f64) -> Result<f64, LensError> {
    Ok(2.0 * tau.asin() - tau * zeta0(tau)?)
}

/// Point `α(t)` on the upper `{0, 1}` arc, `t ∈ [0, arcsin τ]`.
pub fn arc_param(tau: f64, t: f64) -> Result<Complex64, LensError> {
    check("tau", tau, f64::MIN_POSITIVE, 1.0)?;
    let theta = tau.asin();
    check("t", t, 0.0, theta)?;
    Ok(Complex64::from_polar((theta - t).sin() / tau, t))
}

/// `α'(t)`.
pub fn arc_param_derivative(tau: f64, t: f64) -> Result<Complex64, LensError> {
    check("tau", tau, f64::MIN_POSITIVE, 1.0)?;
    let theta = tau.asin();
    check("t", t, 0.0, theta)?;
    let e = Complex64::from_polar(1.0, t);
    let r = (theta - t).sin() / tau;
    let dr = -(theta - t).cos() / tau;
    Ok(e * Complex64::new(dr, r))
}

/// `h(τ) = √(1+τ²)(π + arcsin τ)/arccot(√(1−τ²)/√(1+τ²)) − τ`.
pub fn h(tau: f64) -> Result<f64, LensError> {
    check("tau", tau, 0.0, 1.0)?;
    let q = (1.0 + tau * tau).sqrt();
    let c = (1.0 - tau * tau).sqrt();
    Ok(q * (PI + tau.asin()) / arccot(c / q) - tau)
}

/// Location and value of the maximum of `h` on `[0, 1]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct H0Result {
    pub tau0: f64,
    pub h0: f64,
    pub iterations: usize,
    pub bracket_width: f64,
}

const COARSE_POINTS: usize = 10_000;

/// Maximizes `h` by a coarse grid scan followed by golden-section search
/// until the bracket is no wider than `tol`.
pub fn find_h0(tol: f64) -> Result<H0Result, LensError> {
    if !(tol > 0.0 && tol.is_finite()) {
        return Err(LensError::InvalidTolerance(tol));
    }
    let hh = |t: f64| h(t.clamp(0.0, 1.0)).expect("clamped into domain");
    let step = 1.0 / COARSE_POINTS as f64;
    let best = (0..=COARSE_POINTS)
        .map(|i| i as f64 * step)
        .max_by(|a, b| hh(*a).total_cmp(&hh(*b)))
        .expect("grid is nonempty");
    let (mut a, mut b) = ((best - step).max(0.0), (best + step).min(1.0));

    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let mut c = b - inv_phi * (b - a);
    let mut d = a + inv_phi * (b - a);
    let (mut fc, mut fd) = (hh(c), hh(d));
    let mut iterations = 0;
    while b - a > tol {
        iterations += 1;
        if fc >= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = hh(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = hh(d);
        }
    }
    let tau0 = 0.5 * (a + b);
    Ok(H0Result {
        tau0,
        h0: hh(tau0),
        iterations,
        bracket_width: b - a,
    })
}

/// Inverse of [`zeta0`] by bisection; `half_length ∈ [π/2, π/√2]`.
pub fn zeta0_inverse(half_length: f64) -> Result<f64, LensError> {
    check("half length", half_length, FRAC_PI_2, PI / SQRT_2)?;
    let (mut lo, mut hi) = (0.0_f64, 1.0_f64);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if zeta0(mid)? < half_length {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo < 1e-16 {
            break;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Which pair of E-points the lens spans.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AnchorPair {
    ZeroOne,
    #[default]
    OneInfinity,
}

/// A symmetric lens bounded by two circular arcs of equal spherical length.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LensDomain {
    pub tau: f64,
    pub theta: f64,
    pub half_length: f64,
    pub length: f64,
    pub area: f64,
    pub anchor: AnchorPair,
}

impl LensDomain {
    pub fn from_tau(tau: f64, anchor: AnchorPair) -> Result<Self, LensError> {
        let half_length = zeta0(tau)?;
        Ok(Self {
            tau,
            theta: tau.asin(),
            half_length,
            length: 2.0 * half_length,
            area: 2.0 * zeta1(tau)?,
            anchor,
        })
    }

    /// `(4π + A)/l`, which equals `h(τ)`.
    pub fn ratio(&self) -> f64 {
        (4.0 * PI + self.area) / self.length
    }

    /// Positively oriented boundary: in the `{0, 1}` position the upper arc
    /// from 1 to 0, then its mirror image from 0 back to 1.
    pub fn boundary_curve(&self) -> ParamCurve {
        let theta = self.theta;
        let tau = self.tau.max(f64::MIN_POSITIVE);
        let upper = move |t: f64| {
            let s = t * theta;
            Complex64::from_polar((theta - s).sin() / tau, s)
        };
        let d_upper = move |t: f64| {
            let s = t * theta;
            let e = Complex64::from_polar(1.0, s);
            e * Complex64::new(-(theta - s).cos() / tau, (theta - s).sin() / tau) * theta
        };
        let first = ParamCurve::planar(upper, d_upper, 0.0, 1.0, &[]);
        let second = ParamCurve::planar(
            move |t| upper(1.0 - t).conj(),
            move |t| -d_upper(1.0 - t).conj(),
            0.0,
            1.0,
            &[],
        );
        let curve = ParamCurve::concat(vec![first, second]);
        match self.anchor {
            AnchorPair::ZeroOne => curve,
            AnchorPair::OneInfinity => curve.rotated(&Rotation::swap_poles()),
        }
    }
}

/// The lens of total boundary length `l ∈ [π, √2π]`.
pub fn lens_from_length(l: f64) -> Result<LensDomain, LensError> {
    lens_from_length_anchored(l, AnchorPair::default())
}

pub fn lens_from_length_anchored(l: f64, anchor: AnchorPair) -> Result<LensDomain, LensError> {
    check("length", l, PI, SQRT_2 * PI)?;
    LensDomain::from_tau(zeta0_inverse(0.5 * l)?, anchor)
}
