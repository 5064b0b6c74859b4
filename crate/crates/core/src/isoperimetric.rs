//! Isoperimetric bounds on the sphere and hemisphere containment.

use std::f64::consts::{FRAC_PI_2, PI, SQRT_2, TAU};

use nalgebra::Vector3;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use thiserror::Error;

use crate::lens::{angle_from_arc_length, segment_area_at_angle, zeta0_inverse, zeta1, LensError};
use crate::polycurve::{GeodesicPolygon, PolyError};
use crate::quadrature::{star_region_area, QuadratureError};
use crate::sphere::{angle_between, ExtPoint, Rotation};

/// Absolute area tolerance separating "equal" from "strictly smaller" in
/// [`lens_is_extremal_check`].
pub const LENS_EQUALITY_TOL: f64 = 1e-6;
const AREA_QUAD_TOL: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum IsoError {
    #[error("{name} = {value} is outside its domain ({why})")]
    Domain {
        name: &'static str,
        value: f64,
        why: &'static str,
    },
    #[error("no points given")]
    EmptyInput,
    #[error(transparent)]
    Lens(#[from] LensError),
    #[error(transparent)]
    Quadrature(#[from] QuadratureError),
    #[error(transparent)]
    Poly(#[from] PolyError),
}

fn domain(name: &'static str, value: f64, why: &'static str) -> IsoError {
    IsoError::Domain { name, value, why }
}

/// Result of comparing a quantity against a bound.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BoundCheck {
    pub holds: bool,
    pub slack: f64,
}

/// `L² ≥ 4πA − A²`. Equality (circles) counts as holding up to `1e-12`.
pub fn bernstein_holds(area: f64, length: f64) -> Result<BoundCheck, IsoError> {
    if !(0.0..=4.0 * PI).contains(&area) {
        return Err(domain("A", area, "must lie in [0, 4π]"));
    }
    if !(length >= 0.0) {
        return Err(domain("L", length, "must be nonnegative"));
    }
    let slack = length * length - (4.0 * PI * area - area * area);
    Ok(BoundCheck {
        holds: slack >= -1e-12,
        slack,
    })
}

/// The largest area enclosed by a curve of length `L ≤ 2π`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CapBound {
    pub length: f64,
    pub ratio: f64,
    pub max_area: f64,
}

impl CapBound {
    pub fn new(length: f64) -> Result<Self, IsoError> {
        Ok(Self {
            length,
            ratio: length / TAU,
            max_area: cap_area_bound(length)?,
        })
    }
}

/// `2π(1 − √(1 − (L/2π)²))`.
pub fn cap_area_bound(length: f64) -> Result<f64, IsoError> {
    if !(0.0..=TAU).contains(&length) {
        return Err(domain("L", length, "must lie in [0, 2π]"));
    }
    let r = length / TAU;
    Ok(TAU * (1.0 - (1.0 - r * r).max(0.0).sqrt()))
}

fn cap_term(l: f64) -> f64 {
    TAU - (TAU * TAU - l * l).sqrt()
}

/// `(2π − √(4π² − l²)) − Σ (2π − √(4π² − lₖ²))` with `l = Σ lₖ < 2π`.
pub fn superadditivity_gap(lengths: &[f64]) -> Result<f64, IsoError> {
    if let Some(&bad) = lengths.iter().find(|l| !(**l >= 0.0)) {
        return Err(domain("length", bad, "must be nonnegative"));
    }
    let total: f64 = lengths.iter().sum();
    if total >= TAU {
        return Err(domain("total length", total, "must be below 2π"));
    }
    Ok(cap_term(total) - lengths.iter().map(|&l| cap_term(l)).sum::<f64>())
}

/// A spherical cap containing a point set; `margin = π/2 − radius` is
/// positive exactly when the set lies in an open hemisphere.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EnclosingCap {
    pub center: ExtPoint,
    pub radius: f64,
    pub margin: f64,
}

#[derive(Clone, Copy)]
struct Cap {
    center: Vector3<f64>,
    radius: f64,
}

impl Cap {
    fn contains(&self, p: &Vector3<f64>) -> bool {
        angle_between(&self.center, p) <= self.radius + 1e-12
    }

    fn one(a: &Vector3<f64>) -> Self {
        Cap {
            center: *a,
            radius: 0.0,
        }
    }

    fn two(a: &Vector3<f64>, b: &Vector3<f64>) -> Self {
        let mid = a + b;
        if mid.norm() < 1e-12 {
            let helper = if a.x.abs() < 0.9 { Vector3::x() } else { Vector3::y() };
            return Cap {
                center: a.cross(&helper).normalize(),
                radius: FRAC_PI_2,
            };
        }
        let center = mid.normalize();
        Cap {
            center,
            radius: angle_between(&center, a),
        }
    }

    fn three(a: &Vector3<f64>, b: &Vector3<f64>, c: &Vector3<f64>) -> Self {
        let n = (b - a).cross(&(c - a));
        if n.norm() < 1e-14 {
            // two of the points coincide
            let pairs = [Cap::two(a, b), Cap::two(a, c), Cap::two(b, c)];
            return pairs
                .into_iter()
                .max_by(|x, y| x.radius.total_cmp(&y.radius))
                .expect("three candidates");
        }
        let mut center = n.normalize();
        if center.dot(a) < 0.0 {
            center = -center;
        }
        Cap {
            center,
            radius: angle_between(&center, a),
        }
    }
}

/// Smallest cap containing the given unit vectors, by the randomized
/// incremental (Welzl) method with a seeded shuffle.
pub fn smallest_enclosing_cap(points: &[Vector3<f64>], seed: u64) -> Result<EnclosingCap, IsoError> {
    if points.is_empty() {
        return Err(IsoError::EmptyInput);
    }
    let mut pts: Vec<Vector3<f64>> = points.iter().map(|p| p.normalize()).collect();
    pts.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
    let mut cap = Cap::one(&pts[0]);
    for i in 1..pts.len() {
        if cap.contains(&pts[i]) {
            continue;
        }
        cap = Cap::one(&pts[i]);
        for j in 0..i {
            if cap.contains(&pts[j]) {
                continue;
            }
            cap = Cap::two(&pts[i], &pts[j]);
            for k in 0..j {
                if !cap.contains(&pts[k]) {
                    cap = Cap::three(&pts[i], &pts[j], &pts[k]);
                }
            }
        }
    }
    let radius = pts
        .iter()
        .map(|p| angle_between(&cap.center, p))
        .fold(0.0, f64::max);
    Ok(EnclosingCap {
        center: ExtPoint::from_vector(cap.center),
        radius,
        margin: FRAC_PI_2 - radius,
    })
}

/// Enclosing cap of a closed polygon sampled every `≤ 0.01` radians.
pub fn polygon_enclosing_cap(poly: &GeodesicPolygon, seed: u64) -> Result<EnclosingCap, IsoError> {
    smallest_enclosing_cap(&poly.sample(0.01), seed)
}

/// Area to the left of a simple closed geodesic polygon, `2π − Σ turns`.
pub fn enclosed_area(poly: &GeodesicPolygon) -> f64 {
    let turns: f64 = (0..poly.vertices().len())
        .filter_map(|v| poly.turn_at(v))
        .sum();
    TAU - turns
}

pub fn random_unit_vector<R: Rng>(rng: &mut R) -> Vector3<f64> {
    let z: f64 = rng.random_range(-1.0..=1.0);
    let phi: f64 = rng.random_range(0.0..TAU);
    let r = (1.0 - z * z).sqrt();
    Vector3::new(r * phi.cos(), r * phi.sin(), z)
}

/// Rotation taking the north pole (∞) to `c`.
fn frame_at(c: &Vector3<f64>) -> Rotation {
    let north = Vector3::z();
    let axis = north.cross(c);
    if axis.norm() < 1e-12 {
        return if c.z > 0.0 {
            Rotation::identity()
        } else {
            Rotation::about_axis(Vector3::x(), PI)
        };
    }
    Rotation::about_axis(axis, angle_between(&north, c))
}

/// A random closed geodesic polygon (possibly self-intersecting) of length
/// below `max_length`, obtained by shrinking random vertices toward a random
/// center.
pub fn random_closed_polygon<R: Rng>(rng: &mut R, max_length: f64) -> GeodesicPolygon {
    let center = random_unit_vector(rng);
    let frame = frame_at(&center);
    let n = rng.random_range(3..=12);
    // polar coordinates about the north pole, then moved to the center
    let raw: Vec<(f64, f64)> = (0..n)
        .map(|_| (rng.random_range(0.05..PI - 0.05), rng.random_range(0.0..TAU)))
        .collect();
    let build = |scale: f64| -> Option<GeodesicPolygon> {
        let pts = raw
            .iter()
            .map(|&(rho, phi)| {
                let r = rho * scale;
                let v = Vector3::new(r.sin() * phi.cos(), r.sin() * phi.sin(), r.cos());
                ExtPoint::from_vector(frame.apply_vector(&v))
            })
            .collect();
        GeodesicPolygon::new(pts, true).ok()
    };
    let fits = |scale: f64| build(scale).is_some_and(|p| p.length() < max_length);
    if fits(1.0) {
        return build(1.0).expect("checked");
    }
    let (mut lo, mut hi) = (0.0, 1.0);
    for _ in 0..60 {
        let mid = 0.5 * (lo + hi);
        if fits(mid) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    build(lo.max(1e-6)).expect("small polygons are valid")
}

/// A random convex polygon inscribed in a circle of spherical radius
/// `radius < π/2`, oriented so that its inside is on the left.
pub fn random_convex_polygon<R: Rng>(rng: &mut R, radius: f64) -> GeodesicPolygon {
    let center = random_unit_vector(rng);
    let frame = frame_at(&center);
    let n = rng.random_range(3..=10);
    let mut angles: Vec<f64> = (0..n).map(|_| rng.random_range(0.0..TAU)).collect();
    angles.sort_by(f64::total_cmp);
    // keep vertices apart so no edge degenerates
    angles.dedup_by(|a, b| (*a - *b).abs() < 1e-3);
    if angles.len() < 3 {
        angles = vec![0.0, 2.0, 4.0];
    }
    if angles.windows(2).any(|w| w[1] - w[0] >= PI) || angles[0] + TAU - angles[angles.len() - 1] >= PI {
        // center must be inside; fall back to a regular polygon
        angles = (0..n).map(|k| TAU * k as f64 / n as f64).collect();
    }
    let pts: Vec<ExtPoint> = angles
        .iter()
        .map(|phi| {
            let v = Vector3::new(radius.sin() * phi.cos(), radius.sin() * phi.sin(), radius.cos());
            ExtPoint::from_vector(frame.apply_vector(&v))
        })
        .collect();
    let poly = GeodesicPolygon::new(pts, true).expect("distinct vertices in a hemisphere");
    if poly.turn_at(0).is_some_and(|t| t < 0.0) {
        poly.reversed()
    } else {
        poly
    }
}

/// Outcome of [`lens_is_extremal_check`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LensExtremality {
    /// Area of the two-arc domain through 0 and 1 with the given split.
    pub area: f64,
    /// Area of the symmetric lens of the same total length.
    pub lens_area: f64,
    pub equal: bool,
    pub confirmed: bool,
}

/// Compares the domain bounded by two circular arcs through 0 and 1 of
/// lengths `l₁`, `l₂` against the symmetric lens of length `l₁ + l₂`.
///
/// `confirmed` is true when the area does not exceed the lens area and
/// equality (within [`LENS_EQUALITY_TOL`]) occurs only for `l₁ = l₂`.
pub fn lens_is_extremal_check(l: f64, l1: f64, l2: f64) -> Result<LensExtremality, IsoError> {
    if !(l > PI && l < SQRT_2 * PI) {
        return Err(domain("l", l, "must lie in (π, √2π)"));
    }
    if (l1 + l2 - l).abs() > 1e-12 {
        return Err(domain("l1 + l2", l1 + l2, "must equal l"));
    }
    for li in [l1, l2] {
        if li < FRAC_PI_2 {
            return Err(domain("arc length", li, "must be at least π/2"));
        }
    }
    let mut area = 0.0;
    for li in [l1, l2] {
        let theta = angle_from_arc_length(li)?;
        let s = theta.sin();
        area += if theta < 1e-9 {
            segment_area_at_angle(theta)
        } else {
            star_region_area(|t| (theta - t).sin() / s, 0.0, theta, AREA_QUAD_TOL)?.value
        };
    }
    let lens_area = 2.0 * zeta1(zeta0_inverse(0.5 * l)?)?;
    let equal = (area - lens_area).abs() <= LENS_EQUALITY_TOL;
    let symmetric = (l1 - l2).abs() <= 1e-9;
    Ok(LensExtremality {
        area,
        lens_area,
        equal,
        confirmed: area <= lens_area + LENS_EQUALITY_TOL && (equal == symmetric || symmetric),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sphere::SphericalCircle;

    #[test]
    fn bernstein_examples() {
        let r: f64 = 0.5;
        let a = TAU * (1.0 - (1.0 - r * r).sqrt());
        let c = bernstein_holds(a, PI).unwrap();
        assert!(c.holds && c.slack.abs() < 1e-12);
        let c = bernstein_holds(TAU, TAU).unwrap();
        assert!(c.holds && c.slack.abs() < 1e-12);
        let c = bernstein_holds(PI, 1.0).unwrap();
        assert!(!c.holds && c.slack < 0.0);
        assert!(bernstein_holds(13.0, 1.0).is_err());
    }

    #[test]
    fn cap_bound_examples() {
        assert!((cap_area_bound(TAU).unwrap() - TAU).abs() < 1e-15);
        assert!((cap_area_bound(PI).unwrap() - TAU * (1.0 - 3f64.sqrt() / 2.0)).abs() < 1e-15);
        assert_eq!(cap_area_bound(0.0).unwrap(), 0.0);
        assert!(cap_area_bound(7.0).is_err());
        let b = CapBound::new(PI).unwrap();
        assert!((b.ratio - 0.5).abs() < 1e-15);
    }

    #[test]
    fn superadditivity_examples() {
        assert!(superadditivity_gap(&[3.0]).unwrap().abs() < 1e-15);
        let g = superadditivity_gap(&[FRAC_PI_2, FRAC_PI_2]).unwrap();
        let direct = cap_term(PI) - 2.0 * cap_term(FRAC_PI_2);
        assert!(g > 0.0 && (g - direct).abs() < 1e-15);
        assert!(superadditivity_gap(&[4.0, 3.0]).is_err());
        assert!(superadditivity_gap(&[-1.0]).is_err());
    }

    #[test]
    fn enclosing_cap_examples() {
        let p = Vector3::new(0.3, -0.4, 0.5).normalize();
        let cap = smallest_enclosing_cap(&[p], 0).unwrap();
        assert!(cap.radius < 1e-12);
        assert!(smallest_enclosing_cap(&[], 0).is_err());

        let circle = SphericalCircle::new(ExtPoint::complex(0.4, 0.7), 0.9).unwrap();
        let samples: Vec<_> = (0..720)
            .map(|k| *circle.point_at(TAU * k as f64 / 720.0).vector())
            .collect();
        let cap = smallest_enclosing_cap(&samples, 7).unwrap();
        assert!((cap.radius - 0.9).abs() < 1e-6);
        assert!(cap.center.distance(circle.center()) < 1e-6);

        let great: Vec<_> = (0..720)
            .map(|k| {
                let a = TAU * k as f64 / 720.0;
                Vector3::new(a.cos(), 0.0, a.sin())
            })
            .collect();
        let cap = smallest_enclosing_cap(&great, 3).unwrap();
        assert!(cap.margin <= 1e-9);
    }

    #[test]
    fn enclosed_area_of_regular_polygon_is_below_cap() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let poly = random_convex_polygon(&mut rng, 1.0);
        let a = enclosed_area(&poly);
        let l = poly.length();
        assert!(a > 0.0);
        assert!(a < cap_area_bound(l).unwrap());
        for v in 0..poly.vertices().len() {
            assert!(poly.turn_at(v).unwrap() > 0.0);
        }
    }

    #[test]
    fn random_polygons_are_short() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..50 {
            let p = random_closed_polygon(&mut rng, TAU - 0.01);
            assert!(p.length() < TAU - 0.01);
            assert!(polygon_enclosing_cap(&p, 1).unwrap().margin > 0.0);
        }
    }

    #[test]
    fn lens_extremality_examples() {
        let l = 4.0;
        let sym = lens_is_extremal_check(l, l / 2.0, l / 2.0).unwrap();
        assert!(sym.equal && sym.confirmed);
        assert!((sym.area - sym.lens_area).abs() < 1e-6);

        let off = lens_is_extremal_check(l, l / 2.0 + 0.1, l / 2.0 - 0.1).unwrap();
        assert!(off.area < off.lens_area - LENS_EQUALITY_TOL && off.confirmed);

        let edge = lens_is_extremal_check(l, FRAC_PI_2, l - FRAC_PI_2).unwrap();
        assert!(edge.area < edge.lens_area - LENS_EQUALITY_TOL && edge.confirmed);

        assert!(lens_is_extremal_check(3.0, 1.5, 1.5).is_err());
        assert!(lens_is_extremal_check(4.0, 1.0, 3.0).is_err());
        assert!(lens_is_extremal_check(4.0, 2.0, 2.1).is_err());
    }
}
