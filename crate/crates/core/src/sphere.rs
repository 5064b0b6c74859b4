//! Points, geodesic arcs, circles and rigid rotations on the unit Riemann sphere.
//!
//! The extended plane is identified with the unit sphere through the
//! stereographic projection with `P(0) = (0, 0, -1)` and `P(∞) = (0, 0, 1)`.
//! Every [`ExtPoint`] carries both its extended complex value and its unit
//! 3-vector; distances and rotations use the 3-vector.

use std::f64::consts::{PI, TAU};
use std::fmt;

use nalgebra::{Matrix3, Rotation3, Unit, UnitQuaternion, Vector3};
use num_complex::Complex64;
use serde::de::{self, Deserializer};
use serde::ser::{SerializeStruct, Serializer};
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Pairs closer than this to antipodal have no unique shortest path.
pub const ANTIPODAL_TOL: f64 = 1e-12;

/// Errors raised by sphere primitives.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum SphereError {
    #[error("points are antipodal within {ANTIPODAL_TOL:e} (distance {distance}); no unique shortest path")]
    AntipodalPair { distance: f64 },
    #[error("arc endpoints coincide")]
    CoincidentPoints,
    #[error("orientation witness is not normal to the arc endpoints (residual {residual:e})")]
    BadWitness { residual: f64 },
    #[error("spherical radius {0} outside (0, π)")]
    InvalidRadius(f64),
    #[error("matrix is not a proper rotation")]
    NotARotation,
}

/// A point of `ℂ ∪ {∞}`. Infinity is an explicit state, never an IEEE infinity.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ExtComplex {
    Finite(Complex64),
    Infinity,
}

impl ExtComplex {
    pub fn is_infinite(&self) -> bool {
        matches!(self, ExtComplex::Infinity)
    }

    pub fn finite(&self) -> Option<Complex64> {
        match *self {
            ExtComplex::Finite(z) => Some(z),
            ExtComplex::Infinity => None,
        }
    }

    /// `1/z` with `1/0 = ∞` and `1/∞ = 0`.
    pub fn recip(&self) -> ExtComplex {
        match *self {
            ExtComplex::Infinity => ExtComplex::Finite(Complex64::new(0.0, 0.0)),
            ExtComplex::Finite(z) if z.norm_sqr() == 0.0 => ExtComplex::Infinity,
            ExtComplex::Finite(z) => ExtComplex::Finite(z.inv()),
        }
    }

    pub fn conj(&self) -> ExtComplex {
        match *self {
            ExtComplex::Finite(z) => ExtComplex::Finite(z.conj()),
            ExtComplex::Infinity => ExtComplex::Infinity,
        }
    }
}

impl From<Complex64> for ExtComplex {
    fn from(z: Complex64) -> Self {
        ExtComplex::Finite(z)
    }
}

impl From<f64> for ExtComplex {
    fn from(x: f64) -> Self {
        ExtComplex::Finite(Complex64::new(x, 0.0))
    }
}

impl fmt::Display for ExtComplex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ExtComplex::Finite(z) => write!(f, "{}{:+}i", z.re, z.im),
            ExtComplex::Infinity => write!(f, "inf"),
        }
    }
}

// Wire form: `{"re": x, "im": y}` or the string `"inf"`.
impl Serialize for ExtComplex {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        match self {
            ExtComplex::Finite(z) => {
                let mut s = serializer.serialize_struct("ExtComplex", 2)?;
                s.serialize_field("re", &z.re)?;
                s.serialize_field("im", &z.im)?;
                s.end()
            }
            ExtComplex::Infinity => serializer.serialize_str("inf"),
        }
    }
}

impl<'de> Deserialize<'de> for ExtComplex {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Repr {
            Tag(String),
            Finite { re: f64, im: f64 },
        }
        match Repr::deserialize(deserializer)? {
            Repr::Tag(s) if s == "inf" => Ok(ExtComplex::Infinity),
            Repr::Tag(s) => Err(de::Error::custom(format!(
                "expected \"inf\" or {{\"re\":..,\"im\":..}}, got \"{s}\""
            ))),
            Repr::Finite { re, im } if re.is_finite() && im.is_finite() => {
                Ok(ExtComplex::Finite(Complex64::new(re, im)))
            }
            Repr::Finite { .. } => Err(de::Error::custom("non-finite coordinate")),
        }
    }
}

/// Stereographic projection onto the unit sphere.
///
/// Points with `|z| > 1` go through the reciprocal chart so that large
/// moduli keep full relative precision.
pub fn stereo_project(z: ExtComplex) -> Vector3<f64> {
    match z {
        ExtComplex::Infinity => Vector3::new(0.0, 0.0, 1.0),
        ExtComplex::Finite(z) => {
            let q = z.norm_sqr();
            if q <= 1.0 {
                let s = 1.0 + q;
                Vector3::new(2.0 * z.re / s, 2.0 * z.im / s, (q - 1.0) / s)
            } else {
                let w = z.inv();
                let qw = w.norm_sqr();
                let s = 1.0 + qw;
                Vector3::new(2.0 * w.re / s, -2.0 * w.im / s, (1.0 - qw) / s)
            }
        }
    }
}

/// Inverse of [`stereo_project`] for a unit vector.
pub fn stereo_invert(v: &Vector3<f64>) -> ExtComplex {
    let (x1, x2, x3) = (v.x, v.y, v.z);
    if x3 <= 0.0 {
        ExtComplex::Finite(Complex64::new(x1, x2) / (1.0 - x3))
    } else {
        let r2 = x1 * x1 + x2 * x2;
        if r2 == 0.0 {
            ExtComplex::Infinity
        } else {
            ExtComplex::Finite(Complex64::new(x1, x2) * ((1.0 + x3) / r2))
        }
    }
}

/// Differential of the stereographic projection at a finite `z` applied to
/// the planar velocity `dz`. The result is tangent to the sphere at `P(z)`.
pub fn stereo_differential(z: Complex64, dz: Complex64) -> Vector3<f64> {
    let q = z.norm_sqr();
    if q <= 1.0 {
        let s = 1.0 + q;
        let ds = 2.0 * (z.re * dz.re + z.im * dz.im);
        Vector3::new(
            2.0 * dz.re / s - 2.0 * z.re * ds / (s * s),
            2.0 * dz.im / s - 2.0 * z.im * ds / (s * s),
            2.0 * ds / (s * s),
        )
    } else {
        let w = z.inv();
        let dw = -dz * w * w;
        let s = 1.0 + w.norm_sqr();
        let ds = 2.0 * (w.re * dw.re + w.im * dw.im);
        Vector3::new(
            2.0 * dw.re / s - 2.0 * w.re * ds / (s * s),
            -(2.0 * dw.im / s - 2.0 * w.im * ds / (s * s)),
            -2.0 * ds / (s * s),
        )
    }
}

/// A point of the Riemann sphere held in both representations.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExtPoint {
    value: ExtComplex,
    embedding: Vector3<f64>,
}

impl ExtPoint {
    pub fn new(value: ExtComplex) -> Self {
        Self {
            value,
            embedding: stereo_project(value),
        }
    }

    pub fn finite(z: Complex64) -> Self {
        Self::new(ExtComplex::Finite(z))
    }

    pub fn real(x: f64) -> Self {
        Self::finite(Complex64::new(x, 0.0))
    }

    pub fn complex(re: f64, im: f64) -> Self {
        Self::finite(Complex64::new(re, im))
    }

    pub fn infinity() -> Self {
        Self::new(ExtComplex::Infinity)
    }

    pub fn zero() -> Self {
        Self::real(0.0)
    }

    pub fn one() -> Self {
        Self::real(1.0)
    }

    /// Builds a point from any nonzero 3-vector (normalized here).
    pub fn from_vector(v: Vector3<f64>) -> Self {
        let u = v.normalize();
        Self {
            value: stereo_invert(&u),
            embedding: u,
        }
    }

    pub fn value(&self) -> ExtComplex {
        self.value
    }

    pub fn vector(&self) -> &Vector3<f64> {
        &self.embedding
    }

    pub fn distance(&self, other: &ExtPoint) -> f64 {
        spherical_distance(self, other)
    }

    pub fn chordal_distance(&self, other: &ExtPoint) -> f64 {
        (self.embedding - other.embedding).norm()
    }

    /// The antipodal point `-1/z̄`.
    pub fn antipode(&self) -> ExtPoint {
        ExtPoint::from_vector(-self.embedding)
    }

    /// True when within `tol` (spherical distance) of 0, 1 or ∞.
    pub fn is_exceptional(&self, tol: f64) -> bool {
        exceptional_set().iter().any(|e| self.distance(e) <= tol)
    }
}

impl From<ExtComplex> for ExtPoint {
    fn from(value: ExtComplex) -> Self {
        ExtPoint::new(value)
    }
}

impl Serialize for ExtPoint {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        self.value.serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for ExtPoint {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        ExtComplex::deserialize(deserializer).map(ExtPoint::new)
    }
}

/// The exceptional triple `E = {0, 1, ∞}`.
pub fn exceptional_set() -> [ExtPoint; 3] {
    [ExtPoint::zero(), ExtPoint::one(), ExtPoint::infinity()]
}

/// Great-circle distance in `[0, π]`.
pub fn spherical_distance(p: &ExtPoint, q: &ExtPoint) -> f64 {
    angle_between(p.vector(), q.vector())
}

pub(crate) fn angle_between(a: &Vector3<f64>, b: &Vector3<f64>) -> f64 {
    a.cross(b).norm().atan2(a.dot(b))
}

/// A geodesic arc travelled from `start` around `normal` (right-hand rule).
///
/// Positions along the arc are `start·cos s + (normal × start)·sin s` for
/// `s ∈ [0, length]`; the tangent at any point `p` is `normal × p`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GeodesicArc {
    start: ExtPoint,
    end: ExtPoint,
    normal: Unit<Vector3<f64>>,
    length: f64,
}

impl GeodesicArc {
    /// Arc from `start` to `end` turning about the given witness normal.
    /// The length lies in `(0, 2π)`.
    pub fn with_normal(
        start: ExtPoint,
        end: ExtPoint,
        normal: Vector3<f64>,
    ) -> Result<Self, SphereError> {
        let n = Unit::new_normalize(normal);
        let residual = n.dot(start.vector()).abs().max(n.dot(end.vector()).abs());
        if residual > 1e-9 {
            return Err(SphereError::BadWitness { residual });
        }
        let a = start.vector();
        let b = end.vector();
        let mut length = a.cross(b).dot(&n).atan2(a.dot(b));
        if length < 0.0 {
            length += TAU;
        }
        if length <= ANTIPODAL_TOL || length >= TAU - ANTIPODAL_TOL {
            return Err(SphereError::CoincidentPoints);
        }
        Ok(Self {
            start,
            end,
            normal: n,
            length,
        })
    }

    pub fn start(&self) -> &ExtPoint {
        &self.start
    }

    pub fn end(&self) -> &ExtPoint {
        &self.end
    }

    pub fn normal(&self) -> &Vector3<f64> {
        self.normal.as_ref()
    }

    pub fn length(&self) -> f64 {
        self.length
    }

    /// Unit vector at arc length `s` from the start.
    pub fn point_at(&self, s: f64) -> Vector3<f64> {
        let a = self.start.vector();
        let b = self.normal.cross(a);
        a * s.cos() + b * s.sin()
    }

    /// Unit tangent at arc length `s`.
    pub fn tangent_at(&self, s: f64) -> Vector3<f64> {
        self.normal.cross(&self.point_at(s))
    }

    pub fn reversed(&self) -> GeodesicArc {
        GeodesicArc {
            start: self.end,
            end: self.start,
            normal: -self.normal,
            length: self.length,
        }
    }

    /// Arc length position of `p` if it lies on this arc (closed), within `tol`.
    pub fn locate(&self, p: &Vector3<f64>, tol: f64) -> Option<f64> {
        if self.normal.dot(p).abs() > tol {
            return None;
        }
        let a = self.start.vector();
        let b = self.normal.cross(a);
        let mut s = p.dot(&b).atan2(p.dot(a));
        if s < 0.0 {
            s += TAU;
        }
        if s <= self.length + tol {
            Some(s.min(self.length))
        } else if s >= TAU - tol {
            Some(0.0)
        } else {
            None
        }
    }
}

/// The unique minimizing arc between two non-antipodal points.
pub fn shortest_path(p: &ExtPoint, q: &ExtPoint) -> Result<GeodesicArc, SphereError> {
    let d = spherical_distance(p, q);
    if d >= PI - ANTIPODAL_TOL {
        return Err(SphereError::AntipodalPair { distance: d });
    }
    if d <= ANTIPODAL_TOL {
        return Err(SphereError::CoincidentPoints);
    }
    let n = p.vector().cross(q.vector());
    Ok(GeodesicArc {
        start: *p,
        end: *q,
        normal: Unit::new_normalize(n),
        length: d,
    })
}

/// A spherical circle: all points at angular distance `radius` from `center`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SphericalCircle {
    center: ExtPoint,
    radius: f64,
}

impl SphericalCircle {
    pub fn new(center: ExtPoint, radius: f64) -> Result<Self, SphereError> {
        if !(radius > 0.0 && radius < PI) {
            return Err(SphereError::InvalidRadius(radius));
        }
        Ok(Self { center, radius })
    }

    pub fn center(&self) -> &ExtPoint {
        &self.center
    }

    pub fn radius(&self) -> f64 {
        self.radius
    }

    /// Radius of the circle as a planar circle in ℝ³.
    pub fn euclidean_radius(&self) -> f64 {
        self.radius.sin()
    }

    pub fn length(&self) -> f64 {
        TAU * self.radius.sin()
    }

    /// Area of the cap around the center, `2π(1 - cos r)`.
    pub fn cap_area(&self) -> f64 {
        TAU * (1.0 - self.radius.cos())
    }

    pub fn contains(&self, p: &ExtPoint) -> bool {
        spherical_distance(&self.center, p) <= self.radius
    }

    /// Point at polar angle `phi` around the center.
    pub fn point_at(&self, phi: f64) -> ExtPoint {
        let c = self.center.vector();
        let helper = if c.x.abs() < 0.9 {
            Vector3::x()
        } else {
            Vector3::y()
        };
        let u = c.cross(&helper).normalize();
        let v = c.cross(&u);
        let (s, co) = self.radius.sin_cos();
        ExtPoint::from_vector(c * co + (u * phi.cos() + v * phi.sin()) * s)
    }
}

/// A proper rotation of the sphere.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Rotation(Rotation3<f64>);

impl Rotation {
    pub fn identity() -> Self {
        Rotation(Rotation3::identity())
    }

    /// Right-handed rotation by `angle` about `axis`.
    pub fn about_axis(axis: Vector3<f64>, angle: f64) -> Self {
        Rotation(Rotation3::from_axis_angle(&Unit::new_normalize(axis), angle))
    }

    /// Accepts a matrix that is orthogonal with determinant +1 (within 1e-9).
    pub fn from_matrix(m: Matrix3<f64>) -> Result<Self, SphereError> {
        let defect = (m.transpose() * m - Matrix3::identity()).norm();
        if defect > 1e-9 || (m.determinant() - 1.0).abs() > 1e-9 {
            return Err(SphereError::NotARotation);
        }
        Ok(Rotation(Rotation3::from_matrix_unchecked(m)))
    }

    pub fn matrix(&self) -> &Matrix3<f64> {
        self.0.matrix()
    }

    pub fn apply_vector(&self, v: &Vector3<f64>) -> Vector3<f64> {
        self.0 * v
    }

    pub fn apply(&self, p: &ExtPoint) -> ExtPoint {
        ExtPoint::from_vector(self.0 * p.vector())
    }

    pub fn then(&self, next: &Rotation) -> Rotation {
        Rotation(next.0 * self.0)
    }

    pub fn inverse(&self) -> Rotation {
        Rotation(self.0.inverse())
    }

    /// Coefficients `(a, b)` of the unitary Möbius map
    /// `w ↦ (a w + b)/(-b̄ w + ā)` induced on the extended plane.
    pub fn mobius(&self) -> (Complex64, Complex64) {
        let q = UnitQuaternion::from_rotation_matrix(&self.0);
        let (w, x, y, z) = (q.w, q.i, q.j, q.k);
        (Complex64::new(w, z), Complex64::new(-y, x))
    }

    /// The induced Möbius map applied to `w`, with its complex derivative.
    /// The derivative is `None` at the pole `w = ā/b̄`.
    pub fn mobius_apply(&self, w: ExtComplex) -> (ExtComplex, Option<Complex64>) {
        let (a, b) = self.mobius();
        match w {
            ExtComplex::Infinity => {
                if b.norm_sqr() == 0.0 {
                    (ExtComplex::Infinity, None)
                } else {
                    (ExtComplex::Finite(-a / b.conj()), None)
                }
            }
            ExtComplex::Finite(w) => {
                let den = -b.conj() * w + a.conj();
                if den.norm_sqr() == 0.0 {
                    (ExtComplex::Infinity, None)
                } else {
                    (ExtComplex::Finite((a * w + b) / den), Some(den.powi(-2)))
                }
            }
        }
    }

    /// The rotation whose axis is the x₁-axis and angle π; it swaps 0 and ∞
    /// and fixes ±1, acting as `z ↦ 1/z`.
    pub fn swap_poles() -> Self {
        Rotation::about_axis(Vector3::x(), PI)
    }
}

/// Applies a rotation to a point.
pub fn rotate(r: &Rotation, p: &ExtPoint) -> ExtPoint {
    r.apply(p)
}
