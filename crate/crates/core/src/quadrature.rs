//! Adaptive quadrature of spherical length and multiplicity-counted spherical
//! area.
//!
//! One-dimensional integrals use a globally adaptive Gauss–Kronrod (7/15)
//! scheme; area integrals use the tensor product of the same rule over polar
//! rectangles `(r, θ)`, bisecting whichever direction carries the larger
//! error. Refinement order is fixed by the error heap (ties broken by
//! creation order), so results do not depend on scheduling.

use std::cmp::Ordering;
use std::collections::BinaryHeap;
use std::f64::consts::TAU;
use std::fmt;
use std::sync::Arc;

use nalgebra::Vector3;
use num_complex::Complex64;
use thiserror::Error;

use crate::sphere::{
    shortest_path, stereo_differential, ExtComplex, ExtPoint, GeodesicArc, Rotation,
    SphericalCircle,
};

/// Default absolute tolerance.
pub const DEFAULT_TOL: f64 = 1e-8;
/// Default cap on integrand evaluations.
pub const DEFAULT_BUDGET: usize = 10_000_000;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum QuadratureError {
    #[error("tolerance must be positive and finite, got {0}")]
    InvalidTolerance(f64),
    #[error("tolerance {requested:e} not met after {evaluations} evaluations (estimate {achieved:e})")]
    ToleranceNotMet {
        requested: f64,
        achieved: f64,
        evaluations: usize,
    },
    #[error("integrand is not finite at {at:?}")]
    NonFinite { at: (f64, f64) },
    #[error("map derivative is not finite on the boundary at θ = {theta}")]
    NonFiniteDerivative { theta: f64 },
}

/// Outcome of an adaptive integration.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureResult {
    pub value: f64,
    pub error: f64,
    pub evaluations: usize,
}

// Positive Kronrod nodes, center first; even indices are the Gauss nodes.
const XGK: [f64; 8] = [
    0.0,
    0.207_784_955_007_898_467_600_689_403_773_245,
    0.405_845_151_377_397_166_906_606_412_076_961,
    0.586_087_235_467_691_130_294_144_838_258_730,
    0.741_531_185_599_394_439_863_864_773_280_788,
    0.864_864_423_359_769_072_789_712_788_640_926,
    0.949_107_912_342_758_524_526_189_684_047_851,
    0.991_455_371_120_812_639_206_854_697_526_329,
];
const WGK: [f64; 8] = [
    0.209_482_141_084_727_828_012_999_174_891_714,
    0.204_432_940_075_298_892_414_161_999_234_649,
    0.190_350_578_064_785_409_913_256_402_421_014,
    0.169_004_726_639_267_902_826_583_426_598_550,
    0.140_653_259_715_525_918_745_189_590_510_238,
    0.104_790_010_322_250_183_839_876_322_541_518,
    0.063_092_092_629_978_553_290_700_663_189_204,
    0.022_935_322_010_529_224_963_732_008_058_970,
];
const WG: [f64; 4] = [
    0.417_959_183_673_469_387_755_102_040_816_327,
    0.381_830_050_505_118_944_950_369_775_488_975,
    0.279_705_391_489_276_667_901_467_771_423_780,
    0.129_484_966_168_869_693_270_611_432_679_082,
];

/// The 15 nodes on [-1, 1] with Kronrod and (zero-padded) Gauss weights.
struct Rule {
    nodes: [f64; 15],
    kronrod: [f64; 15],
    gauss: [f64; 15],
}

const fn build_rule() -> Rule {
    let mut nodes = [0.0; 15];
    let mut kronrod = [0.0; 15];
    let mut gauss = [0.0; 15];
    let mut k = 0;
    while k < 8 {
        nodes[7 + k] = XGK[k];
        nodes[7 - k] = -XGK[k];
        kronrod[7 + k] = WGK[k];
        kronrod[7 - k] = WGK[k];
        if k % 2 == 0 {
            gauss[7 + k] = WG[k / 2];
            gauss[7 - k] = WG[k / 2];
        }
        k += 1;
    }
    Rule {
        nodes,
        kronrod,
        gauss,
    }
}

const RULE: Rule = build_rule();

/// QUADPACK's rescaling of the raw Gauss/Kronrod difference.
fn scaled_error(raw: f64, res_abs: f64, res_asc: f64) -> f64 {
    let mut err = raw.abs();
    if res_asc != 0.0 && err != 0.0 {
        err = res_asc * (200.0 * err / res_asc).powf(1.5).min(1.0);
    }
    if res_abs > f64::MIN_POSITIVE / (50.0 * f64::EPSILON) {
        err = err.max(50.0 * f64::EPSILON * res_abs);
    }
    err
}

#[derive(Debug, Clone, Copy)]
struct Interval {
    a: f64,
    b: f64,
    value: f64,
    error: f64,
    serial: usize,
}

// Max-heap on error; earlier serial wins ties.
struct ByError<T>(T, f64, usize);

impl<T> PartialEq for ByError<T> {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}
impl<T> Eq for ByError<T> {}
impl<T> PartialOrd for ByError<T> {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl<T> Ord for ByError<T> {
    fn cmp(&self, other: &Self) -> Ordering {
        self.1
            .total_cmp(&other.1)
            .then_with(|| other.2.cmp(&self.2))
    }
}

fn check_tol(tol: f64) -> Result<(), QuadratureError> {
    if tol > 0.0 && tol.is_finite() {
        Ok(())
    } else {
        Err(QuadratureError::InvalidTolerance(tol))
    }
}

fn gk15<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, serial: usize) -> Result<Interval, QuadratureError> {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let mut fv = [0.0; 15];
    for (i, x) in RULE.nodes.iter().enumerate() {
        let t = center + half * x;
        let v = f(t);
        if !v.is_finite() {
            return Err(QuadratureError::NonFinite { at: (t, f64::NAN) });
        }
        fv[i] = v;
    }
    let mut k = 0.0;
    let mut g = 0.0;
    let mut res_abs = 0.0;
    for i in 0..15 {
        k += RULE.kronrod[i] * fv[i];
        g += RULE.gauss[i] * fv[i];
        res_abs += RULE.kronrod[i] * fv[i].abs();
    }
    let mean = 0.5 * k;
    let res_asc: f64 = (0..15)
        .map(|i| RULE.kronrod[i] * (fv[i] - mean).abs())
        .sum();
    let h = half.abs();
    Ok(Interval {
        a,
        b,
        value: k * half,
        error: scaled_error((k - g) * half, res_abs * h, res_asc * h),
        serial,
    })
}

/// Adaptive integration of `f` over `[a, b]`, first splitting at the given
/// breakpoints (those outside `(a, b)` are ignored).
pub fn integrate_with_breaks<F: Fn(f64) -> f64>(
    f: F,
    a: f64,
    b: f64,
    breakpoints: &[f64],
    tol: f64,
    budget: usize,
) -> Result<QuadratureResult, QuadratureError> {
    check_tol(tol)?;
    let mut cuts = vec![a];
    let mut inner: Vec<f64> = breakpoints
        .iter()
        .copied()
        .filter(|&t| t > a && t < b)
        .collect();
    inner.sort_by(f64::total_cmp);
    inner.dedup();
    cuts.extend(inner);
    cuts.push(b);

    let mut heap = BinaryHeap::new();
    let mut serial = 0;
    let mut evaluations = 0;
    let mut total_err = 0.0;
    for w in cuts.windows(2) {
        let iv = gk15(&f, w[0], w[1], serial)?;
        serial += 1;
        evaluations += 15;
        total_err += iv.error;
        heap.push(ByError(iv, iv.error, iv.serial));
    }

    while total_err > tol {
        if evaluations + 30 > budget {
            return Err(QuadratureError::ToleranceNotMet {
                requested: tol,
                achieved: total_err,
                evaluations,
            });
        }
        let ByError(worst, _, _) = heap.pop().expect("heap is never empty");
        let mid = 0.5 * (worst.a + worst.b);
        if !(mid > worst.a && mid < worst.b) {
            // interval cannot be split further in f64
            return Err(QuadratureError::ToleranceNotMet {
                requested: tol,
                achieved: total_err,
                evaluations,
            });
        }
        let left = gk15(&f, worst.a, mid, serial)?;
        let right = gk15(&f, mid, worst.b, serial + 1)?;
        serial += 2;
        evaluations += 30;
        total_err += left.error + right.error - worst.error;
        heap.push(ByError(left, left.error, left.serial));
        heap.push(ByError(right, right.error, right.serial));
    }

    let mut pieces: Vec<Interval> = heap.into_iter().map(|e| e.0).collect();
    pieces.sort_by(|x, y| x.a.total_cmp(&y.a));
    Ok(QuadratureResult {
        value: pieces.iter().map(|p| p.value).sum(),
        error: pieces.iter().map(|p| p.error).sum(),
        evaluations,
    })
}

/// Adaptive integration of `f` over `[a, b]` with the default budget.
pub fn integrate<F: Fn(f64) -> f64>(
    f: F,
    a: f64,
    b: f64,
    tol: f64,
) -> Result<QuadratureResult, QuadratureError> {
    integrate_with_breaks(f, a, b, &[], tol, DEFAULT_BUDGET)
}

#[derive(Debug, Clone, Copy)]
struct Cell {
    x: (f64, f64),
    y: (f64, f64),
    value: f64,
    error: f64,
    split_x: bool,
    serial: usize,
}

fn tensor_cell<F: Fn(f64, f64) -> f64>(
    f: &F,
    x: (f64, f64),
    y: (f64, f64),
    serial: usize,
) -> Result<Cell, QuadratureError> {
    let (cx, hx) = (0.5 * (x.0 + x.1), 0.5 * (x.1 - x.0));
    let (cy, hy) = (0.5 * (y.0 + y.1), 0.5 * (y.1 - y.0));
    let mut fv = [[0.0; 15]; 15];
    for (i, u) in RULE.nodes.iter().enumerate() {
        let px = cx + hx * u;
        for (j, v) in RULE.nodes.iter().enumerate() {
            let py = cy + hy * v;
            let val = f(px, py);
            if !val.is_finite() {
                return Err(QuadratureError::NonFinite { at: (px, py) });
            }
            fv[i][j] = val;
        }
    }
    let (mut kk, mut gg, mut gk, mut kg, mut res_abs) = (0.0, 0.0, 0.0, 0.0, 0.0);
    for i in 0..15 {
        for j in 0..15 {
            let v = fv[i][j];
            kk += RULE.kronrod[i] * RULE.kronrod[j] * v;
            gg += RULE.gauss[i] * RULE.gauss[j] * v;
            gk += RULE.gauss[i] * RULE.kronrod[j] * v;
            kg += RULE.kronrod[i] * RULE.gauss[j] * v;
            res_abs += RULE.kronrod[i] * RULE.kronrod[j] * v.abs();
        }
    }
    let mean = 0.25 * kk;
    let mut res_asc = 0.0;
    for i in 0..15 {
        for j in 0..15 {
            res_asc += RULE.kronrod[i] * RULE.kronrod[j] * (fv[i][j] - mean).abs();
        }
    }
    let area = (hx * hy).abs();
    Ok(Cell {
        x,
        y,
        value: kk * hx * hy,
        error: scaled_error((kk - gg) * area, res_abs * area, res_asc * area),
        // Gauss in x (with Kronrod in y) off by more => x is under-resolved
        split_x: (kk - gk).abs() >= (kk - kg).abs(),
        serial,
    })
}

/// Adaptive tensor Gauss–Kronrod integration over a rectangle, with optional
/// initial cuts along each axis.
pub fn integrate_rect<F: Fn(f64, f64) -> f64>(
    f: F,
    x: (f64, f64),
    y: (f64, f64),
    x_cuts: &[f64],
    y_cuts: &[f64],
    tol: f64,
    budget: usize,
) -> Result<QuadratureResult, QuadratureError> {
    check_tol(tol)?;
    let grid = |lo: f64, hi: f64, cuts: &[f64]| {
        let mut g = vec![lo];
        let mut inner: Vec<f64> = cuts.iter().copied().filter(|&c| c > lo && c < hi).collect();
        inner.sort_by(f64::total_cmp);
        inner.dedup();
        g.extend(inner);
        g.push(hi);
        g
    };
    let gx = grid(x.0, x.1, x_cuts);
    let gy = grid(y.0, y.1, y_cuts);

    let mut heap = BinaryHeap::new();
    let mut serial = 0;
    let mut evaluations = 0;
    let mut total_err = 0.0;
    for wx in gx.windows(2) {
        for wy in gy.windows(2) {
            let c = tensor_cell(&f, (wx[0], wx[1]), (wy[0], wy[1]), serial)?;
            serial += 1;
            evaluations += 225;
            total_err += c.error;
            heap.push(ByError(c, c.error, c.serial));
        }
    }

    while total_err > tol {
        if evaluations + 450 > budget {
            return Err(QuadratureError::ToleranceNotMet {
                requested: tol,
                achieved: total_err,
                evaluations,
            });
        }
        let ByError(worst, _, _) = heap.pop().expect("heap is never empty");
        let (first, second) = if worst.split_x {
            let m = 0.5 * (worst.x.0 + worst.x.1);
            ((worst.x.0, m, worst.y.0, worst.y.1), (m, worst.x.1, worst.y.0, worst.y.1))
        } else {
            let m = 0.5 * (worst.y.0 + worst.y.1);
            ((worst.x.0, worst.x.1, worst.y.0, m), (worst.x.0, worst.x.1, m, worst.y.1))
        };
        if first.0 >= first.1 || first.2 >= first.3 || second.0 >= second.1 || second.2 >= second.3 {
            return Err(QuadratureError::ToleranceNotMet {
                requested: tol,
                achieved: total_err,
                evaluations,
            });
        }
        let c1 = tensor_cell(&f, (first.0, first.1), (first.2, first.3), serial)?;
        let c2 = tensor_cell(&f, (second.0, second.1), (second.2, second.3), serial + 1)?;
        serial += 2;
        evaluations += 450;
        total_err += c1.error + c2.error - worst.error;
        heap.push(ByError(c1, c1.error, c1.serial));
        heap.push(ByError(c2, c2.error, c2.serial));
    }

    let mut cells: Vec<Cell> = heap.into_iter().map(|e| e.0).collect();
    cells.sort_by_key(|c| c.serial);
    Ok(QuadratureResult {
        value: cells.iter().map(|c| c.value).sum(),
        error: cells.iter().map(|c| c.error).sum(),
        evaluations,
    })
}

/// `ρ(w)|w'|` evaluated in the chart where `|w| ≤ 1`: directly when `|w| ≤ 1`,
/// else through `g = 1/w`, `g' = -w'/w²`. Returns NaN at `w = ∞`.
pub fn spherical_density(value: ExtComplex, derivative: Complex64) -> f64 {
    match value {
        ExtComplex::Finite(w) if w.norm_sqr() <= 1.0 => 2.0 * derivative.norm() / (1.0 + w.norm_sqr()),
        ExtComplex::Finite(w) => {
            let g = w.inv();
            let dg = -derivative * g * g;
            2.0 * dg.norm() / (1.0 + g.norm_sqr())
        }
        ExtComplex::Infinity => f64::NAN,
    }
}

type PointFn = dyn Fn(f64) -> ExtPoint + Send + Sync;
type VelocityFn = dyn Fn(f64) -> Vector3<f64> + Send + Sync;

/// A curve `t ∈ [0, 1] → S` with its tangent velocity in ℝ³.
///
/// Breakpoints mark parameters where the velocity may fail to be smooth;
/// quadrature splits there.
#[derive(Clone)]
pub struct ParamCurve {
    point: Arc<PointFn>,
    velocity: Arc<VelocityFn>,
    breakpoints: Vec<f64>,
}

impl fmt::Debug for ParamCurve {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ParamCurve")
            .field("breakpoints", &self.breakpoints)
            .finish_non_exhaustive()
    }
}

impl ParamCurve {
    pub fn new(
        point: impl Fn(f64) -> ExtPoint + Send + Sync + 'static,
        velocity: impl Fn(f64) -> Vector3<f64> + Send + Sync + 'static,
        breakpoints: Vec<f64>,
    ) -> Self {
        Self {
            point: Arc::new(point),
            velocity: Arc::new(velocity),
            breakpoints,
        }
    }

    /// A curve given in the plane by `z(s)` and `z'(s)` for `s ∈ [s0, s1]`,
    /// reparametrized to `[0, 1]`. Breakpoints are in the `s` variable.
    pub fn planar(
        z: impl Fn(f64) -> Complex64 + Send + Sync + 'static,
        dz: impl Fn(f64) -> Complex64 + Send + Sync + 'static,
        s0: f64,
        s1: f64,
        breakpoints: &[f64],
    ) -> Self {
        let span = s1 - s0;
        let z = Arc::new(z);
        let zp = Arc::clone(&z);
        Self {
            point: Arc::new(move |t| ExtPoint::finite(zp(s0 + span * t))),
            velocity: Arc::new(move |t| {
                let s = s0 + span * t;
                stereo_differential(z(s), dz(s) * span)
            }),
            breakpoints: breakpoints
                .iter()
                .map(|&s| (s - s0) / span)
                .filter(|&t| t > 0.0 && t < 1.0)
                .collect(),
        }
    }

    /// Constant-speed traversal of a geodesic arc.
    pub fn geodesic(arc: &GeodesicArc) -> Self {
        let a = *arc;
        let b = *arc;
        let len = arc.length();
        Self {
            point: Arc::new(move |t| ExtPoint::from_vector(a.point_at(t * len))),
            velocity: Arc::new(move |t| b.tangent_at(t * len) * len),
            breakpoints: Vec::new(),
        }
    }

    /// Shortest geodesic between two non-antipodal points.
    pub fn segment(p: &ExtPoint, q: &ExtPoint) -> Result<Self, crate::sphere::SphereError> {
        shortest_path(p, q).map(|arc| Self::geodesic(&arc))
    }

    /// One counterclockwise (about the center) turn of a spherical circle.
    pub fn circle(c: &SphericalCircle) -> Self {
        let center = *c.center().vector();
        let start = *c.point_at(0.0).vector();
        let axis = center;
        let radius = c.radius();
        let point = move |t: f64| {
            let r = Rotation::about_axis(axis, TAU * t);
            ExtPoint::from_vector(r.apply_vector(&start))
        };
        let velocity = move |t: f64| {
            let r = Rotation::about_axis(axis, TAU * t);
            let p = r.apply_vector(&start);
            axis.cross(&p) * TAU * radius.sin() / axis.cross(&p).norm().max(f64::MIN_POSITIVE)
        };
        Self {
            point: Arc::new(point),
            velocity: Arc::new(velocity),
            breakpoints: Vec::new(),
        }
    }

    pub fn point(&self, t: f64) -> ExtPoint {
        (self.point)(t)
    }

    pub fn velocity(&self, t: f64) -> Vector3<f64> {
        (self.velocity)(t)
    }

    pub fn speed(&self, t: f64) -> f64 {
        self.velocity(t).norm()
    }

    pub fn breakpoints(&self) -> &[f64] {
        &self.breakpoints
    }

    /// The image of this curve under a rotation.
    pub fn rotated(&self, r: &Rotation) -> Self {
        let (p, v) = (Arc::clone(&self.point), Arc::clone(&self.velocity));
        let (r1, r2) = (*r, *r);
        Self {
            point: Arc::new(move |t| r1.apply(&p(t))),
            velocity: Arc::new(move |t| r2.apply_vector(&v(t))),
            breakpoints: self.breakpoints.clone(),
        }
    }

    /// The same curve traversed backwards.
    pub fn reversed(&self) -> Self {
        let (p, v) = (Arc::clone(&self.point), Arc::clone(&self.velocity));
        Self {
            point: Arc::new(move |t| p(1.0 - t)),
            velocity: Arc::new(move |t| -v(1.0 - t)),
            breakpoints: self.breakpoints.iter().rev().map(|t| 1.0 - t).collect(),
        }
    }

    /// Joins curves end to end; each piece gets an equal share of `[0, 1]`
    /// and every junction becomes a breakpoint.
    pub fn concat(pieces: Vec<ParamCurve>) -> Self {
        assert!(!pieces.is_empty(), "concat needs at least one piece");
        let n = pieces.len();
        let mut breakpoints = Vec::new();
        for (k, piece) in pieces.iter().enumerate() {
            if k > 0 {
                breakpoints.push(k as f64 / n as f64);
            }
            breakpoints.extend(piece.breakpoints.iter().map(|t| (k as f64 + t) / n as f64));
        }
        let pieces = Arc::new(pieces);
        let locate = move |t: f64| {
            let scaled = (t * n as f64).clamp(0.0, n as f64);
            let k = (scaled.floor() as usize).min(n - 1);
            (k, scaled - k as f64)
        };
        let (pp, pv) = (Arc::clone(&pieces), Arc::clone(&pieces));
        Self {
            point: Arc::new(move |t| {
                let (k, s) = locate(t);
                pp[k].point(s)
            }),
            velocity: Arc::new(move |t| {
                let (k, s) = locate(t);
                pv[k].velocity(s) * n as f64
            }),
            breakpoints,
        }
    }
}

/// Spherical length `∫ |γ'(t)| dt` of a parametric curve.
pub fn curve_length(c: &ParamCurve, tol: f64) -> Result<QuadratureResult, QuadratureError> {
    integrate_with_breaks(|t| c.speed(t), 0.0, 1.0, &c.breakpoints, tol, DEFAULT_BUDGET)
}

type ValueFn = dyn Fn(Complex64) -> ExtComplex + Send + Sync;
type DerivFn = dyn Fn(Complex64) -> Complex64 + Send + Sync;

/// A map of the closed unit disk into the sphere with its complex derivative.
#[derive(Clone)]
pub struct AnalyticMap {
    label: String,
    value: Arc<ValueFn>,
    derivative: Option<Arc<DerivFn>>,
    boundary_breakpoints: Vec<f64>,
}

impl fmt::Debug for AnalyticMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("AnalyticMap")
            .field("label", &self.label)
            .field("analytic_derivative", &self.derivative.is_some())
            .field("boundary_breakpoints", &self.boundary_breakpoints)
            .finish()
    }
}

impl AnalyticMap {
    /// A finite-valued map with an analytic derivative.
    pub fn new(
        label: impl Into<String>,
        value: impl Fn(Complex64) -> Complex64 + Send + Sync + 'static,
        derivative: impl Fn(Complex64) -> Complex64 + Send + Sync + 'static,
    ) -> Self {
        Self {
            label: label.into(),
            value: Arc::new(move |z| ExtComplex::Finite(value(z))),
            derivative: Some(Arc::new(derivative)),
            boundary_breakpoints: Vec::new(),
        }
    }

    /// A map whose values may reach ∞ (only on a null set of the disk).
    pub fn extended(
        label: impl Into<String>,
        value: impl Fn(Complex64) -> ExtComplex + Send + Sync + 'static,
        derivative: impl Fn(Complex64) -> Complex64 + Send + Sync + 'static,
    ) -> Self {
        Self {
            label: label.into(),
            value: Arc::new(value),
            derivative: Some(Arc::new(derivative)),
            boundary_breakpoints: Vec::new(),
        }
    }

    /// A map without a supplied derivative. Derivatives then come from
    /// fourth-order central differences with step `1e-5·(|z| + 1)`, which is
    /// markedly less accurate than an analytic derivative and needs `f`
    /// defined slightly beyond the closed disk.
    pub fn numeric(
        label: impl Into<String>,
        value: impl Fn(Complex64) -> Complex64 + Send + Sync + 'static,
    ) -> Self {
        Self {
            label: label.into(),
            value: Arc::new(move |z| ExtComplex::Finite(value(z))),
            derivative: None,
            boundary_breakpoints: Vec::new(),
        }
    }

    /// `Σ c_k z^k`.
    pub fn polynomial(label: impl Into<String>, coeffs: Vec<Complex64>) -> Self {
        let c1 = coeffs.clone();
        let c2 = coeffs;
        Self::new(
            label,
            move |z| c1.iter().rev().fold(Complex64::new(0.0, 0.0), |acc, c| acc * z + c),
            move |z| {
                c2.iter()
                    .enumerate()
                    .skip(1)
                    .rev()
                    .fold(Complex64::new(0.0, 0.0), |acc, (k, c)| acc * z + c * k as f64)
            },
        )
    }

    /// Boundary angles (radians in `[0, 2π)`) where `f'` may be singular.
    pub fn with_breakpoints(mut self, angles: Vec<f64>) -> Self {
        self.boundary_breakpoints = angles;
        self
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn boundary_breakpoints(&self) -> &[f64] {
        &self.boundary_breakpoints
    }

    pub fn has_analytic_derivative(&self) -> bool {
        self.derivative.is_some()
    }

    pub fn eval(&self, z: Complex64) -> ExtComplex {
        (self.value)(z)
    }

    pub fn derivative(&self, z: Complex64) -> Complex64 {
        match &self.derivative {
            Some(d) => d(z),
            None => {
                let h = 1e-5 * (z.norm() + 1.0);
                let at = |dz: f64| match (self.value)(z + dz) {
                    ExtComplex::Finite(w) => w,
                    ExtComplex::Infinity => Complex64::new(f64::NAN, f64::NAN),
                };
                (-at(2.0 * h) + at(h) * 8.0 - at(-h) * 8.0 + at(-2.0 * h)) / (12.0 * h)
            }
        }
    }

    /// `ρ(f(z))|f'(z)|` in the numerically stable chart.
    pub fn density(&self, z: Complex64) -> f64 {
        spherical_density(self.eval(z), self.derivative(z))
    }

    /// `R ∘ f` for a rigid rotation `R`, with the chain-rule derivative.
    pub fn rotated(&self, r: &Rotation) -> AnalyticMap {
        let inner = self.clone();
        let inner2 = self.clone();
        let (r1, r2) = (*r, *r);
        AnalyticMap {
            label: format!("rot∘{}", self.label),
            value: Arc::new(move |z| r1.mobius_apply(inner.eval(z)).0),
            derivative: Some(Arc::new(move |z| {
                match r2.mobius_apply(inner2.eval(z)).1 {
                    Some(d) => d * inner2.derivative(z),
                    None => Complex64::new(f64::NAN, f64::NAN),
                }
            })),
            boundary_breakpoints: self.boundary_breakpoints.clone(),
        }
    }

    /// The boundary curve `θ ↦ f(e^{2πiθ})` as a [`ParamCurve`].
    pub fn boundary_curve(&self) -> ParamCurve {
        let (m1, m2) = (self.clone(), self.clone());
        ParamCurve {
            point: Arc::new(move |t| ExtPoint::new(m1.eval(Complex64::from_polar(1.0, TAU * t)))),
            velocity: Arc::new(move |t| {
                let z = Complex64::from_polar(1.0, TAU * t);
                let dz = m2.derivative(z) * Complex64::new(0.0, TAU) * z;
                match m2.eval(z) {
                    ExtComplex::Finite(w) => stereo_differential(w, dz),
                    ExtComplex::Infinity => Vector3::repeat(f64::NAN),
                }
            }),
            breakpoints: self.boundary_breakpoints.iter().map(|a| a / TAU).collect(),
        }
    }
}

/// `L(f, ∂Δ) = ∫₀^{2π} ρ(f(e^{iθ}))·|f'(e^{iθ})| dθ`.
pub fn map_boundary_length(f: &AnalyticMap, tol: f64) -> Result<QuadratureResult, QuadratureError> {
    integrate_with_breaks(
        |theta| f.density(Complex64::from_polar(1.0, theta)),
        0.0,
        TAU,
        &f.boundary_breakpoints,
        tol,
        DEFAULT_BUDGET,
    )
    .map_err(|e| match e {
        QuadratureError::NonFinite { at } => QuadratureError::NonFiniteDerivative { theta: at.0 },
        other => other,
    })
}

/// `A(f, Δ) = ∬_Δ (ρ(f)|f'|)² dx dy`, multiplicities included.
pub fn map_area(f: &AnalyticMap, tol: f64) -> Result<QuadratureResult, QuadratureError> {
    map_area_annulus(f, 0.0, 1.0, tol)
}

/// Area of the image of the annulus `r_inner < |z| < r_outer`.
pub fn map_area_annulus(
    f: &AnalyticMap,
    r_inner: f64,
    r_outer: f64,
    tol: f64,
) -> Result<QuadratureResult, QuadratureError> {
    integrate_rect(
        |r, theta| {
            let d = f.density(Complex64::from_polar(r, theta));
            d * d * r
        },
        (r_inner, r_outer),
        (0.0, TAU),
        &[],
        &f.boundary_breakpoints,
        tol,
        DEFAULT_BUDGET,
    )
}

/// Spherical area of the planar region `{r e^{iθ} : θ0 ≤ θ ≤ θ1, r ≤ R(θ)}`.
pub fn star_region_area(
    radius: impl Fn(f64) -> f64,
    theta0: f64,
    theta1: f64,
    tol: f64,
) -> Result<QuadratureResult, QuadratureError> {
    integrate_rect(
        |s, theta| {
            let big_r = radius(theta);
            let r = s * big_r;
            let q = 1.0 + r * r;
            4.0 * r * big_r / (q * q)
        },
        (0.0, 1.0),
        (theta0, theta1),
        &[],
        &[],
        tol,
        DEFAULT_BUDGET,
    )
}
