//! Numerical checks of area/length inequalities on concrete maps and ledgers.
//!
//! Every check produces [`InequalityReport`]s. `holds` is true when the
//! slack exceeds minus the combined quadrature error; [`InequalityReport::verdict`]
//! additionally separates clear passes from results inside the error band.

use std::f64::consts::{PI, SQRT_2, TAU};

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::isoperimetric::cap_area_bound;
use crate::lens::{find_h0, zeta0, zeta0_inverse, LensError};
use crate::quadrature::{map_area, map_boundary_length, AnalyticMap, QuadratureError};
use crate::sphere::{exceptional_set, ExtComplex, ExtPoint};

/// Interior points sampled when checking that a map omits 0, 1 and ∞.
pub const OMISSION_SAMPLES: usize = 100_000;
const BOUNDARY_SAMPLES: usize = 4096;
const NEAR_VALUE: f64 = 1e-9;
const FAR_VALUE: f64 = 1e9;
/// Radius of the circle used for winding numbers when the boundary itself
/// may touch 0 and 1.
const INNER_RADIUS: f64 = 1.0 - 1e-6;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum VerifyError {
    #[error("map {label} does not omit {{0, 1, ∞}}: {reason}")]
    OmittedValueViolation { label: String, reason: String },
    #[error("precondition failed for {label}: {reason}")]
    PreconditionFail { label: String, reason: String },
    #[error(transparent)]
    Quadrature(#[from] QuadratureError),
    #[error(transparent)]
    Lens(#[from] LensError),
    #[error("unknown map {0:?}")]
    UnknownMap(String),
    #[error("invalid map spec: {0}")]
    MapSpec(String),
}

/// Error budget behind a report.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Tolerances {
    pub quad_tol: f64,
    pub area_error: f64,
    pub length_error: f64,
    pub combined_error: f64,
    /// Smallest spherical distance from sampled values to {0, 1, ∞}.
    pub omission_margin: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InequalityReport {
    pub map_label: String,
    #[serde(rename = "A")]
    pub area: f64,
    #[serde(rename = "L")]
    pub length: f64,
    pub bound_name: String,
    pub bound_value: f64,
    pub slack: f64,
    pub holds: bool,
    pub tolerances: Tolerances,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Holds,
    Inconclusive,
    Violated,
}

impl InequalityReport {
    fn new(
        label: &str,
        area: f64,
        length: f64,
        bound_name: &str,
        bound_value: f64,
        slack: f64,
        tolerances: Tolerances,
    ) -> Self {
        Self {
            map_label: label.to_string(),
            area,
            length,
            bound_name: bound_name.to_string(),
            bound_value,
            slack,
            holds: slack > -tolerances.combined_error,
            tolerances,
        }
    }

    /// `Holds` when the slack clears the error band, `Violated` when it is
    /// below it, `Inconclusive` inside it.
    pub fn verdict(&self) -> Verdict {
        let e = self.tolerances.combined_error;
        if self.slack > e {
            Verdict::Holds
        } else if self.slack < -e {
            Verdict::Violated
        } else {
            Verdict::Inconclusive
        }
    }
}

/// Runs inequality checks with a fixed tolerance and sampling seed.
#[derive(Debug, Clone, Copy)]
pub struct Verifier {
    pub tol: f64,
    pub seed: u64,
    pub samples: usize,
    pub h0: f64,
}

struct Measured {
    area: f64,
    area_error: f64,
    length: f64,
    length_error: f64,
}

impl Verifier {
    pub fn new(tol: f64) -> Result<Self, VerifyError> {
        Ok(Self {
            tol,
            seed: 0,
            samples: OMISSION_SAMPLES,
            h0: find_h0(1e-12)?.h0,
        })
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    fn measure(&self, f: &AnalyticMap) -> Result<Measured, VerifyError> {
        let l = map_boundary_length(f, self.tol)?;
        let a = map_area(f, self.tol)?;
        Ok(Measured {
            area: a.value,
            area_error: a.error,
            length: l.value,
            length_error: l.error,
        })
    }

    /// Checks that `f` omits 0, 1 and ∞ on the open disk; returns the
    /// sampled margin. With `boundary_may_touch`, winding numbers are taken
    /// on a slightly smaller circle and only interior points are sampled.
    pub fn check_omission(&self, f: &AnalyticMap, boundary_may_touch: bool) -> Result<f64, VerifyError> {
        let violation = |reason: String| VerifyError::OmittedValueViolation {
            label: f.label().to_string(),
            reason,
        };
        let radius = if boundary_may_touch { INNER_RADIUS } else { 1.0 };
        for target in [0.0, 1.0] {
            let w = winding_number(f, Complex64::new(target, 0.0), radius)
                .map_err(|z| violation(format!("value {target} approached near z = {z}")))?;
            if w != 0 {
                return Err(violation(format!("takes the value {target} ({w} times by the argument principle)")));
            }
        }
        let e = exceptional_set();
        let mut margin = f64::INFINITY;
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        let boundary = (!boundary_may_touch).then_some(BOUNDARY_SAMPLES).unwrap_or(0);
        let interior = (0..self.samples).map(|_| {
            let r = rng.random::<f64>().sqrt() * radius;
            Complex64::from_polar(r, rng.random_range(0.0..TAU))
        });
        let rim: Vec<Complex64> = (0..boundary)
            .map(|k| Complex64::from_polar(1.0, TAU * k as f64 / boundary as f64))
            .collect();
        for z in interior.chain(rim) {
            let v = f.eval(z);
            let bad = match v {
                ExtComplex::Infinity => true,
                ExtComplex::Finite(w) => {
                    w.norm() < NEAR_VALUE || (w - 1.0).norm() < NEAR_VALUE || w.norm() > FAR_VALUE
                }
            };
            if bad {
                return Err(violation(format!("f({z}) = {v}")));
            }
            let p = ExtPoint::new(v);
            margin = e.iter().map(|q| q.distance(&p)).fold(margin, f64::min);
        }
        Ok(margin)
    }

    /// `A(f) < h₀·L(f)` for a map omitting 0, 1 and ∞.
    pub fn check_main(&self, f: &AnalyticMap) -> Result<InequalityReport, VerifyError> {
        let margin = self.check_omission(f, false)?;
        let m = self.measure(f)?;
        let bound = self.h0 * m.length;
        Ok(InequalityReport::new(
            f.label(),
            m.area,
            m.length,
            "h0*L",
            bound,
            bound - m.area,
            Tolerances {
                quad_tol: self.tol,
                area_error: m.area_error,
                length_error: m.length_error,
                combined_error: m.area_error + self.h0 * m.length_error,
                omission_margin: Some(margin),
            },
        ))
    }

    /// Cap bound `A ≤ 2π(1 − √(1 − (L/2π)²))` for maps with `L < 2π`, and
    /// additionally `4π + A < 4L` once `L ≥ √2π`.
    pub fn check_good(&self, f: &AnalyticMap) -> Result<Vec<InequalityReport>, VerifyError> {
        let margin = self.check_omission(f, false)?;
        let m = self.measure(f)?;
        if m.length >= TAU {
            return Err(VerifyError::PreconditionFail {
                label: f.label().to_string(),
                reason: format!("boundary length {} is not below 2π", m.length),
            });
        }
        let bound = cap_area_bound(m.length).expect("length below 2π");
        let r = m.length / TAU;
        let slope = r / (1.0 - r * r).sqrt();
        let mut out = vec![InequalityReport::new(
            f.label(),
            m.area,
            m.length,
            "cap",
            bound,
            bound - m.area,
            Tolerances {
                quad_tol: self.tol,
                area_error: m.area_error,
                length_error: m.length_error,
                combined_error: m.area_error + slope * m.length_error,
                omission_margin: Some(margin),
            },
        )];
        if m.length >= SQRT_2 * PI {
            let bound = 4.0 * m.length - 4.0 * PI;
            out.push(InequalityReport::new(
                f.label(),
                m.area,
                m.length,
                "4L-4pi",
                bound,
                bound - m.area,
                Tolerances {
                    quad_tol: self.tol,
                    area_error: m.area_error,
                    length_error: m.length_error,
                    combined_error: m.area_error + 4.0 * m.length_error,
                    omission_margin: Some(margin),
                },
            ));
        }
        Ok(out)
    }

    /// `4π + A ≤ h₀·L` and `A ≤ 4 arcsin τ − 2τζ₀(τ)` with `ζ₀(τ) = L/2`,
    /// for maps taking `[−1, 1]` monotonically onto `[0, 1]` with `L < √2π`.
    pub fn check_good2(&self, f: &AnalyticMap) -> Result<Vec<InequalityReport>, VerifyError> {
        let fail = |reason: String| VerifyError::PreconditionFail {
            label: f.label().to_string(),
            reason,
        };
        check_segment_onto_unit(f).map_err(fail)?;
        let margin = self.check_omission(f, true)?;
        let m = self.measure(f)?;
        if m.length >= SQRT_2 * PI {
            return Err(fail(format!("boundary length {} is not below √2π", m.length)));
        }
        self.good2_reports(
            f.label(),
            m.area,
            m.length,
            m.area_error,
            m.length_error,
            Some(margin),
        )
    }

    /// The two good2 bounds evaluated on supplied `(A, L)` data, e.g. the
    /// exact area and length of a lens.
    pub fn check_good2_ledger(
        &self,
        label: &str,
        area: f64,
        length: f64,
    ) -> Result<Vec<InequalityReport>, VerifyError> {
        self.good2_reports(label, area, length, 0.0, 0.0, None)
    }

    fn good2_reports(
        &self,
        label: &str,
        area: f64,
        length: f64,
        area_error: f64,
        length_error: f64,
        margin: Option<f64>,
    ) -> Result<Vec<InequalityReport>, VerifyError> {
        let half = 0.5 * length;
        // rounding can put exact lens data a hair outside the closed range
        let half = if (half - PI / 2.0).abs() < 1e-12 {
            PI / 2.0
        } else if (half - PI / SQRT_2).abs() < 1e-12 {
            PI / SQRT_2
        } else {
            half
        };
        let tau = zeta0_inverse(half).map_err(|_| VerifyError::PreconditionFail {
            label: label.to_string(),
            reason: format!("boundary length {length} outside [π, √2π]"),
        })?;
        let tol = |combined| Tolerances {
            quad_tol: self.tol,
            area_error,
            length_error,
            combined_error: combined,
            omission_margin: margin,
        };
        let main_bound = self.h0 * length - 4.0 * PI;
        let lens_bound_at = |t: f64| -> Result<f64, LensError> { Ok(4.0 * t.asin() - 2.0 * t * zeta0(t)?) };
        let lens_bound = lens_bound_at(tau)?;
        let (t0, t1) = ((tau - 1e-6).max(0.0), (tau + 1e-6).min(1.0));
        let slope = (lens_bound_at(t1)? - lens_bound_at(t0)?) / (2.0 * (zeta0(t1)? - zeta0(t0)?));
        Ok(vec![
            InequalityReport::new(
                label,
                area,
                length,
                "h0*L-4pi",
                main_bound,
                main_bound - area,
                tol(area_error + self.h0 * length_error),
            ),
            InequalityReport::new(
                label,
                area,
                length,
                "lens_area",
                lens_bound,
                lens_bound - area,
                tol(area_error + slope.abs() * length_error + 1e-12),
            ),
        ])
    }
}

/// Winding number of `f − target` along `|z| = radius`. On failure returns
/// the point where `f` came within `1e-9` of `target` or reached ∞.
fn winding_number(f: &AnalyticMap, target: Complex64, radius: f64) -> Result<i64, Complex64> {
    let value = |theta: f64| -> Result<Complex64, Complex64> {
        let z = Complex64::from_polar(radius, theta);
        match f.eval(z) {
            ExtComplex::Finite(w) if (w - target).norm() >= NEAR_VALUE && w.norm() <= FAR_VALUE => {
                Ok(w - target)
            }
            _ => Err(z),
        }
    };
    let n = 1024;
    let mut total = 0.0;
    let mut prev = value(0.0)?;
    for k in 1..=n {
        let (a, b) = (TAU * (k - 1) as f64 / n as f64, TAU * k as f64 / n as f64);
        let next = value(b)?;
        total += arg_increment(&value, a, b, prev, next, 0)?;
        prev = next;
    }
    Ok((total / TAU).round() as i64)
}

fn arg_increment(
    value: &impl Fn(f64) -> Result<Complex64, Complex64>,
    a: f64,
    b: f64,
    wa: Complex64,
    wb: Complex64,
    depth: usize,
) -> Result<f64, Complex64> {
    let d = (wb / wa).arg();
    if d.abs() < 0.5 || depth >= 40 {
        return Ok(d);
    }
    let m = 0.5 * (a + b);
    let wm = value(m)?;
    Ok(arg_increment(value, a, m, wa, wm, depth + 1)? + arg_increment(value, m, b, wm, wb, depth + 1)?)
}

/// `f` is real, strictly increasing on `[−1, 1]`, `f(−1) = 0`, `f(1) = 1`.
fn check_segment_onto_unit(f: &AnalyticMap) -> Result<(), String> {
    let n = 2000;
    let mut prev = f64::NEG_INFINITY;
    for k in 0..=n {
        let x = -1.0 + 2.0 * k as f64 / n as f64;
        let w = f
            .eval(Complex64::new(x, 0.0))
            .finite()
            .ok_or_else(|| format!("f({x}) = ∞"))?;
        if w.im.abs() > 1e-9 * (1.0 + w.re.abs()) {
            return Err(format!("f({x}) = {w} is not real"));
        }
        if w.re <= prev {
            return Err(format!("f is not increasing near x = {x}"));
        }
        prev = w.re;
        if k == 0 && w.re.abs() > 1e-9 {
            return Err(format!("f(-1) = {w}, expected 0"));
        }
        if k == n && (w.re - 1.0).abs() > 1e-9 {
            return Err(format!("f(1) = {w}, expected 1"));
        }
    }
    Ok(())
}

/// One component of a decomposed image: its area, the part of its boundary
/// coming from the unit circle and the part lying on `[0, +∞]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComponentLedger {
    pub label: String,
    pub area: f64,
    pub boundary_length: f64,
    pub ray_length: f64,
    #[serde(default)]
    pub error: f64,
}

/// Ledger checks: each component's circle boundary outweighs its ray part;
/// the aggregate satisfies `A < 2L`, or `A ≤ h₀L − 4π` when `fat`.
pub fn check_nofat_ledger(
    components: &[ComponentLedger],
    fat: bool,
    h0: f64,
) -> Vec<InequalityReport> {
    let exact = |err: f64| Tolerances {
        quad_tol: 0.0,
        area_error: err,
        length_error: err,
        combined_error: err,
        omission_margin: None,
    };
    let mut out: Vec<InequalityReport> = components
        .iter()
        .map(|c| {
            InequalityReport::new(
                &c.label,
                c.area,
                c.boundary_length,
                "ray_length",
                c.ray_length,
                c.boundary_length - c.ray_length,
                exact(c.error),
            )
        })
        .collect();
    let area: f64 = components.iter().map(|c| c.area).sum();
    let length: f64 = components.iter().map(|c| c.boundary_length).sum();
    let err: f64 = components.iter().map(|c| c.error).sum();
    let label = components
        .iter()
        .map(|c| c.label.as_str())
        .collect::<Vec<_>>()
        .join("+");
    out.push(if fat {
        let bound = h0 * length - 4.0 * PI;
        InequalityReport::new(&label, area, length, "h0*L-4pi", bound, bound - area, exact(err * (1.0 + h0)))
    } else {
        let bound = 2.0 * length;
        InequalityReport::new(&label, area, length, "2L", bound, bound - area, exact(3.0 * err))
    });
    out
}

fn power_lens(label: &str, p: f64) -> AnalyticMap {
    AnalyticMap::new(
        label,
        move |z| ((z + 1.0) * 0.5).powf(p),
        move |z| ((z + 1.0) * 0.5).powf(p - 1.0) * (0.5 * p),
    )
    .with_breakpoints(vec![PI])
}

/// Names of the built-in maps.
pub const BUILTIN_MAPS: &[&str] = &[
    "shift3",
    "exp_half_plus2",
    "half_shift3",
    "tenth_shift3",
    "shift2i",
    "square_plus3",
    "identity",
    "half",
    "square",
    "sqrt_lens",
    "power_lens",
];

/// Built-in maps that omit 0, 1 and ∞ on the closed disk.
pub const OMITTING_MAPS: &[&str] = &[
    "shift3",
    "exp_half_plus2",
    "half_shift3",
    "tenth_shift3",
    "shift2i",
    "square_plus3",
];

pub fn builtin_map(name: &str) -> Result<AnalyticMap, VerifyError> {
    let c = |re: f64, im: f64| Complex64::new(re, im);
    let poly = |coeffs: Vec<Complex64>| AnalyticMap::polynomial(name, coeffs);
    Ok(match name {
        "shift3" => poly(vec![c(3.0, 0.0), c(1.0, 0.0)]),
        "exp_half_plus2" => AnalyticMap::new(name, |z| z.exp() * 0.5 + 2.0, |z| z.exp() * 0.5),
        "half_shift3" => poly(vec![c(3.0, 0.0), c(0.5, 0.0)]),
        "tenth_shift3" => poly(vec![c(3.0, 0.0), c(0.1, 0.0)]),
        "shift2i" => poly(vec![c(0.0, 2.0), c(1.0, 0.0)]),
        "square_plus3" => poly(vec![c(3.0, 0.0), c(0.0, 0.0), c(1.0, 0.0)]),
        "identity" => poly(vec![c(0.0, 0.0), c(1.0, 0.0)]),
        "half" => poly(vec![c(0.0, 0.0), c(0.5, 0.0)]),
        "square" => poly(vec![c(0.0, 0.0), c(0.0, 0.0), c(1.0, 0.0)]),
        "sqrt_lens" => power_lens(name, 0.5),
        "power_lens" => power_lens(name, 0.75),
        _ => return Err(VerifyError::UnknownMap(name.to_string())),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Coefficient {
    Real(f64),
    Complex { re: f64, im: f64 },
    Pair([f64; 2]),
}

impl From<Coefficient> for Complex64 {
    fn from(c: Coefficient) -> Self {
        match c {
            Coefficient::Real(x) => Complex64::new(x, 0.0),
            Coefficient::Complex { re, im } | Coefficient::Pair([re, im]) => Complex64::new(re, im),
        }
    }
}

/// A map description read from JSON: a polynomial by its coefficients
/// (constant term first) or a built-in map by name.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum MapSpec {
    Polynomial {
        coeffs: Vec<Coefficient>,
        #[serde(default)]
        label: Option<String>,
    },
    Builtin {
        name: String,
    },
}

impl MapSpec {
    pub fn from_json(text: &str) -> Result<Self, VerifyError> {
        serde_json::from_str(text).map_err(|e| VerifyError::MapSpec(e.to_string()))
    }

    pub fn build(&self) -> Result<AnalyticMap, VerifyError> {
        match self {
            MapSpec::Polynomial { coeffs, label } => {
                if coeffs.is_empty() {
                    return Err(VerifyError::MapSpec("empty coefficient list".into()));
                }
                let coeffs: Vec<Complex64> = coeffs.iter().map(|&c| c.into()).collect();
                let label = label.clone().unwrap_or_else(|| {
                    coeffs
                        .iter()
                        .enumerate()
                        .map(|(k, c)| format!("({c})z^{k}"))
                        .collect::<Vec<_>>()
                        .join("+")
                });
                Ok(AnalyticMap::polynomial(label, coeffs))
            }
            MapSpec::Builtin { name } => builtin_map(name),
        }
    }
}

/// [`Verifier::check_main`] with the default seed.
pub fn check_main(f: &AnalyticMap, tol: f64) -> Result<InequalityReport, VerifyError> {
    Verifier::new(tol)?.check_main(f)
}

/// [`Verifier::check_good`] with the default seed.
pub fn check_good(f: &AnalyticMap, tol: f64) -> Result<Vec<InequalityReport>, VerifyError> {
    Verifier::new(tol)?.check_good(f)
}

/// [`Verifier::check_good2`] with the default seed.
pub fn check_good2(f: &AnalyticMap, tol: f64) -> Result<Vec<InequalityReport>, VerifyError> {
    Verifier::new(tol)?.check_good2(f)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lens::{h, zeta1};

    fn verifier() -> Verifier {
        let mut v = Verifier::new(1e-9).unwrap();
        v.samples = 20_000;
        v
    }

    #[test]
    fn main_holds_on_omitting_maps() {
        let v = verifier();
        for name in OMITTING_MAPS {
            let r = v.check_main(&builtin_map(name).unwrap()).unwrap();
            assert_eq!(r.verdict(), Verdict::Holds, "{name}");
            assert!(r.holds && r.slack > 0.0);
            assert!(r.tolerances.omission_margin.unwrap() > 0.0);
        }
    }

    #[test]
    fn omission_violations() {
        let v = verifier();
        for name in ["identity", "half", "square"] {
            let err = v.check_main(&builtin_map(name).unwrap()).unwrap_err();
            assert!(matches!(err, VerifyError::OmittedValueViolation { .. }), "{name}");
        }
        // image disk |w - 1.5| < 1 contains 1 but not 0
        let f = AnalyticMap::polynomial("z+1.5", vec![1.5.into(), 1.0.into()]);
        assert!(matches!(v.check_main(&f), Err(VerifyError::OmittedValueViolation { .. })));
    }

    #[test]
    fn good_examples() {
        let v = verifier();
        let r = v.check_good(&builtin_map("tenth_shift3").unwrap()).unwrap();
        assert_eq!(r.len(), 1);
        assert!(r[0].holds);
        // disk image: the cap bound is attained
        let r = v.check_good(&builtin_map("half_shift3").unwrap()).unwrap();
        assert!(r[0].holds && r[0].slack.abs() < 1e-8);
    }

    #[test]
    fn good_rejects_long_boundary() {
        // seven turns around a small circle near 3
        let v = verifier();
        let mut coeffs = vec![Complex64::new(0.0, 0.0); 8];
        coeffs[0] = Complex64::new(3.0, 0.0);
        coeffs[7] = Complex64::new(0.9, 0.0);
        let f = AnalyticMap::polynomial("3+0.9z^7", coeffs);
        let l = map_boundary_length(&f, 1e-9).unwrap().value;
        assert!(l > TAU);
        assert!(matches!(v.check_good(&f), Err(VerifyError::PreconditionFail { .. })));
    }

    #[test]
    fn good2_on_power_lenses() {
        let v = verifier();
        for name in ["sqrt_lens", "power_lens"] {
            let r = v.check_good2(&builtin_map(name).unwrap()).unwrap();
            assert_eq!(r.len(), 2);
            for rep in &r {
                assert_eq!(rep.verdict(), Verdict::Holds, "{name} {}", rep.bound_name);
            }
        }
        assert!(matches!(
            v.check_good2(&builtin_map("shift3").unwrap()),
            Err(VerifyError::PreconditionFail { .. })
        ));
    }

    #[test]
    fn good2_equality_on_lens_data() {
        let v = verifier();
        for i in 0..=20 {
            let tau = i as f64 / 20.0;
            let a = 2.0 * zeta1(tau).unwrap();
            let l = 2.0 * zeta0(tau).unwrap();
            assert!(((4.0 * PI + a) - h(tau).unwrap() * l).abs() < 1e-10);
            let r = v.check_good2_ledger("lens", a, l).unwrap();
            assert!(r[1].slack.abs() < 1e-8, "tau = {tau}");
            assert!(r[0].holds);
        }
        let t0 = find_h0(1e-12).unwrap().tau0;
        let r = v
            .check_good2_ledger("optimal lens", 2.0 * zeta1(t0).unwrap(), 2.0 * zeta0(t0).unwrap())
            .unwrap();
        assert!(r[0].slack.abs() < 1e-8 && r[1].slack.abs() < 1e-8);
    }

    #[test]
    fn nofat_ledgers() {
        let h0 = find_h0(1e-12).unwrap().h0;
        let cap = ComponentLedger {
            label: "cap".into(),
            area: 4.0 * PI / 5.0,
            boundary_length: 8.0 * PI / 5.0,
            ray_length: 0.0,
            error: 0.0,
        };
        let r = check_nofat_ledger(std::slice::from_ref(&cap), false, h0);
        assert!(r.iter().all(|x| x.holds));
        let bad = ComponentLedger {
            ray_length: 6.0,
            ..cap
        };
        let r = check_nofat_ledger(&[bad], false, h0);
        assert!(!r[0].holds);
    }

    #[test]
    fn map_spec_parsing() {
        let s = MapSpec::from_json(r#"{"kind":"polynomial","coeffs":[3, {"re":1,"im":0}]}"#).unwrap();
        let f = s.build().unwrap();
        assert!((f.eval(Complex64::new(0.5, 0.0)).finite().unwrap() - 3.5).norm() < 1e-15);
        let s = MapSpec::from_json(r#"{"kind":"builtin","name":"shift3"}"#).unwrap();
        assert_eq!(s.build().unwrap().label(), "shift3");
        assert!(MapSpec::from_json(r#"{"kind":"builtin","name":"nosuch"}"#).unwrap().build().is_err());
        assert!(MapSpec::from_json(r#"{"kind":"numeric"}"#).is_err());
    }

    #[test]
    fn report_json_fields() {
        let v = verifier();
        let r = v.check_main(&builtin_map("shift3").unwrap()).unwrap();
        let j: serde_json::Value = serde_json::to_value(&r).unwrap();
        for key in ["map_label", "A", "L", "bound_name", "bound_value", "slack", "holds", "tolerances"] {
            assert!(j.get(key).is_some(), "{key}");
        }
        let back: InequalityReport = serde_json::from_value(j).unwrap();
        assert_eq!(back, r);
    }
}
