//! Acceptance criteria, one PASS/FAIL line each. Exits nonzero if any fails.

use std::f64::consts::{FRAC_PI_2, PI, TAU};
use std::process::ExitCode;
use std::time::{Duration, Instant};

use arealength::extremal::{ratio, ExtremalFamily, LensOptimum};
use arealength::isoperimetric::{polygon_enclosing_cap, random_closed_polygon, superadditivity_gap};
use arealength::lens::{arc_param, arc_param_derivative, find_h0, h, zeta0, zeta1};
use arealength::quadrature::{curve_length, integrate, star_region_area, AnalyticMap};
use arealength::verify::{builtin_map, Verdict, Verifier, OMITTING_MAPS};
use arealength::Rotation;
use nalgebra::Vector3;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const H0_PUBLISHED: f64 = 4.034_159_790_51;

type Outcome = Result<String, String>;

fn ensure(ok: bool, msg: String) -> Outcome {
    if ok {
        Ok(msg)
    } else {
        Err(msg)
    }
}

fn within(elapsed: Duration, limit: Duration, res: Outcome) -> Outcome {
    let res = res?;
    ensure(
        elapsed < limit,
        format!("{res}; {:.2}s (limit {}s)", elapsed.as_secs_f64(), limit.as_secs()),
    )
}

fn sharp_constant() -> Outcome {
    let start = Instant::now();
    let r = find_h0(1e-10).map_err(|e| e.to_string())?;
    let err = (r.h0 - H0_PUBLISHED).abs();
    within(
        start.elapsed(),
        Duration::from_secs(1),
        ensure(err < 1e-8, format!("h0 = {:.14}, |h0 - 4.03415979051| = {err:.2e}", r.h0)),
    )
}

fn endpoint_values() -> Outcome {
    let e0 = (h(0.0).unwrap() - 4.0).abs();
    let e1 = (h(1.0).unwrap() - (3.0 * 2f64.sqrt() - 1.0)).abs();
    let d = 1e-6;
    let slope = (h(d).unwrap() - h(0.0).unwrap()) / d;
    let es = (slope - (4.0 / PI - 1.0)).abs();
    ensure(
        e0 < 1e-12 && e1 < 1e-12 && es < 1e-4,
        format!("|h(0)-4| = {e0:.1e}, |h(1)-(3√2-1)| = {e1:.1e}, slope error {es:.1e}"),
    )
}

fn arc_quadrature() -> Outcome {
    let start = Instant::now();
    let (mut worst_l, mut worst_a) = (0.0f64, 0.0f64);
    for k in 1..=50 {
        let tau = k as f64 / 50.0;
        let theta = tau.asin();
        let len = integrate(
            |t| {
                let a = arc_param(tau, t).unwrap();
                let da = arc_param_derivative(tau, t).unwrap();
                2.0 * da.norm() / (1.0 + a.norm_sqr())
            },
            0.0,
            theta,
            1e-10,
        )
        .map_err(|e| e.to_string())?
        .value;
        let area = star_region_area(|t| (theta - t).sin() / tau, 0.0, theta, 1e-10)
            .map_err(|e| e.to_string())?
            .value;
        worst_l = worst_l.max((len - zeta0(tau).unwrap()).abs());
        worst_a = worst_a.max((area - zeta1(tau).unwrap()).abs());
    }
    within(
        start.elapsed(),
        Duration::from_secs(30),
        ensure(
            worst_l < 1e-7 && worst_a < 1e-6,
            format!("max length error {worst_l:.1e}, max area error {worst_a:.1e} over 50 tau"),
        ),
    )
}

fn geometric_identity() -> Outcome {
    let mut worst = 0.0f64;
    for k in 0..=1000 {
        let tau = k as f64 / 1000.0;
        let lhs = h(tau).unwrap() * zeta0(tau).unwrap();
        worst = worst.max((lhs - (2.0 * PI + zeta1(tau).unwrap())).abs());
    }
    ensure(worst < 1e-10, format!("max |h*zeta0 - (2pi + zeta1)| = {worst:.1e}"))
}

fn extremal_convergence() -> Outcome {
    let opt = LensOptimum::compute().map_err(|e| e.to_string())?;
    let mut ms: Vec<u64> = (1..=10_000).collect();
    ms.extend([100_000, 1_000_000, 1_000_000_000]);
    let ratios: Vec<f64> = ms.iter().map(|&m| ratio(&opt, m)).collect();
    let increasing = ratios.windows(2).all(|w| w[0] < w[1]);
    let below = ratios.iter().all(|&r| r < opt.h0);
    let gap = ExtremalFamily::with_optimum(opt, 10_000).deficit();
    let mut worst = 0.0f64;
    for m in 1..=8 {
        let f = ExtremalFamily::with_optimum(opt, m);
        let l = curve_length(&f.boundary_curve(), 1e-10).map_err(|e| e.to_string())?.value;
        worst = worst.max((l - (PI + m as f64 * opt.l0)).abs());
    }
    ensure(
        increasing && below && gap < 5e-4 && worst < 1e-6,
        format!(
            "increasing {increasing}, below h0 {below}, h0 - ratio(1e4) = {gap:.2e}, \
             boundary length error {worst:.1e} for m <= 8"
        ),
    )
}

fn cap_equality() -> Outcome {
    // move the cap centre to i so the image stays 90 degrees away from 0, 1, inf
    let rot = Rotation::about_axis(Vector3::x(), FRAC_PI_2);
    let verifier = Verifier::new(1e-10).map_err(|e| e.to_string())?;
    let mut worst = 0.0f64;
    for k in 1..=9 {
        let r = k as f64 / 10.0;
        let f = AnalyticMap::polynomial(format!("{r}z"), vec![Complex64::new(0.0, 0.0), Complex64::new(r, 0.0)])
            .rotated(&rot);
        let reports = verifier.check_good(&f).map_err(|e| e.to_string())?;
        let cap = reports.iter().find(|r| r.bound_name == "cap").ok_or("no cap report")?;
        worst = worst.max(cap.slack.abs());
    }
    ensure(worst < 1e-7, format!("max |cap bound - A| = {worst:.1e} for r = 0.1..0.9"))
}

fn rado_suite() -> Outcome {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let mut min_margin = f64::INFINITY;
    let mut max_len = 0.0f64;
    for k in 0..1000u64 {
        let p = random_closed_polygon(&mut rng, TAU - 0.01);
        let cap = polygon_enclosing_cap(&p, k).map_err(|e| e.to_string())?;
        min_margin = min_margin.min(cap.margin);
        max_len = max_len.max(p.length());
    }
    within(
        start.elapsed(),
        Duration::from_secs(60),
        ensure(
            min_margin > 0.0 && max_len < TAU - 0.01,
            format!("1000 polygons, max length {max_len:.4}, min margin {min_margin:.2e}"),
        ),
    )
}

fn main_inequality() -> Outcome {
    let verifier = Verifier::new(1e-9).map_err(|e| e.to_string())?;
    let mut min_slack = f64::INFINITY;
    for name in OMITTING_MAPS {
        let f = builtin_map(name).map_err(|e| e.to_string())?;
        let r = verifier.check_main(&f).map_err(|e| format!("{name}: {e}"))?;
        if !(r.holds && r.slack > 0.0 && r.verdict() == Verdict::Holds) {
            return Err(format!("{name}: slack {:.3e}, verdict {:?}", r.slack, r.verdict()));
        }
        min_slack = min_slack.min(r.slack);
    }
    let opt = LensOptimum::compute().map_err(|e| e.to_string())?;
    let ledger = verifier
        .check_good2_ledger("optimal lens", opt.a0, opt.l0)
        .map_err(|e| e.to_string())?;
    let worst = ledger.iter().map(|r| r.slack.abs()).fold(0.0, f64::max);
    ensure(
        OMITTING_MAPS.len() >= 5 && worst < 1e-8,
        format!(
            "{} maps hold, min slack {min_slack:.3}; lens equality residual {worst:.1e}",
            OMITTING_MAPS.len()
        ),
    )
}

fn superadditivity() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(99);
    let mut worst = f64::INFINITY;
    for _ in 0..1000 {
        let n = rng.random_range(2..=12);
        let total = rng.random_range(0.0..TAU - 1e-6);
        let mut weights: Vec<f64> = (0..n).map(|_| rng.random::<f64>()).collect();
        let s: f64 = weights.iter().sum();
        weights.iter_mut().for_each(|w| *w *= total / s);
        worst = worst.min(superadditivity_gap(&weights).map_err(|e| e.to_string())?);
    }
    let singles = [0.0, 0.5, 3.0, 6.0, TAU - 1e-9]
        .iter()
        .all(|&l| superadditivity_gap(&[l]) == Ok(0.0));
    ensure(
        worst >= -1e-12 && singles,
        format!("min gap {worst:.2e} over 1000 splits, single entries exactly 0: {singles}"),
    )
}

fn main() -> ExitCode {
    let criteria: [(&str, fn() -> Outcome); 9] = [
        ("sharp constant", sharp_constant),
        ("endpoint values", endpoint_values),
        ("arc quadrature cross-check", arc_quadrature),
        ("geometric identity", geometric_identity),
        ("extremal convergence", extremal_convergence),
        ("cap equality", cap_equality),
        ("hemisphere property", rado_suite),
        ("main inequality", main_inequality),
        ("superadditivity", superadditivity),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        match check() {
            Ok(msg) => println!("PASS {} {name}: {msg}", i + 1),
            Err(msg) => {
                failed += 1;
                println!("FAIL {} {name}: {msg}", i + 1);
            }
        }
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
