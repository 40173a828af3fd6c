//! Acceptance run: one PASS/FAIL line per criterion.

use std::time::{Duration, Instant};

use lerchz_core::census::{self, line_scan, zero_counts};
use lerchz_core::io::Catalog;
use lerchz_core::trajectory::StepControl;
use lerchz_core::*;
use num_complex::Complex64;
use proptest::prelude::*;
use proptest::test_runner::{Config, RngAlgorithm, TestCaseError, TestRng, TestRunner};

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: String) -> Outcome {
    Outcome { pass, detail }
}

fn policy() -> PrecisionPolicy {
    PrecisionPolicy::default()
}

fn rel(a: Complex64, b: Complex64) -> f64 {
    (a - b).norm() / b.norm()
}

fn timed(limit: Option<Duration>, f: impl FnOnce() -> Result<Outcome>) -> (Outcome, Duration) {
    let start = Instant::now();
    let mut out = f().unwrap_or_else(|e| outcome(false, format!("error: {e}")));
    let took = start.elapsed();
    if let Some(limit) = limit {
        if took > limit {
            out.pass = false;
            out.detail.push_str(&format!("; runtime {:.1}s exceeds {:.0}s", took.as_secs_f64(), limit.as_secs_f64()));
        }
    }
    (out, took)
}

/// `L(1,1,s) = zeta(s)` and `L(1,1/2,s) = (2^s - 1) zeta(s)` on 200 points.
fn identities() -> Result<Outcome> {
    let p = policy();
    let one = Params::equal(1.0)?;
    let half_shift = Params::new(1.0, 0.5)?;
    let mut worst: f64 = 0.0;
    let mut points = 0;
    for i in 0..10 {
        for j in 0..20 {
            let s = SPoint::new(-3.0 + 6.0 * (i as f64 + 0.5) / 10.0, 1.0 + 199.0 * j as f64 / 19.0);
            let zeta = hurwitz_zeta(s, 1.0, &p)?.value;
            worst = worst.max(rel(lerch(one, s, &p)?.value, zeta));
            let expect = ((s.z() * 2f64.ln()).exp() - 1.0) * zeta;
            worst = worst.max(rel(lerch(half_shift, s, &p)?.value, expect));
            points += 1;
        }
    }
    Ok(outcome(worst < 1e-8, format!("{points} points, max relative deviation {worst:.2e} (< 1e-8)")))
}

fn functional_equation() -> Result<Outcome> {
    let p = policy();
    let mut parts = Vec::new();
    let mut worst: f64 = 0.0;
    for l in [0.3, 0.5, 0.7, 1.0] {
        let params = Params::equal(l)?;
        let mut m: f64 = 0.0;
        for s in fe_grid() {
            m = m.max(fe_residual(params, s, &p)?);
        }
        parts.push(format!("{l}: {m:.1e}"));
        worst = worst.max(m);
    }
    Ok(outcome(worst < 1e-7, format!("100 points per lambda, max residual {worst:.2e} (< 1e-7) [{}]", parts.join(", "))))
}

fn zeta_zero_count() -> Result<Outcome> {
    let zeros = locate_zeros(&RectBox::new(-2.0, 1.5, 0.0, 100.0)?, Kind::L, Params::equal(1.0)?, &policy())?;
    let off = zeros.iter().map(|z| (z.location.sigma - 0.5).abs()).fold(0.0, f64::max);
    let residual = zeros.iter().map(|z| z.residual).fold(0.0, f64::max);
    let simple = zeros.iter().all(|z| z.multiplicity == 1);
    Ok(outcome(
        zeros.len() == 29 && off < 1e-8 && residual < 1e-8 && simple,
        format!("{} zeros (29), max |beta - 1/2| {off:.1e}, max residual {residual:.1e}", zeros.len()),
    ))
}

fn counting_envelope() -> Result<Outcome> {
    let heights = [50.0, 100.0, 150.0, 200.0];
    let mut pass = true;
    let mut parts = Vec::new();
    for l in [1.0, 0.5] {
        let params = Params::equal(l)?;
        let counts = zero_counts(params, Kind::L, &heights, 1.0 + l, &policy())?;
        for (t, n) in counts {
            let main = census::expected_count(params, t, Kind::L)?;
            let ok = (n as f64 - main).abs() <= 2.0 * t.ln();
            pass &= ok;
            parts.push(format!("N({l},{t:.0})={n} vs {main:.1}"));
        }
    }
    Ok(outcome(pass, format!("|N - main| <= 2 log T: {}", parts.join(", "))))
}

fn figure_one() -> Result<Outcome> {
    let p = policy();
    let zeta = Params::equal(1.0)?;
    let seeds = [((1.27, 152.61), ("1.27", "152.61")), ((0.97, 156.63), ("0.97", "156.63")), ((0.86, 158.28), ("0.86", "158.28"))];
    let mut pass = true;
    let mut parts = Vec::new();
    for (k, ((sigma, t), (want_s, want_t))) in seeds.iter().enumerate() {
        let z = refine_zero(SPoint::new(*sigma, *t), Kind::Lprime, zeta, &p)?;
        let got = (format!("{:.2}", z.location.sigma), format!("{:.2}", z.location.t));
        let recovered = got.0 == *want_s && got.1 == *want_t;
        let traj = trace_Lprime_zero(1.0, z.location, 0.5, &StepControl::default(), &p).map_err(Error::from)?;
        let complete = traj.samples.last().map(|s| s.lambda) == Some(0.5);
        let certified = traj.samples.iter().all(|s| s.residual < 1e-8);
        let crossings = detect_line_crossings(&traj);
        let crossing_ok = k != 1 || !crossings.is_empty();
        pass &= recovered && complete && certified && crossing_ok;
        let at: Vec<String> = crossings.iter().map(|c| format!("{:.4}", c.0)).collect();
        parts.push(format!("{}+{}i: {} samples, crossings at [{}]", got.0, got.1, traj.samples.len(), at.join(", ")));
    }
    Ok(outcome(pass, parts.join("; ")))
}

fn theorem_one_check() -> Result<Outcome> {
    let r = census::census(Params::equal(0.85)?, 150.0, 15.0, census::DEFAULT_ETA, census::DEFAULT_SIGMA1, &policy())?;
    Ok(outcome(
        r.left_difference <= 5,
        format!(
            "left of sigma = 1/2: L {} vs L' {}, difference {} (<= 5); {} L zeros on the line, {} L' zeros in the box",
            r.count_L_left, r.count_Lprime_left, r.left_difference, r.near_line.len(), r.count_Lprime
        ),
    ))
}

fn line_bands() -> Result<Outcome> {
    let p = policy();
    let mut pass = true;
    let mut parts = Vec::new();
    for l in [1.0, 0.85, 0.5] {
        let params = Params::equal(l)?;
        let rows = line_scan(params, -2.0, 50.0, 200.0, 0.5, &[], &p)?;
        let dev = rows.iter().map(|r| (r.re_log_derivative.unwrap() - r.neg_log_t).abs()).fold(0.0, f64::max);
        pass &= dev <= 4.0;
        parts.push(format!("sigma=-2, lambda={l}: {} samples, max dev {dev:.2}", rows.len()));
    }
    for l in [1.0, 0.85, 0.5] {
        let params = Params::equal(l)?;
        let mut zeros = locate_zeros(&RectBox::new(0.3, 0.7, 49.0, 125.0)?, Kind::L, params, &p)?;
        zeros.extend(locate_zeros(&RectBox::new(0.3, 0.7, 125.0, 201.0)?, Kind::L, params, &p)?);
        let rows = line_scan(params, 0.5, 50.0, 200.0, 0.25, &zeros, &p)?;
        let kept: Vec<_> = rows.iter().filter_map(|r| r.re_log_derivative.map(|v| (v - r.half_neg_log_t).abs())).collect();
        let dev = kept.iter().copied().fold(0.0, f64::max);
        pass &= dev <= 4.0;
        parts.push(format!(
            "sigma=1/2, lambda={l}: {} samples ({} skipped near {} zeros), max dev {dev:.2}",
            kept.len(),
            rows.len() - kept.len(),
            zeros.len()
        ));
    }
    Ok(outcome(pass, parts.join("; ")))
}

fn pairing() -> Result<Outcome> {
    let r = census::census(Params::equal(0.85)?, 150.0, 15.0, census::DEFAULT_ETA, census::DEFAULT_SIGMA1, &policy())?;
    let off: Vec<_> = r.pairs.off_line().collect();
    let max_off = r.zeros_L.iter().map(|z| (z.location.sigma - 0.5).abs()).fold(0.0, f64::max);
    if off.is_empty() && r.pairs.unpaired.is_empty() {
        return Ok(outcome(
            true,
            format!(
                "vacuous: no off-line zeros; all {} zeros in [-2,3]x[150,165] have |beta - 1/2| <= {max_off:.1e} (< eta = {:.0e})",
                r.zeros_L.len(),
                r.eta
            ),
        ));
    }
    let ok = r.pairs.unpaired.is_empty() && off.iter().all(|p| p.mismatch < 0.05 && p.mismatch > 1e-9);
    let list: Vec<String> = off.iter().map(|p| format!("{} ~ {:.2e}", p.rho.location, p.mismatch)).collect();
    Ok(outcome(ok, format!("{} off-line zeros, {} unpaired: {}", off.len(), r.pairs.unpaired.len(), list.join(", "))))
}

fn runner(cases: u32) -> TestRunner {
    TestRunner::new_with_rng(
        Config { cases, failure_persistence: None, ..Config::default() },
        TestRng::deterministic_rng(RngAlgorithm::ChaCha),
    )
}

fn fail(e: impl std::fmt::Display) -> TestCaseError {
    TestCaseError::fail(e.to_string())
}

fn conjugation_cases(cases: u32) -> std::result::Result<(), String> {
    let p = policy();
    runner(cases)
        .run(&(0.01f64..0.99, 0.05f64..1.0, -3.5f64..3.5, -200.0f64..200.0), |(l, a, sigma, t)| {
            let lhs = lerch(Params::new(l, a).map_err(fail)?, SPoint::new(sigma, -t), &p).map_err(fail)?;
            let rhs = lerch(Params::new(1.0 - l, a).map_err(fail)?, SPoint::new(sigma, t), &p).map_err(fail)?;
            let d = (lhs.value.conj() - rhs.value).norm();
            prop_assert!(d <= lhs.err_estimate + rhs.err_estimate + 1e-13 * rhs.value.norm().max(1.0));
            Ok(())
        })
        .map_err(|e| e.to_string())
}

fn winding_cases(cases: u32) -> std::result::Result<(), String> {
    let p = policy();
    let lambdas = prop::sample::select(vec![1.0, 0.85, 0.7, 0.5, 0.3]);
    runner(cases)
        .run(&(lambdas, -2.0f64..1.5, 0.5f64..2.5, 1.0f64..100.0, 0.5f64..4.0), |(l, s0, w, t0, h)| {
            let params = Params::equal(l).map_err(fail)?;
            let mut rect = RectBox::new(s0, s0 + w, t0, t0 + h).map_err(fail)?;
            let mut result = winding(&rect, Kind::L, params, &p);
            for _ in 0..8 {
                match result {
                    Err(Error::ZeroOnBoundary { edge, .. }) => {
                        rect = rect.expand(edge);
                        result = winding(&rect, Kind::L, params, &p);
                    }
                    _ => break,
                }
            }
            let w = result.map_err(fail)?;
            if w.count > 0 {
                let centroid = SPoint::from(w.zero_sum / w.count as f64);
                prop_assert!(rect.contains(centroid), "centroid {} outside {}", centroid, rect);
            } else {
                prop_assert!(w.zero_sum.norm() < 1e-4);
            }
            Ok(())
        })
        .map_err(|e| e.to_string())
}

fn step_halving_cases(cases: u32) -> std::result::Result<(), String> {
    let p = policy();
    let starts = prop::sample::select(vec![
        (Kind::L, 0.5, 14.134725141734693790),
        (Kind::L, 0.5, 21.022039638771554993),
        (Kind::L, 0.5, 25.010857580145688763),
        (Kind::L, 0.5, 30.424876125859513210),
        (Kind::Lprime, 1.265986763134645387, 152.613294885666000215),
        (Kind::Lprime, 0.966951342073371225, 156.632667913413661809),
    ]);
    runner(cases)
        .run(&(starts, 0.002f64..0.01, 2e-4f64..1e-3), |((kind, sigma, t), span, h)| {
            let coarse = StepControl { h_init: h, ..StepControl::default() };
            let fine = StepControl { h_init: h / 2.0, ..StepControl::default() };
            let run = |ctrl: &StepControl| match kind {
                Kind::L => trace_L_zero(1.0, SPoint::new(sigma, t), 1.0 - span, ctrl, &p),
                Kind::Lprime => trace_Lprime_zero(1.0, SPoint::new(sigma, t), 1.0 - span, ctrl, &p),
            };
            let a = run(&coarse).map_err(fail)?;
            let b = run(&fine).map_err(fail)?;
            prop_assert_eq!(a.samples.len(), b.samples.len());
            for (x, y) in a.samples.iter().zip(&b.samples) {
                prop_assert!(x.position.dist(&y.position) < 1e-6);
            }
            Ok(())
        })
        .map_err(|e| e.to_string())
}

fn catalog_cases(cases: u32) -> std::result::Result<(), String> {
    let finite = || prop::num::f64::NORMAL | prop::num::f64::SUBNORMAL | prop::num::f64::ZERO;
    let record = (-1e3f64..1e3, 0.0f64..1e6, finite(), 1u32..4, 0usize..60).prop_map(|(sigma, t, r, m, iters)| ZeroRecord {
        location: SPoint::new(sigma, t),
        kind: if m % 2 == 0 { Kind::Lprime } else { Kind::L },
        residual: r.abs(),
        multiplicity: m,
        provenance: RectBox::new(sigma - 0.5, sigma + 0.5, t - 0.5, t + 0.5).unwrap(),
        refine_iters: iters,
    });
    let strategy = (prop::collection::vec(record, 0..10), 1e-3f64..1.0, 1e-3f64..1.0);
    runner(cases)
        .run(&strategy, |(records, l, a)| {
            let c = Catalog::new(
                Params::new(l, a).map_err(fail)?,
                RectBox::new(-2.0, 1.5, 0.0, 100.0).map_err(fail)?,
                Kind::L,
                PrecisionPolicy::default(),
                serde_json::json!({"command": "zeros"}),
                records,
            );
            let text = c.to_json().map_err(fail)?;
            let back = Catalog::from_json(&text).map_err(fail)?;
            prop_assert_eq!(&back, &c);
            prop_assert_eq!(back.to_json().map_err(fail)?, text);
            Ok(())
        })
        .map_err(|e| e.to_string())
}

fn property_suites() -> Result<Outcome> {
    let suites: [(&str, u32, fn(u32) -> std::result::Result<(), String>); 4] = [
        ("conjugation", 400, conjugation_cases),
        ("winding integrality", 250, winding_cases),
        ("step halving", 100, step_halving_cases),
        ("catalog round-trip", 250, catalog_cases),
    ];
    let mut total = 0;
    let mut failures = Vec::new();
    let mut parts = Vec::new();
    for (name, cases, suite) in suites {
        total += cases;
        match suite(cases) {
            Ok(()) => parts.push(format!("{name} {cases}")),
            Err(e) => {
                parts.push(format!("{name} FAILED"));
                failures.push(format!("{name}: {e}"));
            }
        }
    }
    let mut detail = format!("{total} cases ({}), {} failing suites", parts.join(", "), failures.len());
    for f in &failures {
        detail.push_str(&format!("; {f}"));
    }
    Ok(outcome(failures.is_empty(), detail))
}

fn main() {
    let minutes = |m: u64| Some(Duration::from_secs(60 * m));
    let criteria: [(&str, Option<Duration>, fn() -> Result<Outcome>); 9] = [
        ("identity suite", minutes(1), identities),
        ("functional-equation residual", minutes(2), functional_equation),
        ("29 zeta zeros up to height 100", minutes(5), zeta_zero_count),
        ("zero-counting envelope", None, counting_envelope),
        ("derivative zero trajectories", minutes(10), figure_one),
        ("left-of-line count difference", None, theorem_one_check),
        ("log-derivative bands", None, line_bands),
        ("mirror pairing of off-line zeros", None, pairing),
        ("property suites", None, property_suites),
    ];
    let mut failed = 0;
    for (k, (name, limit, run)) in criteria.iter().enumerate() {
        let (out, took) = timed(*limit, run);
        if !out.pass {
            failed += 1;
        }
        println!(
            "{} [{}] {name}: {} ({:.1}s)",
            if out.pass { "PASS" } else { "FAIL" },
            k + 1,
            out.detail,
            took.as_secs_f64()
        );
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
