use std::f64::consts::{PI, TAU};

use lerchz_core::{
    dlambda_derivative, ds_derivative, fe_grid, fe_residual, hurwitz_zeta, lerch, lerch_direct, lerch_em, lerch_fe, lerch_rational, Error,
    Method, Params, PrecisionPolicy, SPoint,
};
use num_complex::Complex64;
use proptest::prelude::*;

// (lambda = alpha, sigma, t, Re L, Im L), 30-digit Hurwitz-decomposition values from mpmath.
const REFERENCE: [(f64, f64, f64, f64, f64); 13] = [
    (1.0, -2.0, 50.0, -139.8009877308315, -74.950686175596319),
    (1.0, -1.999, 50.0, -139.50781657562575, -74.774186439188785),
    (0.85, -2.5, 120.0, 11678.025596197597, 5614.3714705836918),
    (0.85, 0.5, 150.0, 0.11706294387956238, -1.1725469261348957),
    (0.7, -1.5, 80.0, -323.38369116091328, 169.90462544073574),
    (0.3, 0.25, 33.5, 2.2038093295604609, 1.1184990154178282),
    (0.5, -2.0, 50.0, 659.10560788648198, -1278.6932664229427),
    (0.5, 0.5, 100.0, 0.61122445523705761, -0.62055031555422253),
    (0.85, 1.2, -40.0, 0.72239483249836195, -0.24711226900727878),
    (0.3, -3.0, 20.0, -61.838905410014104, -7215.5532945972689),
    (0.7, 2.5, 5.0, -0.60201236314449092, 2.6019153461332235),
    (1.0, 0.0, 14.134725, -0.47917335033210412, -0.098922650108818113),
    (0.75, -0.7, 199.3, -120.0893676735076, 2.2960832348406661),
];

const ZETA_2: f64 = 1.644_934_066_848_226_4;
const ZETA_PRIME_2: f64 = -0.937_548_254_315_843_8;
const FIRST_ZERO: f64 = 14.134_725_141_734_693;

fn policy() -> PrecisionPolicy {
    PrecisionPolicy::default()
}

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn rel(a: Complex64, b: Complex64) -> f64 {
    (a - b).norm() / b.norm().max(1.0)
}

/// `sum_{n>=1} n^-s` directly, with the integral tail and the first correction.
fn zeta_direct(s: f64) -> f64 {
    let n = 100_000;
    let mut sum = 0.0;
    for k in (1..n).rev() {
        sum += (k as f64).powf(-s);
    }
    let u = n as f64;
    sum + u.powf(1.0 - s) / (s - 1.0) + 0.5 * u.powf(-s) + s * u.powf(-s - 1.0) / 12.0
}

/// Catalan's constant from the alternating series, paired terms summed from the small end.
fn catalan() -> f64 {
    let mut sum = 0.0;
    for k in (0..2_000_000u64).rev() {
        let a = (4 * k + 1) as f64;
        let b = (4 * k + 3) as f64;
        sum += 1.0 / (a * a) - 1.0 / (b * b);
    }
    sum
}

#[test]
fn independent_oracles_agree_with_known_constants() {
    assert!((zeta_direct(2.0) - PI * PI / 6.0).abs() < 1e-14);
    assert!((catalan() - 0.915_965_594_177_219).abs() < 1e-13);
}

#[test]
fn reference_table_through_the_dispatcher() {
    let p = policy();
    for (l, sigma, t, re, im) in REFERENCE {
        let r = lerch(Params::equal(l).unwrap(), SPoint::new(sigma, t), &p).unwrap();
        let expect = c(re, im);
        assert!(rel(r.value, expect) < 1e-10, "lambda={l} s={sigma}+{t}i: {} vs {expect} ({:?})", r.value, r.method);
        assert!((r.value - expect).norm() <= r.err_estimate + 1e-12 * expect.norm().max(1.0), "estimate too small");
    }
}

#[test]
fn reference_table_through_euler_maclaurin() {
    let p = policy();
    for (l, sigma, t, re, im) in REFERENCE {
        let r = lerch_em(Params::equal(l).unwrap(), SPoint::new(sigma, t), &p).unwrap();
        assert_eq!(r.method, Method::EulerMaclaurin);
        assert!(rel(r.value, c(re, im)) < 1e-10, "lambda={l} s={sigma}+{t}i: {}", r.value);
    }
}

#[test]
fn hurwitz_values() {
    let p = policy();
    let z2 = hurwitz_zeta(SPoint::new(2.0, 0.0), 1.0, &p).unwrap();
    assert!((z2.value.re - zeta_direct(2.0)).abs() < 1e-12);
    // zeta(2, 1/2) = 3 zeta(2)
    let h = hurwitz_zeta(SPoint::new(2.0, 0.0), 0.5, &p).unwrap();
    assert!((h.value.re - PI * PI / 2.0).abs() < 1e-12);
    let at_zero = hurwitz_zeta(SPoint::new(0.5, FIRST_ZERO), 1.0, &p).unwrap();
    assert!(at_zero.value.norm() < 1e-10);
    let (_, sigma, t, re, im) = REFERENCE[1];
    let r = hurwitz_zeta(SPoint::new(sigma, t), 1.0, &p).unwrap();
    assert!(rel(r.value, c(re, im)) < 1e-10);
    let r = hurwitz_zeta(SPoint::new(-2.5, 20.0), 1.0, &p).unwrap();
    assert_eq!(r.method, Method::FunctionalEquation);
    let l = lerch_em(Params::equal(1.0).unwrap(), SPoint::new(-2.5, 20.0), &p).unwrap();
    assert!(rel(r.value, l.value) < 1e-9);
    assert_eq!(hurwitz_zeta(SPoint::new(1.0, 0.0), 1.0, &p), Err(Error::PoleAtOne));
    assert!(matches!(hurwitz_zeta(SPoint::new(2.0, 0.0), 0.0, &p), Err(Error::InvalidParams(_))));
}

#[test]
fn direct_series_values() {
    let p = policy();
    let r = lerch_direct(Params::equal(1.0).unwrap(), SPoint::new(2.0, 0.0), &p).unwrap();
    assert_eq!(r.method, Method::DirectSeries);
    assert!((r.value.re - ZETA_2).abs() < 1e-10);
    // L(1/2, 1/2, 2) = 4 L(2, chi_4) = 4 G
    let r = lerch_direct(Params::equal(0.5).unwrap(), SPoint::new(2.0, 0.0), &p).unwrap();
    assert!((r.value - 4.0 * catalan()).norm() < 1e-10);
    // L(1, 1/2, s) = (2^s - 1) zeta(s)
    let s = SPoint::new(2.0, 3.0);
    let r = lerch_direct(Params::new(1.0, 0.5).unwrap(), s, &p).unwrap();
    let z = hurwitz_zeta(s, 1.0, &p).unwrap().value;
    let expect = ((s.z() * 2f64.ln()).exp() - 1.0) * z;
    assert!((r.value - expect).norm() < 1e-10);
    assert!(matches!(lerch_direct(Params::equal(1.0).unwrap(), SPoint::new(1.2, 0.0), &p), Err(Error::DomainError(_))));
}

#[test]
fn rational_decomposition() {
    let p = policy();
    let r = lerch_rational(1, 1, SPoint::new(2.0, 0.0), &p).unwrap();
    assert!((r.value.re - ZETA_2).abs() < 1e-12);
    let r = lerch_rational(1, 2, SPoint::new(2.0, 0.0), &p).unwrap();
    assert_eq!(r.method, Method::RationalHurwitz);
    assert!((r.value - 4.0 * catalan()).norm() < 1e-11);
    // gcd reduction: 2/4 is 1/2
    let r2 = lerch_rational(2, 4, SPoint::new(2.0, 0.0), &p).unwrap();
    assert_eq!(r.value, r2.value);
    let s = SPoint::new(0.5, 150.0);
    let a = lerch_rational(3, 4, s, &p).unwrap();
    let b = lerch_em(Params::equal(0.75).unwrap(), s, &p).unwrap();
    assert!((a.value - b.value).norm() < 1e-8);
    let a = lerch_rational(17, 20, s, &p).unwrap();
    let (_, _, _, re, im) = REFERENCE[3];
    assert!(rel(a.value, c(re, im)) < 1e-9);
    assert!(lerch_rational(3, 2, s, &p).is_err());
    assert!(lerch_rational(0, 2, s, &p).is_err());
}

#[test]
fn euler_maclaurin_overlaps_direct_series() {
    let p = PrecisionPolicy { target_tol: 1e-13, ..policy() };
    let one = Params::equal(1.0).unwrap();
    let a = lerch_em(one, SPoint::new(3.0, 0.0), &p).unwrap();
    let b = lerch_direct(one, SPoint::new(3.0, 0.0), &p).unwrap();
    assert!((a.value - b.value).norm() < 1e-12);
    for (l, s) in [(0.3, SPoint::new(3.0, 7.0)), (0.5, SPoint::new(2.5, -30.0)), (0.9, SPoint::new(3.5, 100.0))] {
        let params = Params::equal(l).unwrap();
        let a = lerch_em(params, s, &p).unwrap();
        let b = lerch_direct(params, s, &p).unwrap();
        assert!((a.value - b.value).norm() <= a.err_estimate + b.err_estimate + 1e-14, "lambda={l}");
    }
}

#[test]
fn reflection_formula() {
    let p = policy();
    let one = Params::equal(1.0).unwrap();
    // zeta(-2) = 0
    let r = lerch_fe(one, SPoint::new(3.0, 0.0), &p).unwrap();
    assert_eq!(r.method, Method::FunctionalEquation);
    assert!(r.value.norm() < 1e-12);
    let r = lerch(one, SPoint::new(-2.0, 0.0), &p).unwrap();
    assert!(r.value.norm() < 1e-12);
    // 1 - s = -2 + 50i against the rational decomposition
    let half = Params::equal(0.5).unwrap();
    let fe = lerch_fe(half, SPoint::new(3.0, -50.0), &p).unwrap();
    let rat = lerch_rational(1, 2, SPoint::new(-2.0, 50.0), &p).unwrap();
    assert!(rel(fe.value, rat.value) < 1e-8);
    // 1 - s = -1.5 + 80i against Euler-Maclaurin
    let l7 = Params::equal(0.7).unwrap();
    let fe = lerch_fe(l7, SPoint::new(2.5, -80.0), &p).unwrap();
    let em = lerch_em(l7, SPoint::new(-1.5, 80.0), &p).unwrap();
    assert!(rel(fe.value, em.value) < 1e-8);
    // unequal parameters
    let q = Params::new(0.3, 0.8).unwrap();
    let fe = lerch_fe(q, SPoint::new(2.0, -60.0), &p).unwrap();
    let em = lerch_em(q, SPoint::new(-1.0, 60.0), &p).unwrap();
    assert!(rel(fe.value, em.value) < 1e-8);
    assert!(matches!(lerch_fe(l7, SPoint::new(1.0, 3.0), &p), Err(Error::DomainError(_))));
}

#[test]
fn reflection_guards_exponent_overflow() {
    let p = policy();
    let r = lerch_fe(Params::equal(0.7).unwrap(), SPoint::new(300.0, 10.0), &p);
    assert!(matches!(r, Err(Error::OverflowGuard(_))), "{r:?}");
}

#[test]
fn dispatcher_routes() {
    let p = policy();
    let l = Params::equal(0.85).unwrap();
    assert_eq!(lerch(l, SPoint::new(4.0, 10.0), &p).unwrap().method, Method::DirectSeries);
    // direct summation is only chosen when it is cheaper than Euler-Maclaurin
    assert_eq!(lerch(l, SPoint::new(1.6, 10.0), &p).unwrap().method, Method::EulerMaclaurin);
    assert_eq!(lerch(l, SPoint::new(0.5, 10.0), &p).unwrap().method, Method::EulerMaclaurin);
    assert_eq!(lerch(l, SPoint::new(-2.5, 120.0), &p).unwrap().method, Method::FunctionalEquation);
    assert_eq!(lerch(Params::equal(1.0).unwrap(), SPoint::new(1.0, 0.0), &p), Err(Error::PoleAtOne));
    // no pole away from lambda = 1
    let r = lerch(Params::new(0.5, 0.3).unwrap(), SPoint::new(1.0, 0.0), &p).unwrap();
    assert!(r.value.re.is_finite());
}

#[test]
fn s_derivatives() {
    let p = policy();
    let one = Params::equal(1.0).unwrap();
    let d = ds_derivative(one, SPoint::new(2.0, 0.0), 1, &p).unwrap();
    assert!((d.value.re - ZETA_PRIME_2).abs() < 5e-11, "{}", d.value);
    // zeta''(2) from the differentiated series
    let n = 200_000u64;
    let mut second = 0.0;
    for k in (2..n).rev() {
        let x = k as f64;
        second += x.ln().powi(2) / (x * x);
    }
    let (x, l) = (n as f64, (n as f64).ln());
    second += (l * l + 2.0 * l + 2.0) / x + 0.5 * l * l / (x * x);
    let d2 = ds_derivative(one, SPoint::new(2.0, 0.0), 2, &p).unwrap();
    assert!((d2.value.re - second).abs() < 1e-8, "{} vs {second}", d2.value);
    // a zero of zeta' near 0.86 + 158.28i
    let q = SPoint::new(0.863_404_697_829_980_4, 158.282_522_106_715_3);
    assert!(ds_derivative(one, q, 1, &p).unwrap().value.norm() < 1e-9);
    assert!(matches!(ds_derivative(one, q, 3, &p), Err(Error::InvalidParams(_))));
    assert_eq!(ds_derivative(one, SPoint::new(1.01, 0.0), 1, &p).unwrap_err(), Error::PoleAtOne);
}

#[test]
fn s_derivative_matches_central_difference() {
    let p = policy();
    let h = 1e-5;
    for (l, s) in [(0.85, c(0.5, 150.0)), (0.3, c(-1.0, 40.0)), (1.0, c(0.7, 90.0)), (0.6, c(-3.0, 25.0))] {
        let params = Params::equal(l).unwrap();
        let f = |z: Complex64| lerch(params, z.into(), &p).unwrap().value;
        let fd = (f(s + h) - f(s - h)) / (2.0 * h);
        let d = ds_derivative(params, s.into(), 1, &p).unwrap().value;
        assert!((fd - d).norm() < 1e-6 * d.norm().max(1.0), "lambda={l}: {d} vs {fd}");
    }
}

#[test]
fn lambda_derivative_against_termwise_series() {
    // d/dlambda of sum e^{2 pi i lambda m} (m + lambda)^{-s} at sigma = 3
    let p = policy();
    for (l, s) in [(0.75, c(3.0, 0.0)), (0.4, c(3.0, 5.0)), (0.999_999, c(3.5, -2.0))] {
        let mut oracle = Complex64::new(0.0, 0.0);
        for m in (0..400_000u64).rev() {
            let x = m as f64;
            let term = Complex64::from_polar(1.0, TAU * (l * x).fract()) * (-s * (x + l).ln()).exp();
            oracle += term * (c(0.0, TAU * x) - s / (x + l));
        }
        let d = dlambda_derivative(Params::equal(l).unwrap(), s.into(), false, &p).unwrap();
        assert!((d.value - oracle).norm() < 1e-7, "lambda={l}: {} vs {oracle}", d.value);
    }
}

#[test]
fn lambda_derivative_is_stable_under_step_halving() {
    let p = policy();
    let fine = PrecisionPolicy { lambda_fd_step: 5e-7, ..policy() };
    for (l, s, mixed) in [(0.5, c(2.0, 0.0), false), (0.85, c(0.5, 150.0), false), (0.85, c(0.5, 150.0), true)] {
        let params = Params::equal(l).unwrap();
        let a = dlambda_derivative(params, s.into(), mixed, &p).unwrap().value;
        let b = dlambda_derivative(params, s.into(), mixed, &fine).unwrap().value;
        assert!((a - b).norm() < 1e-7 * a.norm().max(1.0), "{a} vs {b}");
    }
    // mixed derivative under node doubling
    let more = PrecisionPolicy { cauchy_nodes: 64, ..policy() };
    let params = Params::equal(0.85).unwrap();
    let a = dlambda_derivative(params, SPoint::new(0.5, 150.0), true, &p).unwrap().value;
    let b = dlambda_derivative(params, SPoint::new(0.5, 150.0), true, &more).unwrap().value;
    assert!((a - b).norm() < 1e-7 * a.norm());
}

#[test]
fn lambda_derivative_edges() {
    let p = policy();
    // one-sided at lambda = 1 agrees with the central value just inside
    let s = SPoint::new(0.5, 30.0);
    let at_one = dlambda_derivative(Params::equal(1.0).unwrap(), s, false, &p).unwrap().value;
    let inside = dlambda_derivative(Params::equal(1.0 - 3e-6).unwrap(), s, false, &p).unwrap().value;
    assert!((at_one - inside).norm() < 1e-2 * at_one.norm(), "{at_one} vs {inside}");
    let tiny = PrecisionPolicy { lambda_fd_step: 0.3, ..policy() };
    assert!(matches!(dlambda_derivative(Params::equal(0.5).unwrap(), s, false, &tiny), Err(Error::EdgeOfDomain(_))));
    assert!(matches!(dlambda_derivative(Params::new(0.5, 0.4).unwrap(), s, false, &p), Err(Error::InvalidParams(_))));
}

#[test]
fn identities_on_a_grid() {
    let p = policy();
    let one = Params::equal(1.0).unwrap();
    let half_shift = Params::new(1.0, 0.5).unwrap();
    for i in 0..7 {
        for j in 0..6 {
            let s = SPoint::new(-3.0 + i as f64, 3.0 + 39.0 * j as f64);
            let z = hurwitz_zeta(s, 1.0, &p).unwrap();
            let a = lerch(one, s, &p).unwrap();
            assert!(rel(a.value, z.value) < 1e-9, "{s}");
            let b = lerch(half_shift, s, &p).unwrap();
            let expect = ((s.z() * 2f64.ln()).exp() - 1.0) * z.value;
            assert!(rel(b.value, expect) < 1e-9, "{s}");
        }
    }
}

#[test]
fn no_zeros_right_of_one_plus_alpha() {
    let p = policy();
    for l in [0.2, 0.5, 0.85, 1.0] {
        for k in 0..20 {
            let s = SPoint::new(1.0 + l + 0.1 + 0.2 * (k % 5) as f64, 10.0 * k as f64);
            assert!(lerch(Params::equal(l).unwrap(), s, &p).unwrap().value.norm() > 1e-3);
        }
    }
}

#[test]
fn policy_validation() {
    let p = PrecisionPolicy { target_tol: 0.0, ..policy() };
    assert!(matches!(lerch(Params::equal(0.5).unwrap(), SPoint::new(0.5, 1.0), &p), Err(Error::InvalidParams(_))));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(400))]

    #[test]
    fn conjugation_symmetry(l in 0.01f64..0.99, a in 0.05f64..1.0, sigma in -3.5f64..3.5, t in -200.0f64..200.0) {
        let p = policy();
        let s = SPoint::new(sigma, t);
        let lhs = lerch(Params::new(l, a).unwrap(), SPoint::new(sigma, -t), &p).unwrap();
        let rhs = lerch(Params::new(1.0 - l, a).unwrap(), s, &p).unwrap();
        let d = (lhs.value.conj() - rhs.value).norm();
        prop_assert!(d <= lhs.err_estimate + rhs.err_estimate + 1e-13 * rhs.value.norm().max(1.0),
            "s={s} lambda={l} alpha={a}: diff {d:e}, estimates {:e} {:e}", lhs.err_estimate, rhs.err_estimate);
    }
}

#[test]
fn reflection_residual_on_the_default_grid() {
    let p = policy();
    let grid = fe_grid();
    assert_eq!(grid.len(), 100);
    for l in [0.3, 0.7] {
        let params = Params::equal(l).unwrap();
        let worst = grid.iter().map(|&s| fe_residual(params, s, &p).unwrap()).fold(0.0, f64::max);
        assert!(worst < 1e-7, "lambda = {l}: {worst:e}");
    }
}
