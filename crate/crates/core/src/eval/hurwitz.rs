//! Hurwitz zeta `zeta(s, a)` by classic Euler-Maclaurin summation.

use num_complex::Complex64;

use crate::bernoulli;
use crate::error::{Error, Result};
use crate::types::{EvalResult, Method, PrecisionPolicy};

/// Euler-Maclaurin sum of `sum_{m>=0} (m + a)^{-s}` for `sigma > -2`.
pub(crate) fn hurwitz_em(s: Complex64, a: f64, policy: &PrecisionPolicy) -> Result<EvalResult> {
    let tabs = s.im.abs();
    let mut n = policy
        .em_min_terms
        .max((policy.em_terms_coeff * (tabs + 10.0)).ceil() as usize)
        .max((0.6 * s.norm() + 10.0).ceil() as usize);
    let mut last = String::new();
    for escalation in 0..=policy.max_escalations {
        match sum_with(s, a, n, policy) {
            Ok((value, err)) => {
                return Ok(EvalResult { value, err_estimate: err, method: Method::EulerMaclaurin, escalations: escalation })
            }
            Err(msg) => last = msg,
        }
        n *= 2;
    }
    Err(Error::PrecisionLoss(last))
}

fn sum_with(s: Complex64, a: f64, n: usize, policy: &PrecisionPolicy) -> std::result::Result<(Complex64, f64), String> {
    let mut sum = Complex64::new(0.0, 0.0);
    let mut abs = 0.0;
    let mut phase_var = 0.0;
    for m in 0..n {
        let l = (m as f64 + a).ln();
        let term = (-s * l).exp();
        sum += term;
        abs += term.norm();
        let e = term.norm() * (1.0 + (s * l).norm());
        phase_var += e * e;
    }
    let rounding = f64::EPSILON * (2.0 * abs + 2.0 * phase_var.sqrt());
    let u = n as f64 + a;
    let base = (-s * u.ln()).exp();
    sum += base * u / (s - 1.0) + 0.5 * base;
    // + sum_k B_2k/(2k)! (s)_{2k-1} u^{-s-2k+1}
    let mut poch = s;
    let mut upow = base / u;
    let tol = 0.05 * policy.target_tol;
    let mut prev = f64::INFINITY;
    for k in 1..policy.em_order {
        let corr = bernoulli::scaled(k) * poch * upow;
        let mag = corr.norm();
        if mag <= tol * sum.norm().max(1.0) {
            return Ok((sum, mag + rounding));
        }
        if mag > prev && k > 2 {
            break;
        }
        prev = mag;
        sum += corr;
        let j = (2 * k - 1) as f64;
        poch *= (s + j) * (s + j + 1.0);
        upow /= u * u;
    }
    Err(format!("Hurwitz corrections did not decay with N = {n}"))
}
