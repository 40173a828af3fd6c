//! Values of `L(lambda, alpha, s)`, `zeta(s, a)` and their derivatives.

mod derivative;
mod hurwitz;
pub(crate) mod kernel;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::types::{EvalResult, Method, Params, PrecisionPolicy, SPoint};
use kernel::{Kernel, Route, Target};

pub(crate) use derivative::{dlambda, jet, jet_with};

fn checked_point(s: SPoint) -> Result<Complex64> {
    if s.is_finite() {
        Ok(s.z())
    } else {
        Err(Error::DomainError(format!("non-finite point {s}")))
    }
}

/// Rejects non-finite values and truncation remainders above the tolerance; the
/// reported estimate also carries the rounding estimate.
fn finish(
    value: Complex64,
    trunc: f64,
    rounding: f64,
    method: Method,
    escalations: u32,
    policy: &PrecisionPolicy,
) -> Result<EvalResult> {
    let err = trunc + rounding;
    if !(value.re.is_finite() && value.im.is_finite() && err.is_finite()) {
        return Err(Error::PrecisionLoss(format!("non-finite result from {method:?}")));
    }
    if trunc > policy.scaled_tol(value) {
        return Err(Error::PrecisionLoss(format!(
            "remainder {trunc:.3e} exceeds tolerance {:.3e} ({method:?})",
            policy.scaled_tol(value)
        )));
    }
    Ok(EvalResult { value, err_estimate: err, method, escalations })
}

fn run(target: Target, z: Complex64, policy: &PrecisionPolicy, route: Route) -> Result<EvalResult> {
    policy.validate()?;
    let kernel = Kernel::plan(target, z, 0.0, policy, route)?;
    kernel.check_overflow(z)?;
    let sample = kernel.eval(z);
    finish(sample.value, sample.trunc, sample.rounding, kernel.method(), kernel.escalations(), policy)
}

/// Hurwitz zeta `zeta(s, a) = sum_{m>=0} (m + a)^{-s}`.
pub fn hurwitz_zeta(s: SPoint, a: f64, policy: &PrecisionPolicy) -> Result<EvalResult> {
    policy.validate()?;
    let z = checked_point(s)?;
    if !(a > 0.0 && a <= 1.0) {
        return Err(Error::InvalidParams(format!("Hurwitz shift a = {a} is outside (0, 1]")));
    }
    if (z - 1.0).norm() <= 1e-12 {
        return Err(Error::PoleAtOne);
    }
    if z.re <= kernel::FE_SIGMA_MAX {
        return run(Target::new(1.0, a), z, policy, Route::FunctionalEquation);
    }
    hurwitz::hurwitz_em(z, a, policy)
}

/// The defining Dirichlet series, summed directly; needs `sigma >= 1 + series_margin`.
pub fn lerch_direct(params: Params, s: SPoint, policy: &PrecisionPolicy) -> Result<EvalResult> {
    let z = checked_point(s)?;
    run(Target::new(params.lambda(), params.alpha()), z, policy, Route::Direct)
}

/// Euler-Maclaurin continuation, valid for `sigma > -4`.
pub fn lerch_em(params: Params, s: SPoint, policy: &PrecisionPolicy) -> Result<EvalResult> {
    let z = checked_point(s)?;
    run(Target::new(params.lambda(), params.alpha()), z, policy, Route::EulerMaclaurin)
}

/// `L(lambda, alpha, 1 - s)` from the reflection formula; needs `Re s >= 1 + series_margin`.
pub fn lerch_fe(params: Params, s: SPoint, policy: &PrecisionPolicy) -> Result<EvalResult> {
    let z = checked_point(s)?;
    run(Target::new(params.lambda(), params.alpha()), 1.0 - z, policy, Route::FunctionalEquation)
}

/// Relative mismatch `|R - E| / |E|` of the reflection formula at `s`, where `R` is
/// `L(lambda, alpha, 1 - s)` built from values at `s` and `E` is Euler-Maclaurin at `1 - s`.
pub fn fe_residual(params: Params, s: SPoint, policy: &PrecisionPolicy) -> Result<f64> {
    let reflected = lerch_fe(params, s, policy)?.value;
    let direct = lerch_em(params, SPoint::new(1.0 - s.sigma, -s.t), policy)?.value;
    let scale = direct.norm();
    if scale == 0.0 {
        return Err(Error::DomainError(format!("L vanishes at 1 - s for s = {s}")));
    }
    Ok((reflected - direct).norm() / scale)
}

/// 100 points: `sigma` in {1.5, 2, 2.5, 3} times 25 heights evenly spread over `[10, 200]`.
pub fn fe_grid() -> Vec<SPoint> {
    let sigmas = [1.5, 2.0, 2.5, 3.0];
    (0..25)
        .flat_map(|k| {
            let t = 10.0 + 190.0 * k as f64 / 24.0;
            sigmas.iter().map(move |&sigma| SPoint::new(sigma, t))
        })
        .collect()
}

/// `L(b/d, b/d, s) = d^{-s} sum_{k<d} e^{2 pi i b k / d} zeta(s, (k d + b) / d^2)`.
pub fn lerch_rational(b: u64, d: u64, s: SPoint, policy: &PrecisionPolicy) -> Result<EvalResult> {
    policy.validate()?;
    let z = checked_point(s)?;
    if b == 0 || d == 0 || b > d {
        return Err(Error::InvalidParams(format!("need 1 <= b <= d, got b = {b}, d = {d}")));
    }
    let g = gcd(b, d);
    let (b, d) = (b / g, d / g);
    let df = d as f64;
    let mut value = Complex64::new(0.0, 0.0);
    let mut err = 0.0;
    let mut escalations = 0;
    let scale = (-z * df.ln()).exp();
    for k in 0..d {
        let a = (k * d + b) as f64 / (df * df);
        let h = hurwitz_zeta(s, a, policy)?;
        // phase reduced exactly in integers
        let phase = std::f64::consts::TAU * ((b * k) % d) as f64 / df;
        value += Complex64::from_polar(1.0, phase) * h.value;
        err += h.err_estimate;
        escalations = escalations.max(h.escalations);
    }
    let rounding = 4.0 * f64::EPSILON * value.norm() * scale.norm();
    finish(value * scale, err * scale.norm(), rounding, Method::RationalHurwitz, escalations, policy)
}

fn gcd(a: u64, b: u64) -> u64 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

/// `L(lambda, alpha, s)` anywhere except the pole at `s = 1` (when `lambda = 1`).
///
/// Routes to direct summation for `sigma >= 1.5` when that is cheap, the reflection
/// formula for `sigma <= -1`, and Euler-Maclaurin otherwise.
pub fn lerch(params: Params, s: SPoint, policy: &PrecisionPolicy) -> Result<EvalResult> {
    let z = checked_point(s)?;
    run(Target::new(params.lambda(), params.alpha()), z, policy, Route::Auto)
}

/// `d^order/ds^order L(lambda, alpha, s)` for `order` 1 or 2.
pub fn ds_derivative(params: Params, s: SPoint, order: usize, policy: &PrecisionPolicy) -> Result<EvalResult> {
    policy.validate()?;
    let z = checked_point(s)?;
    if !(1..=2).contains(&order) {
        return Err(Error::InvalidParams(format!("derivative order {order} is not 1 or 2")));
    }
    let r = policy.cauchy_radius;
    let target = Target::new(params.lambda(), params.alpha());
    let kernel = Kernel::plan(target, z, r, policy, Route::Auto)?;
    let coarse = derivative::cauchy(&kernel, z, r, policy.cauchy_nodes);
    let fine = derivative::cauchy(&kernel, z, r, 2 * policy.cauchy_nodes);
    let value = fine.d[order];
    let change = (value - coarse.d[order]).norm();
    let tol = policy.scaled_tol(value) * 10f64.powi(order as i32);
    if !(change <= tol) {
        return Err(Error::PrecisionLoss(format!("node doubling changed the derivative by {change:.3e}")));
    }
    let err = change + fine.err[order];
    if !(value.re.is_finite() && value.im.is_finite()) {
        return Err(Error::PrecisionLoss("non-finite derivative".into()));
    }
    Ok(EvalResult { value, err_estimate: err, method: kernel.method(), escalations: kernel.escalations() })
}

/// `d/dlambda L(lambda, lambda, s)`, or `d^2/(dlambda ds)` when `mixed`.
///
/// Uses a central stencil with steps `h, 2h` and one Richardson level; within `2h`
/// of `lambda = 1` a one-sided backward stencil is used instead.
pub fn dlambda_derivative(params: Params, s: SPoint, mixed: bool, policy: &PrecisionPolicy) -> Result<EvalResult> {
    policy.validate()?;
    let z = checked_point(s)?;
    if !params.is_equal() {
        return Err(Error::InvalidParams("lambda-derivative needs lambda = alpha".into()));
    }
    let jet = dlambda(params.lambda(), z, mixed, policy)?;
    let k = usize::from(mixed);
    let value = jet.d[k];
    if !(value.re.is_finite() && value.im.is_finite()) {
        return Err(Error::PrecisionLoss("non-finite lambda-derivative".into()));
    }
    let method = if z.re <= kernel::FE_SIGMA_MAX { Method::FunctionalEquation } else { Method::EulerMaclaurin };
    Ok(EvalResult { value, err_estimate: jet.err[k], method, escalations: 0 })
}
