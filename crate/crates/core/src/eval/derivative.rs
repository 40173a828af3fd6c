//! s-derivatives on Cauchy circles and lambda-derivatives by Richardson-extrapolated differences.

use std::f64::consts::TAU;

use num_complex::Complex64;

use super::kernel::{Kernel, Route, Target};
use crate::error::{Error, Result};
use crate::types::PrecisionPolicy;

/// `f, f', f''` at a point with an error bound for each.
#[derive(Debug, Clone, Copy)]
pub(crate) struct Jet {
    pub d: [Complex64; 3],
    pub err: [f64; 3],
}

/// Trapezoidal Cauchy integrals of one planned kernel on `|z - center| = radius`.
pub(crate) fn cauchy(kernel: &Kernel, center: Complex64, radius: f64, nodes: usize) -> Jet {
    let mut acc = [Complex64::new(0.0, 0.0); 3];
    let mut max_err = 0.0f64;
    for j in 0..nodes {
        let theta = TAU * j as f64 / nodes as f64;
        let w = Complex64::from_polar(1.0, theta);
        let sample = kernel.eval(center + radius * w);
        max_err = max_err.max(sample.err());
        let winv = w.conj();
        acc[0] += sample.value;
        acc[1] += sample.value * winv;
        acc[2] += sample.value * winv * winv;
    }
    let m = nodes as f64;
    let d = [acc[0] / m, acc[1] / (m * radius), 2.0 * acc[2] / (m * radius * radius)];
    let err = [max_err, max_err / radius, 2.0 * max_err / (radius * radius)];
    Jet { d, err }
}

/// Jet of `L(freq, shift, .)` at `s` using the policy's circle, shrunk near the pole.
pub(crate) fn jet(target: Target, s: Complex64, policy: &PrecisionPolicy) -> Result<Jet> {
    jet_with(target, s, policy, policy.cauchy_nodes)
}

/// As [`jet`] with an explicit number of circle nodes.
pub(crate) fn jet_with(target: Target, s: Complex64, policy: &PrecisionPolicy, nodes: usize) -> Result<Jet> {
    let mut r = policy.cauchy_radius;
    if target.has_pole() {
        let d = (s - 1.0).norm();
        if d <= 1e-12 {
            return Err(Error::PoleAtOne);
        }
        r = r.min(d / 3.0);
    }
    let kernel = Kernel::plan(target, s, r, policy, Route::Auto)?;
    let jet = cauchy(&kernel, s, r, nodes);
    if !jet.d.iter().all(|v| v.re.is_finite() && v.im.is_finite()) {
        return Err(Error::PrecisionLoss(format!("non-finite derivative at {s}")));
    }
    Ok(jet)
}

/// Finite-difference stencil in lambda for `L(lambda, lambda, s)`.
#[derive(Debug, Clone, Copy, PartialEq)]
enum Stencil {
    Central,
    Backward,
    Forward,
}

fn stencil(lambda: f64, h: f64) -> Result<Stencil> {
    if lambda - 2.0 * h > 0.0 && lambda + 2.0 * h <= 1.0 {
        Ok(Stencil::Central)
    } else if lambda - 4.0 * h > 0.0 && lambda <= 1.0 {
        Ok(Stencil::Backward)
    } else if lambda + 4.0 * h <= 1.0 && lambda > 0.0 {
        Ok(Stencil::Forward)
    } else {
        Err(Error::EdgeOfDomain(lambda))
    }
}

/// lambda-derivatives of `(f, f', f'')` where `f = L(lambda, lambda, .)`.
///
/// With `jets == false` only the first slot is filled (no Cauchy circle).
pub(crate) fn dlambda(lambda: f64, s: Complex64, jets: bool, policy: &PrecisionPolicy) -> Result<Jet> {
    let h = policy.lambda_fd_step;
    let kind = stencil(lambda, h)?;
    let r = policy.cauchy_radius;
    let radius = if jets { r } else { 0.0 };
    let base = Kernel::plan(Target::new(lambda, lambda), s, radius, policy, Route::Analytic)?;
    let at = |offset: f64| -> Result<Jet> {
        let l = lambda + offset * h;
        let kernel = base.retarget(Target::new(l, l))?;
        if jets {
            Ok(cauchy(&kernel, s, r, policy.cauchy_nodes))
        } else {
            let sample = kernel.eval(s);
            let zero = Complex64::new(0.0, 0.0);
            Ok(Jet { d: [sample.value, zero, zero], err: [sample.err(), 0.0, 0.0] })
        }
    };
    let (fine, coarse, noise) = match kind {
        Stencil::Central => {
            let (p1, m1, p2, m2) = (at(1.0)?, at(-1.0)?, at(2.0)?, at(-2.0)?);
            let fine = combine(&[(&p1, 1.0), (&m1, -1.0)], 2.0 * h);
            let coarse = combine(&[(&p2, 1.0), (&m2, -1.0)], 4.0 * h);
            (fine, coarse, noise(&[&p1, &m1, &p2, &m2], h))
        }
        Stencil::Backward | Stencil::Forward => {
            let sgn = if kind == Stencil::Backward { -1.0 } else { 1.0 };
            let (f0, f1, f2, f4) = (at(0.0)?, at(sgn)?, at(2.0 * sgn)?, at(4.0 * sgn)?);
            let fine = combine(&[(&f0, -3.0 * sgn), (&f1, 4.0 * sgn), (&f2, -sgn)], 2.0 * h);
            let coarse = combine(&[(&f0, -3.0 * sgn), (&f2, 4.0 * sgn), (&f4, -sgn)], 4.0 * h);
            (fine, coarse, noise(&[&f0, &f1, &f2, &f4], h))
        }
    };
    let mut out = Jet { d: [Complex64::new(0.0, 0.0); 3], err: [0.0; 3] };
    for k in 0..3 {
        out.d[k] = (4.0 * fine[k] - coarse[k]) / 3.0;
        out.err[k] = (out.d[k] - fine[k]).norm() + noise[k];
    }
    Ok(out)
}

fn combine(terms: &[(&Jet, f64)], denom: f64) -> [Complex64; 3] {
    let mut out = [Complex64::new(0.0, 0.0); 3];
    for (jet, w) in terms {
        for k in 0..3 {
            out[k] += *w * jet.d[k];
        }
    }
    out.map(|v| v / denom)
}

/// Rounding floor of a difference quotient: `eps * |f| / h`.
fn noise(jets: &[&Jet], h: f64) -> [f64; 3] {
    let mut out = [0.0; 3];
    for k in 0..3 {
        let mag = jets.iter().map(|j| j.d[k].norm()).fold(0.0, f64::max);
        out[k] = 8.0 * f64::EPSILON * mag.max(1.0) / h;
    }
    out
}
