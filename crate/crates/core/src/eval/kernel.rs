//! Evaluation kernels for `sum_{m>=0} e^{2 pi i freq m} (m + shift)^{-s}`.
//!
//! A kernel is planned once for a centre point (and a radius around it) and then
//! evaluated at many nearby points with the *same* term counts, so the values it
//! returns are samples of one analytic approximant. Cauchy-circle derivatives and
//! lambda finite differences rely on that.

use std::f64::consts::{PI, TAU};

use num_complex::Complex64;

use crate::bernoulli;
use crate::error::{Error, Result};
use crate::gamma::ln_gamma;
use crate::types::{Method, PrecisionPolicy};

const EPS: f64 = f64::EPSILON;
/// Largest direct-series length the `Auto` route accepts before preferring Euler-Maclaurin.
const DIRECT_AUTO_CAP: usize = 4096;
/// Hard cap on any partial-sum length.
const MAX_TERMS: usize = 1 << 22;
/// The automatic route reflects points with `sigma` at or below this.
pub(crate) const FE_SIGMA_MAX: f64 = -1.0;
/// Left edge of the Euler-Maclaurin window.
pub(crate) const EM_SIGMA_MIN: f64 = -4.0;

/// The function being evaluated: frequency `freq` and shift `shift > 0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) struct Target {
    pub freq: f64,
    pub shift: f64,
}

impl Target {
    pub fn new(freq: f64, shift: f64) -> Self {
        Self { freq, shift }
    }

    /// Frequency reduced to `[-1/2, 1/2]`: `freq` itself when `freq mod 1 <= 1/2`, else `freq - 1`.
    pub fn reduced(&self) -> f64 {
        let r = self.freq.rem_euclid(1.0);
        if r > 0.5 {
            r - 1.0
        } else {
            r
        }
    }

    pub fn has_pole(&self) -> bool {
        self.reduced() == 0.0
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum Route {
    Auto,
    /// `Auto` without direct summation, whose tail bound is not smooth in the frequency.
    Analytic,
    Direct,
    EulerMaclaurin,
    FunctionalEquation,
}

#[derive(Debug, Clone)]
pub(crate) enum Kernel {
    Direct(DirectKernel),
    Em(EmKernel),
    Fe(Box<FeKernel>),
}

/// One evaluation: value, truncation bound and rounding estimate.
#[derive(Debug, Clone, Copy)]
pub(crate) struct Sample {
    pub value: Complex64,
    pub trunc: f64,
    pub rounding: f64,
}

impl Sample {
    pub fn err(&self) -> f64 {
        self.trunc + self.rounding
    }
}

impl Kernel {
    pub fn plan(
        target: Target,
        center: Complex64,
        radius: f64,
        policy: &PrecisionPolicy,
        route: Route,
    ) -> Result<Kernel> {
        if !(center.re.is_finite() && center.im.is_finite()) {
            return Err(Error::DomainError(format!("non-finite point {center}")));
        }
        if !(target.shift > 0.0 && target.freq.is_finite()) {
            return Err(Error::InvalidParams(format!("bad target {target:?}")));
        }
        if target.has_pole() && (center - 1.0).norm() <= (1.5 * radius).max(1e-12) {
            return Err(Error::PoleAtOne);
        }
        let sigma = center.re;
        match route {
            Route::Direct => DirectKernel::plan(target, center, radius, policy, MAX_TERMS).map(Kernel::Direct),
            Route::EulerMaclaurin => EmKernel::plan(target, center, radius, policy).map(Kernel::Em),
            Route::FunctionalEquation => {
                FeKernel::plan(target, center, radius, policy, Route::Auto).map(|k| Kernel::Fe(Box::new(k)))
            }
            Route::Auto | Route::Analytic => {
                if sigma <= FE_SIGMA_MAX && target.shift <= 1.0 {
                    return FeKernel::plan(target, center, radius, policy, route).map(|k| Kernel::Fe(Box::new(k)));
                }
                if route == Route::Auto && sigma - radius >= 1.0 + policy.series_margin {
                    let n_em = em_base_terms(center, radius, policy);
                    let cap = DIRECT_AUTO_CAP.max(n_em);
                    if let Ok(k) = DirectKernel::plan(target, center, radius, policy, cap) {
                        return Ok(Kernel::Direct(k));
                    }
                }
                Self::plan(target, center, radius, policy, Route::EulerMaclaurin)
            }
        }
    }

    /// Same term counts, different target. Frequencies move continuously (no re-reduction).
    pub fn retarget(&self, target: Target) -> Result<Kernel> {
        Ok(match self {
            Kernel::Direct(k) => Kernel::Direct(k.retarget(target)),
            Kernel::Em(k) => Kernel::Em(k.retarget(target)),
            Kernel::Fe(k) => Kernel::Fe(Box::new(k.retarget(target)?)),
        })
    }

    pub fn eval(&self, s: Complex64) -> Sample {
        match self {
            Kernel::Direct(k) => k.eval(s),
            Kernel::Em(k) => k.eval(s),
            Kernel::Fe(k) => k.eval(s),
        }
    }

    pub fn method(&self) -> Method {
        match self {
            Kernel::Direct(_) => Method::DirectSeries,
            Kernel::Em(_) => Method::EulerMaclaurin,
            Kernel::Fe(_) => Method::FunctionalEquation,
        }
    }

    pub fn escalations(&self) -> u32 {
        match self {
            Kernel::Direct(_) => 0,
            Kernel::Em(k) => k.escalations,
            Kernel::Fe(k) => k.first.escalations().max(k.second.escalations()),
        }
    }
}

fn em_base_terms(center: Complex64, radius: f64, policy: &PrecisionPolicy) -> usize {
    let tabs = center.im.abs() + radius;
    policy.em_min_terms.max((policy.em_terms_coeff * (tabs + 10.0)).ceil() as usize)
}

/// Reduced frequency of `target` on the same unit branch as `mu`.
fn continue_branch(mu: f64, target: Target) -> f64 {
    let r = target.reduced();
    r - (r - mu).round()
}

fn ln_table(shift: f64, n: usize) -> Vec<f64> {
    (0..n).map(|m| (m as f64 + shift).ln()).collect()
}

/// `sum_{m<n} e^{2 pi i mu m} (m + shift)^{-s}` and its rounding-error estimate.
///
/// Each term carries a phase error of about `eps |t ln(m + shift)|`; those errors are
/// added in quadrature, the summation error linearly.
fn partial_sum(mu: f64, logs: &[f64], s: Complex64) -> (Complex64, f64) {
    let (sigma, t) = (s.re, s.im);
    let mut re = 0.0;
    let mut im = 0.0;
    let mut abs = 0.0;
    let mut phase_var = 0.0;
    for (m, &l) in logs.iter().enumerate() {
        let mag = (-sigma * l).exp();
        let tl = t * l;
        let phase = TAU * (mu * m as f64).fract() - tl;
        let (sn, cs) = phase.sin_cos();
        re += mag * cs;
        im += mag * sn;
        abs += mag;
        let e = mag * (1.0 + tl.abs() + sigma.abs() * l);
        phase_var += e * e;
    }
    (Complex64::new(re, im), EPS * (2.0 * abs + 2.0 * phase_var.sqrt()))
}

/// `e^{2 pi i mu n} u^{-s}` with the phase reduced before multiplying by `2 pi`.
fn base_term(mu: f64, n: usize, ln_u: f64, s: Complex64) -> Complex64 {
    let phase = TAU * (mu * n as f64).fract();
    (Complex64::new(0.0, phase) - s * ln_u).exp()
}

// ---------------------------------------------------------------------------
// Direct summation

#[derive(Debug, Clone)]
pub(crate) struct DirectKernel {
    mu: f64,
    shift: f64,
    logs: Vec<f64>,
}

impl DirectKernel {
    fn plan(target: Target, center: Complex64, radius: f64, policy: &PrecisionPolicy, cap: usize) -> Result<Self> {
        let sigma = center.re - radius;
        if sigma < 1.0 + policy.series_margin - 1e-12 {
            return Err(Error::DomainError(format!(
                "direct series needs sigma >= {}, got {sigma}",
                1.0 + policy.series_margin
            )));
        }
        let mu = target.reduced();
        let smag = center.norm() + radius;
        // at zero frequency the tail is smooth in s and its derivatives are taken on circles
        let tol = if mu == 0.0 { 0.02 } else { 0.5 } * policy.target_tol;
        // smallest u = m + shift meeting the tail bound
        let u = if mu == 0.0 {
            (smag / (6.0 * tol)).powf(1.0 / (sigma + 1.0))
        } else {
            let sin = (PI * mu).sin().abs();
            ((1.0 + smag / sigma) / (sin * tol)).powf(1.0 / sigma)
        };
        if !(u.is_finite() && u < cap as f64) {
            return Err(Error::PrecisionLoss(format!("direct series would need {u:.3e} terms")));
        }
        let m = ((u - target.shift).ceil().max(0.0) as usize).max(16);
        Ok(Self { mu, shift: target.shift, logs: ln_table(target.shift, m) })
    }

    fn retarget(&self, target: Target) -> Self {
        Self { mu: continue_branch(self.mu, target), shift: target.shift, logs: ln_table(target.shift, self.logs.len()) }
    }

    fn eval(&self, s: Complex64) -> Sample {
        let (mut value, rounding) = partial_sum(self.mu, &self.logs, s);
        let m = self.logs.len();
        let u = m as f64 + self.shift;
        let ln_u = u.ln();
        let sigma = s.re;
        let err = if self.mu == 0.0 {
            let base = (-s * ln_u).exp();
            value += base * u / (s - 1.0) + 0.5 * base;
            2.0 * s.norm() * (-(sigma + 1.0) * ln_u).exp() / 12.0
        } else {
            let sin = (PI * self.mu).sin().abs();
            (-sigma * ln_u).exp() * (1.0 + s.norm() / sigma) / sin
        };
        Sample { value, trunc: err, rounding }
    }
}

// ---------------------------------------------------------------------------
// Euler-Maclaurin with an incomplete-gamma tail

#[derive(Debug, Clone, Copy, PartialEq)]
enum Tail {
    /// `J = (-i w)^{s-1} Gamma(1-s) - u^{1-s} e^{i w u} sum_k z^k / (1-s)_{k+1}`, `z = -i w u`.
    Series { terms: usize },
    /// `J = (i/w) e^{i w u} u^{-s} sum_k (s)_k (i w u)^{-k}`.
    Asymptotic { terms: usize },
}

#[derive(Debug, Clone)]
pub(crate) struct EmKernel {
    mu: f64,
    shift: f64,
    /// Bernoulli corrections kept.
    order: usize,
    tail: Tail,
    logs: Vec<f64>,
    escalations: u32,
}

impl EmKernel {
    fn plan(target: Target, center: Complex64, radius: f64, policy: &PrecisionPolicy) -> Result<Self> {
        if center.re - radius <= EM_SIGMA_MIN {
            return Err(Error::DomainError(format!(
                "Euler-Maclaurin window is sigma > {EM_SIGMA_MIN}, got {}",
                center.re - radius
            )));
        }
        let mu = target.reduced();
        let omega = TAU * mu;
        let shift = target.shift;
        let smag = center.norm() + radius;
        let n_base = em_base_terms(center, radius, policy);
        let u_base = n_base as f64 + shift;
        // Series regime keeps |w| u below |1 - s|, so the series terms decrease from the start.
        let near_integer = omega != 0.0
            && center.im.abs() <= radius + 1e-6
            && center.re >= 1.5
            && (center.re - center.re.round()).abs() <= radius + 1e-6;
        let u_series_max = if omega == 0.0 {
            f64::INFINITY
        } else {
            0.8 * ((center - 1.0).norm() - radius).max(1.0) / omega.abs()
        };
        let u_em_min = (policy.em_min_terms as f64).max(0.6 * smag + 10.0);
        let mut series = !near_integer && u_series_max >= u_em_min;
        let mut u = if series {
            u_base.min(u_series_max)
        } else {
            u_base.max((2.0 * smag + 40.0) / omega.abs())
        };

        let mut last_problem = String::new();
        for escalation in 0..=policy.max_escalations {
            let n = (u - shift).floor().max(1.0) as usize;
            if n > MAX_TERMS {
                return Err(Error::PrecisionLoss(format!("Euler-Maclaurin would need {n} terms")));
            }
            let mut kernel = EmKernel {
                mu,
                shift,
                order: policy.em_order,
                tail: if series {
                    Tail::Series { terms: 4000 }
                } else {
                    Tail::Asymptotic { terms: 1000 }
                },
                logs: ln_table(shift, n),
                escalations: escalation,
            };
            match kernel.calibrate(center, radius, policy) {
                Ok(()) => return Ok(kernel),
                Err(problem) => last_problem = problem,
            }
            // escalate: larger u, leaving the series regime when it no longer applies
            u *= 2.0;
            if series && u > u_series_max {
                series = false;
                u = u.max((2.0 * smag + 40.0) / omega.abs());
            }
        }
        Err(Error::PrecisionLoss(last_problem))
    }

    /// Fix correction count and tail length from a trial evaluation at the centre.
    fn calibrate(&mut self, center: Complex64, radius: f64, policy: &PrecisionPolicy) -> std::result::Result<(), String> {
        let omega = TAU * self.mu;
        let u = self.u();
        let s = center;
        // tail series length
        match self.tail {
            // enough terms for small frequencies reached by retargeting
            Tail::Series { .. } if omega == 0.0 => self.tail = Tail::Series { terms: 16 },
            Tail::Series { .. } => {
                let z = Complex64::new(0.0, -omega * u);
                let mut term = (1.0 - s).inv();
                let mut sum = term;
                let mut k = 0;
                while k < 4000 {
                    k += 1;
                    term *= z / (k as f64 + 1.0 - s);
                    sum += term;
                    if term.norm() <= 1e-18 * sum.norm().max(1e-300) && k > 2 {
                        break;
                    }
                }
                if k >= 4000 {
                    return Err("incomplete-gamma series did not converge".into());
                }
                self.tail = Tail::Series { terms: k + 6 };
            }
            Tail::Asymptotic { .. } => {
                let w = Complex64::new(0.0, omega * u);
                let mut a = Complex64::new(1.0, 0.0);
                let mut sum = a;
                let mut k = 0;
                loop {
                    k += 1;
                    let ratio = (s + radius + (k - 1) as f64).norm() / w.norm();
                    if ratio >= 0.9 || k > 600 {
                        return Err("asymptotic tail series diverges".into());
                    }
                    a *= (s + (k - 1) as f64) / w;
                    sum += a;
                    if a.norm() <= 1e-18 * sum.norm() {
                        break;
                    }
                }
                self.tail = Tail::Asymptotic { terms: k + 6 };
            }
        }
        // Bernoulli corrections: keep the smallest order whose successor is negligible
        let (value, corrections) = self.eval_parts(s, policy.em_order + 1);
        let tol = 0.02 * policy.target_tol * value.norm().max(1.0);
        let mut chosen = None;
        for k in 1..=policy.em_order {
            let next = corrections[k];
            if next <= tol {
                chosen = Some(k);
                break;
            }
            if k >= 3 && next > corrections[k - 1] && corrections[k - 1] > corrections[k - 2] {
                break;
            }
        }
        match chosen {
            Some(k) => {
                self.order = (k + 2).min(policy.em_order);
                Ok(())
            }
            None => Err(format!(
                "Bernoulli corrections did not decay below {tol:.2e} with {} terms (N = {})",
                policy.em_order,
                self.logs.len()
            )),
        }
    }

    fn u(&self) -> f64 {
        self.logs.len() as f64 + self.shift
    }

    fn retarget(&self, target: Target) -> Self {
        Self {
            mu: continue_branch(self.mu, target),
            shift: target.shift,
            order: self.order,
            tail: self.tail,
            logs: ln_table(target.shift, self.logs.len()),
            escalations: self.escalations,
        }
    }

    fn eval(&self, s: Complex64) -> Sample {
        let (value, corrections) = self.eval_parts(s, self.order + 1);
        let omitted = corrections[self.order];
        Sample { value, trunc: omitted, rounding: corrections[0] }
    }

    /// Value with `order` corrections; `mags[0]` holds the rounding estimate and
    /// `mags[k]` the modulus of correction `k` (the last one is computed but not added).
    fn eval_parts(&self, s: Complex64, order: usize) -> (Complex64, Vec<f64>) {
        let mu = self.mu;
        let omega = TAU * mu;
        let n = self.logs.len();
        let u = self.u();
        let ln_u = u.ln();
        let (mut sum, rounding) = partial_sum(mu, &self.logs, s);
        let base = base_term(mu, n, ln_u, s);
        let mut tail = 0.5 * base;
        let mut tail_abs = 0.5 * base.norm();

        match self.tail {
            Tail::Series { terms } => {
                let terms = if omega == 0.0 { 1 } else { terms };
                let z = Complex64::new(0.0, -omega * u);
                let mut term = (1.0 - s).inv();
                let mut series = term;
                let mut biggest = term.norm();
                for k in 1..terms {
                    term *= z / (k as f64 + 1.0 - s);
                    series += term;
                    biggest = biggest.max(term.norm());
                }
                tail -= u * base * series;
                tail_abs += u * base.norm() * biggest;
                if omega != 0.0 {
                    let ln_w = Complex64::new(omega.abs().ln(), -omega.signum() * PI / 2.0);
                    if let Some(lg) = ln_gamma(1.0 - s) {
                        let exponent = (s - 1.0) * ln_w + lg + Complex64::new(0.0, -omega * self.shift);
                        let g = exponent.exp();
                        tail += g;
                        // rounding in the exponent is amplified by its magnitude
                        tail_abs += g.norm() * (1.0 + lg.norm() + ((s - 1.0) * ln_w).norm());
                    }
                }
            }
            Tail::Asymptotic { terms } => {
                let w = Complex64::new(0.0, omega * u);
                let mut a = Complex64::new(1.0, 0.0);
                let mut series = a;
                for k in 1..terms {
                    a *= (s + (k - 1) as f64) / w;
                    series += a;
                }
                let j = Complex64::new(0.0, 1.0 / omega) * base * series;
                tail += j;
                tail_abs += j.norm();
            }
        }

        // f^{(n)}(N) / base = sum_j C(n, j) (i w)^{n-j} h_j,  h_j = (-1)^j (s)_j u^{-j}
        let max_deriv = 2 * order;
        let mut h = Vec::with_capacity(max_deriv + 1);
        h.push(Complex64::new(1.0, 0.0));
        for j in 0..max_deriv {
            let next = h[j] * (-(s + j as f64) / u);
            h.push(next);
        }
        let iw = Complex64::new(0.0, omega);
        let mut iw_pow = Vec::with_capacity(max_deriv + 1);
        iw_pow.push(Complex64::new(1.0, 0.0));
        for p in 0..max_deriv {
            let next = iw_pow[p] * iw;
            iw_pow.push(next);
        }
        let mut mags = vec![0.0; order + 1];
        mags[0] = rounding + 4.0 * EPS * tail_abs;
        for k in 1..=order {
            let nd = 2 * k - 1;
            let mut binom = 1.0;
            let mut d = Complex64::new(0.0, 0.0);
            for j in 0..=nd {
                if j > 0 {
                    binom *= (nd - j + 1) as f64 / j as f64;
                }
                d += binom * iw_pow[nd - j] * h[j];
            }
            let corr = bernoulli::scaled(k) * d * base;
            mags[k] = corr.norm();
            if k < order {
                tail -= corr;
            }
        }
        sum += tail;
        (sum, mags)
    }
}

// ---------------------------------------------------------------------------
// Reflection through the functional equation

/// Evaluates `L(lambda, alpha, z)` for `Re z` well left of the strip from two
/// Lerch values at `s = 1 - z`:
///
/// `L(l, a, 1-s) = (2 pi)^{-s} Gamma(s) [ e^{i pi s/2 - 2 pi i a l} L(1-a, l, s)
///                                        + e^{-i pi s/2 + 2 pi i a (1-{l})} L(a, 1-{l}, s) ]`
#[derive(Debug, Clone)]
pub(crate) struct FeKernel {
    lambda: f64,
    alpha: f64,
    first: Kernel,
    second: Kernel,
}

impl FeKernel {
    fn targets(lambda: f64, alpha: f64) -> (Target, Target) {
        let frac = lambda - lambda.floor();
        (Target::new(1.0 - alpha, lambda), Target::new(alpha, 1.0 - frac))
    }

    fn plan(target: Target, center: Complex64, radius: f64, policy: &PrecisionPolicy, inner: Route) -> Result<Self> {
        if !(target.shift > 0.0 && target.shift <= 1.0) {
            return Err(Error::DomainError(format!("reflection needs alpha in (0, 1], got {}", target.shift)));
        }
        let reflected = 1.0 - center;
        if reflected.re - radius < 1.0 + policy.series_margin - 1e-12 {
            return Err(Error::DomainError(format!(
                "reflection needs Re(1 - s) >= {}, got {}",
                1.0 + policy.series_margin,
                reflected.re - radius
            )));
        }
        // lambda normalised to (0, 1]
        let mut lambda = target.freq.rem_euclid(1.0);
        if lambda == 0.0 {
            lambda = 1.0;
        }
        let alpha = target.shift;
        let (t1, t2) = Self::targets(lambda, alpha);
        let first = Kernel::plan(t1, reflected, radius, policy, inner)?;
        let second = Kernel::plan(t2, reflected, radius, policy, inner)?;
        Ok(Self { lambda, alpha, first, second })
    }

    fn retarget(&self, target: Target) -> Result<Self> {
        let lambda = target.freq;
        let alpha = target.shift;
        let frac_old = self.lambda - self.lambda.floor();
        // keep the fractional-part branch of the planning point
        let frac = frac_old + (lambda - self.lambda);
        let t1 = Target::new(1.0 - alpha, lambda);
        let t2 = Target::new(alpha, 1.0 - frac);
        if !(t2.shift > 0.0) {
            return Err(Error::EdgeOfDomain(lambda));
        }
        Ok(Self { lambda, alpha, first: self.first.retarget(t1)?, second: self.second.retarget(t2)? })
    }

    fn eval(&self, z: Complex64) -> Sample {
        let s = 1.0 - z;
        let a = self.first.eval(s);
        let b = self.second.eval(s);
        let i = Complex64::i();
        let frac = self.lambda - self.lambda.floor();
        let lg = ln_gamma(s).unwrap_or(Complex64::new(f64::NAN, 0.0));
        let common = -s * TAU.ln() + lg;
        let e1 = common + i * PI * s / 2.0 - i * TAU * self.alpha * self.lambda;
        let e2 = common - i * PI * s / 2.0 + i * TAU * self.alpha * (1.0 - frac);
        let (p1, p2) = (e1.exp(), e2.exp());
        let value = p1 * a.value + p2 * b.value;
        let rounding = EPS * (4.0 + e1.norm()) * p1.norm() * a.value.norm() + EPS * (4.0 + e2.norm()) * p2.norm() * b.value.norm();
        let trunc = p1.norm() * a.trunc + p2.norm() * b.trunc;
        let rounding = rounding + p1.norm() * a.rounding + p2.norm() * b.rounding;
        Sample { value, trunc, rounding }
    }

    pub fn overflow_check(&self, z: Complex64) -> Result<()> {
        let s = 1.0 - z;
        let lg = ln_gamma(s).ok_or(Error::DomainError(format!("Gamma pole at {s}")))?;
        let log_mag = -s.re * TAU.ln() + lg.re + PI * s.im.abs() / 2.0;
        if log_mag > 700.0 {
            return Err(Error::OverflowGuard(format!("|prefactor| ~ e^{log_mag:.0} at s = {z}")));
        }
        Ok(())
    }
}

impl Kernel {
    pub fn check_overflow(&self, s: Complex64) -> Result<()> {
        match self {
            Kernel::Fe(k) => k.overflow_check(s),
            _ => Ok(()),
        }
    }
}
