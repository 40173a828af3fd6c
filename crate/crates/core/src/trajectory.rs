//! Zero trajectories `rho(lambda)` of `L(lambda, lambda, s)` and `q(lambda)` of its s-derivative.

use std::fmt;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::eval::kernel::Target;
use crate::eval::{dlambda, jet};
use crate::types::{Kind, PrecisionPolicy, SPoint};

/// Spacing of the emitted lambda grid.
pub const LAMBDA_GRID: f64 = 1e-3;
/// Largest residual of an emitted sample.
pub const MAX_SAMPLE_RESIDUAL: f64 = 1e-8;
/// Largest admissible move of the zero between neighbouring samples.
const MAX_JUMP: f64 = 0.5;
const NEWTON_STEPS: usize = 5;
const START_NEWTON_STEPS: usize = 8;
/// Below this `|df/ds|` steps are shortened.
const NEAR_COLLISION: f64 = 1e-6;
/// Below this `|df/ds|` the trace stops.
const SINGULAR: f64 = 1e-10;

/// Internal step sizes and corrector settings.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StepControl {
    pub h_init: f64,
    pub h_min: f64,
    /// Newton corrections are applied every `repolish_every` internal steps and at
    /// every emitted sample.
    pub repolish_every: usize,
    pub newton_tol: f64,
}

impl Default for StepControl {
    fn default() -> Self {
        Self { h_init: 1e-3, h_min: 1e-7, repolish_every: 1, newton_tol: 1e-10 }
    }
}

impl StepControl {
    pub fn validate(&self) -> Result<()> {
        let positive = [self.h_init, self.h_min, self.newton_tol].iter().all(|v| v.is_finite() && *v > 0.0);
        if !positive || self.h_min >= self.h_init || self.repolish_every == 0 {
            return Err(Error::InvalidParams(format!("invalid step control {self:?}")));
        }
        Ok(())
    }
}

/// How the next point is predicted before the Newton corrector.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Predictor {
    /// Classical Runge-Kutta on `ds/dlambda = -f_lambda / f_s`.
    RungeKutta,
    /// Linear extrapolation through the last two points.
    Secant,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Direction {
    DecreasingLambda,
    IncreasingLambda,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TrajectorySample {
    pub lambda: f64,
    pub position: SPoint,
    pub residual: f64,
}

/// A zero followed along lambda, sampled on a uniform grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Trajectory {
    pub kind: Kind,
    pub direction: Direction,
    pub samples: Vec<TrajectorySample>,
}

/// A trace that stopped early, with everything computed before the failure.
#[derive(Debug, Clone, PartialEq)]
pub struct TraceFailure {
    pub error: Error,
    pub partial: Trajectory,
}

impl fmt::Display for TraceFailure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let last = self.partial.samples.last().map(|s| s.lambda);
        write!(f, "{} (trajectory truncated after {} samples, last lambda {last:?})", self.error, self.partial.samples.len())
    }
}

impl std::error::Error for TraceFailure {}

impl From<TraceFailure> for Error {
    fn from(failure: TraceFailure) -> Self {
        failure.error
    }
}

/// `df/ds` and `df/dlambda`.
#[derive(Debug, Clone, Copy)]
struct Partials {
    fs: Complex64,
    fl: Complex64,
}

struct Field<'a> {
    kind: Kind,
    policy: &'a PrecisionPolicy,
}

impl Field<'_> {
    fn value(&self, lambda: f64, s: Complex64) -> Result<(Complex64, Complex64)> {
        let j = jet(Target::new(lambda, lambda), s, self.policy)?;
        Ok(match self.kind {
            Kind::L => (j.d[0], j.d[1]),
            Kind::Lprime => (j.d[1], j.d[2]),
        })
    }

    fn partials(&self, lambda: f64, s: Complex64) -> Result<Partials> {
        let (_, fs) = self.value(lambda, s)?;
        let fl = match self.kind {
            Kind::L => dlambda(lambda, s, false, self.policy)?.d[0],
            Kind::Lprime => dlambda(lambda, s, true, self.policy)?.d[1],
        };
        Ok(Partials { fs, fl })
    }

    /// `ds/dlambda`, and whether the zero is close to colliding.
    fn velocity(&self, lambda: f64, s: Complex64) -> Result<(Complex64, bool)> {
        let p = self.partials(lambda, s)?;
        let d = p.fs.norm();
        if d < SINGULAR {
            return Err(Error::SingularJacobian { lambda });
        }
        Ok((-p.fl / p.fs, d < NEAR_COLLISION))
    }

    /// Newton in s at fixed lambda; returns the point and `|f|` there.
    fn newton(&self, lambda: f64, mut s: Complex64, tol: f64, steps: usize) -> Result<(Complex64, f64)> {
        let (mut f, mut fs) = self.value(lambda, s)?;
        for _ in 0..steps {
            if f.norm() < tol {
                break;
            }
            if fs.norm() < SINGULAR {
                return Err(Error::SingularJacobian { lambda });
            }
            s -= f / fs;
            (f, fs) = self.value(lambda, s)?;
        }
        let residual = f.norm();
        if !residual.is_finite() {
            return Err(Error::NoConvergence(steps));
        }
        Ok((s, residual))
    }
}

/// Follows a zero of `L(lambda, lambda, s)` from `start_lambda` to `end_lambda`.
#[allow(non_snake_case)]
pub fn trace_L_zero(
    start_lambda: f64,
    start: SPoint,
    end_lambda: f64,
    ctrl: &StepControl,
    policy: &PrecisionPolicy,
) -> Result<Trajectory, TraceFailure> {
    trace(Kind::L, start_lambda, start, end_lambda, ctrl, policy, Predictor::RungeKutta)
}

/// Follows a zero of `d/ds L(lambda, lambda, s)` from `start_lambda` to `end_lambda`.
#[allow(non_snake_case)]
pub fn trace_Lprime_zero(
    start_lambda: f64,
    start: SPoint,
    end_lambda: f64,
    ctrl: &StepControl,
    policy: &PrecisionPolicy,
) -> Result<Trajectory, TraceFailure> {
    trace(Kind::Lprime, start_lambda, start, end_lambda, ctrl, policy, Predictor::RungeKutta)
}

/// Follows a zero of `L` or `L'` with the chosen predictor.
///
/// Samples are emitted on the grid `start_lambda -+ k * 0.001`, closed by `end_lambda`.
/// Each sample is Newton-polished; a step is halved when Newton fails, the zero
/// moves by more than 0.5, or `|df/ds| < 1e-6`.
pub fn trace(
    kind: Kind,
    start_lambda: f64,
    start: SPoint,
    end_lambda: f64,
    ctrl: &StepControl,
    policy: &PrecisionPolicy,
    predictor: Predictor,
) -> Result<Trajectory, TraceFailure> {
    let direction =
        if end_lambda < start_lambda { Direction::DecreasingLambda } else { Direction::IncreasingLambda };
    let mut traj = Trajectory { kind, direction, samples: Vec::new() };
    let fail = |error: Error, traj: &Trajectory| TraceFailure { error, partial: traj.clone() };
    let valid = |l: f64| l.is_finite() && l > 0.0 && l <= 1.0;
    if !valid(start_lambda) || !valid(end_lambda) {
        return Err(fail(Error::InvalidParams(format!("lambda range {start_lambda} -> {end_lambda} leaves (0, 1]")), &traj));
    }
    if let Err(e) = ctrl.validate().and_then(|_| policy.validate()) {
        return Err(fail(e, &traj));
    }
    if !start.is_finite() {
        return Err(fail(Error::DomainError(format!("non-finite start {start}")), &traj));
    }
    let field = Field { kind, policy };
    let (s0, r0) = match field.newton(start_lambda, start.z(), ctrl.newton_tol, START_NEWTON_STEPS) {
        Ok(v) => v,
        Err(e) => return Err(fail(e, &traj)),
    };
    if r0 >= MAX_SAMPLE_RESIDUAL || (s0 - start.z()).norm() > MAX_JUMP {
        return Err(fail(Error::NoConvergence(START_NEWTON_STEPS), &traj));
    }
    traj.samples.push(TrajectorySample { lambda: start_lambda, position: s0.into(), residual: r0 });

    let sign = if direction == Direction::DecreasingLambda { -1.0 } else { 1.0 };
    let span = (end_lambda - start_lambda).abs();
    let cells = (span / LAMBDA_GRID - 1e-9).ceil().max(0.0) as usize;
    let mut state = State { lambda: start_lambda, s: s0, prev: None, steps: 0 };
    for k in 1..=cells {
        let target = if k == cells { end_lambda } else { start_lambda + sign * k as f64 * LAMBDA_GRID };
        match advance(&field, &mut state, target, ctrl, predictor) {
            Ok(residual) => {
                traj.samples.push(TrajectorySample { lambda: target, position: state.s.into(), residual });
            }
            Err(e) => {
                log::warn!("trace stopped near lambda = {}: {e}", state.lambda);
                return Err(fail(e, &traj));
            }
        }
    }
    Ok(traj)
}

struct State {
    lambda: f64,
    s: Complex64,
    /// Previous accepted point, for the secant predictor.
    prev: Option<(f64, Complex64)>,
    steps: usize,
}

/// Integrates from `state.lambda` to exactly `target` and polishes there.
fn advance(field: &Field, state: &mut State, target: f64, ctrl: &StepControl, predictor: Predictor) -> Result<f64> {
    let mut h = ctrl.h_init;
    loop {
        let remaining = target - state.lambda;
        if remaining.abs() <= 1e-15 {
            break;
        }
        let last = remaining.abs() <= h * (1.0 + 1e-9);
        let delta = if last { remaining } else { h.copysign(remaining) };
        let next_lambda = if last { target } else { state.lambda + delta };
        state.steps += 1;
        let polish = last || state.steps % ctrl.repolish_every == 0;
        match step(field, state, next_lambda, polish, ctrl, predictor) {
            Ok(Some(s)) => {
                state.prev = Some((state.lambda, state.s));
                state.lambda = next_lambda;
                state.s = s;
                h = (2.0 * h).min(ctrl.h_init);
            }
            Ok(None) => {
                if h / 2.0 < ctrl.h_min {
                    return Err(Error::StepUnderflow { lambda: state.lambda });
                }
                h /= 2.0;
            }
            Err(e) => return Err(e),
        }
    }
    let (s, residual) = field.newton(target, state.s, ctrl.newton_tol, NEWTON_STEPS)?;
    if residual >= MAX_SAMPLE_RESIDUAL {
        return Err(Error::NoConvergence(NEWTON_STEPS));
    }
    state.s = s;
    Ok(residual)
}

/// One predictor-corrector step; `None` asks for a smaller step.
fn step(
    field: &Field,
    state: &State,
    next_lambda: f64,
    polish: bool,
    ctrl: &StepControl,
    predictor: Predictor,
) -> Result<Option<Complex64>> {
    let (l0, s0) = (state.lambda, state.s);
    let delta = next_lambda - l0;
    let can_halve = delta.abs() / 2.0 >= ctrl.h_min;
    let predicted = match (predictor, state.prev) {
        (Predictor::Secant, Some((lp, sp))) => s0 + (s0 - sp) * (delta / (l0 - lp)),
        _ => {
            let (k1, c1) = field.velocity(l0, s0)?;
            let (k2, c2) = field.velocity(l0 + delta / 2.0, s0 + k1 * (delta / 2.0))?;
            let (k3, c3) = field.velocity(l0 + delta / 2.0, s0 + k2 * (delta / 2.0))?;
            let (k4, c4) = field.velocity(next_lambda, s0 + k3 * delta)?;
            if (c1 || c2 || c3 || c4) && can_halve {
                return Ok(None);
            }
            if predictor == Predictor::RungeKutta {
                s0 + (k1 + 2.0 * k2 + 2.0 * k3 + k4) * (delta / 6.0)
            } else {
                // first secant step starts from an Euler step
                s0 + k1 * delta
            }
        }
    };
    if !(predicted.re.is_finite() && predicted.im.is_finite()) || (predicted - s0).norm() > MAX_JUMP {
        return Ok(None);
    }
    if !polish {
        return Ok(Some(predicted));
    }
    match field.newton(next_lambda, predicted, ctrl.newton_tol, NEWTON_STEPS) {
        Ok((s, residual)) if residual < ctrl.newton_tol.max(f64::EPSILON) * 10.0 && (s - s0).norm() <= MAX_JUMP => {
            Ok(Some(s))
        }
        Ok(_) | Err(Error::SingularJacobian { .. }) if can_halve => Ok(None),
        Ok(_) => Err(Error::StepUnderflow { lambda: l0 }),
        Err(e) => Err(e),
    }
}

/// Samples with `|sigma - 1/2|` below this lie on the critical line.
pub const LINE_TOL: f64 = 1e-8;

/// Parameter values where the trajectory passes from one side of `sigma = 1/2` to the other.
///
/// Samples within `LINE_TOL` of the line count as on it. A direct sign change between
/// neighbouring samples is located by bisection on the linear interpolant to a lambda
/// accuracy of `1e-6`; a passage through a run of on-line samples is reported at the
/// first sample of the run.
pub fn detect_line_crossings(traj: &Trajectory) -> Vec<(f64, SPoint)> {
    let side = |s: &TrajectorySample| {
        let g = s.position.sigma - 0.5;
        if g > LINE_TOL {
            1
        } else if g < -LINE_TOL {
            -1
        } else {
            0
        }
    };
    let mut out = Vec::new();
    // side of the last off-line sample and the first on-line sample after it
    let mut last_side = 0;
    let mut run_start: Option<usize> = None;
    for (k, sample) in traj.samples.iter().enumerate() {
        let here = side(sample);
        if here == 0 {
            run_start.get_or_insert(k);
            continue;
        }
        if last_side == -here {
            match run_start {
                Some(j) => out.push((traj.samples[j].lambda, traj.samples[j].position)),
                None => out.push(bisect_crossing(&traj.samples[k - 1], sample)),
            }
        }
        last_side = here;
        run_start = None;
    }
    out
}

fn bisect_crossing(a: &TrajectorySample, b: &TrajectorySample) -> (f64, SPoint) {
    let ga = a.position.sigma - 0.5;
    let lerp = |u: f64| SPoint::from(a.position.z() + (b.position.z() - a.position.z()) * u);
    let (mut lo, mut hi) = (0.0, 1.0);
    let width = (b.lambda - a.lambda).abs();
    while (hi - lo) * width > 1e-6 {
        let mid = 0.5 * (lo + hi);
        if (lerp(mid).sigma - 0.5) * ga > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let u = 0.5 * (lo + hi);
    (a.lambda + (b.lambda - a.lambda) * u, lerp(u))
}
