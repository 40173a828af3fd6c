use std::f64::consts::TAU;

use num_complex::Complex64;

use super::{Func, RectBox, ZeroRecord};
use crate::error::{Error, Result};
use crate::types::{Kind, Params, PrecisionPolicy, SPoint};

const MAX_ITERS: usize = 60;
const STEP_TOL: f64 = 1e-12;
const VALUE_TOL: f64 = 1e-10;
/// Radius of the disc around the seed the iteration may not leave.
const ESCAPE_RADIUS: f64 = 1.0;
const SEED_SPREAD: f64 = 1e-3;
/// Largest residual accepted for a refined zero.
pub(crate) const MAX_RESIDUAL: f64 = 1e-8;
const MULTIPLICITY_RADIUS: f64 = 1e-4;
const MULTIPLICITY_NODES: usize = 64;

/// Polishes `seed` to a zero of `L` or `L'` by Muller's method.
///
/// The multiplicity is the winding number of `f` on a circle of radius `1e-4`.
pub fn refine_zero(seed: SPoint, kind: Kind, params: Params, policy: &PrecisionPolicy) -> Result<ZeroRecord> {
    if !seed.is_finite() {
        return Err(Error::DomainError(format!("non-finite seed {seed}")));
    }
    let func = Func::new(kind, params, policy)?;
    let provenance = RectBox::new(
        seed.sigma - ESCAPE_RADIUS,
        seed.sigma + ESCAPE_RADIUS,
        seed.t - ESCAPE_RADIUS,
        seed.t + ESCAPE_RADIUS,
    )?;
    refine_with(&func, seed.z(), provenance)
}

pub(crate) fn refine_with(func: &Func, seed: Complex64, provenance: RectBox) -> Result<ZeroRecord> {
    let (location, iters) = muller(func, seed)?;
    let f = func.value(location)?;
    let residual = f.norm();
    if !(residual < MAX_RESIDUAL) {
        return Err(Error::PrecisionLoss(format!("residual {residual:.3e} at {location}")));
    }
    let multiplicity = multiplicity(func, location)?;
    if multiplicity == 0 {
        return Err(Error::PrecisionLoss(format!("no zero encircled near {location}")));
    }
    if multiplicity > 1 {
        log::warn!("zero of multiplicity {multiplicity} at {location}");
    }
    Ok(ZeroRecord {
        location: SPoint::new(location.re, location.im),
        kind: func.kind,
        residual,
        multiplicity,
        provenance,
        refine_iters: iters,
    })
}

fn muller(func: &Func, seed: Complex64) -> Result<(Complex64, usize)> {
    let spread = Complex64::new(SEED_SPREAD, 0.0);
    let mut x = [seed - spread, seed + Complex64::new(0.0, SEED_SPREAD), seed];
    let mut f = [func.value(x[0])?, func.value(x[1])?, func.value(x[2])?];
    if f[2].norm() == 0.0 {
        return Ok((seed, 0));
    }
    for iter in 1..=MAX_ITERS {
        let h1 = x[1] - x[0];
        let h2 = x[2] - x[1];
        let d1 = (f[1] - f[0]) / h1;
        let d2 = (f[2] - f[1]) / h2;
        let a = (d2 - d1) / (h2 + h1);
        let b = a * h2 + d2;
        let root = (b * b - 4.0 * f[2] * a).sqrt();
        let denom = if (b + root).norm() >= (b - root).norm() { b + root } else { b - root };
        let step = if denom.norm() > 0.0 {
            -2.0 * f[2] / denom
        } else {
            // flat parabola: fall back to a secant step
            -f[2] * h2 / (f[2] - f[1])
        };
        if !(step.re.is_finite() && step.im.is_finite()) {
            return Err(Error::NoConvergence(iter));
        }
        let next = x[2] + step;
        if (next - seed).norm() > ESCAPE_RADIUS {
            return Err(Error::Escaped);
        }
        let f_next = func.value(next)?;
        x = [x[1], x[2], next];
        f = [f[1], f[2], f_next];
        if step.norm() < STEP_TOL || f_next.norm() < VALUE_TOL {
            return Ok((next, iter));
        }
    }
    Err(Error::NoConvergence(MAX_ITERS))
}

/// Winding number of `f` on a small circle, from the unwrapped phase.
fn multiplicity(func: &Func, center: Complex64) -> Result<u32> {
    let mut values = Vec::with_capacity(MULTIPLICITY_NODES + 1);
    for j in 0..MULTIPLICITY_NODES {
        let w = Complex64::from_polar(MULTIPLICITY_RADIUS, TAU * j as f64 / MULTIPLICITY_NODES as f64);
        values.push(func.value(center + w)?);
    }
    values.push(values[0]);
    let turns: f64 = values.windows(2).map(|w| (w[1] / w[0]).arg()).sum::<f64>() / TAU;
    Ok(turns.round().max(0.0) as u32)
}
