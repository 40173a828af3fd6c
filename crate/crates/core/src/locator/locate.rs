use num_complex::Complex64;

use super::muller::refine_with;
use super::winding::winding_of;
use super::{Func, RectBox, WindingResult, ZeroRecord};
use crate::error::{Error, Result};
use crate::types::{Kind, Params, PrecisionPolicy, SPoint};

/// Tallest rectangle `locate_zeros` accepts.
pub const MAX_HEIGHT: f64 = 100.0;
/// A bottom edge on the real axis is raised to this height.
pub const REAL_AXIS_LIFT: f64 = 1e-2;
const MAX_NUDGES: usize = 8;
/// Split positions tried in turn, as fractions of the longer side.
const SPLITS: [f64; 6] = [0.5123, 0.4711, 0.5379, 0.4467, 0.5631, 0.4219];
/// Largest distance between a leaf's zero sum and its refined zero.
const LEAF_AGREEMENT: f64 = 1e-6;
/// Below this diameter a box with several zeros is treated as one multiple zero.
const MIN_DIAMETER: f64 = 1e-7;

/// Every zero of `L` or `L'` inside `rect`, sorted by height.
///
/// A bottom edge at `t = 0` is raised to `t = 0.01`, so only zeros with `t > 0.01`
/// are returned. Edges carrying a zero are pushed outward by `1e-6 (1 + |t|)`, at
/// most eight times.
pub fn locate_zeros(rect: &RectBox, kind: Kind, params: Params, policy: &PrecisionPolicy) -> Result<Vec<ZeroRecord>> {
    let mut root = RectBox::new(rect.sigma_min, rect.sigma_max, rect.t_min, rect.t_max)?;
    if root.height() > MAX_HEIGHT * (1.0 + 1e-12) {
        return Err(Error::InvalidBox(format!("height {} exceeds {MAX_HEIGHT}", root.height())));
    }
    if root.t_min == 0.0 {
        root.t_min = REAL_AXIS_LIFT;
        root = RectBox::new(root.sigma_min, root.sigma_max, root.t_min, root.t_max)?;
    }
    if params.has_pole() && root.contains_closed(SPoint::new(1.0, 0.0)) {
        return Err(Error::InvalidBox(format!("{root} contains the pole at s = 1")));
    }
    let func = Func::new(kind, params, policy)?;
    let (root, count) = nudged_winding(&func, root)?;
    let mut zeros = solve(&func, root, count)?;
    let found: usize = zeros.iter().map(|z| z.multiplicity as usize).sum();
    if found != count.count {
        return Err(Error::CountMismatch { expected: count.count, found });
    }
    zeros.sort_by(|a, b| a.location.t.total_cmp(&b.location.t).then(a.location.sigma.total_cmp(&b.location.sigma)));
    Ok(zeros)
}

/// Winding of `rect`, pushing out any edge that carries a zero.
pub(crate) fn nudged_winding(func: &Func, mut rect: RectBox) -> Result<(RectBox, WindingResult)> {
    let mut last = None;
    for _ in 0..=MAX_NUDGES {
        match winding_of(func, &rect) {
            Ok(w) => return Ok((rect, w)),
            Err(Error::ZeroOnBoundary { edge, modulus }) => {
                log::info!("zero on the {edge:?} edge of {rect} (|f| = {modulus:.2e}); nudging");
                last = Some(Error::ZeroOnBoundary { edge, modulus });
                rect = rect.expand(edge);
            }
            Err(e) => return Err(e),
        }
    }
    Err(last.unwrap_or(Error::NoConvergence(MAX_NUDGES)))
}

fn solve(func: &Func, rect: RectBox, w: WindingResult) -> Result<Vec<ZeroRecord>> {
    match w.count {
        0 => Ok(Vec::new()),
        1 => Ok(vec![leaf(func, rect, w)?]),
        n if rect.width().hypot(rect.height()) < MIN_DIAMETER => {
            let record = leaf(func, rect, WindingResult { zero_sum: w.zero_sum / n as f64, ..w })?;
            if record.multiplicity as usize != n {
                return Err(Error::CountMismatch { expected: n, found: record.multiplicity as usize });
            }
            Ok(vec![record])
        }
        n => {
            let (a, wa, b, wb) = split(func, rect, n)?;
            let (left, right) = rayon::join(|| solve(func, a, wa), || solve(func, b, wb));
            let mut out = left?;
            out.extend(right?);
            Ok(out)
        }
    }
}

/// Splits `rect` into two halves whose counts add up to `count`.
fn split(func: &Func, rect: RectBox, count: usize) -> Result<(RectBox, WindingResult, RectBox, WindingResult)> {
    let mut last = Error::NoConvergence(SPLITS.len());
    for fraction in SPLITS {
        let (a, b) = rect.split(fraction);
        let (wa, wb) = rayon::join(|| winding_of(func, &a), || winding_of(func, &b));
        match (wa, wb) {
            (Ok(wa), Ok(wb)) if wa.count + wb.count == count => return Ok((a, wa, b, wb)),
            (Ok(wa), Ok(wb)) => {
                log::info!("split of {rect} at {fraction}: {} + {} != {count}", wa.count, wb.count);
                last = Error::CountMismatch { expected: count, found: wa.count + wb.count };
            }
            (Err(e), _) | (_, Err(e)) => {
                log::info!("split of {rect} at {fraction} failed: {e}");
                last = e;
            }
        }
    }
    Err(last)
}

fn leaf(func: &Func, rect: RectBox, w: WindingResult) -> Result<ZeroRecord> {
    let record = refine_with(func, w.zero_sum, rect)?;
    let gap = (record.location.z() - w.zero_sum).norm();
    let multiple = w.count > 1;
    if !multiple && gap > LEAF_AGREEMENT {
        return Err(Error::PrecisionLoss(format!(
            "refined zero {} is {gap:.2e} away from the contour estimate {}",
            record.location, w.zero_sum
        )));
    }
    if !rect.contains(record.location) {
        return Err(Error::PrecisionLoss(format!("refined zero {} left its box {rect}", record.location)));
    }
    Ok(record)
}

/// Distance from `s` to the closest zero in `zeros`.
pub fn nearest_zero_distance(s: SPoint, zeros: &[ZeroRecord]) -> Result<f64> {
    zeros
        .iter()
        .map(|z| (z.location.z() - Complex64::new(s.sigma, s.t)).norm())
        .min_by(f64::total_cmp)
        .ok_or(Error::EmptyList)
}
