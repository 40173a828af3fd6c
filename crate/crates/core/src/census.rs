//! Zero statistics: counting main terms, windowed censuses, line scans, mirror
//! pairing and zero-free rings.

#![allow(non_snake_case)]

use std::f64::consts::{E, TAU};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::eval::{ds_derivative, lerch};
use crate::locator::{locate_zeros, nudged_winding, Edge, Func, RectBox, ZeroRecord, REAL_AXIS_LIFT};
use crate::types::{Kind, Params, PrecisionPolicy, SPoint};

/// Left edge of every census rectangle.
pub const CENSUS_SIGMA_MIN: f64 = -2.0;
/// Default right edge of the `L'` census rectangle.
pub const DEFAULT_SIGMA1: f64 = 3.0;
/// Default half-width of the near-line band.
pub const DEFAULT_ETA: f64 = 1e-6;
/// Left edge of the counting rectangle for `N(T)`.
pub const COUNT_SIGMA_MIN: f64 = -1.0;
/// Samples closer than this to a zero are skipped by [`line_scan`].
pub const LINE_SCAN_CLEARANCE: f64 = 1e-3;

/// Main term of the zero counting function up to height `t`.
///
/// `(T / 2 pi) log(T / (2 pi e alpha lambda))` for `L`, and
/// `(T / 2 pi) log(T / (2 pi e ([lambda] + lambda) lambda))` for `L'`.
pub fn expected_count(params: Params, t: f64, kind: Kind) -> Result<f64> {
    let lambda = params.lambda();
    let product = match kind {
        Kind::L => params.alpha() * lambda,
        Kind::Lprime => (lambda.floor() + lambda) * lambda,
    };
    let floor = TAU * E * product;
    if !(t.is_finite() && t > floor) {
        return Err(Error::DomainError(format!("T = {t} must exceed 2 pi e x {product} = {floor}")));
    }
    Ok(t / TAU * (t / floor).ln())
}

/// Zero census of `L` and `L'` in the window `T < t < T + U`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CensusReport {
    pub params: Params,
    /// Rectangle left of the critical line in which `count_L` is taken.
    #[serde(rename = "box")]
    pub rect: RectBox,
    /// Zeros of `L` in `rect`.
    pub count_L: usize,
    /// Zeros of `L'` in `[-2, sigma1] x [T, T + U]`.
    pub count_Lprime: usize,
    /// Zeros of `L` left of the near-line band, `beta < 1/2 - eta`.
    pub count_L_left: usize,
    /// Zeros of `L'` left of the near-line band.
    pub count_Lprime_left: usize,
    /// `|count_L_left - count_Lprime_left|`.
    pub left_difference: usize,
    /// Increase of the `L` main term over the window.
    pub main_term_L: f64,
    /// Increase of the `L'` main term over the window.
    pub main_term_Lprime: f64,
    /// Zeros of `L` in `rect` with `|beta - 1/2| < eta`.
    pub near_line: Vec<ZeroRecord>,
    /// The other zeros of `L` in `rect`.
    pub off_line: Vec<ZeroRecord>,
    pub eta: f64,
    pub sigma1: f64,
    /// Zeros of `L` in the mirror-symmetric rectangle `[-2, 3] x [T, T + U]`.
    pub zeros_L: Vec<ZeroRecord>,
    pub zeros_Lprime: Vec<ZeroRecord>,
    /// Mirror pairing of `zeros_L`.
    pub pairs: PairReport,
}

/// Counts and locates zeros of `L` and `L'` with `T < t < T + U`.
///
/// `L` is scanned in the rectangle `[-2, 3]`, which is closed under `s -> 1 - conj(s)`;
/// `count_L` is the winding count of its left part `[-2, 1/2]` (pushed right when
/// zeros sit on the line) and must agree with the located zeros there. Zeros within
/// `eta` of the line stand in for the zeros near the separating curve and are left
/// out of the left-of-line comparison between `L` and `L'`.
pub fn census(params: Params, t: f64, u: f64, eta: f64, sigma1: f64, policy: &PrecisionPolicy) -> Result<CensusReport> {
    if !(u > 0.0 && u <= t) {
        return Err(Error::InvalidParams(format!("need 0 < U <= T, got T = {t}, U = {u}")));
    }
    if !(eta.is_finite() && eta > 0.0) {
        return Err(Error::InvalidParams(format!("eta = {eta} must be positive")));
    }
    if !(sigma1.is_finite() && sigma1 > 0.5) {
        return Err(Error::InvalidParams(format!("sigma1 = {sigma1} must exceed 1/2")));
    }
    let main_term_L = expected_count(params, t + u, Kind::L)? - expected_count(params, t, Kind::L)?;
    let main_term_Lprime = expected_count(params, t + u, Kind::Lprime)? - expected_count(params, t, Kind::Lprime)?;

    let full = RectBox::new(CENSUS_SIGMA_MIN, 1.0 - CENSUS_SIGMA_MIN, t, t + u)?;
    let zeros_L = locate_zeros(&full, Kind::L, params, policy)?;
    let zeros_Lprime = locate_zeros(&RectBox::new(CENSUS_SIGMA_MIN, sigma1, t, t + u)?, Kind::Lprime, params, policy)?;

    let func = Func::new(Kind::L, params, policy)?;
    let (rect, winding) = nudged_winding(&func, RectBox::new(CENSUS_SIGMA_MIN, 0.5, t, t + u)?)?;
    let left: Vec<ZeroRecord> = zeros_L.iter().filter(|z| rect.contains(z.location)).copied().collect();
    let found: usize = left.iter().map(|z| z.multiplicity as usize).sum();
    if found != winding.count {
        return Err(Error::CountMismatch { expected: winding.count, found });
    }
    let (near_line, off_line): (Vec<ZeroRecord>, Vec<ZeroRecord>) =
        left.into_iter().partition(|z| (z.location.sigma - 0.5).abs() < eta);
    let count_Lprime = zeros_Lprime.iter().map(|z| z.multiplicity as usize).sum();
    let left_of_band = |z: &&ZeroRecord| z.location.sigma <= 0.5 - eta;
    let count_L_left = off_line.iter().filter(left_of_band).map(|z| z.multiplicity as usize).sum::<usize>();
    let count_Lprime_left = zeros_Lprime.iter().filter(left_of_band).map(|z| z.multiplicity as usize).sum::<usize>();
    let pairs = pair_scan(&zeros_L, &full, eta)?;
    Ok(CensusReport {
        params,
        rect,
        count_L: winding.count,
        count_Lprime,
        count_L_left,
        count_Lprime_left,
        left_difference: count_L_left.abs_diff(count_Lprime_left),
        main_term_L,
        main_term_Lprime,
        near_line,
        off_line,
        eta,
        sigma1,
        zeros_L,
        zeros_Lprime,
        pairs,
    })
}

/// Number of zeros of `L` (or `L'`) with `0.01 < t <= T` in `-1 <= sigma <= right`,
/// for each `T` of an increasing grid.
///
/// The windows between grid heights are counted one after the other; only their top
/// edges are ever nudged, so each count refers to the (possibly raised) height reported.
pub fn zero_counts(
    params: Params,
    kind: Kind,
    heights: &[f64],
    sigma_right: f64,
    policy: &PrecisionPolicy,
) -> Result<Vec<(f64, usize)>> {
    if heights.windows(2).any(|w| !(w[0] < w[1])) || heights.first().map_or(false, |&h| !(h > REAL_AXIS_LIFT)) {
        return Err(Error::InvalidParams("heights must increase and exceed 0.01".into()));
    }
    let func = Func::new(kind, params, policy)?;
    let mut out = Vec::with_capacity(heights.len());
    let mut bottom = REAL_AXIS_LIFT;
    let mut total = 0;
    for &top in heights {
        let mut rect = RectBox::new(COUNT_SIGMA_MIN, sigma_right, bottom, top)?;
        let mut nudges = 0;
        let winding = loop {
            match crate::locator::winding_of(&func, &rect) {
                Ok(w) => break w,
                Err(Error::ZeroOnBoundary { edge, modulus }) if edge != Edge::Bottom && nudges < 8 => {
                    log::info!("zero on the {edge:?} edge of {rect} (|f| = {modulus:.2e}); nudging");
                    rect = rect.expand(edge);
                    nudges += 1;
                }
                Err(e) => return Err(e),
            }
        };
        total += winding.count;
        out.push((rect.t_max, total));
        bottom = rect.t_max;
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DBoundRow {
    pub t: f64,
    pub count: usize,
    pub main_term: f64,
    /// `|count - main_term| / log T`.
    pub ratio: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DBoundReport {
    pub params: Params,
    pub d_candidate: f64,
    pub rows: Vec<DBoundRow>,
    pub max_ratio: f64,
    pub pass: bool,
}

/// `max_T |N(lambda, lambda, T) - (T / 2 pi) log(T / (2 pi e lambda^2))| / log T` over
/// the grid, compared with `d_candidate`.
pub fn check_D_bound_with_counts(params: Params, counts: &[(f64, usize)], d_candidate: f64) -> Result<DBoundReport> {
    let mut rows = Vec::with_capacity(counts.len());
    for &(t, count) in counts {
        let main_term = expected_count(params, t, Kind::L)?;
        rows.push(DBoundRow { t, count, main_term, ratio: (count as f64 - main_term).abs() / t.ln() });
    }
    let max_ratio = rows.iter().map(|r| r.ratio).fold(0.0, f64::max);
    Ok(DBoundReport { params, d_candidate, pass: !rows.is_empty() && max_ratio < d_candidate, rows, max_ratio })
}

/// As [`check_D_bound_with_counts`], counting zeros of `L(lambda, lambda, s)` in
/// `[-1, 1 + lambda] x (0.01, T]`.
pub fn check_D_bound(params: Params, t_grid: &[f64], d_candidate: f64, policy: &PrecisionPolicy) -> Result<DBoundReport> {
    let mut grid = t_grid.to_vec();
    grid.sort_by(f64::total_cmp);
    grid.dedup();
    let counts = zero_counts(params, Kind::L, &grid, 1.0 + params.alpha(), policy)?;
    check_D_bound_with_counts(params, &counts, d_candidate)
}

/// One sample of `Re L'/L` on a vertical line.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LineSample {
    pub t: f64,
    /// `None` when the sample was skipped.
    pub re_log_derivative: Option<f64>,
    pub neg_log_t: f64,
    pub half_neg_log_t: f64,
    pub note: Option<String>,
}

/// `Re L'/L (sigma + i t)` for `t = t_from, t_from + step, ..., <= t_to`.
///
/// Points within `1e-3` of a zero in `zeros` are kept as annotated, value-less rows.
pub fn line_scan(
    params: Params,
    sigma: f64,
    t_from: f64,
    t_to: f64,
    step: f64,
    zeros: &[ZeroRecord],
    policy: &PrecisionPolicy,
) -> Result<Vec<LineSample>> {
    if !(step > 0.0 && t_from.is_finite() && t_to >= t_from && t_from > 0.0 && sigma.is_finite()) {
        return Err(Error::InvalidParams(format!("bad scan range {t_from}..{t_to} step {step}")));
    }
    let n = ((t_to - t_from) / step + 1e-9).floor() as usize;
    (0..=n)
        .map(|k| {
            let t = t_from + k as f64 * step;
            let s = SPoint::new(sigma, t);
            let lt = t.ln();
            let mut sample =
                LineSample { t, re_log_derivative: None, neg_log_t: -lt, half_neg_log_t: -0.5 * lt, note: None };
            if let Some(z) = zeros.iter().find(|z| z.location.dist(&s) < LINE_SCAN_CLEARANCE) {
                sample.note = Some(format!("skipped: within {LINE_SCAN_CLEARANCE} of the zero {}", z.location));
                return Ok(sample);
            }
            let d = ds_derivative(params, s, 1, policy)?.value;
            let f = lerch(params, s, policy)?.value;
            sample.re_log_derivative = Some((d / f).re);
            Ok(sample)
        })
        .collect()
}

/// A zero, its mirror image in the critical line and the zero closest to that image.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ZeroPair {
    pub rho: ZeroRecord,
    pub partner_nearest: ZeroRecord,
    pub mirror_point: SPoint,
    pub mismatch: f64,
    /// `|beta - 1/2| < eta`: the zero is its own partner.
    pub self_paired: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
pub struct PairReport {
    pub pairs: Vec<ZeroPair>,
    /// Off-line zeros with no other zero to pair with.
    pub unpaired: Vec<ZeroRecord>,
}

impl PairReport {
    /// Pairs of zeros off the critical line.
    pub fn off_line(&self) -> impl Iterator<Item = &ZeroPair> {
        self.pairs.iter().filter(|p| !p.self_paired)
    }
}

/// Matches every zero to the zero nearest its mirror image `1 - conj(rho)`.
///
/// `scanned` is the rectangle the zeros were collected in; it must be closed under the
/// mirror map.
pub fn pair_scan(zeros: &[ZeroRecord], scanned: &RectBox, eta: f64) -> Result<PairReport> {
    let mirrored = scanned.mirror();
    let slack = 1e-9 * (1.0 + scanned.sigma_min.abs().max(scanned.sigma_max.abs()));
    if mirrored.sigma_min < scanned.sigma_min - slack || mirrored.sigma_max > scanned.sigma_max + slack {
        return Err(Error::IncompleteBox(format!("{scanned}")));
    }
    let mut report = PairReport::default();
    for (i, rho) in zeros.iter().enumerate() {
        let mirror_point = rho.location.mirror();
        if (rho.location.sigma - 0.5).abs() < eta {
            report.pairs.push(ZeroPair {
                rho: *rho,
                partner_nearest: *rho,
                mirror_point,
                mismatch: rho.location.dist(&mirror_point),
                self_paired: true,
            });
            continue;
        }
        let nearest = zeros
            .iter()
            .enumerate()
            .filter(|(j, _)| *j != i)
            .map(|(_, z)| (z, z.location.dist(&mirror_point)))
            .min_by(|a, b| a.1.total_cmp(&b.1));
        match nearest {
            Some((partner, mismatch)) => report.pairs.push(ZeroPair {
                rho: *rho,
                partner_nearest: *partner,
                mirror_point,
                mismatch,
                self_paired: false,
            }),
            None => report.unpaired.push(*rho),
        }
    }
    Ok(report)
}

/// A zero-free ring `inner < |s - rho| < outer`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Ring {
    pub inner: f64,
    pub outer: f64,
    pub ratio: f64,
}

/// The zero-free ring of largest ratio `outer / inner` with both radii on `radii`.
///
/// `zeros` may contain `rho` itself; zeros at distance below `1e-12` are ignored.
/// Returns a degenerate ring when every gap of the grid holds a zero.
pub fn annulus_scan(rho: &ZeroRecord, zeros: &[ZeroRecord], radii: &[f64]) -> Result<Ring> {
    let mut grid: Vec<f64> = radii.iter().copied().filter(|r| r.is_finite() && *r > 0.0).collect();
    if grid.is_empty() {
        return Err(Error::InvalidParams("no positive radii".into()));
    }
    grid.sort_by(f64::total_cmp);
    grid.dedup();
    let distances: Vec<f64> =
        zeros.iter().map(|z| z.location.dist(&rho.location)).filter(|d| *d >= 1e-12).collect();
    let free = |a: f64, b: f64| !distances.iter().any(|&d| d > a && d < b);
    let mut best = Ring { inner: grid[0], outer: grid[0], ratio: 1.0 };
    for (i, &inner) in grid.iter().enumerate() {
        for &outer in &grid[i + 1..] {
            if !free(inner, outer) {
                break;
            }
            let ratio = outer / inner;
            if ratio > best.ratio {
                best = Ring { inner, outer, ratio };
            }
        }
    }
    Ok(best)
}

/// `count` radii from `r_min` to `r_max` in geometric progression.
pub fn geometric_radii(r_min: f64, r_max: f64, count: usize) -> Vec<f64> {
    if count < 2 {
        return vec![r_min];
    }
    let q = (r_max / r_min).powf(1.0 / (count - 1) as f64);
    (0..count).map(|k| r_min * q.powi(k as i32)).collect()
}
