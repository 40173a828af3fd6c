use std::f64::consts::{FRAC_PI_2, TAU};

use num_complex::Complex64;

use super::{Edge, Func, RectBox, WindingResult};
use crate::error::{Error, Result};
use crate::types::{Kind, Params, PrecisionPolicy};

/// Kronrod abscissae on `[0, 1]`, outermost first; odd indices are the Gauss nodes.
const XK: [f64; 8] = [
    0.991_455_371_120_812_639_206_854_697_526_329,
    0.949_107_912_342_758_524_526_189_684_047_851,
    0.864_864_423_359_769_072_789_712_788_640_926,
    0.741_531_185_599_394_439_863_864_773_280_788,
    0.586_087_235_467_691_130_294_144_845_693_013,
    0.405_845_151_377_397_166_906_606_412_076_961,
    0.207_784_955_007_898_467_600_689_403_773_245,
    0.0,
];
const WK: [f64; 8] = [
    0.022_935_322_010_529_224_963_732_008_058_970,
    0.063_092_092_629_978_553_290_700_663_189_204,
    0.104_790_010_322_250_183_839_876_322_541_518,
    0.140_653_259_715_525_918_745_189_590_510_238,
    0.169_004_726_639_267_902_826_583_426_598_550,
    0.190_350_578_064_785_409_913_256_402_421_014,
    0.204_432_940_075_298_892_414_161_999_234_649,
    0.209_482_141_084_727_828_012_999_174_891_714,
];
const WG: [f64; 4] = [
    0.129_484_966_168_869_693_270_611_432_679_082,
    0.279_705_391_489_276_667_901_467_771_423_780,
    0.381_830_050_505_118_944_950_369_775_488_975,
    0.417_959_183_673_469_387_755_102_040_816_327,
];

/// Boundary modulus below which a zero is taken to lie on the contour.
const BOUNDARY_MODULUS: f64 = 1e-9;
/// Bound on the Gauss/Kronrod gap per unit of edge parameter; the Kronrod sum kept
/// is several orders more accurate than the gap.
const QUAD_TOL: f64 = 1e-6;
const MIN_PIECE: f64 = 1e-12;
/// Largest admissible distance of the winding integral from an integer.
const INTEGRALITY: f64 = 0.25;

#[derive(Debug, Clone, Copy)]
struct Piece {
    lo: f64,
    hi: f64,
    f_lo: Complex64,
    f_hi: Complex64,
}

#[derive(Debug, Default, Clone, Copy)]
struct EdgeIntegral {
    log: Complex64,
    moment: Complex64,
    phase: f64,
    min_modulus: f64,
}

/// Counts zeros of `L` or `L'` inside `rect` by the argument principle.
///
/// Each edge is integrated by adaptive 7/15-point Gauss-Kronrod; a piece is split
/// whenever the phase of `f` moves by more than `pi/2` between neighbouring nodes.
/// The count must agree with the unwrapped phase change.
pub fn winding(rect: &RectBox, kind: Kind, params: Params, policy: &PrecisionPolicy) -> Result<WindingResult> {
    let rect = RectBox::new(rect.sigma_min, rect.sigma_max, rect.t_min, rect.t_max)?;
    if params.has_pole() && rect.contains_closed(crate::types::SPoint::new(1.0, 0.0)) {
        return Err(Error::InvalidBox(format!("{rect} contains the pole at s = 1")));
    }
    let func = Func::new(kind, params, policy)?;
    winding_of(&func, &rect)
}

pub(crate) fn winding_of(func: &Func, rect: &RectBox) -> Result<WindingResult> {
    let mut total = EdgeIntegral { min_modulus: f64::INFINITY, ..Default::default() };
    for edge in [Edge::Bottom, Edge::Right, Edge::Top, Edge::Left] {
        let part = edge_integral(func, rect, edge)?;
        total.log += part.log;
        total.moment += part.moment;
        total.phase += part.phase;
        total.min_modulus = total.min_modulus.min(part.min_modulus);
    }
    let two_pi_i = Complex64::new(0.0, TAU);
    let winding = total.log / two_pi_i;
    let rounded = winding.re.round();
    if (winding - rounded).norm() > INTEGRALITY || rounded < 0.0 {
        return Err(Error::NonIntegerWinding(winding.re));
    }
    let by_phase = (total.phase / TAU).round();
    if by_phase != rounded {
        log::debug!("winding {winding} disagrees with phase count {by_phase} on {rect}");
        return Err(Error::NonIntegerWinding(winding.re));
    }
    Ok(WindingResult {
        count: rounded as usize,
        zero_sum: total.moment / two_pi_i,
        edge_min_modulus: total.min_modulus,
    })
}

fn edge_integral(func: &Func, rect: &RectBox, edge: Edge) -> Result<EdgeIntegral> {
    let (a, b) = rect.edge_ends(edge);
    let dz = b - a;
    let at = |u: f64| a + dz * u;
    let value = |u: f64| -> Result<Complex64> { func.value(at(u)) };
    let mut out = EdgeIntegral { min_modulus: f64::INFINITY, ..Default::default() };
    let mut stack = vec![Piece { lo: 0.0, hi: 1.0, f_lo: value(0.0)?, f_hi: value(1.0)? }];
    let on_boundary = |modulus: f64| Error::ZeroOnBoundary { edge, modulus };
    while let Some(piece) = stack.pop() {
        let (lo, hi) = (piece.lo, piece.hi);
        out.min_modulus = out.min_modulus.min(piece.f_lo.norm()).min(piece.f_hi.norm());
        if out.min_modulus < BOUNDARY_MODULUS {
            return Err(on_boundary(out.min_modulus));
        }
        let mid = 0.5 * (lo + hi);
        let half = 0.5 * (hi - lo);
        // nodes in increasing order of u
        let mut us = [0.0; 15];
        for (k, x) in XK.iter().enumerate() {
            us[k] = mid - half * x;
            us[14 - k] = mid + half * x;
        }
        let mut fs = [Complex64::new(0.0, 0.0); 15];
        let mut logd = [Complex64::new(0.0, 0.0); 15];
        for k in 0..15 {
            let (f, df) = func.value_and_derivative(at(us[k]))?;
            out.min_modulus = out.min_modulus.min(f.norm());
            fs[k] = f;
            logd[k] = df / f;
        }
        if out.min_modulus < BOUNDARY_MODULUS {
            return Err(on_boundary(out.min_modulus));
        }
        let mut chain = Vec::with_capacity(17);
        chain.push(piece.f_lo);
        chain.extend_from_slice(&fs);
        chain.push(piece.f_hi);
        let steps: Vec<f64> = chain.windows(2).map(|w| (w[1] / w[0]).arg()).collect();
        let jumpy = steps.iter().any(|d| d.abs() > FRAC_PI_2);

        let zero = Complex64::new(0.0, 0.0);
        let (mut k0, mut g0, mut k1, mut g1) = (zero, zero, zero, zero);
        for k in 0..15 {
            // node k in increasing-u order sits at abscissa index j
            let j = if k < 8 { k } else { 14 - k };
            let wg = if j % 2 == 1 { WG[j / 2] } else { 0.0 };
            let moment = at(us[k]) * logd[k];
            k0 += WK[j] * logd[k];
            g0 += wg * logd[k];
            k1 += WK[j] * moment;
            g1 += wg * moment;
        }
        let scale = half * dz;
        let (int0, int1) = (k0 * scale, k1 * scale);
        let err0 = ((k0 - g0) * scale).norm();
        let err1 = ((k1 - g1) * scale).norm();
        let width = hi - lo;
        let tol0 = QUAD_TOL * width;
        let tol1 = QUAD_TOL * width * at(mid).norm().max(1.0);
        let accurate = err0 <= tol0 && err1 <= tol1 && int0.re.is_finite() && int0.im.is_finite();
        if !jumpy && accurate {
            out.log += int0;
            out.moment += int1;
            out.phase += steps.iter().sum::<f64>();
            continue;
        }
        if width < MIN_PIECE {
            return Err(on_boundary(out.min_modulus));
        }
        let f_mid = fs[7];
        stack.push(Piece { lo, hi: mid, f_lo: piece.f_lo, f_hi: f_mid });
        stack.push(Piece { lo: mid, hi, f_lo: f_mid, f_hi: piece.f_hi });
    }
    Ok(out)
}
