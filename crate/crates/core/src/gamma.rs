//! Complex log-gamma by shifted Stirling series with reflection.

use std::f64::consts::PI;

use num_complex::Complex64;

const LN_SQRT_2PI: f64 = 0.918_938_533_204_672_8;

// B_2k / (2k (2k - 1)) for k = 1..=10
const STIRLING: [f64; 10] = [
    1.0 / 12.0,
    -1.0 / 360.0,
    1.0 / 1260.0,
    -1.0 / 1680.0,
    1.0 / 1188.0,
    -691.0 / 360_360.0,
    1.0 / 156.0,
    -3617.0 / 122_400.0,
    43867.0 / 244_188.0,
    -174_611.0 / 125_400.0,
];

/// `ln Gamma(z)` up to an additive multiple of `2 pi i`, so `exp` of it is exact.
///
/// Returns `None` at the poles `z = 0, -1, -2, ...`.
pub fn ln_gamma(z: Complex64) -> Option<Complex64> {
    if z.im < 0.0 {
        return ln_gamma(z.conj()).map(|w| w.conj());
    }
    if z.re < 0.5 {
        if z.im == 0.0 && z.re == z.re.round() {
            return None;
        }
        // Gamma(z) Gamma(1 - z) = pi / sin(pi z)
        return Some(Complex64::new(PI.ln(), 0.0) - ln_sin_pi(z) - ln_gamma(1.0 - z)?);
    }
    let mut w = z;
    let mut shift = Complex64::new(0.0, 0.0);
    let mut prod = Complex64::new(1.0, 0.0);
    while w.norm() < 16.0 {
        prod *= w;
        if prod.norm() > 1e200 {
            shift += prod.ln();
            prod = Complex64::new(1.0, 0.0);
        }
        w += 1.0;
    }
    shift += prod.ln();
    Some(stirling(w) - shift)
}

/// `Gamma(z)`; `None` at poles or when the value overflows.
pub fn gamma(z: Complex64) -> Option<Complex64> {
    let w = ln_gamma(z)?;
    if w.re > 709.0 {
        None
    } else {
        Some(w.exp())
    }
}

fn stirling(w: Complex64) -> Complex64 {
    let inv = w.inv();
    let inv2 = inv * inv;
    let mut series = Complex64::new(0.0, 0.0);
    let mut pow = inv;
    for c in STIRLING {
        series += c * pow;
        pow *= inv2;
    }
    (w - 0.5) * w.ln() - w + LN_SQRT_2PI + series
}

/// `ln sin(pi z)` for `Im z >= 0` without overflowing at large imaginary part.
fn ln_sin_pi(z: Complex64) -> Complex64 {
    let i = Complex64::i();
    // sin(pi z) = (i/2) e^{-i pi z} (1 - e^{2 i pi z})
    let small = (2.0 * i * PI * z).exp();
    -i * PI * z + (1.0 - small).ln() + Complex64::new(0.5f64.ln(), PI / 2.0)
}
