//! Scaled Bernoulli numbers `B_2k / (2k)!`.
//!
//! Computed once from `B_2k / (2k)! = (-1)^(k+1) * 2 * zeta(2k) / (2 pi)^2k`, which stays
//! well inside binary64 range for every stored order.

use std::f64::consts::{PI, TAU};
use std::sync::OnceLock;

pub const MAX_ORDER: usize = 60;

/// `scaled(k) = B_2k / (2k)!` for `k = 1..=MAX_ORDER`.
pub fn scaled(k: usize) -> f64 {
    assert!((1..=MAX_ORDER).contains(&k), "Bernoulli order {k} out of range");
    table()[k - 1]
}

fn table() -> &'static [f64] {
    static TABLE: OnceLock<Vec<f64>> = OnceLock::new();
    TABLE.get_or_init(|| {
        (1..=MAX_ORDER)
            .map(|k| {
                let sign = if k % 2 == 1 { 1.0 } else { -1.0 };
                sign * 2.0 * zeta_even(k) / TAU.powi(2 * k as i32)
            })
            .collect()
    })
}

fn zeta_even(k: usize) -> f64 {
    if k == 1 {
        return PI * PI / 6.0;
    }
    let p = (2 * k) as f64;
    let cut = 1000usize;
    // summed from the small terms up to limit rounding
    let mut sum = 0.0;
    for n in (1..cut).rev() {
        sum += (n as f64).powf(-p);
    }
    let c = cut as f64;
    sum + c.powf(1.0 - p) / (p - 1.0) + 0.5 * c.powf(-p) + p * c.powf(-p - 1.0) / 12.0
}
