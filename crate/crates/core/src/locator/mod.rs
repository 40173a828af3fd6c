//! Argument-principle zero counting, Muller refinement and recursive zero location.

mod func;
mod locate;
mod muller;
mod winding;

use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::types::{Kind, SPoint};

pub(crate) use func::Func;
pub(crate) use locate::nudged_winding;
pub use locate::{locate_zeros, nearest_zero_distance, MAX_HEIGHT, REAL_AXIS_LIFT};
pub use muller::refine_zero;
pub use winding::winding;
pub(crate) use winding::winding_of;

/// A side of a rectangle, walked counter-clockwise.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Edge {
    Bottom,
    Right,
    Top,
    Left,
}

/// Axis-aligned rectangle `[sigma_min, sigma_max] x [t_min, t_max]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RectBox {
    pub sigma_min: f64,
    pub sigma_max: f64,
    pub t_min: f64,
    pub t_max: f64,
}

impl RectBox {
    pub fn new(sigma_min: f64, sigma_max: f64, t_min: f64, t_max: f64) -> Result<Self> {
        let all_finite = [sigma_min, sigma_max, t_min, t_max].iter().all(|v| v.is_finite());
        if !all_finite || sigma_min >= sigma_max || t_min >= t_max {
            return Err(Error::InvalidBox(format!("[{sigma_min}, {sigma_max}] x [{t_min}, {t_max}]")));
        }
        Ok(Self { sigma_min, sigma_max, t_min, t_max })
    }

    pub fn width(&self) -> f64 {
        self.sigma_max - self.sigma_min
    }

    pub fn height(&self) -> f64 {
        self.t_max - self.t_min
    }

    pub fn center(&self) -> SPoint {
        SPoint::new(0.5 * (self.sigma_min + self.sigma_max), 0.5 * (self.t_min + self.t_max))
    }

    /// Strict interior.
    pub fn contains(&self, s: SPoint) -> bool {
        s.sigma > self.sigma_min && s.sigma < self.sigma_max && s.t > self.t_min && s.t < self.t_max
    }

    /// Closed rectangle.
    pub fn contains_closed(&self, s: SPoint) -> bool {
        s.sigma >= self.sigma_min && s.sigma <= self.sigma_max && s.t >= self.t_min && s.t <= self.t_max
    }

    /// Start and end of an edge, counter-clockwise.
    pub fn edge_ends(&self, edge: Edge) -> (Complex64, Complex64) {
        let c = Complex64::new;
        match edge {
            Edge::Bottom => (c(self.sigma_min, self.t_min), c(self.sigma_max, self.t_min)),
            Edge::Right => (c(self.sigma_max, self.t_min), c(self.sigma_max, self.t_max)),
            Edge::Top => (c(self.sigma_max, self.t_max), c(self.sigma_min, self.t_max)),
            Edge::Left => (c(self.sigma_min, self.t_max), c(self.sigma_min, self.t_min)),
        }
    }

    /// The same box with one edge moved outward by `1e-6 (1 + |t|)`.
    pub fn expand(&self, edge: Edge) -> RectBox {
        let t = self.t_min.abs().max(self.t_max.abs());
        let mut out = *self;
        match edge {
            Edge::Bottom => out.t_min -= 1e-6 * (1.0 + self.t_min.abs()),
            Edge::Top => out.t_max += 1e-6 * (1.0 + self.t_max.abs()),
            Edge::Left => out.sigma_min -= 1e-6 * (1.0 + t),
            Edge::Right => out.sigma_max += 1e-6 * (1.0 + t),
        }
        out
    }

    /// Both halves of a split at `fraction` of the longer side.
    pub fn split(&self, fraction: f64) -> (RectBox, RectBox) {
        let mut a = *self;
        let mut b = *self;
        if self.width() > self.height() {
            let cut = self.sigma_min + fraction * self.width();
            a.sigma_max = cut;
            b.sigma_min = cut;
        } else {
            let cut = self.t_min + fraction * self.height();
            a.t_max = cut;
            b.t_min = cut;
        }
        (a, b)
    }

    /// Reflection in the critical line, `s -> 1 - conj(s)` applied to the rectangle.
    pub fn mirror(&self) -> RectBox {
        RectBox { sigma_min: 1.0 - self.sigma_max, sigma_max: 1.0 - self.sigma_min, ..*self }
    }
}

impl fmt::Display for RectBox {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{},{},{},{}", self.sigma_min, self.sigma_max, self.t_min, self.t_max)
    }
}

impl FromStr for RectBox {
    type Err = Error;

    /// `"sigma_min,sigma_max,t_min,t_max"`.
    fn from_str(text: &str) -> Result<Self> {
        let parts: Vec<&str> = text.split(',').map(str::trim).collect();
        if parts.len() != 4 {
            return Err(Error::InvalidBox(format!("expected four comma-separated numbers, got {text:?}")));
        }
        let mut v = [0.0; 4];
        for (slot, part) in v.iter_mut().zip(&parts) {
            // accept the unicode minus sign as well
            *slot = part.replace('\u{2212}', "-").parse().map_err(|_| Error::InvalidBox(format!("bad number {part:?}")))?;
        }
        RectBox::new(v[0], v[1], v[2], v[3])
    }
}

/// Outcome of the argument-principle integrals around a rectangle.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WindingResult {
    /// Zeros inside, counted with multiplicity.
    pub count: usize,
    /// `(1/2 pi i) \oint s f'/f ds`, the sum of the enclosed zeros.
    #[serde(with = "crate::types::complex_object")]
    pub zero_sum: Complex64,
    /// Smallest `|f|` seen on the contour.
    pub edge_min_modulus: f64,
}

/// A refined zero of `L` or `L'`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ZeroRecord {
    pub location: SPoint,
    pub kind: Kind,
    /// `|f(location)|`.
    pub residual: f64,
    pub multiplicity: u32,
    /// The rectangle the zero was isolated in.
    pub provenance: RectBox,
    pub refine_iters: usize,
}
