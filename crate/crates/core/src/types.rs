//! Domain types shared by the evaluators, the zero locator and the tracer.

use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// The parameter pair `(lambda, alpha)` of `L(lambda, alpha, s)`, both in `(0, 1]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Params {
    lambda: f64,
    alpha: f64,
}

impl Params {
    pub fn new(lambda: f64, alpha: f64) -> Result<Self> {
        for (name, v) in [("lambda", lambda), ("alpha", alpha)] {
            if !(v.is_finite() && v > 0.0 && v <= 1.0) {
                return Err(Error::InvalidParams(format!("{name} = {v} is outside (0, 1]")));
            }
        }
        Ok(Self { lambda, alpha })
    }

    /// `L(lambda, lambda, s)`, the equal-parameter family.
    pub fn equal(lambda: f64) -> Result<Self> {
        Self::new(lambda, lambda)
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn is_equal(&self) -> bool {
        self.lambda == self.alpha
    }

    /// Only `lambda = 1` (the Hurwitz case) carries the pole at `s = 1`.
    pub fn has_pole(&self) -> bool {
        self.lambda == 1.0
    }
}

/// A point `s = sigma + i t`, serialized as `{"re": sigma, "im": t}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SPoint {
    #[serde(rename = "re")]
    pub sigma: f64,
    #[serde(rename = "im")]
    pub t: f64,
}

impl SPoint {
    pub fn new(sigma: f64, t: f64) -> Self {
        Self { sigma, t }
    }

    pub fn z(&self) -> Complex64 {
        Complex64::new(self.sigma, self.t)
    }

    pub fn is_finite(&self) -> bool {
        self.sigma.is_finite() && self.t.is_finite()
    }

    pub fn dist(&self, other: &SPoint) -> f64 {
        (self.z() - other.z()).norm()
    }

    /// `1 - conj(s)`: reflection in the critical line.
    pub fn mirror(&self) -> SPoint {
        SPoint::new(1.0 - self.sigma, self.t)
    }
}

impl From<Complex64> for SPoint {
    fn from(z: Complex64) -> Self {
        Self::new(z.re, z.im)
    }
}

impl From<SPoint> for Complex64 {
    fn from(s: SPoint) -> Self {
        s.z()
    }
}

impl fmt::Display for SPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.t.is_sign_negative() {
            write!(f, "{}-{}i", self.sigma, -self.t)
        } else {
            write!(f, "{}+{}i", self.sigma, self.t)
        }
    }
}

impl FromStr for SPoint {
    type Err = Error;

    /// Accepts `a+bi`, `a-bi`, `a`, `bi`, with optional whitespace.
    fn from_str(text: &str) -> Result<Self> {
        let bad = || Error::DomainError(format!("cannot parse complex number {text:?}"));
        let compact: String = text.chars().filter(|c| !c.is_whitespace()).collect();
        if compact.is_empty() {
            return Err(bad());
        }
        let Some(body) = compact.strip_suffix(['i', 'j']) else {
            let sigma: f64 = compact.parse().map_err(|_| bad())?;
            return Ok(SPoint::new(sigma, 0.0));
        };
        // split at the last sign that is not part of an exponent or the leading sign
        let bytes = body.as_bytes();
        let mut split = None;
        for k in (1..bytes.len()).rev() {
            if (bytes[k] == b'+' || bytes[k] == b'-') && !matches!(bytes[k - 1], b'e' | b'E') {
                split = Some(k);
                break;
            }
        }
        let parse_imag = |s: &str| -> Result<f64> {
            match s {
                "" | "+" => Ok(1.0),
                "-" => Ok(-1.0),
                _ => s.parse().map_err(|_| bad()),
            }
        };
        let (sigma, t) = match split {
            Some(k) => (body[..k].parse().map_err(|_| bad())?, parse_imag(&body[k..])?),
            None => (0.0, parse_imag(body)?),
        };
        let s = SPoint::new(sigma, t);
        if s.is_finite() {
            Ok(s)
        } else {
            Err(bad())
        }
    }
}

/// Which function a zero belongs to: `L(lambda, lambda, s)` or its s-derivative.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Kind {
    L,
    Lprime,
}

impl FromStr for Kind {
    type Err = Error;

    fn from_str(text: &str) -> Result<Self> {
        match text {
            "L" | "l" => Ok(Kind::L),
            "Lprime" | "lprime" | "L'" | "dL" => Ok(Kind::Lprime),
            _ => Err(Error::DomainError(format!("unknown kind {text:?} (expected L or Lprime)"))),
        }
    }
}

impl fmt::Display for Kind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Kind::L => "L",
            Kind::Lprime => "Lprime",
        })
    }
}

/// Accuracy knobs for every evaluator.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct PrecisionPolicy {
    /// Mixed tolerance: errors are compared against `target_tol * max(1, |value|)`.
    pub target_tol: f64,
    /// The Dirichlet series is summed directly only for `sigma >= 1 + series_margin`.
    pub series_margin: f64,
    /// Euler-Maclaurin term count `N = max(em_min_terms, ceil(em_terms_coeff * (|t| + 10)))`.
    pub em_terms_coeff: f64,
    pub em_min_terms: usize,
    /// Maximum number of Bernoulli corrections.
    pub em_order: usize,
    /// Radius and node count of the Cauchy circles used for s-derivatives.
    pub cauchy_radius: f64,
    pub cauchy_nodes: usize,
    /// Finite-difference step in lambda.
    pub lambda_fd_step: f64,
    /// Number of N -> 2N escalations before giving up.
    pub max_escalations: u32,
}

impl Default for PrecisionPolicy {
    fn default() -> Self {
        Self {
            target_tol: 1e-10,
            series_margin: 0.5,
            em_terms_coeff: 2.0,
            em_min_terms: 64,
            em_order: 40,
            cauchy_radius: 0.05,
            cauchy_nodes: 32,
            lambda_fd_step: 1e-6,
            max_escalations: 4,
        }
    }
}

impl PrecisionPolicy {
    pub fn validate(&self) -> Result<()> {
        let positive = [
            ("target_tol", self.target_tol),
            ("series_margin", self.series_margin),
            ("em_terms_coeff", self.em_terms_coeff),
            ("cauchy_radius", self.cauchy_radius),
            ("lambda_fd_step", self.lambda_fd_step),
        ];
        for (name, v) in positive {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::InvalidParams(format!("{name} must be positive, got {v}")));
            }
        }
        if self.em_min_terms == 0 || self.em_order == 0 || self.cauchy_nodes < 4 {
            return Err(Error::InvalidParams("term counts must be positive".into()));
        }
        if self.em_order >= crate::bernoulli::MAX_ORDER {
            return Err(Error::InvalidParams(format!(
                "em_order {} exceeds the {} stored Bernoulli numbers",
                self.em_order,
                crate::bernoulli::MAX_ORDER
            )));
        }
        Ok(())
    }

    pub(crate) fn scaled_tol(&self, value: Complex64) -> f64 {
        self.target_tol * value.norm().max(1.0)
    }
}

/// Which algorithm produced a value.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Method {
    DirectSeries,
    EulerMaclaurin,
    RationalHurwitz,
    FunctionalEquation,
}

/// Serializes a complex number as `{"re": .., "im": ..}`.
pub mod complex_object {
    use num_complex::Complex64;
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    #[derive(Serialize, Deserialize)]
    struct ReIm {
        re: f64,
        im: f64,
    }

    pub fn serialize<S: Serializer>(z: &Complex64, serializer: S) -> Result<S::Ok, S::Error> {
        ReIm { re: z.re, im: z.im }.serialize(serializer)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(deserializer: D) -> Result<Complex64, D::Error> {
        let ReIm { re, im } = ReIm::deserialize(deserializer)?;
        Ok(Complex64::new(re, im))
    }
}

/// A value together with an a-posteriori error bound.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EvalResult {
    #[serde(with = "complex_object")]
    pub value: Complex64,
    pub err_estimate: f64,
    pub method: Method,
    /// How many times the term count was doubled before the tolerance was met.
    pub escalations: u32,
}
