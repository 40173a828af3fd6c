//! Lerch zeta-function `L(lambda, alpha, s) = sum_{m>=0} e^{2 pi i lambda m} (m + alpha)^{-s}`:
//! evaluation anywhere in the plane, zero counting and location, zero trajectories in
//! `lambda`, and zero statistics.

pub mod bernoulli;
pub mod census;
pub mod error;
pub mod eval;
pub mod gamma;
pub mod io;
pub mod locator;
pub mod trajectory;
pub mod types;

pub use error::{Error, Result};
pub use locator::{locate_zeros, nearest_zero_distance, refine_zero, winding, Edge, RectBox, WindingResult, ZeroRecord};
pub use eval::{dlambda_derivative, ds_derivative, fe_grid, fe_residual, hurwitz_zeta, lerch, lerch_direct, lerch_em, lerch_fe, lerch_rational};
pub use trajectory::{detect_line_crossings, trace_L_zero, trace_Lprime_zero, StepControl, TraceFailure, Trajectory};
pub use types::{EvalResult, Kind, Method, Params, PrecisionPolicy, SPoint};
