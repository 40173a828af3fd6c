use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::eval::{jet, jet_with};
use crate::eval::kernel::{Kernel, Route, Target};
use crate::types::{Kind, Params, PrecisionPolicy};

/// Circle nodes for the logarithmic derivative on contours.
const CONTOUR_NODES: usize = 16;

/// The function whose zeros are sought: `L` or `dL/ds`, with its derivative.
#[derive(Debug, Clone)]
pub(crate) struct Func {
    pub kind: Kind,
    target: Target,
    policy: PrecisionPolicy,
}

impl Func {
    pub fn new(kind: Kind, params: Params, policy: &PrecisionPolicy) -> Result<Self> {
        policy.validate()?;
        Ok(Self { kind, target: Target::new(params.lambda(), params.alpha()), policy: policy.clone() })
    }

    pub fn value(&self, s: Complex64) -> Result<Complex64> {
        match self.kind {
            Kind::L => {
                let kernel = Kernel::plan(self.target, s, 0.0, &self.policy, Route::Auto)?;
                let sample = kernel.eval(s);
                if !(sample.value.re.is_finite() && sample.value.im.is_finite()) {
                    return Err(Error::PrecisionLoss(format!("non-finite value at {s}")));
                }
                Ok(sample.value)
            }
            Kind::Lprime => Ok(jet(self.target, s, &self.policy)?.d[1]),
        }
    }

    /// `(f, f')`.
    pub fn value_and_derivative(&self, s: Complex64) -> Result<(Complex64, Complex64)> {
        let nodes = CONTOUR_NODES.min(self.policy.cauchy_nodes);
        let j = jet_with(self.target, s, &self.policy, nodes)?;
        Ok(match self.kind {
            Kind::L => (j.d[0], j.d[1]),
            Kind::Lprime => (j.d[1], j.d[2]),
        })
    }
}
