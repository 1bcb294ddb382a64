use alloc::string::String;
use alloc::vec::Vec;

use crate::multiindex::MultiIndex;

pub type Result<T, E = Error> = core::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("dimension mismatch: expected {expected}, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },

    #[error("axis {axis} out of range for dimension {dim}")]
    AxisOutOfRange { axis: usize, dim: usize },

    #[error("point {point:?} lies outside the {domain} domain")]
    OutsideDomain { point: Vec<f64>, domain: &'static str },

    #[error("model kind mismatch: expected {expected}, found {found}")]
    KindMismatch { expected: &'static str, found: &'static str },

    #[error("evaluator failed at lattice index {index}: {source}")]
    SampleFailed {
        index: MultiIndex,
        #[source]
        source: alloc::boxed::Box<Error>,
    },

    #[error("evaluator failed: {0}")]
    Evaluator(String),

    #[error("no analytic partial registered for order {0}")]
    MissingPartial(MultiIndex),
}

impl Error {
    pub(crate) fn precondition(msg: impl Into<String>) -> Self {
        Error::Precondition(msg.into())
    }
}
