use thiserror::Error;

/// Errors produced by the distribution, special-function and estimation code.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid angle: {0} is not finite")]
    InvalidAngle(f64),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("accuracy loss: {0}")]
    AccuracyLoss(String),

    #[error("quadrature did not converge (estimate {estimate}, error bound {error_bound})")]
    NoConvergence { estimate: f64, error_bound: f64 },

    #[error("empty sample")]
    EmptySample,

    #[error("degenerate sample: {0}")]
    DegenerateSample(String),

    #[error("mean direction undefined: resultant length is zero")]
    DirectionUndefined,

    #[error(
        "concentration not identifiable: intrinsic variance {variance} is at or above the uniform limit pi^2/3"
    )]
    GammaNotIdentifiable { variance: f64 },
}

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    /// True for the errors that describe a sample the estimators cannot handle,
    /// as opposed to bad arguments or numerical failures.
    pub fn is_estimation_error(&self) -> bool {
        matches!(
            self,
            Error::EmptySample
                | Error::DegenerateSample(_)
                | Error::DirectionUndefined
                | Error::GammaNotIdentifiable { .. }
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;
