use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// Argument outside the mathematical domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// A root search could not establish a sign-change bracket. Never expected
    /// for valid inputs; surfaced instead of returning an unchecked value.
    #[error("failed to bracket zero {index} of {order}")]
    Bracket { order: String, index: usize },

    #[error("operation not supported for this domain: {0}")]
    Unsupported(String),

    #[error("incompatible inputs: {0}")]
    Mismatch(String),

    /// The spectrum does not reach far enough to certify the requested
    /// accuracy. Carries the minimal adequate cutoff.
    #[error("spectrum cutoff {cutoff:e} is insufficient; at least {required:e} is needed")]
    CutoffInsufficient { cutoff: f64, required: f64 },

    /// The counting function exceeds the envelope used to bound heat-trace
    /// tails, so no tail can be certified.
    #[error("counting function reaches {ratio:.3} x the Weyl term, above the certified factor 2")]
    MajorantViolated { ratio: f64 },

    /// A heat-trace sample is not accurate enough for the requested use.
    #[error("tail bound at t = {t:e} is {relative:e} of the trace, above the allowed {limit:e}")]
    TailTooLarge { t: f64, relative: f64, limit: f64 },

    #[error("query {tau:e} exceeds the spectrum cutoff {cutoff:e}")]
    BeyondCutoff { tau: f64, cutoff: f64 },

    #[error("matrix is not positive definite")]
    NotPositiveDefinite,

    #[error("eigensolver did not converge: {0}")]
    NoConvergence(String),

    #[error("ill-conditioned least-squares design (condition {0:e})")]
    IllConditioned(f64),

    #[error("insufficient samples: {0}")]
    InsufficientSamples(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error("io error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}
