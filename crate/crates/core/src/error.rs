use thiserror::Error;

/// Errors shared across the library.
#[derive(Debug, Error)]
pub enum Error {
    /// log-gamma evaluated at a pole (non-positive real integer).
    #[error("log_gamma pole at z = {0}")]
    GammaPole(f64),

    /// An argument fell outside the mathematical domain of an operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// Re(z) lies outside the open strip of holomorphy.
    #[error("Re(z) = {re} outside holomorphy strip ({lower}, {upper})")]
    OutsideStrip { re: f64, lower: f64, upper: f64 },

    /// Kernel or distribution parameters violate their constraints.
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    /// A distribution name not present in the catalog.
    #[error("unknown distribution: {0}")]
    UnknownDistribution(String),

    /// A requested moment does not exist (CV condition of the kernel family).
    #[error("moment does not exist: {0}")]
    MomentDoesNotExist(String),

    /// The plug-in selector's curvature estimate is degenerate (e.g. all
    /// observations equal), so no finite bandwidth can be derived.
    #[error("degenerate curvature estimate; cannot select a bandwidth")]
    DegenerateCurvature,

    /// One of the oracle integrals diverges for the requested density.
    #[error("divergent integral: {0}")]
    DivergentIntegral(String),

    /// A sample failed validation.
    #[error("invalid sample: {0}")]
    InvalidSample(String),
}

pub type Result<T> = std::result::Result<T, Error>;
