//! Crate-wide error type.

use ndarray::Array2;
use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("covariance not positive semi-definite: min eigenvalue {min_eigenvalue:.3e} exceeds clip tolerance {tolerance:.3e}")]
    NotPositiveSemiDefinite { min_eigenvalue: f64, tolerance: f64 },

    #[error("quantile u = {u} outside (0, 1): the algebraic-sigmoid law has unbounded support")]
    UnboundedSupport { u: f64 },

    #[error("amplifier argument a = {a} outside the open interval (-1, 1)")]
    AmplifierDomain { a: f64 },

    #[error("Taylor surrogate undefined: fourth moment of the alg_{k} marginal diverges")]
    UndefinedSurrogate { k: f64 },

    #[error("{what} of the alg_{k} marginal diverges")]
    DivergentMoment { what: &'static str, k: f64 },

    #[error("zero vector has no normalized direction")]
    ZeroVector,

    #[error(
        "amplifier argument clamped on {clamped}/{n} coordinates at step {step}; \
         the early-time flow model has broken down"
    )]
    FlowDomainBreach { step: usize, clamped: usize, n: usize },

    #[error("class-1 covariance eigenvalue {index} is zero; eigenvalue ratios are degenerate")]
    DegenerateSpectrum { index: usize },

    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),

    #[error("non-finite loss {loss} at training step {step}")]
    NonFiniteLoss {
        step: usize,
        loss: f64,
        /// First-layer weights at the moment of the blow-up.
        snapshot: Box<Array2<f64>>,
    },

    #[error("sample covariance is rank deficient; cannot whiten")]
    RankDeficient,

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("config error: {0}")]
    Config(String),

    #[error("unknown experiment id {0:?}")]
    UnknownExperiment(String),

    #[error("unsupported schema line: {0}")]
    Schema(String),

    #[error("nothing to plot: {0}")]
    EmptyReport(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    /// Short machine-readable code, printed by the CLI on failure.
    pub fn code(&self) -> &'static str {
        match self {
            Error::NotPositiveSemiDefinite { .. } => "not-psd",
            Error::UnboundedSupport { .. } => "unbounded-support",
            Error::AmplifierDomain { .. } => "amplifier-domain",
            Error::UndefinedSurrogate { .. } => "undefined-surrogate",
            Error::DivergentMoment { .. } => "divergent-moment",
            Error::ZeroVector => "zero-vector",
            Error::FlowDomainBreach { .. } => "flow-domain-breach",
            Error::DegenerateSpectrum { .. } => "degenerate-spectrum",
            Error::ShapeMismatch(_) => "shape-mismatch",
            Error::NonFiniteLoss { .. } => "non-finite-loss",
            Error::RankDeficient => "rank-deficient",
            Error::InvalidParameter(_) => "invalid-parameter",
            Error::Config(_) => "config",
            Error::UnknownExperiment(_) => "unknown-experiment",
            Error::Schema(_) => "schema",
            Error::EmptyReport(_) => "empty-report",
            Error::Io(_) => "io",
        }
    }
}
