//! Error taxonomy shared by the engine and the CLI.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum DdError {
    #[error("preset-not-found: no equation preset named `{0}`")]
    PresetNotFound(String),

    #[error("invalid-symbol: {0}")]
    InvalidSymbol(String),

    #[error("multiplier-singularity: {context} is non-finite at xi = {xi}")]
    MultiplierSingularity { context: String, xi: f64 },

    #[error("positivity-violation: {0}")]
    PositivityViolation(String),

    #[error("mean-mode-error: inverting the gradient weight requires a mean-zero field (|c_0| = {c0_abs}, allowed {allowed})")]
    MeanMode { c0_abs: f64, allowed: f64 },

    #[error("overflow: state became non-finite at t = {t}")]
    Overflow { t: f64 },

    #[error("contraction-failure: fixed-point iteration did not converge at t = {t} after {iterations} iterations (reduce dt)")]
    ContractionFailure { t: f64, iterations: usize },

    #[error("config error at line {line}: {msg}")]
    Config { line: usize, msg: String },

    #[error("ingestion error: {0}")]
    Ingestion(String),

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, DdError>;

impl DdError {
    /// Stable machine-readable tag, used in summaries and test assertions.
    pub fn kind(&self) -> &'static str {
        match self {
            DdError::PresetNotFound(_) => "preset-not-found",
            DdError::InvalidSymbol(_) => "invalid-symbol",
            DdError::MultiplierSingularity { .. } => "multiplier-singularity",
            DdError::PositivityViolation(_) => "positivity-violation",
            DdError::MeanMode { .. } => "mean-mode-error",
            DdError::Overflow { .. } => "overflow",
            DdError::ContractionFailure { .. } => "contraction-failure",
            DdError::Config { .. } => "config-error",
            DdError::Ingestion(_) => "ingestion-error",
            DdError::Io(_) => "io-error",
        }
    }
}
