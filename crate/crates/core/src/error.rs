use thiserror::Error;

/// Errors raised by the simulator.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("dimension mismatch in {context}: expected {expected}, found {found}")]
    DimensionMismatch {
        context: &'static str,
        expected: usize,
        found: usize,
    },

    #[error("waveform matrix is rank deficient after {attempts} draws")]
    RankDeficient { attempts: u32 },

    #[error("no candidate grid step reaches the correlation threshold {threshold}")]
    NoFeasibleStep { threshold: f64 },

    #[error("estimate is identically zero; nothing to refine")]
    NoDetection,

    #[error("linear system could not be factorized: {0}")]
    Numerical(String),

    #[error("invalid scenario configuration:\n  - {}", .0.join("\n  - "))]
    Config(Vec<String>),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidParameter(msg.into())
}
