use thiserror::Error;

use crate::grid::FreqIndex;

pub type Result<T, E = EvwError> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum EvwError {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    /// Detection produced nothing to partition with. `diagnostics` is a dump
    /// of the maxima tracks that were examined.
    #[error("no meaningful modes detected ({reason})\n{diagnostics}")]
    NoModes { reason: String, diagnostics: String },

    #[error(
        "frame lower bound failure: summed filter energy {energy:e} at bin ({}, {}); \
         try a smaller gamma or tau",
        bin.k,
        bin.l
    )]
    FrameFailure { bin: FreqIndex, energy: f64 },

    #[error("internal error: {0}")]
    Internal(String),
}

impl EvwError {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        EvwError::InvalidInput(msg.into())
    }
}
