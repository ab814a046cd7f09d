use std::io;

use thiserror::Error;

/// Errors produced anywhere in the reconstruction pipeline.
#[derive(Debug, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("non-finite value encountered: {0}")]
    NonFinite(String),

    #[error("empty dataset")]
    EmptyDataset,

    #[error("cutoff {cutoff} lies outside the grid [{start}, {end}]")]
    CutoffOutsideGrid { cutoff: f64, start: f64, end: f64 },

    #[error("no cutoff set on the characteristic-function estimate")]
    MissingCutoff,

    #[error("sigma has not been populated; run cf_variance first")]
    MissingSigma,

    #[error(
        "threshold |phi| < {k}*sigma never held over a full window of {window} inside the grid; \
         use a larger grid or a fixed cutoff"
    )]
    CutoffNotFound { k: f64, window: f64 },

    #[error("degenerate weights: {0}")]
    DegenerateSigma(String),

    #[error("provenance mismatch: {0}")]
    ProvenanceMismatch(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn domain(msg: impl Into<String>) -> Error {
    Error::Domain(msg.into())
}
