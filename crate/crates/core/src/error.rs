use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("box extents must be positive (w = {w}, h = {h})")]
    NonPositiveExtent { w: f64, h: f64 },

    #[error("non-finite value in {0}")]
    NonFinite(&'static str),

    #[error("matrix is not symmetric positive definite (trace = {trace}, det = {det})")]
    NotSpd { trace: f64, det: f64 },

    #[error("boxes are not axis-aligned, covariances do not commute")]
    NotCommutative,

    #[error("anchor and box use different angle conventions")]
    ConventionMismatch,

    #[error("invalid loss configuration: {0}")]
    InvalidLossConfig(String),

    #[error("empty batch")]
    EmptyBatch,

    #[error("invalid box literal {literal:?}: {reason}")]
    BoxLiteral { literal: String, reason: String },

    #[error("invalid experiment spec: {0}")]
    InvalidSpec(String),

    #[error("config line {line}: {reason}")]
    Config { line: usize, reason: String },

    #[error("descent diverged at step {step}")]
    Diverged { step: usize },

    #[error("table has no rows")]
    EmptyTable,

    #[error("i/o error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
