use std::path::PathBuf;

use thiserror::Error;

/// Everything that can go wrong inside the laboratory.
#[derive(Debug, Error)]
pub enum Error {
    #[error("out-degree m must be at least 1")]
    ZeroOutDegree,

    #[error("percolation probability {0} is outside [0, 1]")]
    ProbabilityOutOfRange(f64),

    #[error("pi = {pi} is not below the critical threshold pi_c({m}) = {pi_c:.10}")]
    NotSubcritical { m: u32, pi: f64, pi_c: f64 },

    #[error("{what} is only available for m = 2 (got m = {m})")]
    RequiresTwoOutEdges { what: &'static str, m: u32 },

    #[error("beta = {0} must lie strictly inside (0, 1)")]
    BetaOutOfRange(f64),

    #[error("no finite subcritical solution of the type recursion at pi = {0}")]
    NoSubcriticalSolution(f64),

    #[error("target size {target} is below the current size {current}")]
    TargetBelowCurrent { target: u64, current: u64 },

    #[error("susceptibility power sum overflowed 128 bits at n = {n}")]
    PowerSumOverflow { n: u64 },

    #[error("n = {n} is outside the supported range {min}..={max}")]
    SizeOutOfRange { n: u64, min: u64, max: u64 },

    #[error("vertex {v} is not in [1, {n}]")]
    VertexOutOfRange { v: u64, n: u64 },

    #[error("path lengths disagree: {0}")]
    LengthMismatch(String),

    #[error("trial {trial} failed: {source}")]
    TrialFailed {
        trial: u64,
        #[source]
        source: Box<Error>,
    },

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("I/O error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("CSV error: {0}")]
    Csv(#[from] csv::Error),

    #[error("JSON error: {0}")]
    Json(#[from] serde_json::Error),

    #[error("thread pool: {0}")]
    ThreadPool(#[from] rayon::ThreadPoolBuildError),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
