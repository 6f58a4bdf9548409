use thiserror::Error;

/// Errors raised across the crate.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("{what} did not converge after {iterations} iterations (last change {last_change:e})")]
    NotConverged {
        what: &'static str,
        iterations: usize,
        last_change: f64,
    },

    #[error("coupling is not cooperative: {0}")]
    Cooperativity(String),

    #[error("hypothesis violated: {0}")]
    Hypothesis(String),

    #[error("time step too large: value {value:e} at t = {t} (component {component}, node {node})")]
    Overshoot {
        t: f64,
        component: usize,
        node: usize,
        value: f64,
    },

    #[error("singular pivot {pivot:e} at row {row}")]
    SingularPivot { row: usize, pivot: f64 },

    #[error("no sign change for {name}: f({lo}) = {f_lo:e}, f({hi}) = {f_hi:e}")]
    NoSignChange {
        name: String,
        lo: f64,
        hi: f64,
        f_lo: f64,
        f_hi: f64,
    },

    #[error("more than {max} roots found in [{lo}, {hi}]")]
    TooManyRoots { max: usize, lo: f64, hi: f64 },

    #[error("invariant violated: {0}")]
    Invariant(String),

    #[error("empty window: {0}")]
    EmptyWindow(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// Process exit code used by the command-line front end.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Config(_) | Error::DimensionMismatch { .. } | Error::Json(_) => 2,
            Error::Hypothesis(_) => 4,
            Error::Io(_) => 2,
            _ => 3,
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
