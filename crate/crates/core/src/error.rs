use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid spin quantum number {0}: 2j must be a non-negative integer")]
    InvalidSpin(f64),

    #[error("{0}")]
    InvalidArgument(String),

    #[error("matrix is not Hermitian (max |H - H^dagger| = {deviation:.3e})")]
    NotHermitian { deviation: f64 },

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("{what} did not converge after {iterations} iterations (residual {residual:.3e})")]
    NonConvergence {
        what: &'static str,
        iterations: usize,
        residual: f64,
    },

    #[error(
        "band {band} is degenerate at loop sample {sample} (gap {gap:.3e}); \
         use the Wilczek-Zee holonomy for degenerate subspaces"
    )]
    DegenerateBand { band: usize, sample: usize, gap: f64 },

    #[error("degeneracy of subspace {group:?} is lifted at loop sample {sample} (spread {spread:.3e})")]
    DegeneracyLifted {
        group: Vec<usize>,
        sample: usize,
        spread: f64,
    },

    #[error("loop is not closed: H(first) and H(last) differ by {mismatch:.3e}")]
    OpenLoop { mismatch: f64 },

    #[error("invalid trap geometry: {0}")]
    Geometry(String),

    #[error("least-squares design matrix is rank deficient (condition {condition:.3e})")]
    RankDeficient { condition: f64 },

    #[error("principal axis undefined: leading eigenvalues {0:.6e} and {1:.6e} are degenerate in magnitude")]
    UndefinedAngle(f64, f64),

    #[error("configuration error in `{field}`: {message}")]
    Config { field: String, message: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// Process exit status for the command-line front end: 2 for invalid
    /// configuration or input, 3 for solver non-convergence, 4 for degeneracy
    /// misuse, 1 otherwise.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Config { .. }
            | Error::Json(_)
            | Error::InvalidSpin(_)
            | Error::InvalidArgument(_)
            | Error::Geometry(_) => 2,
            Error::NonConvergence { .. } => 3,
            Error::DegenerateBand { .. } | Error::DegeneracyLifted { .. } => 4,
            _ => 1,
        }
    }

    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidArgument(msg.into())
    }

    pub(crate) fn config(field: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Config {
            field: field.into(),
            message: message.into(),
        }
    }
}
