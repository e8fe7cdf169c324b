use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    /// Level/feed alternation was broken.
    #[error("engine contract violation: {0}")]
    Contract(&'static str),

    #[error("sequencing error: expected index {expected}, got {got}")]
    Sequence { expected: u64, got: u64 },

    #[error("invalid input: {0}")]
    Input(String),

    #[error("invalid parameter: {0}")]
    Parameter(String),

    #[error("unknown procedure `{0}`")]
    UnknownProcedure(String),

    #[error("wealth overdraft: penalty {penalty} exceeds available wealth {wealth}")]
    Overdraft { penalty: f64, wealth: f64 },

    #[error("payout {payout} exceeds the GAI++ cap {cap}")]
    PayoutCap { payout: f64, cap: f64 },

    #[error("length mismatch: {decisions} decisions scored against {truth} ground-truth labels")]
    LengthMismatch { decisions: usize, truth: usize },

    #[error("cannot aggregate an empty set of reports")]
    EmptyAggregate,

    /// A stream line that could not be parsed; `line` is 1-based.
    #[error("line {line}: {message}")]
    Line { line: usize, message: String },

    /// A CSV data row that could not be parsed; `row` is 1-based, header excluded.
    #[error("row {row}: {message}")]
    Row { row: usize, message: String },

    #[error("snapshot integrity error: {0}")]
    Integrity(String),

    #[error("state file {0} is locked by another run")]
    Locked(PathBuf),

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    /// Process exit code for the command-line front end: 2 for input
    /// problems, 3 for state or integrity problems.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Integrity(_) | Error::Locked(_) | Error::Contract(_) => 3,
            Error::Overdraft { .. } | Error::PayoutCap { .. } => 3,
            _ => 2,
        }
    }
}
