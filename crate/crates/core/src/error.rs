use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid team count {0}: must be even and at least 4")]
    InvalidTeamCount(usize),

    #[error("expected a {expected} timetable, got {found}")]
    WrongKind { expected: String, found: String },

    #[error("invalid timetable: {0}")]
    InvalidTimetable(String),

    #[error("invalid home/away assignment: {0}")]
    InvalidAssignment(String),

    #[error("length mismatch: expected {expected}, got {found}")]
    LengthMismatch { expected: usize, found: usize },

    #[error("exhaustive search is limited to {max} variables, model has {num_vars}")]
    TooManyVariables { num_vars: usize, max: usize },

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("invalid hardware graph: {0}")]
    InvalidTopology(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    /// True for errors that mean "the request is well formed but cannot be
    /// carried out", as opposed to malformed input.
    pub fn is_infeasible(&self) -> bool {
        matches!(self, Error::TooManyVariables { .. })
    }
}
