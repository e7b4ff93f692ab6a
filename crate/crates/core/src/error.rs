use thiserror::Error;

use crate::resource::ConfigId;

/// Crate-wide result alias.
pub type Result<T, E = Error> = std::result::Result<T, E>;

/// Errors raised by the scheduling engine, the simulator and the benchmark I/O.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid resource spec: {0}")]
    InvalidResources(String),

    #[error("invalid ranking criterion `{spec}`: {reason}")]
    InvalidCriterion { spec: String, reason: String },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("config {0} appears in the upper rung but not in the rung below it")]
    MissingFromLowerRung(ConfigId),

    #[error("ranked lists do not contain the same set of configs")]
    MismatchedRankings,

    #[error("relative regret undefined: non-positive metric {metric} for config {config}")]
    NonPositiveMetric { config: ConfigId, metric: f64 },

    #[error("duplicate report for config {config} at rung {rung}")]
    DuplicateReport { config: ConfigId, rung: usize },

    #[error("report for config {config} at rung {rung} does not match an issued job")]
    UnknownJob { config: ConfigId, rung: usize },

    #[error("non-finite metric {metric} reported for config {config}")]
    NonFiniteMetric { config: ConfigId, metric: f64 },

    #[error("searcher exhausted: all {0} candidates already drawn")]
    SearcherExhausted(usize),

    #[error("the ladder is empty, no configuration to select")]
    EmptyLadder,

    #[error(
        "learning curve of candidate {candidate} (config {config}) covers {available} units, job needs {requested}"
    )]
    CurveTooShort { config: ConfigId, candidate: u64, requested: u64, available: u64 },

    #[error("unknown benchmark candidate {0}")]
    UnknownCandidate(u64),

    #[error("trace replay diverged at record {index}: {detail}")]
    ReplayDiverged { index: usize, detail: String },

    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("infeasible generator settings: {0}")]
    Infeasible(String),

    #[error("{context}: {source}")]
    Cell {
        context: String,
        #[source]
        source: Box<Error>,
    },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl Error {
    pub(crate) fn parse(line: usize, message: impl Into<String>) -> Self {
        Error::Parse { line, message: message.into() }
    }

    /// Internal consistency failures, as opposed to bad input data.
    pub fn is_invariant_violation(&self) -> bool {
        match self {
            Error::MissingFromLowerRung(_)
            | Error::DuplicateReport { .. }
            | Error::UnknownJob { .. }
            | Error::ReplayDiverged { .. } => true,
            Error::Cell { source, .. } => source.is_invariant_violation(),
            _ => false,
        }
    }
}
