use thiserror::Error;

use crate::optimizer::InfeasibleReport;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("modulation order must be a power of two >= 4, got {0}")]
    InvalidOrder(usize),

    #[error("omega must exceed 1, got {0}")]
    InvalidOmega(f64),

    #[error("unknown template {name:?}; known templates: {known}")]
    UnknownTemplate { name: String, known: String },

    #[error("invalid template: {0}")]
    InvalidTemplate(String),

    #[error("{what}: expected {expected}, found {found}")]
    DimensionMismatch {
        what: &'static str,
        expected: usize,
        found: usize,
    },

    #[error("energies are not normalized: sum {sum} != {target}")]
    NotNormalized { sum: f64, target: f64 },

    #[error("invalid weights: {0}")]
    InvalidWeights(String),

    #[error("column must have exactly {expected} nonzero entries, found {found}")]
    NonzeroCount { expected: usize, found: usize },

    #[error("codeword index {index} out of range for M = {order}")]
    IndexOutOfRange { index: usize, order: usize },

    #[error(
        "enumeration of {required} superimposed codewords exceeds the budget of {cap}; \
         use the Monte Carlo MED estimate or the MPA decoder instead"
    )]
    BudgetExceeded { required: u128, cap: u64 },

    #[error("unknown reference codebook {id:?}; known ids: {known}")]
    UnknownReference { id: String, known: String },

    #[error("invariant violated ({invariant}): {detail}")]
    Invariant {
        invariant: &'static str,
        detail: String,
    },

    #[error("a codebook needs at least two codewords to have a product distance")]
    TooFewCodewords,

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("non-finite input: {0}")]
    NonFinite(&'static str),

    #[error("schema error: {0}")]
    Schema(String),

    #[error("config error: {0}")]
    Config(String),

    #[error("no feasible design found (best MPD {:.4} < kappa {:.4})", .0.best_mpd, .0.kappa)]
    Infeasible(Box<InfeasibleReport>),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

/// Process exit codes of the command-line tool.
pub mod exit {
    pub const CONFIG: i32 = 2;
    pub const INVARIANT: i32 = 3;
    pub const INFEASIBLE: i32 = 4;
    pub const BUDGET: i32 = 5;
    pub const OTHER: i32 = 1;
}

impl Error {
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Config(_)
            | Error::UnknownTemplate { .. }
            | Error::UnknownReference { .. }
            | Error::InvalidParameter(_)
            | Error::InvalidOrder(_)
            | Error::InvalidOmega(_)
            | Error::InvalidWeights(_)
            | Error::NotNormalized { .. }
            | Error::DimensionMismatch { .. }
            | Error::IndexOutOfRange { .. } => exit::CONFIG,
            Error::Invariant { .. }
            | Error::Schema(_)
            | Error::InvalidTemplate(_)
            | Error::NonzeroCount { .. }
            | Error::TooFewCodewords
            | Error::NonFinite(_) => exit::INVARIANT,
            Error::Infeasible(_) => exit::INFEASIBLE,
            Error::BudgetExceeded { .. } => exit::BUDGET,
            Error::Io(_) | Error::Json(_) => exit::OTHER,
        }
    }
}
