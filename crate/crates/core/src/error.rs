//! Crate-wide error type.
//!
//! Validation errors (bad inputs, unknown identifiers, malformed files,
//! misconfigured criteria) are distinguished from runtime failures
//! (factorization breakdowns, degenerate data discovered mid-run) so the
//! CLI can map them to different exit codes.

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    // ---- numeric core ----
    #[error("matrix is not positive definite")]
    NotPositiveDefinite,
    #[error("eigenvalue iteration failed to converge")]
    ConvergenceFailure,

    // ---- data model ----
    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("duplicate identifier: {0}")]
    DuplicateId(String),
    #[error("empty input")]
    EmptyInput,
    #[error("unknown identifier: {0}")]
    UnknownId(String),
    #[error("test and candidate sets overlap: {0}")]
    Overlap(String),
    #[error("ntoselect {ntoselect} out of range for {navail} candidates")]
    Size { ntoselect: usize, navail: usize },
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("io error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },

    // ---- criteria ----
    #[error("unknown criterion: {0}")]
    UnknownCriterion(String),
    #[error("criterion {criterion} requires parameter {parameter}")]
    MissingParameter {
        criterion: String,
        parameter: &'static str,
    },
    #[error("unsupported criterion variant: {0}")]
    UnsupportedCriterion(String),
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error("degenerate target: a denominator diagonal entry is below 1e-14")]
    DegenerateTarget,
    #[error("monomorphic marker data: heterozygosity sum is zero")]
    MonomorphicData,
    #[error("degenerate residual variance in influence criterion")]
    DegenerateVariance,
    #[error("criterion name already registered: {0}")]
    DuplicateName(String),
    #[error("cannot shadow built-in criterion: {0}")]
    ShadowingBuiltin(String),
    #[error("custom criterion failed: {0}")]
    Custom(String),

    // ---- engine ----
    #[error("invalid initial population: {0}")]
    InvalidInitPop(String),
    #[error("criterion failed on solution {{{solution}}}: {source}")]
    Evaluation {
        solution: String,
        #[source]
        source: Box<Error>,
    },

    // ---- oracle ----
    #[error("enumeration too large: {subsets} subsets exceed cap {cap}")]
    TooLarge { subsets: u128, cap: u64 },
}

impl Error {
    /// True for errors caused by bad user input rather than a numerical or
    /// runtime failure. The CLI exits 2 for these and 1 otherwise.
    pub fn is_validation(&self) -> bool {
        matches!(
            self,
            Error::Parse { .. }
                | Error::DuplicateId(_)
                | Error::EmptyInput
                | Error::UnknownId(_)
                | Error::Overlap(_)
                | Error::Size { .. }
                | Error::Config(_)
                | Error::Io { .. }
                | Error::UnknownCriterion(_)
                | Error::MissingParameter { .. }
                | Error::UnsupportedCriterion(_)
                | Error::Dimension(_)
                | Error::DuplicateName(_)
                | Error::ShadowingBuiltin(_)
                | Error::InvalidInitPop(_)
                | Error::TooLarge { .. }
        )
    }
}
