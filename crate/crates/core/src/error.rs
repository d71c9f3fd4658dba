use thiserror::Error;

/// Errors raised anywhere in the analysis pipeline.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("no `Month,` header row found")]
    MissingHeader,
    #[error("months are not consecutive: expected {expected}, found {found}")]
    GapInMonths { expected: String, found: String },
    #[error("bad value on line {line}: {value:?}")]
    BadValue { line: usize, value: String },
    #[error("series is empty")]
    EmptySeries,
    #[error("series has already been rescaled")]
    AlreadyRescaled,
    #[error("month {0} is outside 1..=12")]
    BadMonth(u32),

    #[error("objective is not finite at the starting point")]
    NonFiniteObjectiveAtStart,
    #[error("objective evaluated to a non-finite value")]
    NonFiniteEvaluation,
    #[error("design matrix is rank deficient")]
    RankDeficient,
    #[error("series too short: need {needed}, have {have}")]
    TooShort { needed: usize, have: usize },

    #[error("invalid model: {0}")]
    InvalidSpec(String),
    #[error("AR or MA polynomial has a root on or inside the unit circle")]
    NonStationaryParams,
    #[error("numerical breakdown: {0}")]
    NumericalBreakdown(String),
    #[error("optimizer failed to converge")]
    OptimizerFailed,
    #[error("every candidate order failed to fit")]
    AllFitsFailed,
    #[error("series has zero variance")]
    DegenerateVariance,

    #[error("degenerate input: {0}")]
    DegenerateInput(String),
    #[error("Hessian is singular; standard error not available")]
    SingularHessian,

    #[error("one of the groups is empty")]
    EmptyGroup,
    #[error("all values are tied")]
    DegenerateTies,
    #[error("series has no complete calendar year")]
    NoCompleteYear,
    #[error("bad arguments: {0}")]
    BadArgs(String),
}

pub type Result<T> = std::result::Result<T, Error>;
