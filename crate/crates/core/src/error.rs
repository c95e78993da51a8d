use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("parse error: {0}")]
    Parse(String),

    #[error("space must contain at least one point")]
    EmptySpace,

    #[error("duplicate point id `{0}`")]
    DuplicatePoint(String),

    #[error("expected {expected} values, found {found}")]
    LengthMismatch { expected: usize, found: usize },

    #[error("weight of point {point} is negative")]
    NegativeWeight { point: usize },

    #[error("weights sum to {sum}, expected 1")]
    WeightsNotNormalized { sum: String },

    #[error("value {value} at point {point} lies outside [0, 1]")]
    OutOfUnitInterval { point: usize, value: String },

    #[error("operands belong to different spaces")]
    SpaceMismatch,

    #[error("partial sum exceeds the unit at point {point}")]
    SumExceedsUnit { point: usize },

    #[error("decomposition precondition a <= b + c fails at point {point}")]
    RieszPrecondition { point: usize },

    #[error("point map sends point {point} to {image}, outside the space")]
    MapOutOfRange { point: usize, image: usize },

    #[error(
        "point map is not measure preserving: pushforward weight at point {point} is {found}, expected {expected}"
    )]
    NotMeasurePreserving {
        point: usize,
        found: String,
        expected: String,
    },

    #[error("partition must have at least one element")]
    EmptyPartition,

    #[error("partition elements sum to {sum} at point {point}, expected 1")]
    NotPartitionOfUnity { point: usize, sum: String },

    #[error("refinement marginal mismatch on axis {axis}, index {index}, point {point}")]
    MarginalMismatch { axis: usize, index: usize, point: usize },

    #[error("invalid refinement tensor: {0}")]
    InvalidTensor(String),

    #[error("value {0} is outside the domain [0, 1] of phi")]
    PhiDomain(f64),

    #[error("partition is not idempotent (crisp)")]
    NotIdempotent,

    #[error("{what} needs {required}, budget is {budget}")]
    BudgetExceeded {
        what: &'static str,
        required: u128,
        budget: u128,
    },

    #[error("exact vertex enumeration requires rational arithmetic")]
    ExactRequiresRational,

    #[error("problem too large for the oracle: {0}")]
    OracleTooLarge(String),

    #[error("invalid isomorphism: {0}")]
    InvalidIsomorphism(String),

    #[error("invariant violated: {0}")]
    InvariantViolation(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}
