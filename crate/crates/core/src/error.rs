use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, Error, PartialEq)]
pub enum Error {
    #[error("{0} is not a prime below 2^31")]
    NotPrime(u64),

    #[error("syntax error at byte {pos}: {msg}")]
    Syntax { pos: usize, msg: String },

    #[error("numeric overflow at byte {pos}: {what}")]
    Overflow { pos: usize, what: String },

    #[error("operands live over different fields (p={left} vs p={right})")]
    FieldMismatch { left: u32, right: u32 },

    #[error("point has {got} coordinates, polynomial needs {need}")]
    PointTooShort { need: usize, got: usize },

    #[error("expected a univariate polynomial")]
    NotUnivariate,

    #[error("degree {got} exceeds the allowed maximum {max}")]
    DegreeTooHigh { max: u32, got: u32 },

    #[error("operation requires an odd characteristic")]
    CharacteristicTwo,

    #[error("invalid alphabet: {0}")]
    InvalidAlphabet(String),

    #[error("index {index} out of range for {len} variables")]
    IndexOutOfRange { index: usize, len: usize },

    #[error("length mismatch: {0}")]
    LengthMismatch(String),

    #[error("budget exceeded: {what} needs {needed}, budget is {budget}")]
    BudgetExceeded { what: String, needed: u128, budget: u128 },

    #[error("polynomial has full range on S^n")]
    FullRange,

    #[error("slice at {assignment:?} already has full range: {context}")]
    FullRangeWitness {
        assignment: Vec<(usize, u32)>,
        context: String,
    },

    #[error("no progress at member {member}: {detail}")]
    NoProgress { member: String, detail: String },

    #[error("witness search failed: {0}")]
    WitnessSearchFailed(String),

    #[error("corrupt decomposition: {0}")]
    Corrupt(String),

    #[error("invalid input: {0}")]
    Invalid(String),
}

impl Error {
    pub fn budget(what: impl Into<String>, needed: u128, budget: u128) -> Self {
        Error::BudgetExceeded {
            what: what.into(),
            needed,
            budget,
        }
    }
}
