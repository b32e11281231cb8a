use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid group: {0}")]
    InvalidGroup(String),

    #[error("group mismatch: {left} vs {right}")]
    GroupMismatch { left: String, right: String },

    #[error("depth {requested} exceeds working depth {depth}")]
    DepthOverflow { requested: u32, depth: u32 },

    #[error("operation needs a {expected} element, got {found}")]
    WrongKind {
        expected: &'static str,
        found: String,
    },

    #[error("invalid element: {0}")]
    InvalidElement(String),

    #[error("invalid character: {0}")]
    InvalidCharacter(String),

    #[error("invalid subgroup: {0}")]
    InvalidSubgroup(String),

    #[error("invalid neighbourhood: {0}")]
    InvalidNeighborhood(String),

    #[error("Lévy measure has an atom at the identity")]
    IdentityAtom,

    #[error("weight must be finite and nonnegative, got {0}")]
    InvalidWeight(f64),

    #[error("quadratic form must be 0 on p-adic groups")]
    PadicQuadraticForm,

    #[error("quadratic form parameter must be finite and nonnegative, got {0}")]
    InvalidQuadraticForm(f64),

    #[error("row distribution has total mass {0}, expected 1")]
    NotProbability(f64),

    #[error("invalid schedule: {0}")]
    Schedule(String),

    #[error("row index {k} out of range 1..={rows}")]
    RowIndex { k: u64, rows: u64 },

    #[error("{op} needs {required}")]
    UnsupportedArray {
        op: &'static str,
        required: &'static str,
    },

    #[error("sequence of length {len} is shorter than window {window}")]
    SequenceTooShort { len: usize, window: usize },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("sampling budget exceeded: {needed} draws > budget {budget}")]
    BudgetExceeded { needed: u64, budget: u64 },

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("invalid configuration: {0}")]
    Config(String),
}
