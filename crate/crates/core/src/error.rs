use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("i/o failure: {0}")]
    Io(#[from] std::io::Error),

    #[error("malformed csv: {0}")]
    Csv(String),

    #[error("row {row} has {found} fields, expected {expected}")]
    RaggedRow {
        row: usize,
        found: usize,
        expected: usize,
    },

    #[error("row {row}, column {column:?}: cannot read {value:?} as a finite number")]
    NonNumericCell {
        row: usize,
        column: String,
        value: String,
    },

    #[error("at least 2 respondents are required, found {0}")]
    TooFewRespondents(usize),

    #[error("at least one item is required")]
    NoItems,

    #[error("duplicate item label {0:?}")]
    DuplicateLabel(String),

    #[error("shape mismatch: {0}")]
    Shape(String),

    #[error("ordering has length {found}, tournament has {expected} respondents")]
    LengthMismatch { expected: usize, found: usize },

    #[error("not a permutation: {0}")]
    InvalidOrdering(String),

    #[error("invalid dominance weights: {0}")]
    InvalidTournament(String),

    #[error("degenerate instance: {0} respondent(s), at least 2 required")]
    DegenerateInstance(usize),

    #[error("contradiction count {c_star} outside [0, {c_max}]")]
    CountOutOfRange { c_star: u64, c_max: u64 },

    #[error("swap positions ({p}, {q}) invalid for {n} respondents")]
    PositionOutOfRange { p: usize, q: usize, n: usize },

    #[error("exhaustive search over {n} respondents exceeds the limit of {limit}")]
    InstanceTooLarge { n: usize, limit: usize },

    #[error("total score variance is zero")]
    ZeroTotalVariance,

    #[error("at least 2 items are required")]
    SingleItem,

    #[error("a split half has constant total score")]
    ConstantHalf,

    #[error("split halves are perfectly anti-correlated; Spearman-Brown is undefined")]
    AntiCorrelatedHalves,

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("config line {line}: {message}")]
    Config { line: usize, message: String },
}

impl Error {
    /// Stable machine-readable code used in `error[CODE]:` diagnostics.
    pub fn code(&self) -> &'static str {
        match self {
            Error::Io(_) => "IO",
            Error::Csv(_) => "CSV",
            Error::RaggedRow { .. } => "RAGGED_ROW",
            Error::NonNumericCell { .. } => "NON_NUMERIC_CELL",
            Error::TooFewRespondents(_) => "TOO_FEW_RESPONDENTS",
            Error::NoItems => "NO_ITEMS",
            Error::DuplicateLabel(_) => "DUPLICATE_LABEL",
            Error::Shape(_) => "SHAPE",
            Error::LengthMismatch { .. } => "LENGTH_MISMATCH",
            Error::InvalidOrdering(_) => "INVALID_ORDERING",
            Error::InvalidTournament(_) => "INVALID_TOURNAMENT",
            Error::DegenerateInstance(_) => "DEGENERATE_INSTANCE",
            Error::CountOutOfRange { .. } => "COUNT_OUT_OF_RANGE",
            Error::PositionOutOfRange { .. } => "POSITION_OUT_OF_RANGE",
            Error::InstanceTooLarge { .. } => "INSTANCE_TOO_LARGE",
            Error::ZeroTotalVariance => "ZERO_TOTAL_VARIANCE",
            Error::SingleItem => "SINGLE_ITEM",
            Error::ConstantHalf => "CONSTANT_HALF",
            Error::AntiCorrelatedHalves => "ANTI_CORRELATED_HALVES",
            Error::InvalidParameter(_) => "INVALID_PARAMETER",
            Error::Config { .. } => "CONFIG",
        }
    }
}
