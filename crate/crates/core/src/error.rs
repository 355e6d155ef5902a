use alloc::boxed::Box;
use alloc::string::String;

/// Errors produced by dataset construction and distance computation.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("feature dimensions differ: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },

    #[error("matrix shapes differ: {left_rows}x{left_cols} vs {right_rows}x{right_cols}")]
    ShapeMismatch {
        left_rows: usize,
        left_cols: usize,
        right_rows: usize,
        right_cols: usize,
    },

    #[error("dataset must have at least one row and one column (got {rows}x{cols})")]
    Empty { rows: usize, cols: usize },

    #[error("data length {len} does not match {rows}x{cols}")]
    BadLength { rows: usize, cols: usize, len: usize },

    #[error("non-finite value at row {row}, column {col}")]
    NonFinite { row: usize, col: usize },

    #[error("label count {labels} does not match row count {rows}")]
    LabelLength { rows: usize, labels: usize },

    #[error("a dataset group needs at least 2 datasets, got {0}")]
    GroupTooSmall(usize),

    #[error("{what} needs labels but dataset `{dataset}` has none")]
    MissingLabels { what: &'static str, dataset: String },

    #[error("k-means with k={k} needs at least k points, dataset has {points}; lower k")]
    TooFewPoints { k: usize, points: usize },

    #[error("requested rank {requested} exceeds achievable rank {achievable}")]
    RankDeficient { requested: usize, achievable: usize },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("target dataset has zero energy; NMSE is undefined")]
    ZeroEnergy,

    #[error("area {0} contains no users")]
    EmptyArea(usize),

    #[error("{metric} on ({left}, {right}): {cause}")]
    Pair {
        metric: String,
        left: String,
        right: String,
        cause: Box<Error>,
    },
}

pub type Result<T> = core::result::Result<T, Error>;

macro_rules! invalid {
    ($($arg:tt)*) => {
        $crate::Error::InvalidParameter(alloc::format!($($arg)*))
    };
}
pub(crate) use invalid;
