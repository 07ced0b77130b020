use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum BinningError {
    #[error("value at position {index} is not finite")]
    NonFinite { index: usize },
    #[error("value {value} lies outside every bin")]
    OutOfRange { value: f64 },
    #[error("log transform undefined for {value}")]
    Domain { value: f64 },
    #[error("cannot normalize: all values are equal or fewer than two values given")]
    DegenerateRange,
    #[error("k-means needs at least {k} distinct values, got {distinct}")]
    TooFewDistinct { distinct: usize, k: usize },
    #[error("TSH series has two records at time {time}")]
    ZeroInterval { time: f64 },
    #[error("TSH series is empty")]
    EmptySeries,
    #[error("TSH value {value} must be positive and finite")]
    NonPositiveTsh { value: f64 },
    #[error("TSH series of case {case:?}: {source}")]
    Series { case: String, source: Box<BinningError> },
    #[error("invalid bin spec: {0}")]
    InvalidSpec(String),
    #[error("invalid binning config: {0}")]
    Config(String),
    #[error("column {0:?} not found in input header")]
    MissingColumn(String),
    #[error("line {line}, column {column:?}: {message}")]
    Parse { line: usize, column: String, message: String },
    #[error("line {line}: target column {column:?} is missing")]
    MissingTarget { line: usize, column: String },
    #[error("csv: {0}")]
    Csv(String),
    #[error(transparent)]
    Store(#[from] crate::store::StoreError),
}

impl From<csv::Error> for BinningError {
    fn from(e: csv::Error) -> Self {
        BinningError::Csv(e.to_string())
    }
}
