//! Crate-wide error type.

use crate::period::Period;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    // --- ingestion ---
    #[error("column `{0}` not found in table")]
    MissingColumn(String),
    #[error("row {row}: cell `{cell}` is not {expected}")]
    UnparseableCell {
        row: usize,
        cell: String,
        expected: &'static str,
    },
    #[error("duplicate period {0}")]
    DuplicatePeriod(Period),
    #[error("row {row}: cannot parse `{cell}` as a date")]
    UnparseableDate { row: usize, cell: String },
    #[error("row {row}: cannot parse `{cell}` as a value")]
    UnparseableValue { row: usize, cell: String },
    #[error("table has no data rows")]
    MissingData,
    #[error("row {row}: year is blank with no prior year to inherit")]
    YearWithoutPredecessor { row: usize },
    #[error("invalid cleaning rule: {0}")]
    InvalidRule(String),
    #[error("network error fetching {url}: {reason}")]
    NetworkError { url: String, reason: String },
    #[error("HTTP status {status} fetching {url}")]
    HttpStatusError { url: String, status: u16 },

    // --- series ---
    #[error("cannot mix frequencies: {0}")]
    FrequencyMismatch(String),
    #[error("series have no periods in common")]
    EmptyIntersection,
    #[error("volume is zero at {0}")]
    ZeroVolume(Period),
    #[error("series too short: need at least {need} points, got {got}")]
    SeriesTooShort { need: usize, got: usize },
    #[error("periods are not strictly increasing at {0}")]
    UnorderedPeriods(Period),
    #[error("length mismatch: {0}")]
    LengthMismatch(String),
    #[error("duplicate column name `{0}`")]
    DuplicateColumn(String),

    // --- descriptive ---
    #[error("sample variance is zero; statistic undefined")]
    ZeroVariance,
    #[error("too few points: need at least {need}, got {got}")]
    TooFewPoints { need: usize, got: usize },
    #[error("column `{0}` is constant")]
    ConstantColumn(String),
    #[error("predictor `{0}` is perfectly collinear with the others")]
    PerfectCollinearity(String),

    // --- numerics / models ---
    #[error("design matrix is rank deficient (rank {rank} < {cols} columns)")]
    RankDeficient { rank: usize, cols: usize },
    #[error("not enough observations: {n} rows for {p} parameters")]
    InsufficientObservations { n: usize, p: usize },
    #[error("invalid distribution parameter: {0}")]
    InvalidParameter(String),
    #[error("estimated AR(1) coefficient {0} is outside (-1, 1)")]
    RhoOutOfRange(f64),
    #[error("polynomial degree {got} exceeds the supported maximum {max}")]
    DegreeTooHigh { got: usize, max: usize },
    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),

    // --- diagnostics ---
    #[error("all residuals are zero")]
    AllZeroResiduals,
    #[error("sample too small: need at least {need}, got {got}")]
    SampleTooSmall { need: usize, got: usize },
    #[error("recursive residuals are all zero (exact linear data)")]
    DegenerateRecursion,
    #[error("first {0} observations do not span a full-rank design")]
    RankDeficientPrefix(usize),
    #[error("observations must be in time order for this test")]
    NotTimeOrdered,

    // --- validation ---
    #[error("split leaves the {0} side empty")]
    EmptySide(&'static str),
    #[error("fold {fold} has {rows} rows, fewer than the {min} required")]
    FoldTooSmall { fold: usize, rows: usize, min: usize },
    #[error("invalid split spec: {0}")]
    InvalidSplit(String),

    // --- report ---
    #[error("unsupported plot kind `{0}`")]
    UnsupportedKind(String),
    #[error("I/O error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("serialization failed: {0}")]
    SerializationError(String),
}

impl Error {
    pub fn io(path: impl Into<String>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
