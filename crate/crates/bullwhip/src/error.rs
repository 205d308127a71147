//! Error type shared by every module in the crate.
//!
//! Variants carry enough structure (indices, row numbers, column names) for
//! callers to report problems without re-parsing message strings.

use thiserror::Error;

/// Crate-wide error type.
#[derive(Debug, Error)]
pub enum Error {
    /// A series failed its construction invariant (empty, or non-finite values).
    #[error("invalid series: {reason}")]
    InvalidSeries { reason: String },

    /// A caller-supplied argument violated a documented precondition.
    #[error("invalid argument: {reason}")]
    InvalidArgument { reason: String },

    /// Series length is not a multiple of the requested subset size.
    #[error("series length {len} is not divisible by subset size {k}")]
    IndivisibleLength { len: usize, k: usize },

    /// Two series that must align period by period have different lengths.
    #[error("series lengths differ: {left} vs {right}")]
    LengthMismatch { left: usize, right: usize },

    /// A demand-side variance in a ratio denominator is zero.
    #[error("demand variance is zero: {context}")]
    DegenerateDemand { context: String },

    /// A single demand subset has zero variance, so its ratio is undefined.
    #[error("demand subset {index} has zero variance")]
    DegenerateSubset { index: usize },

    /// Matrix handed to the eigensolver is not symmetric.
    #[error("matrix is not symmetric (largest off-diagonal mismatch {max_delta:e})")]
    NotSymmetric { max_delta: f64 },

    /// Eigenvalue iteration failed to reach its convergence threshold.
    #[error("eigenvalue iteration did not converge within {sweeps} sweeps")]
    ConvergenceFailure { sweeps: usize },

    /// Input is shorter than the operation requires.
    #[error("insufficient data: need at least {required} observations, got {actual}")]
    InsufficientData { required: usize, actual: usize },

    /// Simulation configuration violates an invariant.
    #[error("invalid simulation config: {reason}")]
    InvalidConfig { reason: String },

    /// Seasonal period must be at least 2.
    #[error("seasonal period must be at least 2, got {period}")]
    InvalidPeriod { period: usize },

    /// CSV header is missing a required column.
    #[error("missing column `{column}` in header (expected `period,product,demand,order`)")]
    MissingColumn { column: String },

    /// Two data rows share the same (period, product) key.
    #[error("row {row}: duplicate entry for period {period}, product `{product}`")]
    DuplicateRow {
        row: usize,
        period: i64,
        product: String,
    },

    /// Periods for a product skip a value.
    #[error(
        "row {row}: gap in periods for product `{product}` (expected {expected}, found {found})"
    )]
    GapInPeriods {
        row: usize,
        product: String,
        expected: i64,
        found: i64,
    },

    /// A cell that must hold a number does not parse, or is not finite.
    #[error("row {row}, column `{column}`: non-numeric value `{value}`")]
    NonNumericValue {
        row: usize,
        column: String,
        value: String,
    },

    /// File contains a header but no data rows.
    #[error("dataset contains no data rows")]
    EmptyDataset,

    /// Structurally broken CSV (wrong field count, unbalanced quotes).
    #[error("malformed CSV at row {row}: {message}")]
    MalformedCsv { row: usize, message: String },

    /// A serialized report failed to deserialize.
    #[error("report parse error: {message}")]
    ReportParse { message: String },

    /// Underlying I/O failure while reading input.
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;
