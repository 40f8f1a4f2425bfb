//! Crate-wide error type.

use thiserror::Error;

/// Errors produced by parsing, validation and the measure/cluster pipelines.
#[derive(Debug, Error)]
pub enum Error {
    /// Malformed bracket notation (unbalanced brackets, bad token, ...).
    #[error("syntax error at byte {pos}: {msg}")]
    Syntax { pos: usize, msg: String },

    /// Structurally well-formed input that violates a hierarchical-partition
    /// invariant (duplicate element, missing element, empty block, ...).
    #[error("invalid hierarchical partition: {0}")]
    Validation(String),

    /// Requested level deeper than the tree.
    #[error("depth {depth} out of range (max depth is {max})")]
    DepthOutOfRange { depth: usize, max: usize },

    /// Two partitions over different universes were combined.
    #[error("universe size mismatch: {left} vs {right}")]
    SizeMismatch { left: usize, right: usize },

    /// A normalization or adjustment denominator is (numerically) zero.
    #[error("degenerate denominator: {0}")]
    DegenerateDenominator(String),

    /// `shuffle_k` called with k > n.
    #[error("k = {k} out of range for a universe of {n} elements")]
    KOutOfRange { k: usize, n: usize },

    /// Too many missing cells to enumerate completions.
    #[error("{found} missing cells exceed the completion limit of {limit}")]
    TooManyMissing { found: usize, limit: usize },

    /// Bad cell value or malformed row in a dataset file.
    #[error("dataset parse error at row {row}, column {col}: {msg}")]
    DatasetParse { row: usize, col: usize, msg: String },

    /// Two dataset rows share a label.
    #[error("duplicate row label {0:?}")]
    DuplicateLabel(String),

    /// A distance or linkage was requested on a matrix with missing cells.
    #[error("matrix still has missing cells")]
    IncompleteMatrix,

    /// Exhaustive scan requested for an unsupported universe size.
    #[error("n = {n} out of range (supported: 1..={max})")]
    NOutOfRange { n: usize, max: usize },

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),

    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),

    /// Malformed experiment output fed back into the harness readers.
    #[error("table schema error: {0}")]
    Schema(String),
}

pub type Result<T> = std::result::Result<T, Error>;
