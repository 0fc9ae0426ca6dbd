//! Crate-wide error type.
//!
//! Errors fall into three families, and the CLI maps each family to a
//! process exit code: validation/domain problems (exit 1), I/O problems
//! (exit 2), and numerical failures (exit 3).

use std::path::PathBuf;

/// Convenience alias used throughout the crate.
pub type Result<T> = std::result::Result<T, Error>;

/// All failures the library can report.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    /// Underlying I/O failure, annotated with the path involved.
    #[error("i/o error on {path}: {source}")]
    Io {
        /// File the operation touched.
        path: PathBuf,
        /// The original error.
        #[source]
        source: std::io::Error,
    },

    /// A text file failed to parse. `row` is 1-based over data rows.
    #[error("parse error at row {row}: {msg}")]
    Parse {
        /// 1-based row index (header excluded).
        row: usize,
        /// Explanation of what was wrong.
        msg: String,
    },

    /// A binary file did not match the expected layout.
    #[error("format error: {0}")]
    Format(String),

    /// A binary file ended before its header-declared payload.
    #[error("truncated file: {0}")]
    Truncated(String),

    /// A dataset with zero rows where at least one is required.
    #[error("empty dataset: {0}")]
    EmptyDataset(String),

    /// Mismatched dimensions between two values that must agree.
    #[error("shape mismatch: {0}")]
    Shape(String),

    /// A scalar argument outside its legal range.
    #[error("argument out of range: {0}")]
    Range(String),

    /// An input value outside the mathematical domain of an operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// Too few rows to honour a structural requirement.
    #[error("insufficient data: {0}")]
    InsufficientData(String),

    /// A stratified split could not keep every class represented.
    #[error("stratification error: {0}")]
    Stratification(String),

    /// A tree node whose rows cannot be divided (all features constant).
    #[error("partition error at node {node}: {msg}")]
    SplitImpossible {
        /// Index of the node that could not be split.
        node: usize,
        /// Explanation.
        msg: String,
    },

    /// A class required to be present had no samples.
    #[error("empty class {class}: {msg}")]
    EmptyClass {
        /// The class index in question.
        class: usize,
        /// Explanation.
        msg: String,
    },

    /// A metric whose defining ratio has a zero denominator.
    #[error("undefined metric: {0}")]
    UndefinedMetric(String),

    /// Numerical failure (factorization breakdown, non-finite values).
    /// `subset_id` names the affected column when one is known.
    #[error("numerical error{}: {msg}", subset_label(.subset_id))]
    Numerical {
        /// Column / subset that failed, if the failure is column-local.
        subset_id: Option<usize>,
        /// Explanation.
        msg: String,
    },

    /// Malformed configuration (file or flag value).
    #[error("config error: {0}")]
    Config(String),
}

fn subset_label(id: &Option<usize>) -> String {
    match id {
        Some(s) => format!(" in subset {s}"),
        None => String::new(),
    }
}

impl Error {
    /// Numerical failure without an owning subset.
    pub fn numerical(msg: impl Into<String>) -> Self {
        Error::Numerical { subset_id: None, msg: msg.into() }
    }

    /// Process exit code for the CLI: 1 validation, 2 I/O, 3 numerical.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Io { .. } => 2,
            Error::Numerical { .. } => 3,
            _ => 1,
        }
    }

    /// Attach a path to a raw I/O error.
    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io { path: path.into(), source }
    }
}
