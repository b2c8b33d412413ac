//! Crate-wide error type.
//!
//! Variants are grouped by how the CLI reports them: input problems
//! (I/O, parsing, configuration) exit with code 2, domain and
//! calibration failures with code 3. Usage errors never reach this
//! type; argument parsing handles them before a command runs.

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },

    /// Malformed input table. `line` and `column` are 1-based; `line`
    /// counts physical lines of the source text, comments included.
    #[error("{locus}: line {line}, column {column}: {message}")]
    Parse {
        locus: String,
        line: usize,
        column: usize,
        message: String,
    },

    /// Structurally invalid table (duplicate category, ragged row,
    /// out-of-order years) located after the cells themselves parsed.
    #[error("{locus}: {message}")]
    Structure { locus: String, message: String },

    #[error("config: {0}")]
    Config(String),

    /// An argument outside a function's mathematical domain.
    #[error("{0}")]
    Domain(String),

    /// A calibration target that cannot be met or a degenerate design.
    #[error("calibration: {0}")]
    Calibration(String),
}

impl Error {
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Io { .. } | Error::Parse { .. } | Error::Structure { .. } | Error::Config(_) => 2,
            Error::Domain(_) | Error::Calibration(_) => 3,
        }
    }
}
