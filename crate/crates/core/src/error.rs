use std::fmt;

use crate::solve::SolvabilityReport;

/// Why a solver refused to pick a solution.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NonUniqueCause {
    /// `sigma_{n2}` does not clear `sigma_{n2+1}` by the configured margin.
    SingularValueGap,
    /// The trailing `d x d` block of the right singular vectors is numerically singular.
    SingularV22,
}

impl fmt::Display for NonUniqueCause {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            NonUniqueCause::SingularValueGap => f.write_str("no singular value gap at the split"),
            NonUniqueCause::SingularV22 => f.write_str("V22 block is singular"),
        }
    }
}

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("dimension mismatch in {op}: expected {expected}, got {got}")]
    DimensionMismatch {
        op: &'static str,
        expected: String,
        got: String,
    },

    #[error("invalid problem: {0}")]
    InvalidProblem(String),

    #[error("exactly known columns are rank deficient (column {column}, pivot norm {pivot:e})")]
    RankDeficient { column: usize, pivot: f64 },

    #[error("solution is not unique: {cause}")]
    NonUnique {
        cause: NonUniqueCause,
        report: SolvabilityReport,
    },

    #[error("SVD did not converge on a {rows}x{cols} matrix")]
    SvdNoConvergence { rows: usize, cols: usize },

    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

impl Error {
    pub(crate) fn dims(
        op: &'static str,
        expected: impl fmt::Display,
        got: impl fmt::Display,
    ) -> Self {
        Error::DimensionMismatch {
            op,
            expected: expected.to_string(),
            got: got.to_string(),
        }
    }
}
