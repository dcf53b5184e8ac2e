use thiserror::Error;

use crate::model::SolveResult;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}{}", at_index(*.index))]
    DimensionMismatch {
        expected: usize,
        found: usize,
        index: Option<usize>,
    },

    #[error("non-finite coordinate in point {index}")]
    NonFiniteCoordinate { index: usize },

    #[error("instance has no points")]
    EmptyInstance,

    #[error("ambient dimension must be at least 2, got {0}")]
    InvalidDimension(usize),

    #[error("cannot append column: factorization already has {0} columns")]
    FullSupport(usize),

    #[error("index {index} out of range for length {len}")]
    IndexOutOfRange { index: usize, len: usize },

    #[error("triangular factor is rank deficient (|R[{pivot},{pivot}]| = {value:e})")]
    RankDeficient { pivot: usize, value: f64 },

    #[error("entering point is affinely dependent on the support set")]
    AffinelyDependent,

    #[error("curve has no real point at x0 = {x0}")]
    NoRealPoint { x0: f64 },

    #[error("ratio test found no negative direction entry")]
    NoNegativeSigma,

    #[error("invalid ball {index}: {reason}")]
    InvalidBall { index: usize, reason: &'static str },

    #[error("balls have no common interior point (x0* = {x0})")]
    EmptyIntersection { x0: f64 },

    #[error("iteration limit {limit} reached")]
    IterationLimit {
        limit: usize,
        best: Box<SolveResult>,
    },

    #[error("numerical breakdown: {0}")]
    NumericalBreakdown(String),

    #[error("parse error at line {line}, column {column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

fn at_index(index: Option<usize>) -> String {
    match index {
        Some(i) => format!(" (point {i})"),
        None => String::new(),
    }
}

impl Error {
    pub(crate) fn dims(expected: usize, found: usize) -> Self {
        Error::DimensionMismatch {
            expected,
            found,
            index: None,
        }
    }

    /// True for errors caused by malformed input rather than by the solver.
    pub fn is_input_error(&self) -> bool {
        matches!(
            self,
            Error::DimensionMismatch { .. }
                | Error::NonFiniteCoordinate { .. }
                | Error::EmptyInstance
                | Error::InvalidDimension(_)
                | Error::InvalidBall { .. }
                | Error::Parse { .. }
                | Error::Io(_)
                | Error::Json(_)
        )
    }
}
