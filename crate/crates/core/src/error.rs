use std::fmt;

use thiserror::Error;

/// Capability tiers a function object may be asked for.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Tier {
    Invertible,
    Differentiable,
    InvertibleAndDifferentiable,
}

impl fmt::Display for Tier {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Tier::Invertible => "invertible",
            Tier::Differentiable => "differentiable",
            Tier::InvertibleAndDifferentiable => "invertible+differentiable",
        })
    }
}

#[derive(Debug, Clone, Error, PartialEq)]
pub enum Error {
    #[error("domain error: {function} is undefined at x = {x} ({reason})")]
    Domain { function: String, x: f64, reason: String },

    #[error("non-finite argument {x} passed to {function}")]
    NonFiniteInput { function: String, x: f64 },

    #[error("capability error: {function} is not {missing}{}", detail_suffix(.detail))]
    Capability {
        function: String,
        missing: Tier,
        detail: Option<String>,
    },

    #[error(
        "inverse validation failed for {function}: worst roundtrip error {error:e} at x = {worst_x} (tolerance {tolerance:e})"
    )]
    Validation {
        function: String,
        worst_x: f64,
        error: f64,
        tolerance: f64,
    },

    #[error("dimension mismatch in {context}: expected {expected}, found {found}")]
    Dimension {
        context: String,
        expected: usize,
        found: usize,
    },

    #[error("matrix is singular (|pivot| = {pivot:e})")]
    Singular { pivot: f64 },

    #[error("matrix inverse failed validation: residual {residual:e} exceeds {tolerance:e}")]
    IllConditioned { residual: f64, tolerance: f64 },

    #[error("integration did not converge after {refinements} refinements (last two estimates {previous} and {last})")]
    NotConverged { refinements: u32, previous: f64, last: f64 },

    #[error("invalid permutation: {0}")]
    InvalidPermutation(String),

    #[error("index {index} out of range for permutation of size {size}")]
    IndexOutOfRange { index: usize, size: usize },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("insufficient data: need at least {needed} values, got {got}")]
    InsufficientData { needed: usize, got: usize },

    #[error("degenerate spread: all {count} values are identical (sample standard deviation is 0)")]
    DegenerateSpread { count: usize },

    #[error("degenerate accuracy of measurement: derivative of {function} vanishes at {x}")]
    DegenerateAom { function: String, x: f64 },

    #[error("data error at row {row}: {reason}")]
    Data { row: usize, reason: String },

    #[error("unknown catalog key {key:?}; available keys: {}", .available.join(", "))]
    NotFound { key: String, available: Vec<String> },
}

fn detail_suffix(detail: &Option<String>) -> String {
    match detail {
        Some(d) => format!(" ({d})"),
        None => String::new(),
    }
}

impl Error {
    pub(crate) fn capability(function: impl Into<String>, missing: Tier) -> Self {
        Error::Capability {
            function: function.into(),
            missing,
            detail: None,
        }
    }

    pub(crate) fn domain(function: impl Into<String>, x: f64, reason: impl Into<String>) -> Self {
        Error::Domain {
            function: function.into(),
            x,
            reason: reason.into(),
        }
    }

    /// True for errors raised while evaluating a function body.
    pub fn is_domain(&self) -> bool {
        matches!(self, Error::Domain { .. } | Error::NonFiniteInput { .. })
    }
}

pub type Result<T> = std::result::Result<T, Error>;
