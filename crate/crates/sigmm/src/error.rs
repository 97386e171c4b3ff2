//! Crate-wide error type.

use std::fmt;

/// Errors produced by construction and evaluation routines.
#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// A vector or matrix had a different length than the ambient dimension.
    DimensionMismatch { expected: usize, found: usize },
    /// A coefficient was zero or not finite where a nonzero finite value is required.
    InvalidCoefficient(f64),
    /// An exponent entry was not finite.
    InvalidExponent(f64),
    /// The ambient dimension must be at least one.
    ZeroDimension,
    /// A point coordinate was nonpositive or not finite.
    NonPositiveCoordinate { index: usize, value: f64 },
    /// A log composition requires a posynomial (all coefficients positive, at least one term).
    NotPosynomial,
    /// Grid search is restricted to low dimensions.
    GridTooLarge { dimension: usize, limit: usize },
    /// Closed-form updates exist only for the named bundled test functions.
    UnknownTestFunction(String),
    /// The positive part of row `coordinate` of the scaled Hessian vanished; the
    /// multiplicative update is undefined (penalty constant too small for this matrix).
    QpHplusZero { coordinate: usize },
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::DimensionMismatch { expected, found } => {
                write!(f, "dimension mismatch: expected {expected}, found {found}")
            }
            Error::InvalidCoefficient(c) => write!(f, "invalid coefficient {c}"),
            Error::InvalidExponent(e) => write!(f, "invalid exponent {e}"),
            Error::ZeroDimension => write!(f, "dimension must be at least 1"),
            Error::NonPositiveCoordinate { index, value } => {
                write!(
                    f,
                    "coordinate {index} must be positive and finite, got {value}"
                )
            }
            Error::NotPosynomial => {
                write!(
                    f,
                    "log compositions require a posynomial with positive coefficients"
                )
            }
            Error::GridTooLarge { dimension, limit } => {
                write!(
                    f,
                    "grid search limited to {limit} dimensions, got {dimension}"
                )
            }
            Error::UnknownTestFunction(name) => write!(f, "unknown test function `{name}`"),
            Error::QpHplusZero { coordinate } => {
                write!(
                    f,
                    "positive part of scaled Hessian row {coordinate} is zero; \
                     increase the penalty constant"
                )
            }
        }
    }
}

impl std::error::Error for Error {}

pub type Result<T> = std::result::Result<T, Error>;
