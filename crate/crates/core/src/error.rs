use thiserror::Error;

use crate::field::Field;

/// Which differential of a binary complex an error refers to.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Side {
    Top,
    Bottom,
}

impl std::fmt::Display for Side {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Side::Top => write!(f, "top"),
            Side::Bottom => write!(f, "bot"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum Error {
    #[error("{0} is not a prime in [2, 2^61)")]
    NotPrime(u64),
    #[error("cannot parse scalar {text:?}: {reason}")]
    Parse { text: String, reason: String },
    #[error("field mismatch: {0} vs {1}")]
    FieldMismatch(Field, Field),
    #[error("shape mismatch: {0}")]
    Shape(String),
    #[error("division by zero")]
    DivisionByZero,
    #[error("linear system has no solution")]
    NoSolution,
    #[error("matrix is singular")]
    Singular,
    #[error("d∘d is nonzero at degree {degree}")]
    NotAComplex { degree: usize },
    #[error("not exact at degree {degree}")]
    NotAcyclic { degree: usize },
    #[error("invalid binary complex: {side} differential, degree {degree}: {reason}")]
    InvalidBinary { side: Side, degree: usize, reason: String },
    #[error("invalid double complex: {0}")]
    InvalidDouble(String),
    #[error("classes differ: dim {0} vs dim {1}")]
    NotEqualClasses(usize, usize),
    #[error("invalid extension witness: {0}")]
    InvalidWitness(String),
    #[error("invalid contraction at degree {degree}")]
    InvalidContraction { degree: usize },
    #[error("support length {found} is too short, need at least {need}")]
    TooShort { found: usize, need: usize },
}

pub type Result<T> = std::result::Result<T, Error>;
