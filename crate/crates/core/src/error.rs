use thiserror::Error;

use crate::field::FieldDescriptor;

/// Every failure the library can report.
///
/// `InternalInconsistency` is reserved for states that contradict a proven
/// identity (two distinct Drazin inverses, a singular image-kernel matrix at
/// the stabilised index, ...). Seeing it means there is a bug.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("division by zero")]
    DivisionByZero,

    #[error("modulus {0} is not a prime below 2^32")]
    NonPrimeModulus(u64),

    #[error("mixed fields: {left} and {right}")]
    FieldMismatch {
        left: FieldDescriptor,
        right: FieldDescriptor,
    },

    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),

    #[error("matrix is not square ({rows}x{cols})")]
    NotSquare { rows: usize, cols: usize },

    #[error("matrix is singular (rank {rank} < {size})")]
    SingularMatrix { rank: usize, size: usize },

    #[error("no group inverse: Drazin index is {index} > 1")]
    NoGroupInverse { index: usize },

    #[error("strong pi-regularity witness rejected: {0}")]
    WitnessInvalid(String),

    #[error("matrix is not idempotent")]
    NotIdempotent,

    #[error("Drazin data does not satisfy the Drazin axioms for this matrix")]
    StaleDrazinData,

    #[error("no repeated power within {max_steps} steps")]
    CycleNotFound { max_steps: usize },

    #[error("candidate enumeration exceeds {limit} elements")]
    EnumerationTooLarge { limit: usize },

    #[error("parse error: {0}")]
    Parse(String),

    #[error("internal inconsistency: {0}")]
    InternalInconsistency(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
