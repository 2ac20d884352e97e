use thiserror::Error;

use crate::matroid::AxiomReport;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("sign vectors of length {left} and {right} cannot be combined")]
    LengthMismatch { left: usize, right: usize },

    #[error("ground set of {n} elements exceeds the supported maximum of {max}")]
    TooManyElements { n: usize, max: usize },

    #[error("bad character {found:?} at position {position}")]
    BadCharacter { position: usize, found: char },

    #[error("expected {expected} signs, found {found}")]
    BadLength { expected: usize, found: usize },

    #[error("chirotope is identically zero")]
    IdenticallyZero,

    #[error("element {element} out of range for a ground set of {n} elements")]
    ElementOutOfRange { element: usize, n: usize },

    #[error("rank {r} is not valid for {n} elements")]
    BadRank { n: usize, r: usize },

    #[error("operation requires a uniform oriented matroid")]
    NotUniform,

    #[error("vector configuration is rank deficient")]
    RankDeficient,

    #[error("cocircuit axioms violated: {0}")]
    AxiomViolation(Box<AxiomReport>),

    #[error("rank hint {hint} disagrees with computed rank {computed}")]
    RankMismatch { hint: usize, computed: usize },

    #[error("{0} is not a covector")]
    NotACovector(String),

    #[error("{0} is not a tope")]
    NotATope(String),

    #[error("{0} is not a vertex of the graph")]
    VertexNotFound(String),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("size guard exceeded: {0}")]
    TooLarge(String),

    #[error("extension is not an oriented matroid: {0}")]
    InvalidExtension(String),

    #[error("diameter decreased from {before} to {after} during perturbation")]
    MonotonicityViolated { before: u32, after: u32 },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}
