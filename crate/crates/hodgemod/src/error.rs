use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected a center of dimension {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("out of range: {0}")]
    OutOfRange(String),
    /// An Euler-characteristic computation produced an impossible Hodge
    /// diamond (asymmetric or negative middle row, broken congruence). This
    /// always signals an internal bug or a nonsensical recipe, never bad luck.
    #[error("inconsistent Euler characteristics: {0}")]
    InconsistentChi(String),
    #[error("({p}, {q}) is not an inner index in dimension {n}")]
    IndexOutOfI { p: usize, q: usize, n: usize },
    #[error("malformed recipe: {0}")]
    MalformedRecipe(String),
    #[error("polynomial has no nonzero monomials")]
    ZeroPolynomial,
    #[error("{0}")]
    InvalidInput(String),
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
}

pub type Result<T> = std::result::Result<T, Error>;
