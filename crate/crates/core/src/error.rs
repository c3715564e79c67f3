use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("division by zero in Z/{0}")]
    DivisionByZero(u32),
    #[error("Z/{0} has no square root of -1 (modulus must be 1 mod 4)")]
    NoImaginaryUnit(u32),
    #[error("{0} is not prime")]
    NotPrime(u64),
    #[error("modulus {p} must exceed the degree {d}")]
    BadModulus { p: u32, d: usize },
    #[error("degree {0} is odd, squares need an even degree")]
    OddDegree(usize),
    #[error("degree mismatch: expected {expected}, found {found}")]
    DegreeMismatch { expected: usize, found: usize },
    #[error("variable count mismatch: {0} vs {1}")]
    ArityMismatch(usize, usize),
    #[error("modulus mismatch: Z/{0} vs Z/{1}")]
    ModulusMismatch(u32, u32),
    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),
    #[error("input forms are linearly dependent")]
    DependentInput,
    #[error("r = {r} fills the ambient space for n = {n}, d = {d}; identifiability needs subgeneric rank")]
    NotSubgeneric { n: usize, d: usize, r: usize },
    #[error("dual form does not annihilate the Terracini span")]
    NotApolar,
    #[error("invalid parameters: {0}")]
    InvalidParams(String),
    #[error("malformed input: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
