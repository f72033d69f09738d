use thiserror::Error;

/// Errors raised across the library. Search exhaustion and budget overruns
/// are reported here rather than silently truncated.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("{0} is not an odd prime")]
    InvalidPrime(u64),
    #[error("{value} is not integral at p = {p}")]
    NotIntegral { value: String, p: u64 },
    #[error("{value} is not congruent to 1 modulo p^{level}")]
    NotOneModLevel { value: String, level: u32 },
    #[error("precision {precision} is too small for level {level}")]
    Precision { level: u32, precision: u32 },
    #[error("modulus p^N = {0} exceeds the supported range")]
    ModulusTooLarge(u128),
    #[error("matrix is not invertible")]
    Singular,
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error("Gram matrix does not satisfy J = eps * tau(J)^T")]
    SymmetryMismatch,
    #[error("not a member of {0}")]
    NotMember(String),
    #[error("anti-unitary identity fails on basis pair (e{0}, e{1})")]
    NotAntiUnitary(usize, usize),
    #[error("semilinear map is not an involution (entry ({0}, {1}))")]
    NotInvolution(usize, usize),
    #[error("not found: {0}")]
    NotFound(String),
    #[error("enumeration of {size} elements exceeds budget {budget}")]
    Budget { size: u128, budget: u128 },
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
