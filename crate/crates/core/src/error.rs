use thiserror::Error;

/// Errors raised by the arithmetic, Kloosterman and statistics layers.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("characteristic {0} is not prime")]
    NonPrimeP(u64),
    #[error("field modulus is reducible over F_p")]
    ReducibleModulus,
    #[error("modulus degree mismatch: expected {expected}, got {got}")]
    DegreeMismatch { expected: usize, got: usize },
    #[error("field of order {p}^{e} exceeds the supported size")]
    FieldTooLarge { p: u64, e: u32 },
    #[error("element index {0} out of range for this field")]
    InvalidElement(u64),
    #[error("zero has no multiplicative inverse")]
    ZeroInverse,
    #[error("element degree {got} is not below the place degree {degree}")]
    DegreeTooLarge { got: usize, degree: usize },
    #[error("modulus is the zero polynomial")]
    ZeroModulus,
    #[error("operation requires a non-constant polynomial")]
    ConstantPolynomial,
    #[error("operation is undefined on the zero polynomial")]
    ZeroPolynomial,
    #[error("rational function is constant")]
    ConstantFunction,
    #[error("rational function has a pole at the place")]
    PoleAtPlace,
    #[error("place lies in the support of the parameter")]
    PlaceInSupport,
    #[error("polynomial is not monic irreducible")]
    NotAPlace,
    #[error("|Kl| = {kl} exceeds the Weil bound {bound}")]
    WeilViolation { kl: f64, bound: f64 },
    #[error("value {0} outside the domain [0, pi]")]
    OutOfDomain(f64),
    #[error("empty sample")]
    EmptySample,
    #[error("invalid parameters: {0}")]
    InvalidParams(String),
    #[error("(d, h) = ({d}, {h}) is one of the excluded short-interval cases")]
    ExcludedCase { d: usize, h: usize },
    #[error("invalid degree {0}")]
    InvalidDegree(usize),
    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
