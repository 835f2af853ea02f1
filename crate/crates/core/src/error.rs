use alloc::string::String;
use core::fmt;

/// Errors raised by the core arithmetic and analysis routines.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Error {
    /// Field parameters are not a prime power with an irreducible modulus.
    InvalidField(String),
    /// An element or polynomial does not belong to the field it was used with.
    InvalidElement(String),
    DivisionByZero,
    /// Two torus values of different precision were combined.
    PrecisionMismatch { left: usize, right: usize },
    /// A computation needs more known coefficients than are available.
    InsufficientPrecision { required: usize, available: usize },
    /// Vectors or subspaces live in different ambient groups.
    DimensionMismatch(String),
    /// An enumeration would exceed the documented guard.
    BoundExceeded { what: &'static str, size: u128, limit: u128 },
    NotCoprime,
    ZeroPolynomial,
    /// Hensel lifting needs the derivative to be a unit mod the prime.
    NonUnitDerivative,
    /// The divisor ladder did not stabilize within its length.
    NoStabilization { steps: usize },
    InvalidArgument(String),
}

impl Error {
    /// A stable machine-readable identifier for the error kind.
    pub fn code(&self) -> &'static str {
        match self {
            Error::InvalidField(_) => "invalid_field",
            Error::InvalidElement(_) => "invalid_element",
            Error::DivisionByZero => "division_by_zero",
            Error::PrecisionMismatch { .. } => "precision_mismatch",
            Error::InsufficientPrecision { .. } => "insufficient_precision",
            Error::DimensionMismatch(_) => "dimension_mismatch",
            Error::BoundExceeded { .. } => "bound_exceeded",
            Error::NotCoprime => "not_coprime",
            Error::ZeroPolynomial => "zero_polynomial",
            Error::NonUnitDerivative => "non_unit_derivative",
            Error::NoStabilization { .. } => "no_stabilization",
            Error::InvalidArgument(_) => "invalid_argument",
        }
    }
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::InvalidField(msg) => write!(f, "invalid field: {msg}"),
            Error::InvalidElement(msg) => write!(f, "invalid element: {msg}"),
            Error::DivisionByZero => f.write_str("division by the zero polynomial"),
            Error::PrecisionMismatch { left, right } => {
                write!(f, "precision mismatch: {left} vs {right}")
            }
            Error::InsufficientPrecision { required, available } => write!(
                f,
                "insufficient precision: need {required} coefficients, have {available}"
            ),
            Error::DimensionMismatch(msg) => write!(f, "dimension mismatch: {msg}"),
            Error::BoundExceeded { what, size, limit } => {
                write!(f, "{what}: size {size} exceeds guard {limit}")
            }
            Error::NotCoprime => f.write_str("moduli are not pairwise coprime"),
            Error::ZeroPolynomial => f.write_str("operation undefined for the zero polynomial"),
            Error::NonUnitDerivative => f.write_str("derivative is not a unit mod the prime"),
            Error::NoStabilization { steps } => {
                write!(f, "subtorus estimate did not stabilize within {steps} ladder steps")
            }
            Error::InvalidArgument(msg) => write!(f, "invalid argument: {msg}"),
        }
    }
}

impl core::error::Error for Error {}

pub type Result<T> = core::result::Result<T, Error>;
