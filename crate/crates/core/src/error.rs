use thiserror::Error;

/// Errors produced anywhere in the library.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("{0} is not prime")]
    NonPrime(u64),
    #[error("extension degree must be at least 1")]
    DegreeZero,
    #[error("field size {p}^{m} exceeds the configured bound {bound}")]
    BoundExceeded { p: u64, m: u32, bound: u64 },
    #[error("modulus polynomial is not a monic irreducible of degree {0}")]
    ReducibleModulus(u32),
    #[error("operands belong to different fields")]
    FieldMismatch,
    #[error("division by zero")]
    DivisionByZero,
    #[error("discrete logarithm of zero")]
    LogOfZero,
    #[error("operation requires odd characteristic")]
    EvenCharacteristic,
    #[error("invalid field element: {0}")]
    InvalidElement(String),

    #[error("{a} is not a unit modulo {n}")]
    NotAUnit { a: u64, n: u64 },
    #[error("matrix is {rows}x{cols}, expected square")]
    NotSquare { rows: usize, cols: usize },
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("index {k} out of range 1..={n}")]
    BadIndex { k: usize, n: usize },
    #[error("point has {got} coordinates, polynomial has {expected} variables")]
    ArityMismatch { expected: usize, got: usize },
    #[error("polynomial is not triangular: {0}")]
    NotTriangular(String),
    #[error("polynomial is not fully triangular")]
    NotFullyTriangular,
    #[error("invalid polynomial: {0}")]
    InvalidPolynomial(String),
    #[error("target exponents must be positive, got {0}")]
    BadTargetExponent(u64),

    #[error("closed form produced a non-integral value: {0}")]
    NonIntegralResult(String),
    #[error("closed-form routes disagree: {0}")]
    FormulaMismatch(String),

    #[error("enumeration needs {points} points, budget is {budget}")]
    BudgetExceeded { points: String, budget: u64 },
    #[error(
        "character sum value {value} is {distance:.3e} away from an integer (bound {bound:.3e})"
    )]
    PrecisionLoss {
        value: f64,
        distance: f64,
        bound: f64,
    },
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    /// A stable snake_case identifier for machine-readable output.
    pub fn code(&self) -> &'static str {
        match self {
            Error::NonPrime(_) => "non_prime",
            Error::DegreeZero => "degree_zero",
            Error::BoundExceeded { .. } => "bound_exceeded",
            Error::ReducibleModulus(_) => "reducible_modulus",
            Error::FieldMismatch => "field_mismatch",
            Error::DivisionByZero => "division_by_zero",
            Error::LogOfZero => "log_of_zero",
            Error::EvenCharacteristic => "even_q",
            Error::InvalidElement(_) => "invalid_element",
            Error::NotAUnit { .. } => "not_a_unit",
            Error::NotSquare { .. } => "not_square",
            Error::DimensionMismatch(_) => "dimension_mismatch",
            Error::BadIndex { .. } => "bad_index",
            Error::ArityMismatch { .. } => "arity_mismatch",
            Error::NotTriangular(_) => "not_triangular",
            Error::NotFullyTriangular => "not_fully_triangular",
            Error::InvalidPolynomial(_) => "invalid_polynomial",
            Error::BadTargetExponent(_) => "bad_target_exponent",
            Error::NonIntegralResult(_) => "non_integral_result",
            Error::FormulaMismatch(_) => "formula_mismatch",
            Error::BudgetExceeded { .. } => "budget_exceeded",
            Error::PrecisionLoss { .. } => "precision_loss",
        }
    }
}
