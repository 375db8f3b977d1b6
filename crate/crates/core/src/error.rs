use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid mesh: {0}")]
    InvalidMesh(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("length mismatch: expected {expected}, found {found}")]
    LengthMismatch { expected: usize, found: usize },

    #[error("non-finite value {value} in {stage} at x = {x}")]
    NonFinite { stage: &'static str, x: f64, value: f64 },

    #[error("tridiagonal elimination broke down at row {row} (pivot {pivot:e})")]
    Breakdown { row: usize, pivot: f64 },

    #[error("problem '{0}' has no exact solution registered")]
    MissingExactSolution(String),

    #[error("problem '{name}': -u'' = f fails at x = {x} (residual {residual:e})")]
    InconsistentProblem { name: String, x: f64, residual: f64 },

    #[error("no triangle rule of degree {0} (available 1..={max})", max = crate::geometry2d::MAX_RULE_DEGREE)]
    UnavailableDegree(usize),

    #[error("triangle is not equilateral (side lengths {0:?})")]
    NotEquilateral([f64; 3]),

    #[error("point ({x}, {y}) lies outside the triangle")]
    OutsideTriangle { x: f64, y: f64 },

    #[error("row {row} (n = {n}): {quantity} = {error:e} exceeds bound {bound:e}")]
    BoundViolated {
        row: usize,
        n: usize,
        quantity: &'static str,
        error: f64,
        bound: f64,
    },

    #[error("{0}")]
    Parse(String),

    #[error("i/o error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}
