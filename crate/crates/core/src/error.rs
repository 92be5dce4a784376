use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("zero denominator")]
    ZeroDenominator,
    #[error("division by zero")]
    DivisionByZero,
    #[error("{0} exceeds the double range")]
    Overflow(String),
    #[error("tolerance must be positive, got {0}")]
    NonPositiveTolerance(f64),
    #[error("cannot parse scalar {0:?}")]
    ScalarParse(String),

    #[error("bad weight: {0}")]
    BadWeight(String),
    #[error("site {site} out of range 1..={n_sites}")]
    BadSite { site: usize, n_sites: usize },
    #[error("color {color} out of range 1..={n_colors}")]
    BadColor { color: usize, n_colors: usize },
    #[error("bad basis state: {0}")]
    BadState(String),
    #[error("q-parameter is not invertible")]
    NonInvertibleQ,
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("scalar domain mismatch: {0}")]
    DomainMismatch(String),
    #[error("operator leaves the sector: entry at row {row}, column {col}")]
    NotBlockDiagonal { row: String, col: String },

    #[error("pole hit: {0}")]
    PoleHit(String),
    #[error("identity {name} violated: {witness}")]
    IdentityViolation { name: String, witness: String },

    #[error("joint spectrum not resolved in sector {sector}: max residual {residual:e}")]
    DegeneracyUnresolved { sector: String, residual: f64 },
    #[error("eigensolver did not converge: {0}")]
    NonConvergence(String),
    #[error("zero K-eigenvalue at site {site}")]
    ZeroEigenvalue { site: usize },
    #[error("{0} needs floating-point mode (mode = float)")]
    NeedsFloat(String),
    #[error("Lax spectrum mismatch in sector {sector}: eigenstate {state}, deviation {deviation:e}")]
    MatchFailure { sector: String, state: usize, deviation: f64 },

    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("generic position violated: {0}")]
    GenericPosition(String),
    #[error("invalid configuration: {0}")]
    Config(String),
}
