use thiserror::Error;

/// Failure of a single tridiagonal solve or of system validation.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SolveError {
    #[error("system has no unknowns")]
    Empty,
    #[error("coefficient vector length {found} does not match system size {expected}")]
    LengthMismatch { expected: usize, found: usize },
    #[error("boundary coefficient must be zero (a[0] = 0 and c[n-1] = 0)")]
    BoundaryCoefficient,
    #[error("row {index} is not strictly diagonally dominant")]
    NotDiagonallyDominant { index: usize },
    #[error("zero pivot at row {index}")]
    ZeroPivot { index: usize },
    #[error("matrix is singular at column {column}")]
    SingularMatrix { column: usize },
    #[error("dense oracle limited to n <= {limit}, got {n}")]
    OracleTooLarge { n: usize, limit: usize },
    #[error("invalid tile plan: n = {n}, t = {tiles} ({reason})")]
    InvalidTilePlan {
        n: usize,
        tiles: usize,
        reason: &'static str,
    },
    #[error("tiles are inconsistent: {0}")]
    MismatchedTiles(&'static str),
}

/// A system inside a batch failed to solve.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("system {system}: {source}")]
pub struct BatchError {
    pub system: usize,
    #[source]
    pub source: SolveError,
}
