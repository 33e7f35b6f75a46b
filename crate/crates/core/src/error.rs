use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("dimension must be at least {min}, got {found}")]
    DimensionTooSmall { min: usize, found: usize },

    #[error("non-finite entry at index {index}")]
    NonFinite { index: usize },

    #[error("matrix is not Hermitian: max |h_ij - conj(h_ji)| = {deviation:e}")]
    NotHermitian { deviation: f64 },

    #[error("Jacobi eigensolver did not converge after {sweeps} sweeps (off-diagonal residual {residual:e})")]
    NotConverged { sweeps: usize, residual: f64 },

    #[error("state is not normalized: norm deviation {deviation:e}")]
    NotNormalized { deviation: f64 },

    #[error("density matrix is not positive semidefinite: smallest eigenvalue {min_eigenvalue:e}")]
    NotPositive { min_eigenvalue: f64 },

    #[error("expectation value has imaginary residual {residual:e}")]
    ImaginaryResidual { residual: f64 },

    #[error("state is mixed (largest density eigenvalue {top_eigenvalue}); amplitude-based bounds need a pure state")]
    Purity { top_eigenvalue: f64 },

    #[error("basis is not orthonormal: max |<u_i|u_j> - delta_ij| = {deviation:e}")]
    NonOrthonormal { deviation: f64 },

    #[error("invalid permutation: {0}")]
    InvalidPermutation(String),

    #[error("index k = {k} out of range 0..={n}")]
    IndexOutOfRange { k: usize, n: usize },

    #[error("strategy {strategy} not applicable: {reason}")]
    StrategyMismatch { strategy: &'static str, reason: String },

    #[error("enumeration over n = {n} exceeds the limit n <= {limit}")]
    TooLarge { n: usize, limit: usize },

    #[error("coefficient vectors must be nonnegative and finite (index {index})")]
    InvalidCoefficient { index: usize },

    #[error("empty support: every coefficient pair is zero")]
    EmptySupport,

    #[error("input is not sorted descending at index {index}")]
    Unsorted { index: usize },

    #[error("empty input: {0}")]
    Empty(&'static str),

    #[error("{0}")]
    Schema(String),

    #[error("row {row} (theta = {theta}): {detail}")]
    Containment { row: usize, theta: f64, detail: String },
}
