use thiserror::Error;

/// Errors shared across the library.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("matrix shape mismatch: {0}")]
    ShapeMismatch(String),
    #[error("singular matrix")]
    SingularMatrix,
    #[error("argument is zero")]
    ZeroArgument,
    #[error("not a unit at p")]
    NotAUnit,
    #[error("matrix is not symmetric")]
    NotSymmetric,
    #[error("gauss sum precision too low (need N >= val_p(a*c) + 3)")]
    PrecisionTooLow,
    #[error("gauss sum does not snap to an eighth root of unity")]
    SnapFailure,
    #[error("matrix is not a similitude of the form")]
    NotSimilitude,
    #[error("element is not an isometry (nu != 1)")]
    NotIsometry,
    #[error("weyl index out of range")]
    IndexOutOfRange,
    #[error("scale factor must be nonzero")]
    ZeroScale,
    #[error("random generation retries exhausted")]
    RetryExhausted,
    #[error("no unitary character chi available: m odd requires Delta a unit non-residue at p")]
    ChiUnavailable,
    #[error("subspace is not Lagrangian")]
    NotLagrangian,
    #[error("degenerate form where a nondegenerate one was required")]
    DegenerateForm,
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    #[error("unknown suite: {0}")]
    UnknownSuite(String),
    #[error("similitude with requested factor not found within search bound")]
    NotFound,
    #[error("internal calibration mismatch: {0}")]
    Calibration(String),
}

pub type Result<T> = std::result::Result<T, Error>;
