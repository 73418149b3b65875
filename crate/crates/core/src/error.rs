use thiserror::Error;

#[derive(Debug, Error)]
pub enum CoreError {
    #[error("invalid metric family: {0}")]
    InvalidFamily(String),

    #[error(
        "slab half-width {requested} is outside the admissible range (largest admissible T = {max_admissible})"
    )]
    InadmissibleDomain { requested: f64, max_admissible: f64 },

    #[error("bad discretization: {0}")]
    BadDiscretization(String),

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("singular factorization of the Dirichlet realization")]
    SingularFactorization,

    #[error("degenerate state covariance: {0}")]
    DegenerateState(String),

    #[error("oracle domain violation: {0}")]
    OracleDomain(String),

    #[error("time step {dt} violates the stability bound {bound}")]
    CflViolation { dt: f64, bound: f64 },

    #[error("frequency probe is only defined for ultrastatic families")]
    UnsupportedProbe,
}

pub type Result<T> = std::result::Result<T, CoreError>;
