use thiserror::Error;

/// Errors shared across the geometry, tractor, transport and analysis layers.
#[derive(Debug, Error)]
pub enum Error {
    #[error("point outside chart domain: {0}")]
    Domain(String),

    #[error("metric is numerically degenerate: |det g| = {det:.3e}, tolerance {tol:.3e}")]
    DegenerateMetric { det: f64, tol: f64 },

    #[error("operation requires dimension {required}, metric has dimension {actual}")]
    Dimension { required: usize, actual: usize },

    #[error("tractor gauge mismatch: {0}")]
    GaugeMismatch(String),

    #[error("sigma component vanishes along the curve (|sigma| = {0:.3e}); section cannot be recurrent-rescaled")]
    SigmaVanishes(f64),

    #[error("ODE integrator failed: {0}")]
    IntegratorFailure(String),

    #[error("curve left the chart domain at t = {0}")]
    DomainExit(f64),

    #[error("metric family does not expose a recurrent lightlike field")]
    NoRecurrentField,

    #[error("base metric is not Einstein: max |Ric - (S/d) g| = {0:.3e}")]
    NotEinstein(f64),

    #[error("base scalar curvature is zero (|S| = {0:.3e}); construction needs S != 0")]
    ZeroScalar(f64),

    #[error("invalid spacetime specification: {0}")]
    Spec(String),

    #[error("metric is not a pr-wave: {0}")]
    NotPrWave(String),

    #[error("hypothesis failed: {0}")]
    HypothesisFailed(String),

    #[error("problem too large: {actual} unknowns exceeds cap {cap}")]
    TooLarge { actual: usize, cap: usize },

    #[error("expression error: {0}")]
    Expr(String),
}

pub type Result<T> = std::result::Result<T, Error>;
