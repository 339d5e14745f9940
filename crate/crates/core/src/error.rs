use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, Error)]
pub enum Error {
    #[error("point {point:?} lies outside the chart domain: {reason}")]
    Domain { point: Vec<f64>, reason: String },

    #[error("non-finite value at node {location:?}: {what}")]
    Numeric { location: Vec<f64>, what: String },

    #[error("metric is not positive definite / invertible at {point:?}")]
    SingularMetric { point: Vec<f64> },

    #[error("degenerate induced boundary metric at {point:?}")]
    DegenerateBoundary { point: Vec<f64> },

    #[error("unsupported geodesic radius {radius}: {reason}")]
    UnsupportedRadius { radius: f64, reason: String },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("not a critical point: critical residual {residual:e} exceeds {tolerance:e}")]
    InvalidCriticalPoint { residual: f64, tolerance: f64 },

    #[error("boundary condition violated: {0}")]
    BoundaryCondition(String),

    #[error("newton iteration did not converge after {iterations} iterations; residual trace {trace:?}")]
    Nonconvergence { iterations: usize, trace: Vec<f64> },

    #[error("degenerate profile system: harmonic eigenvalue {eigenvalue} must exceed sphere dimension {sphere_dim}")]
    DegenerateSystem { eigenvalue: f64, sphere_dim: usize },

    #[error("profile support error: {0}")]
    Support(String),

    #[error("operator is singular or not positive: {0}")]
    EigenvalueCollision(String),

    #[error("radius mismatch: {0}")]
    RadiusMismatch(String),
}

impl Error {
    pub(crate) fn domain(point: &[f64], reason: impl Into<String>) -> Self {
        Error::Domain { point: point.to_vec(), reason: reason.into() }
    }
}
