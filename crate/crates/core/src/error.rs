use thiserror::Error;

/// Every fallible operation in the crate reports one of these.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum CocycleError {
    #[error("domain error: {0}")]
    Domain(String),
    #[error("degenerate configuration: {0}")]
    Degenerate(String),
    #[error("invalid certificate: {0}")]
    InvalidCertificate(String),
    #[error("budget exceeded: {0}")]
    Budget(String),
    #[error("no convergence after {iterations} iterations (last residual {residual:e})")]
    Convergence { iterations: usize, residual: f64 },
    #[error("direction {angle} lies outside the cone")]
    OutsideCone { angle: f64 },
    #[error("direction estimate too coarse: radius {radius:e} exceeds resolution {resolution:e}")]
    Precision { radius: f64, resolution: f64 },
    #[error("contraction scheme incomplete: {0}")]
    SchemeIncomplete(String),
}

pub type Result<T> = std::result::Result<T, CocycleError>;
