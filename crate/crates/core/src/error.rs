use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameters: {0}")]
    InvalidParams(String),

    #[error("domain size {size} exceeds the brute-force cap {cap}")]
    DomainTooLarge { size: u128, cap: u64 },

    #[error("instance generation failed: {0}")]
    Generation(String),

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("operation not supported in this mode: {0}")]
    UnsupportedMode(String),

    #[error("invalid state: {0}")]
    InvalidState(String),

    #[error("entropy promise violated: |gap| = {gap:.6} < {delta}")]
    PromiseViolation { gap: f64, delta: f64 },

    #[error("value outside the domain: {0}")]
    Domain(String),

    #[error("unphysical mode: nu = {nu} < 1/2")]
    UnphysicalMode { nu: f64 },

    #[error("symplectic spectrum not paired: residual {residual:e} (tolerance {tolerance:e})")]
    NumericalDegeneracy { residual: f64, tolerance: f64 },

    #[error("no blocksize up to d = {dimension} satisfies the decoding condition")]
    Infeasible { dimension: usize },
}
