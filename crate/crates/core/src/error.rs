use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("adaptive quadrature exceeded depth {depth} on [{lo}, {hi}]")]
    NonConvergence { lo: f64, hi: f64, depth: u32 },

    #[error("matrix is not symmetric (max asymmetry {0:e})")]
    NotSymmetric(f64),

    #[error("assumption check failed at s = {s}: {clause}")]
    CertificationFailed { s: f64, clause: String },

    #[error("iterate overflowed at step {iter}")]
    NumericOverflow { iter: usize },

    #[error("loss is not twice differentiable at s = {0}")]
    NotDifferentiable(f64),

    #[error("initialization lies on an invariant line |x0| = y0")]
    OnInvariantLine,

    #[error("no convergence within {0} iterations")]
    MaxItersExceeded(usize),

    #[error("iterate hit the axis exactly at step {0} while above the stability threshold")]
    HitAxisExactly(usize),

    #[error("trajectory has not converged")]
    NotConverged,

    #[error("no root: eta * y^2 = {0} is not above the stability threshold")]
    NoRoot(f64),

    #[error("target {0} must be positive")]
    NonPositiveTarget(f64),

    #[error("sample {sample} sits on a ReLU kink")]
    KinkEncountered { sample: usize },

    #[error("power-law fit is degenerate: {0}")]
    DegenerateFit(String),

    #[error("{failed} sweep point(s) failed; see {}", .manifest.display())]
    SweepFailed { failed: usize, manifest: std::path::PathBuf },

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
