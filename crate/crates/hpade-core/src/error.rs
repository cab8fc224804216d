use thiserror::Error;

pub type Result<T> = std::result::Result<T, CoreError>;

#[derive(Debug, Error)]
pub enum CoreError {
    #[error("parameter out of domain: {0}")]
    ParameterDomain(String),

    #[error("evaluation point on the branch cut: {0}")]
    BranchCut(String),

    #[error("segment endpoint reached: {0}")]
    Endpoint(String),

    #[error("working precision exhausted: {0}")]
    PrecisionExhausted(String),

    #[error("linear system rank-deficient (defect {defect}): {context}")]
    RankDeficient { defect: usize, context: String },

    #[error("iteration did not converge: {0}")]
    NonConvergence(String),

    #[error("result kind mismatch: {0}")]
    KindMismatch(String),

    #[error("not enough Laurent coefficients: need {needed}, have {available}")]
    InsufficientCoefficients { needed: usize, available: usize },

    #[error("measure supports overlap: {0}")]
    Overlap(String),

    #[error("denominator nearly vanishes at the evaluation point: {0}")]
    PoleProximity(String),

    #[error("negative density at a collocation node: {0}")]
    NegativeDensity(String),

    #[error("equilibrium identity violated: worst residual {residual} at {location}")]
    IdentityViolation { residual: f64, location: String },

    #[error("sign-change sampling under-resolved: {0}")]
    SamplingResolution(String),
}
