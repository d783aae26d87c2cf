use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("matrix is not unimodular: |det| = {det}")]
    NotUnimodular { det: i64 },
    #[error("matrix is not hyperbolic: |trace| = {trace} <= 2")]
    NotHyperbolic { trace: i64 },
    #[error("exact integer arithmetic overflow: {0}")]
    Overflow(String),
    #[error("precision loss: {0}")]
    PrecisionLoss(String),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("roof is not certifiably positive (certified lower bound {bound})")]
    NonPositiveRoof { bound: f64 },
    #[error("weight is not certifiably positive")]
    NonPositiveWeight,
    #[error("no periodic orbits with period <= {k_max}")]
    EmptyCatalog { k_max: usize },
    #[error("flows have different base matrices")]
    BaseMismatch,
    #[error("small divisor {divisor:e} at degree {degree}")]
    ResonanceAtTruncation { degree: usize, divisor: f64 },
    #[error("invalid jet: {0}")]
    InvalidJet(String),
    #[error("finite-difference step too small: rounding bound {bound:e}")]
    StepTooSmall { bound: f64 },
    #[error("tilt amplitude {amplitude} exceeds {limit}")]
    TiltTooLarge { amplitude: f64, limit: f64 },
    #[error("increments not monotonically decreasing over the last points")]
    NotConverged,
    #[error("exponent recovery inconclusive: {0}")]
    Inconclusive(String),
    #[error("zero test ambiguous: |{quantity}| = {value:e} lies in the ambiguity band")]
    ToleranceAmbiguity { quantity: &'static str, value: f64 },
    #[error("cost gate: k_cap = {k_cap} exceeds {limit}")]
    CostGate { k_cap: usize, limit: usize },
    #[error("no cocycle vanishes on orbit (k = {k})")]
    HypothesisViolated { k: usize },
    #[error("assignment violates the structural form at {0}")]
    InvalidAssignment(String),
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
}

impl Error {
    /// True for errors raised by numeric gates (precision or cost limits).
    pub fn is_numeric_gate(&self) -> bool {
        matches!(self, Error::PrecisionLoss(_) | Error::CostGate { .. } | Error::Overflow(_))
    }
}
