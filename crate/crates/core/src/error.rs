use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("arithmetic context mismatch: {0}")]
    ModeMismatch(String),
    #[error("radicands {0} and {1} do not generate a biquadratic field")]
    NotAField(String, String),
    #[error("element is not invertible")]
    NotInvertible,
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("pencil needs an even number (>= 6) of coefficients, got {0}")]
    WrongLength(usize),
    #[error("coefficients {i} and {j} coincide ({value}); X would be singular")]
    DuplicateLambda { i: usize, j: usize, value: String },
    #[error("the zero form has no roots")]
    ZeroForm,
    #[error("interpolation parameters {0} and {1} coincide")]
    RepeatedParameter(usize, usize),
    #[error("overdetermined interpolation data is inconsistent")]
    InconsistentData,
    #[error("need at least {need} samples, got {got}")]
    NotEnoughSamples { need: usize, got: usize },
    #[error("point sampling gave up after {0} attempts")]
    ResampleBudgetExceeded(usize),
    #[error("point does not lie on X (residual {0})")]
    NotOnVariety(String),
    #[error("covector does not vanish on the point (residual {0})")]
    CovectorConstraint(String),
    #[error("numerical rank is ambiguous: singular value ratio {0:e} lies in the tolerance band")]
    RankAmbiguity(f64),
    #[error("covector restricts to zero on the tangent space")]
    DegenerateCovector,
    #[error("samples come from different pencils")]
    PencilMismatch,
    #[error("training samples do not determine the identification up to scale: {0}")]
    RankDeficientTraining(String),
    #[error("holdout sample {0} was used for training")]
    HoldoutOverlap(usize),
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("no local chart: every pivot candidate is below tolerance")]
    ChartSelection,
    #[error("unexpected splitting type {0:?}")]
    UnexpectedSplitting(Vec<usize>),
    #[error("matrix is not skew-symmetric")]
    NotSkew,
    #[error("rank-two decomposition needs rank 2, got {0}")]
    RankNotTwo(usize),
    #[error("rank-two decomposition needs a non-nilpotent map")]
    NilpotentInput,
    #[error("point must be in exact mode")]
    NonExactPoint,
    #[error("parse error: {0}")]
    Parse(String),
}
