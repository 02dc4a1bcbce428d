use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("exponents outside the window 1 < p < 1 + 4/N < q < 2* - 1: N={dim}, p={p}, q={q}")]
    ExponentOrdering { dim: usize, p: f64, q: f64 },

    #[error("coefficient {name} must be positive, got {value}")]
    NonPositiveCoefficient { name: &'static str, value: f64 },

    #[error("spatial dimension must be 1, 2 or 3, got {0}")]
    BadDimension(usize),

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("derivative stencil under-resolved: relative Richardson disagreement {disagreement:.3e}")]
    ResolutionTooCoarse { disagreement: f64 },

    #[error("rescaling pushes a mass fraction {tail_fraction:.3e} outside the box")]
    ScalingOutOfBox { tail_fraction: f64 },

    #[error("adaptive integrator cannot meet the tolerance at r={r} (step {step:.3e})")]
    StiffnessFailure { r: f64, step: f64 },

    #[error("amplitude bracket [{lo}, {hi}] does not separate diverging from crossing trajectories")]
    BracketingFailure { lo: f64, hi: f64 },

    #[error("truncation radius too small: terminal value {terminal:.3e} vs amplitude {phi0:.3e}")]
    TruncationTooSmall { terminal: f64, phi0: f64 },

    #[error("stationary identity violated: {name} residual {residual:.3e} exceeds {tolerance:.1e}")]
    IdentityViolation {
        name: &'static str,
        residual: f64,
        tolerance: f64,
    },

    #[error("scaling curve energy E(v) = {energy:.6e} is not positive")]
    NotPositiveEnergy { energy: f64 },

    #[error("scaling curve is degenerate (needs c2, c_alpha, c_beta > 0), no four-point structure")]
    NotFourPoint,

    #[error("hypothesis failure: {0}")]
    HypothesisFailure(String),

    #[error("no sign change over [{lo}, {hi}]")]
    NoSignChange { lo: f64, hi: f64 },

    #[error("boundary-adjacent mass fraction {fraction:.3e} at t={time}: box too small")]
    BoxMassLeak { fraction: f64, time: f64 },

    #[error("virial residual needs at least {need} uniform samples, got {got}")]
    TooFewSamples { got: usize, need: usize },

    #[error("invariant violated at sample {sample} (t={time}): {detail}")]
    InvariantViolation {
        sample: usize,
        time: f64,
        detail: String,
    },

    #[error("malformed {kind} file: {detail}")]
    Format { kind: &'static str, detail: String },

    #[error("io: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}
