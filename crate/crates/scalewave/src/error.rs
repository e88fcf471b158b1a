//! Crate-wide error type.

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;

/// Everything that can go wrong across the solver stack.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    /// (mu - 1)^2 - 4 nu2 came out negative; the oscillatory regime is not supported.
    #[error("negative discriminant delta = {delta:e} for mu = {mu}, nu2 = {nu2}; only delta >= 0 is supported")]
    NegativeDelta { mu: f64, nu2: f64, delta: f64 },

    /// Damping or mass coefficient outside [0, inf).
    #[error("coefficients must be nonnegative, got mu = {mu}, nu2 = {nu2}")]
    NegativeCoefficient { mu: f64, nu2: f64 },

    /// Spatial dimension outside {1, 2, 3}.
    #[error("unsupported spatial dimension {dim}; expected 1, 2, or 3")]
    UnsupportedDimension { dim: usize },

    /// Mixed-dimension inputs (e.g. 2-d initial data with a 3-d source).
    #[error("dimension mismatch: {context}")]
    DimensionMismatch { context: String },

    /// Argument outside the domain of a kernel or special function.
    #[error("domain error: {context}")]
    Domain { context: String },

    /// Hypergeometric series failed to meet its tolerance within the term budget.
    #[error(
        "hypergeometric series for F({a}, {b}; {c}; {z}) did not reach tolerance {tolerance:e} \
         within {max_terms} terms"
    )]
    NoConvergence {
        a: f64,
        b: f64,
        c: f64,
        z: f64,
        tolerance: f64,
        max_terms: usize,
    },

    /// Difference stencil for an iterated time derivative would leave t > 0.
    #[error("finite-difference step {step:e} too large for evaluation at t = {t:e}")]
    StepTooLarge { step: f64, t: f64 },

    /// Explicit time step violates the stability bound dt <= 0.9 dx.
    #[error("CFL violation: dt = {dt:e} exceeds the stability limit {limit:e} (0.9 dx)")]
    CflViolation { dt: f64, limit: f64 },

    /// Finite-difference grid cannot contain the cone of dependence of a probe point.
    #[error("grid too small: {context}")]
    DomainTooSmall { context: String },

    /// Bad run configuration (unknown keys, missing fields, unparsable values).
    #[error("config error: {0}")]
    Config(String),

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

impl Error {
    /// Process exit code for the CLI: 2 for configuration problems, 3 for
    /// numeric failures.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Config(_) | Error::Io(_) => 2,
            _ => 3,
        }
    }
}
