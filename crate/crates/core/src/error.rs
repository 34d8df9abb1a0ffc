use thiserror::Error;

/// Errors raised by the spectral solvers.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("mode frequency must be positive, got omega = {0}")]
    NonPositiveOmega(f64),
    #[error("squeezing too strong: |2 lambda| = {two_lambda} >= omega = {omega}")]
    SqueezeTooStrong { two_lambda: f64, omega: f64 },
    #[error("parameter `{0}` is not finite")]
    NonFinite(&'static str),
    #[error("operation requires lambda != 0")]
    LambdaZero,
    #[error("operation requires lambda = 0, got {0}")]
    LambdaNotZero(f64),
    #[error("operation requires delta = 0, got {0}")]
    DeltaNotZero(f64),
    #[error("operation requires g != 0 (singular points collide)")]
    GZero,
    #[error("operation requires g = 0, got {0}")]
    GNotZero(f64),
    #[error("expansion point {0} is an irregular singularity")]
    IrregularPoint(f64),
    #[error("invalid differential equation: {0}")]
    InvalidOde(&'static str),
    #[error("recurrence is resonant at index {index} (compatibility residual {residual:e})")]
    ResonantIndex { index: usize, residual: f64 },
    #[error("series did not converge within {terms} terms (relative tail {tail:e})")]
    NonConverged { terms: usize, tail: f64 },
    #[error("evaluation point {x} lies outside the convergence disk of radius {radius} about {z0}")]
    EvalPointOutOfDisk { x: f64, z0: f64, radius: f64 },
    #[error("Kummer function pole: b = {0} is a nonpositive integer")]
    PoleInB(f64),
    #[error("biconfluent Heun series undefined: gamma = {0} is a nonnegative integer")]
    GammaResonance(f64),
    #[error("singular points are complex (q^2 = {0} < 0)")]
    ComplexSingularity(f64),
    #[error("singular points nearly coincide (q = {0})")]
    DegenerateQ(f64),
    #[error("Fock cutoff must be nonnegative, got {0}")]
    NegativeCutoff(i64),
    #[error("requested {requested} eigenvalues from a space of dimension {dimension}")]
    TooManyLevels { requested: usize, dimension: usize },
    #[error("dense symmetric eigensolver did not converge")]
    NonConvergedEigensolver,
}

pub type Result<T> = std::result::Result<T, Error>;
