use thiserror::Error;

/// Errors raised by evaluation, series and verification routines.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("quadrature did not converge: {0}")]
    NonConvergence(String),

    #[error("invalid contour: {0}")]
    InvalidContour(String),

    #[error("decay degree {decay} does not exceed growth degree {growth}")]
    DegenerateExponent { decay: u32, growth: u32 },

    #[error("theta = {theta} is outside the open decay sector (-{bound}, {bound})")]
    OutOfSector { theta: f64, bound: f64 },

    #[error("index {index} outside [1, {max}]")]
    BadIndex { index: usize, max: usize },

    #[error("duplicate index {0}")]
    DuplicateIndex(usize),

    #[error("unknown function name `{0}`")]
    UnknownName(String),

    #[error("existence certificate failed: {0}")]
    CertFailure(String),

    #[error("seed has {got} entries, the equation has order {expected}")]
    SeedLengthMismatch { expected: usize, got: usize },

    #[error("need at least {needed} nonzero coefficients, got {got}")]
    TooFewCoefficients { needed: usize, got: usize },

    #[error("unknown property `{0}`")]
    UnknownProperty(String),

    #[error("maximum modulus is not positive at r = {0}")]
    NonPositiveModulus(f64),

    #[error("invalid parameters: {0}")]
    InvalidParams(String),
}

pub type Result<T> = std::result::Result<T, Error>;
