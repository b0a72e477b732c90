use thiserror::Error;

/// Errors raised by the special-function, Heun and scattering layers.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("gamma function pole at {re}{im:+}i")]
    Pole { re: f64, im: f64 },

    #[error("hypergeometric parameter degeneracy: {0}")]
    ParameterDegeneracy(String),

    #[error("series did not converge: {0}")]
    NonConvergence(String),

    #[error(
        "gamma parameter {re}{im:+}i is too close to an integer for the recurrence at n = {n}"
    )]
    DegenerateGamma { re: f64, im: f64, n: usize },

    #[error("recurrence denominator vanishes at n = {0}")]
    DegenerateRecurrence(usize),

    #[error("fundamental-solution coefficient denominator vanishes: {0}")]
    DegenerateCoefficient(String),

    #[error("energy regime not supported: {0}")]
    Regime(String),

    #[error("invalid physical configuration: {0}")]
    InvalidConfig(String),

    #[error("integration step too large: transmission changed by {change:e} on step halving")]
    StepTooLarge { change: f64 },

    #[error("plane-wave decomposition unstable: relative variation {variation:e}")]
    DecompositionUnstable { variation: f64 },
}

pub type Result<T> = std::result::Result<T, Error>;
