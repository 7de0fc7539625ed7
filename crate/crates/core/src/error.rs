use thiserror::Error;

/// Errors produced by the simulation, disorder, and fitting layers.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid parameter `{name}` = {value}: {reason}")]
    InvalidParameter {
        name: &'static str,
        value: f64,
        reason: &'static str,
    },

    #[error(
        "momentum grid of {k_points} points is too small for {steps} steps (need at least {min})"
    )]
    MomentumGridTooSmall {
        k_points: usize,
        steps: usize,
        min: usize,
    },

    #[error("the polar density of a {0} distribution is singular")]
    SingularDensity(&'static str),

    #[error("target strength {target} is outside the achievable range [{min}, {max}] for {kind}")]
    StrengthOutOfRange {
        kind: &'static str,
        target: f64,
        min: f64,
        max: f64,
    },

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("underdetermined fit: {0}")]
    Underdetermined(String),

    #[error("fit did not converge after {iterations} iterations (best chi2 = {chi2}, params = {params:?})")]
    NoConvergence {
        iterations: usize,
        chi2: f64,
        params: [f64; 3],
    },
}

pub type Result<T> = std::result::Result<T, Error>;
