//! Discrete-time quantum walks on a line whose coin carries quenched
//! (glassy) spherical disorder.
//!
//! The crate evolves the walker exactly in position space (with a momentum
//! space cross-check), samples coins from five spherical disorder families,
//! averages the walker's spread over disorder configurations, and fits the
//! scaling exponent of that spread and its response to disorder strength.

pub mod coin;
pub mod disorder;
pub mod error;
pub mod experiment;
pub mod momentum;
pub mod quadrature;
pub mod quench;
pub mod response;
pub mod scaling;
pub mod sphere;
pub mod walk;

pub use coin::{biased_hadamard, CoinMatrix, CoinParams};
pub use disorder::{sigma_dis, strength_to_param, DisorderKind, DisorderSpec};
pub use error::{Error, Result};
pub use experiment::ExperimentConfig;
pub use momentum::{default_k_points, momentum_evolve};
pub use quench::{quenched_sweep, run_configuration, SpreadRow, SpreadSeries, SweepPlan};
pub use response::{
    chi2_error, fit_gaussian_model, fit_parabola, inflection_point, parabola_minimum, FitModel,
    FitResult, ResponsePoint,
};
pub use scaling::{fit_alpha, ScalingResult};
pub use sphere::SpherePoint;
pub use walk::{
    evolve, initial_state, position_distribution, position_std, step, PositionDistribution,
    WalkerState,
};
