//! Shapley values and Shapley uncertainty for cooperative games.
//!
//! The uncertainty of player `i` is the variance of its marginal
//! contribution `G(S + i) - G(S)` when `S` is drawn from the coalition
//! distribution that defines the value; its mean is the value itself.
//!
//! - [`game`]: coalitions, characteristic functions, generators and algebra.
//! - [`exact`] and [`fastpath`]: exact moments by enumeration or closed form.
//! - [`sampling`]: seeded Monte Carlo over random orderings.
//! - [`analysis`]: payoff bounds, significance, property suites and sweeps.

pub mod analysis;
pub mod coalition;
pub mod error;
pub mod exact;
pub mod fastpath;
pub mod game;
pub mod numeric;
pub mod sampling;
pub mod weighting;

pub use coalition::{Coalition, PlayerId};
pub use error::{Error, Result};
pub use exact::{
    all_profiles, average_uncertainty, marginal_covariance, ordering_marginal_sum,
    permutation_oracle, profile, ExactEngine, Ordering, PlayerProfile,
};
pub use game::{Game, GameForm, TypeTag};
pub use sampling::{estimate, estimate_all, estimate_parallel, EstimateReport, SampleStats};
pub use weighting::Weighting;
