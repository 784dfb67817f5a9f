//! Simulation and verification laboratory for PAC learning under a known
//! family of marginal distributions.
//!
//! The crate provides the concrete families studied in this setting (noisy
//! hypercube dictators, the categorical indicator family, a finite
//! Benedek–Itai analogue), exact and empirical classification distances,
//! covers and metric-entropy profiles, the learner reductions between PAC,
//! TV-learning and uniform estimation, the randomized lower-bound
//! adversaries, and a seeded Monte Carlo harness that checks every
//! computable claim at desk scale.
//!
//! All probability-valued code is generic over [`Real`] (`f32` or `f64`);
//! the aliases below fix the scalar to `f64`.

pub mod adversary;
pub mod classes;
pub mod covers;
pub mod distance;
pub mod distribution;
pub mod domain;
pub mod error;
pub mod experiments;
pub mod harness;
pub mod learners;
pub mod scalar;

pub use classes::{
    categorical_distance_closed_form, cube_distance_closed_form, label, sample, BenedekItaiInstance,
    CategoricalInstance, NoisyCubeInstance, Teacher,
};
pub use covers::{
    categorical_canonical_cover, entropy_profile, exhaustive_min_cover, greedy_cover, CoverMapPair,
    EntropyProfile,
};
pub use distance::{
    brute_force_distance, brute_force_distances, empirical_distance, exact_distance, exact_mean,
    exact_measure, growth_count, tv_class_conditional, DistanceMatrix, EvaluationTable,
};
pub use distribution::DistributionSpec;
pub use domain::{
    CustomRule, Domain, Event, Hypothesis, HypothesisClass, LabeledSample, Point, Symbol,
    UnlabeledSample,
};
pub use error::{Error, Result};
pub use scalar::Real;

/// Double precision distribution.
pub type Distribution = DistributionSpec<f64>;
/// Single precision distribution.
pub type Distribution32 = DistributionSpec<f32>;
/// Double precision pairwise distance matrix.
pub type Distances = DistanceMatrix<f64>;
