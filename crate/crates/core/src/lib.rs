//! Spectral cut-off regularization for linear inverse problems under white noise.
//!
//! The crate works in singular coordinates: a forward operator is described
//! by its singular values and the truth by its coefficients in the right
//! singular basis. On top of that it provides
//!
//! * [`problems`]: discretized integral-equation test problems and synthetic
//!   spectra, plus the dense SVD that maps them to singular coordinates,
//! * [`sequence_model`]: white-noise observations, cut-off estimates and their
//!   strong/weak errors,
//! * [`rules`]: truncation-level selectors (modified discrepancy principle,
//!   Lepski, balancing, early stopping, combined) and the balanced oracles,
//! * [`montecarlo`]: a seeded replication harness and empirical checks of the
//!   oracle inequalities.

pub mod error;
pub mod montecarlo;
pub mod problems;
pub mod rules;
pub mod sequence_model;

pub use error::{Error, Result};
pub use montecarlo::{
    BoxplotStats, ExperimentConfig, ExperimentSummary, ProblemSpec, ReplicateRecord, RuleStats,
};
pub use problems::{DenseProblem, IllPosedness, SpectralProblem, Spectrum, SvdFactors, Truth};
pub use rules::{Rule, RuleConfig, SelectionResult, TheoremConstants};
pub use sequence_model::{ErrorProfile, NoiseKind, NoiseModel, NoisyObservation};
