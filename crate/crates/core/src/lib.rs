//! Online variance reduction with mixtures.
//!
//! An importance sampler whose proposal is a mixture of `k` fixed sampling
//! distributions over `n` data points (or over fixed-size sets of points).
//! The mixture weights are learned online with an Online Newton Step so that
//! the cumulative second moment of the importance-weighted loss estimates
//! competes with the best fixed mixture in hindsight.
//!
//! Modules:
//! - [`simplex`]: Euclidean and metric projections onto the (restricted) simplex.
//! - [`mixtures`]: component sets, mixture probabilities and sampling.
//! - [`learners`]: ONS / VRM / OGD learners, cost estimates, hindsight oracle, regret.
//! - [`dpp`]: exact k-DPP sampling for set-valued mixture components.
//! - [`experiments`]: synthetic benchmarks (SVM on blobs, DPP regression, minibatch k-means).

pub mod dpp;
pub mod error;
pub mod experiments;
pub mod learners;
pub mod mixtures;
pub mod points;
pub mod rng;
pub mod simplex;

pub use error::{Error, Result};
pub use learners::{HyperParams, LearnerState, Mode, RegretLedger};
pub use mixtures::{ComponentSet, MixtureWeights};
pub use points::Points;
pub use rng::{seeded_rng, SeededRng};
pub use simplex::RestrictedSimplexSpec;

/// Feasibility tolerance shared by every simplex membership check.
pub const FEAS_TOL: f64 = 1e-9;
