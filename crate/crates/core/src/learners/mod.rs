//! Online learners over mixture weights.
//!
//! - [`LearnerState`]: Online Newton Step on the restricted simplex. Driven by
//!   exact gradients it is the full-information learner; driven by one-sample
//!   estimates through [`vrm_round`] it is the bandit-feedback sampler.
//! - [`OgdLearner`]: projected online gradient descent baseline.
//! - [`hindsight_oracle`]: the best fixed mixture for a loss sequence.

pub mod cost;
pub mod ons;
pub mod oracle;
pub mod regret;
pub mod schedule;

pub use cost::{
    cost_full, estimate_from_feedback, estimate_from_relative, grad_full, hessian_full,
    sampled_cost_derivatives, Estimate,
};
pub use ons::{
    clip_loss, full_info_round, vrm_round, HyperParams, LearnerState, OgdLearner, OnlineLearner,
    RoundOutcome, StepSchedule,
};
pub use oracle::{cumulative_losses, hindsight_oracle, Domain, OracleOptions, OracleResult};
pub use regret::{fit_loglog_slope, regret_curve, LedgerEntry, RegretLedger};
pub use schedule::{
    calibrate_loss_bound, curvature_constants, default_beta_eps, default_gamma, ons_regret_bound,
    Mode, DIAMETER,
};
