//! Desk-scale benchmarks: SVM on Gaussian blobs, least squares with k-DPP
//! minibatches, minibatch k-means, and synthetic regret simulations.
//!
//! Every experiment compares a learned mixture sampler against uniform sampling
//! under the same seed. With a uniform-only mixture the sampler consumes random
//! numbers exactly like plain uniform sampling, so the two trajectories coincide.

mod config;
pub mod data;
pub mod kmeans;
pub mod linreg;
pub mod regret_sim;
mod result;
mod sampler;
pub mod svm;

pub use config::{Experiment, ExperimentConfig, Sampler};
pub use data::{gen_blobs, gen_clusters, gen_regression, train_test_split, Blobs, Regression};
pub use kmeans::{kmeans_pp, lloyd, prepare_kmeans, run_kmeans, run_kmeans_prepared, KmeansSetup};
pub use linreg::run_linreg_dpp;
pub use regret_sim::{run_regret_sim, Adversary, LearnerKind, RegretSimConfig, RegretSimResult};
pub use result::RunResult;
pub use sampler::AtomSampler;
pub use svm::run_svm_blobs;

/// Runs the experiment named in `cfg`, generating synthetic data where needed.
pub fn run(cfg: &ExperimentConfig) -> crate::Result<RunResult> {
    match cfg.experiment {
        Experiment::SvmBlobs => run_svm_blobs(cfg),
        Experiment::LinregDpp => run_linreg_dpp(cfg),
        Experiment::Kmeans => {
            let points = kmeans::synthetic_points(cfg)?;
            run_kmeans(cfg, &points)
        }
    }
}
