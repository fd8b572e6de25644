use std::collections::BTreeMap;
use std::io::Write;

use serde::Serialize;

use super::config::{ExperimentConfig, Sampler};
use crate::error::Result;

/// Outcome of one experiment run.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunResult {
    pub config: ExperimentConfig,
    pub sampler: Sampler,
    pub seed: u64,
    /// Iterations at which the metric was recorded.
    pub iters: Vec<u64>,
    /// Accuracy (SVM), training MSE (regression) or test relative error (k-means).
    pub metric: Vec<f64>,
    pub final_weights: Option<Vec<f64>>,
    pub wall_time_secs: f64,
    /// Time spent in sampling and learner updates.
    pub sampler_time_secs: f64,
    /// Feedback values clipped to the loss bound.
    pub clipped: u64,
    /// Learner updates rejected because of non-finite feedback.
    pub rejected: u64,
    /// Experiment-specific scalars.
    pub extras: BTreeMap<String, f64>,
}

impl RunResult {
    pub(crate) fn new(config: &ExperimentConfig) -> Self {
        Self {
            config: config.clone(),
            sampler: config.sampler,
            seed: config.seed,
            iters: Vec::new(),
            metric: Vec::new(),
            final_weights: None,
            wall_time_secs: 0.0,
            sampler_time_secs: 0.0,
            clipped: 0,
            rejected: 0,
            extras: BTreeMap::new(),
        }
    }

    pub(crate) fn record(&mut self, iter: u64, value: f64) {
        self.iters.push(iter);
        self.metric.push(value);
    }

    pub fn final_metric(&self) -> Option<f64> {
        self.metric.last().copied()
    }

    /// First recorded iteration whose metric is at or below `threshold`.
    pub fn first_iter_below(&self, threshold: f64) -> Option<u64> {
        self.iters
            .iter()
            .zip(&self.metric)
            .find(|(_, &m)| m <= threshold)
            .map(|(&it, _)| it)
    }

    /// CSV with columns `iter,metric,sampler,seed`.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["iter", "metric", "sampler", "seed"])?;
        let sampler = self.sampler.to_string();
        let seed = self.seed.to_string();
        for (it, m) in self.iters.iter().zip(&self.metric) {
            w.write_record([it.to_string(), m.to_string(), sampler.clone(), seed.clone()])?;
        }
        w.flush()?;
        Ok(())
    }
}
