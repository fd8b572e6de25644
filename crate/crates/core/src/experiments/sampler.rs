use rand::Rng;

use super::config::{ExperimentConfig, Sampler};
use crate::error::Result;
use crate::learners::{
    clip_loss, curvature_constants, default_beta_eps, default_gamma, estimate_from_relative,
    HyperParams, LearnerState, Mode, OgdLearner, OnlineLearner, StepSchedule, DIAMETER,
};
use crate::mixtures::{sample_atom, ComponentSet};

/// Hyperparameters for a mixture learner fed normalized feedback
/// (`l^2 / L <= 1`, relative probabilities), so `n` and `L` drop out.
pub(crate) fn mixture_hyper(cfg: &ExperimentConfig, k: usize, c: f64, horizon: u64) -> Result<HyperParams> {
    let gamma = match cfg.gamma {
        Some(g) => g,
        None => default_gamma(k, horizon.max(3), c.max(1.0), Mode::Partial)?,
    };
    let (beta, eps) = default_beta_eps(gamma, 1.0, 1.0, c.max(1.0), k, Mode::Partial)?;
    let beta = cfg.beta.unwrap_or(beta);
    let eps = cfg.eps.unwrap_or(if cfg.beta.is_some() {
        1.0 / (beta * beta * DIAMETER * DIAMETER)
    } else {
        eps
    });
    Ok(HyperParams {
        gamma,
        beta,
        eps,
        loss_bound: 1.0,
    })
}

/// An online learner over mixture weights fed with clipped, normalized feedback.
pub(crate) struct MixtureLearner {
    learner: Box<dyn OnlineLearner + Send>,
    loss_bound: f64,
    clipped: u64,
    rejected: u64,
    pending: Vec<f64>,
    pending_count: usize,
}

impl MixtureLearner {
    pub(crate) fn new(
        sampler: Sampler,
        k: usize,
        c: f64,
        horizon: u64,
        loss_bound: f64,
        cfg: &ExperimentConfig,
    ) -> Result<Self> {
        let learner: Box<dyn OnlineLearner + Send> = match sampler {
            Sampler::Uniform => Box::new(LearnerState::new(
                1,
                HyperParams {
                    gamma: 1.0,
                    beta: 1.0,
                    eps: 1.0,
                    loss_bound: 1.0,
                },
            )?),
            Sampler::Vrm => Box::new(LearnerState::new(k, mixture_hyper(cfg, k, c, horizon)?)?),
            Sampler::Ogd => {
                let hyper = mixture_hyper(cfg, k, c, horizon)?;
                let (g, _) = curvature_constants(hyper.gamma, 1.0, 1.0, c.max(1.0), k, Mode::Partial);
                let eta0 = cfg.beta.unwrap_or(DIAMETER / g);
                Box::new(OgdLearner::new(k, hyper.gamma, 1.0, StepSchedule::InvSqrt(eta0))?)
            }
        };
        Ok(Self {
            learner,
            loss_bound,
            clipped: 0,
            rejected: 0,
            pending: vec![0.0; k],
            pending_count: 0,
        })
    }

    pub(crate) fn weights(&self) -> &[f64] {
        self.learner.weights().as_slice()
    }

    fn k(&self) -> usize {
        self.weights().len()
    }

    fn normalized_grad(&mut self, rel: &[f64], loss: f64) -> Option<Vec<f64>> {
        if !loss.is_finite() {
            self.rejected += 1;
            return None;
        }
        let (loss, clipped) = clip_loss(loss, self.loss_bound);
        if clipped {
            self.clipped += 1;
        }
        let scaled = loss / self.loss_bound.sqrt();
        match estimate_from_relative(rel, self.weights(), scaled) {
            Ok(est) if est.grad.iter().all(|g| g.is_finite()) => Some(est.grad),
            _ => {
                self.rejected += 1;
                None
            }
        }
    }

    fn apply(&mut self, grad: &[f64]) {
        if self.learner.update(grad).is_err() {
            self.rejected += 1;
        }
    }

    /// One learner update from the loss of an atom with relative probabilities `rel`.
    pub(crate) fn feed(&mut self, rel: &[f64], loss: f64) {
        if self.k() == 1 {
            return;
        }
        if let Some(g) = self.normalized_grad(rel, loss) {
            self.apply(&g);
        }
    }

    /// Adds one atom's estimate to the pending batch.
    pub(crate) fn accumulate(&mut self, rel: &[f64], loss: f64) {
        if self.k() == 1 {
            return;
        }
        if let Some(g) = self.normalized_grad(rel, loss) {
            for (p, gi) in self.pending.iter_mut().zip(&g) {
                *p += gi;
            }
            self.pending_count += 1;
        }
    }

    /// One learner update with the average of the pending estimates.
    pub(crate) fn flush(&mut self) {
        if self.pending_count == 0 {
            return;
        }
        let m = self.pending_count as f64;
        let g: Vec<f64> = self.pending.iter().map(|v| v / m).collect();
        self.apply(&g);
        self.pending.iter_mut().for_each(|v| *v = 0.0);
        self.pending_count = 0;
    }

    pub(crate) fn clipped(&self) -> u64 {
        self.clipped
    }

    pub(crate) fn rejected(&self) -> u64 {
        self.rejected
    }
}

/// Importance sampler over single atoms: uniform, or a learned mixture.
pub struct AtomSampler {
    cs: ComponentSet,
    learner: MixtureLearner,
}

impl AtomSampler {
    /// `cs` is ignored for [`Sampler::Uniform`], which samples from the uniform
    /// component alone.
    pub fn new(
        sampler: Sampler,
        cs: ComponentSet,
        horizon: u64,
        loss_bound: f64,
        cfg: &ExperimentConfig,
    ) -> Result<Self> {
        let cs = match sampler {
            Sampler::Uniform => ComponentSet::attach_uniform(&[], cs.n())?,
            _ => cs,
        };
        let learner = MixtureLearner::new(sampler, cs.k(), cs.c(), horizon, loss_bound, cfg)?;
        Ok(Self { cs, learner })
    }

    pub fn n(&self) -> usize {
        self.cs.n()
    }

    /// Draws an atom and its importance weight `1 / (n w^T p(i))`.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> Result<(usize, f64)> {
        sample_atom(&self.cs, self.learner.learner.weights(), rng)
    }

    /// Immediate feedback for `atom`.
    pub fn feedback(&mut self, atom: usize, loss: f64) {
        if self.cs.k() == 1 {
            return;
        }
        let rel = self.cs.rel_column(atom);
        self.learner.feed(&rel, loss);
    }

    /// Delayed feedback: queue the estimate for `atom` until [`Self::flush`].
    pub fn accumulate(&mut self, atom: usize, loss: f64) {
        if self.cs.k() == 1 {
            return;
        }
        let rel = self.cs.rel_column(atom);
        self.learner.accumulate(&rel, loss);
    }

    pub fn flush(&mut self) {
        self.learner.flush();
    }

    pub fn weights(&self) -> &[f64] {
        self.learner.weights()
    }

    pub fn clipped(&self) -> u64 {
        self.learner.clipped()
    }

    pub fn rejected(&self) -> u64 {
        self.learner.rejected()
    }
}
