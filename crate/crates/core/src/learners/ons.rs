//! Online Newton Step over the restricted simplex, its bandit-feedback variant,
//! and projected online gradient descent as a baseline.

use nalgebra::DMatrix;
use rand::Rng;
use serde::{Deserialize, Serialize};

use super::cost::{cost_full, estimate_from_feedback, grad_full};
use super::regret::{LedgerEntry, RegretLedger};
use crate::error::{invalid, Result};
use crate::mixtures::{sample_atom, ComponentSet, MixtureWeights};
use crate::simplex::{proj_h_norm, proj_restricted, HProjOptions, RestrictedSimplexSpec};

/// Learner hyperparameters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HyperParams {
    /// Floor on the uniform-component weight.
    pub gamma: f64,
    pub beta: f64,
    /// Initial regularization `H_0 = eps I`.
    pub eps: f64,
    /// Upper bound `L` on squared losses; larger feedback is clipped.
    pub loss_bound: f64,
}

impl HyperParams {
    pub fn validate(&self) -> Result<()> {
        if !(self.gamma > 0.0 && self.gamma <= 1.0) {
            return Err(invalid(format!("gamma must lie in (0, 1], got {}", self.gamma)));
        }
        for (name, v) in [("beta", self.beta), ("eps", self.eps), ("L", self.loss_bound)] {
            if !(v.is_finite() && v > 0.0) {
                return Err(invalid(format!("{name} must be positive, got {v}")));
            }
        }
        Ok(())
    }
}

/// A learner over mixture weights that consumes one gradient per round.
pub trait OnlineLearner {
    fn weights(&self) -> &MixtureWeights;
    fn update(&mut self, grad: &[f64]) -> Result<()>;
    fn loss_bound(&self) -> f64;
    fn round(&self) -> u64;
}

/// State of the Online Newton Step learner.
///
/// Both `H_t` and its inverse are maintained: the inverse by rank-one
/// Sherman–Morrison updates for the Newton direction, `H_t` itself for the
/// metric projection.
#[derive(Debug, Clone)]
pub struct LearnerState {
    w: MixtureWeights,
    h: DMatrix<f64>,
    h_inv: DMatrix<f64>,
    t: u64,
    hyper: HyperParams,
    proj: HProjOptions,
}

impl LearnerState {
    /// `w_1 = [1/k, ..., 1/k]` (projected if `gamma > 1/k`), `H_0 = eps I`.
    pub fn new(k: usize, hyper: HyperParams) -> Result<Self> {
        hyper.validate()?;
        Ok(Self {
            w: MixtureWeights::uniform(k, hyper.gamma)?,
            h: DMatrix::identity(k, k) * hyper.eps,
            h_inv: DMatrix::identity(k, k) / hyper.eps,
            t: 0,
            hyper,
            proj: HProjOptions::default(),
        })
    }

    pub fn with_projection(mut self, proj: HProjOptions) -> Self {
        self.proj = proj;
        self
    }

    pub fn hyper(&self) -> &HyperParams {
        &self.hyper
    }

    pub fn h(&self) -> &DMatrix<f64> {
        &self.h
    }

    pub fn h_inv(&self) -> &DMatrix<f64> {
        &self.h_inv
    }

    fn spec(&self) -> RestrictedSimplexSpec {
        self.w.spec()
    }
}

impl OnlineLearner for LearnerState {
    fn weights(&self) -> &MixtureWeights {
        &self.w
    }

    fn loss_bound(&self) -> f64 {
        self.hyper.loss_bound
    }

    fn round(&self) -> u64 {
        self.t
    }

    /// One Newton step: `H_t = H_{t-1} + g g^T`, `w' = w_t - H_t^{-1} g / beta`,
    /// `w_{t+1}` the `H_t`-norm projection of `w'`. A non-finite gradient is
    /// rejected and leaves the state untouched.
    fn update(&mut self, g: &[f64]) -> Result<()> {
        let k = self.w.k();
        if g.len() != k {
            return Err(invalid(format!("gradient has length {}, expected {k}", g.len())));
        }
        if g.iter().any(|v| !v.is_finite()) {
            return Err(invalid("non-finite gradient; round rejected"));
        }

        let mut h_inv = self.h_inv.clone();
        let u: Vec<f64> = (0..k)
            .map(|a| (0..k).map(|b| h_inv[(a, b)] * g[b]).sum())
            .collect();
        let denom = 1.0 + g.iter().zip(&u).map(|(x, y)| x * y).sum::<f64>();
        for a in 0..k {
            for b in 0..k {
                h_inv[(a, b)] -= u[a] * u[b] / denom;
            }
        }
        let mut h = self.h.clone();
        for a in 0..k {
            for b in 0..k {
                h[(a, b)] += g[a] * g[b];
            }
        }

        let w = self.w.as_slice();
        let step: Vec<f64> = (0..k)
            .map(|a| w[a] - (0..k).map(|b| h_inv[(a, b)] * g[b]).sum::<f64>() / self.hyper.beta)
            .collect();
        let next = proj_h_norm(&step, &h, &self.spec(), self.proj)?;

        self.h = h;
        self.h_inv = h_inv;
        self.w = MixtureWeights::from_projected(next, self.hyper.gamma);
        self.t += 1;
        Ok(())
    }
}

/// Step-size schedule for online gradient descent; rounds are 1-based.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum StepSchedule {
    Constant(f64),
    /// `eta_t = eta_0 / sqrt(t)`.
    InvSqrt(f64),
}

impl StepSchedule {
    pub fn eta(&self, t: u64) -> f64 {
        match *self {
            StepSchedule::Constant(eta) => eta,
            StepSchedule::InvSqrt(eta0) => eta0 / (t.max(1) as f64).sqrt(),
        }
    }
}

/// Projected online gradient descent on the restricted simplex.
#[derive(Debug, Clone)]
pub struct OgdLearner {
    w: MixtureWeights,
    t: u64,
    schedule: StepSchedule,
    loss_bound: f64,
}

impl OgdLearner {
    pub fn new(k: usize, gamma: f64, loss_bound: f64, schedule: StepSchedule) -> Result<Self> {
        if !(loss_bound.is_finite() && loss_bound > 0.0) {
            return Err(invalid("loss bound must be positive"));
        }
        Ok(Self {
            w: MixtureWeights::uniform(k, gamma)?,
            t: 0,
            schedule,
            loss_bound,
        })
    }
}

impl OnlineLearner for OgdLearner {
    fn weights(&self) -> &MixtureWeights {
        &self.w
    }

    fn loss_bound(&self) -> f64 {
        self.loss_bound
    }

    fn round(&self) -> u64 {
        self.t
    }

    /// `w_{t+1} = proj(w_t - eta_t g)`.
    fn update(&mut self, g: &[f64]) -> Result<()> {
        let k = self.w.k();
        if g.len() != k {
            return Err(invalid(format!("gradient has length {}, expected {k}", g.len())));
        }
        if g.iter().any(|v| !v.is_finite()) {
            return Err(invalid("non-finite gradient; round rejected"));
        }
        let eta = self.schedule.eta(self.t + 1);
        let w = self.w.as_slice();
        let next = if eta == 0.0 || g.iter().all(|&v| v == 0.0) {
            w.to_vec()
        } else {
            let step: Vec<f64> = w.iter().zip(g).map(|(wi, gi)| wi - eta * gi).collect();
            proj_restricted(&step, &self.w.spec())?
        };
        self.w = MixtureWeights::from_projected(next, self.w.gamma());
        self.t += 1;
        Ok(())
    }
}

/// Result of one bandit-feedback round.
#[derive(Debug, Clone, PartialEq)]
pub struct RoundOutcome {
    pub atom: usize,
    /// Importance weight `1 / (n w_t^T p(atom))`.
    pub weight: f64,
    /// The (possibly clipped) loss fed to the learner.
    pub loss: f64,
    pub clipped: bool,
}

/// Clips `loss` to `sqrt(loss_bound)` when its square exceeds the bound.
pub fn clip_loss(loss: f64, loss_bound: f64) -> (f64, bool) {
    let loss = loss.abs();
    if loss * loss > loss_bound {
        (loss_bound.sqrt(), true)
    } else {
        (loss, false)
    }
}

/// One round under partial feedback: sample `I_t ~ w_t^T p`, query its loss,
/// update the learner with the unbiased gradient estimate, and append the cost
/// estimate (divided by `n^2`) to the ledger.
pub fn vrm_round<L, R, F>(
    learner: &mut L,
    cs: &ComponentSet,
    rng: &mut R,
    ledger: &mut RegretLedger,
    mut loss_of: F,
) -> Result<RoundOutcome>
where
    L: OnlineLearner + ?Sized,
    R: Rng + ?Sized,
    F: FnMut(usize) -> f64,
{
    let w = learner.weights().clone();
    let (atom, weight) = sample_atom(cs, &w, rng)?;
    let raw = loss_of(atom);
    if !raw.is_finite() {
        return Err(invalid(format!("loss callback returned {raw} for atom {atom}")));
    }
    let (loss, clipped) = clip_loss(raw, learner.loss_bound());
    let est = estimate_from_feedback(cs, w.as_slice(), atom, loss)?;
    learner.update(&est.grad)?;
    let n2 = (cs.n() as f64).powi(2);
    ledger.push(LedgerEntry {
        t: learner.round(),
        cost_est: est.cost / n2,
        cost_true: None,
        weights: w.as_slice().to_vec(),
    });
    if clipped {
        ledger.record_clip();
    }
    Ok(RoundOutcome {
        atom,
        weight,
        loss,
        clipped,
    })
}

/// One round under full information: the learner sees every squared loss and
/// steps on the exact gradient. The exact cost (divided by `n^2`) is recorded.
pub fn full_info_round<L>(
    learner: &mut L,
    cs: &ComponentSet,
    losses_sq: &[f64],
    ledger: &mut RegretLedger,
) -> Result<()>
where
    L: OnlineLearner + ?Sized,
{
    let w = learner.weights().clone();
    let cost = cost_full(cs, w.as_slice(), losses_sq)?;
    let g = grad_full(cs, w.as_slice(), losses_sq)?;
    learner.update(&g)?;
    let n2 = (cs.n() as f64).powi(2);
    ledger.push(LedgerEntry {
        t: learner.round(),
        cost_est: cost / n2,
        cost_true: Some(cost / n2),
        weights: w.as_slice().to_vec(),
    });
    Ok(())
}
