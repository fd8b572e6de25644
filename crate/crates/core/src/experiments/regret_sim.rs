//! Regret of the mixture learners against synthetic loss sequences.

use std::fmt;
use std::str::FromStr;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::learners::{
    cost_full, curvature_constants, default_beta_eps, default_gamma, fit_loglog_slope,
    full_info_round, hindsight_oracle, ons_regret_bound, vrm_round, Domain, HyperParams,
    LearnerState, Mode, OgdLearner, OnlineLearner, OracleOptions, RegretLedger, StepSchedule,
    DIAMETER,
};
use crate::mixtures::ComponentSet;
use crate::rng::derive_rng;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Adversary {
    /// The same squared losses every round.
    Constant,
    /// Squared losses reversed every quarter of the horizon.
    Piecewise,
    /// Losses are per-sample gradient norms of an SGD run on 1-D least squares
    /// that samples with the learner's mixture.
    Stochastic,
}

impl FromStr for Adversary {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "constant" => Ok(Adversary::Constant),
            "piecewise" | "piecewise-constant" => Ok(Adversary::Piecewise),
            "stochastic" => Ok(Adversary::Stochastic),
            _ => Err(invalid(format!("unknown adversary '{s}'"))),
        }
    }
}

impl fmt::Display for Adversary {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Adversary::Constant => "constant",
            Adversary::Piecewise => "piecewise",
            Adversary::Stochastic => "stochastic",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum LearnerKind {
    /// Online Newton Step with one sampled loss per round.
    Vrm,
    /// Online Newton Step with every loss revealed.
    Ons,
    /// Projected online gradient descent with one sampled loss per round.
    Ogd,
}

impl FromStr for LearnerKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "vrm" => Ok(LearnerKind::Vrm),
            "ons" => Ok(LearnerKind::Ons),
            "ogd" => Ok(LearnerKind::Ogd),
            _ => Err(invalid(format!("unknown learner '{s}'"))),
        }
    }
}

impl fmt::Display for LearnerKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            LearnerKind::Vrm => "vrm",
            LearnerKind::Ons => "ons",
            LearnerKind::Ogd => "ogd",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RegretSimConfig {
    pub adversary: Adversary,
    pub learner: LearnerKind,
    pub horizons: Vec<u64>,
    pub seeds: Vec<u64>,
    /// Number of atoms.
    pub n: usize,
    /// Number of components including the uniform one. Without it every atom
    /// gets a point-mass component; otherwise `k - 1` random components are drawn.
    pub k: Option<usize>,
    /// Seed for random components.
    pub instance_seed: u64,
    pub gamma: Option<f64>,
    pub beta: Option<f64>,
    pub eps: Option<f64>,
    /// Bound on squared losses; the adversary's own bound when absent.
    pub loss_bound: Option<f64>,
}

impl Default for RegretSimConfig {
    fn default() -> Self {
        Self {
            adversary: Adversary::Constant,
            learner: LearnerKind::Vrm,
            horizons: vec![1000],
            seeds: vec![0],
            n: 2,
            k: None,
            instance_seed: 0,
            gamma: None,
            beta: None,
            eps: None,
            loss_bound: None,
        }
    }
}

impl RegretSimConfig {
    pub fn validate(&self) -> Result<()> {
        if self.n == 0 {
            return Err(invalid("n must be positive"));
        }
        if self.horizons.is_empty() || self.horizons.iter().any(|&t| t < 3) {
            return Err(invalid("horizons must be non-empty and at least 3 rounds"));
        }
        if self.seeds.is_empty() {
            return Err(invalid("at least one seed is required"));
        }
        if self.k == Some(0) {
            return Err(invalid("k must be positive"));
        }
        for (name, v) in [
            ("gamma", self.gamma),
            ("beta", self.beta),
            ("eps", self.eps),
            ("loss_bound", self.loss_bound),
        ] {
            if let Some(v) = v {
                if !(v.is_finite() && v > 0.0) {
                    return Err(invalid(format!("{name} must be positive, got {v}")));
                }
            }
        }
        Ok(())
    }

    pub fn components(&self) -> Result<ComponentSet> {
        let n = self.n;
        match self.k {
            None => {
                let rows: Vec<Vec<f64>> = (0..n)
                    .map(|i| (0..n).map(|a| if a == i { 1.0 } else { 0.0 }).collect())
                    .collect();
                ComponentSet::attach_uniform(&rows, n)
            }
            Some(k) => {
                let mut rng = derive_rng(self.instance_seed, 11);
                let rows: Vec<Vec<f64>> = (0..k - 1)
                    .map(|_| {
                        let raw: Vec<f64> = (0..n).map(|_| -rng.random::<f64>().ln()).collect();
                        let s: f64 = raw.iter().sum();
                        raw.into_iter().map(|v| v / s).collect()
                    })
                    .collect();
                ComponentSet::attach_uniform(&rows, n)
            }
        }
    }

    fn mode(&self) -> Mode {
        match self.learner {
            LearnerKind::Ons => Mode::Full,
            _ => Mode::Partial,
        }
    }
}

/// Squared losses of the constant adversary: `[1, 4]` for two atoms, `(i + 1)^2` in general.
fn base_losses_sq(n: usize) -> Vec<f64> {
    (0..n).map(|i| ((i + 1) * (i + 1)) as f64).collect()
}

/// State of the loss sequence.
struct LossSource {
    adversary: Adversary,
    base: Vec<f64>,
    horizon: u64,
    theta: f64,
    a: Vec<f64>,
    b: Vec<f64>,
}

impl LossSource {
    fn new(adversary: Adversary, n: usize, horizon: u64) -> Self {
        let a: Vec<f64> = (0..n).map(|i| 1.0 + i as f64 / n as f64).collect();
        let b = a
            .iter()
            .enumerate()
            .map(|(i, ai)| if i % 2 == 0 { *ai } else { -*ai })
            .collect();
        Self {
            adversary,
            base: base_losses_sq(n),
            horizon,
            theta: 0.0,
            a,
            b,
        }
    }

    fn bound(&self) -> f64 {
        match self.adversary {
            Adversary::Constant | Adversary::Piecewise => {
                self.base.iter().cloned().fold(0.0, f64::max)
            }
            // |theta| <= 1 keeps |a (a theta - b)| <= 2 a^2.
            Adversary::Stochastic => self.a.iter().map(|a| 4.0 * a.powi(4)).fold(0.0, f64::max),
        }
    }

    /// Squared losses of every atom in round `t` (1-based).
    fn losses_sq(&self, t: u64) -> Vec<f64> {
        match self.adversary {
            Adversary::Constant => self.base.clone(),
            Adversary::Piecewise => {
                let phase = (4 * (t - 1) / self.horizon.max(1)) % 2;
                if phase == 0 {
                    self.base.clone()
                } else {
                    self.base.iter().rev().cloned().collect()
                }
            }
            Adversary::Stochastic => self
                .a
                .iter()
                .zip(&self.b)
                .map(|(a, b)| (a * (a * self.theta - b)).powi(2))
                .collect(),
        }
    }

    /// Advances the optimizer with the sampled atom and its importance weight.
    fn step(&mut self, t: u64, atom: usize, weight: f64) {
        if self.adversary == Adversary::Stochastic {
            let (a, b) = (self.a[atom], self.b[atom]);
            let g = a * (a * self.theta - b);
            let eta = 0.1 / (t as f64).sqrt();
            self.theta = (self.theta - eta * weight * g).clamp(-1.0, 1.0);
        }
    }
}

/// Result of one seed at one horizon. Costs are divided by `n^2`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SingleRun {
    pub seed: u64,
    pub horizon: u64,
    pub learner_cost: f64,
    pub oracle_full: f64,
    pub oracle_restricted: f64,
    pub oracle_certified: bool,
    pub hyper: HyperParams,
    pub final_weights: Vec<f64>,
    /// `(t, regret_t)` against the full-simplex oracle of the prefix.
    pub curve: Vec<(u64, f64)>,
    pub clipped: u64,
}

impl SingleRun {
    pub fn regret(&self) -> f64 {
        self.learner_cost - self.oracle_full
    }

    pub fn regret_restricted(&self) -> f64 {
        self.learner_cost - self.oracle_restricted
    }
}

fn hyper_for(cfg: &RegretSimConfig, cs: &ComponentSet, horizon: u64, loss_bound: f64) -> Result<HyperParams> {
    let k = cs.k();
    let mode = cfg.mode();
    let gamma = match cfg.gamma {
        Some(g) => g.min(1.0 / k as f64),
        None => default_gamma(k, horizon, cs.c(), mode)?,
    };
    let (beta, eps) = default_beta_eps(gamma, cs.n() as f64, loss_bound, cs.c(), k, mode)?;
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
        loss_bound,
    })
}

/// Checkpoints for the regret curve: about 20 log-spaced rounds plus the last.
fn checkpoints(horizon: u64) -> Vec<u64> {
    let mut out: Vec<u64> = (0..20)
        .map(|j| ((horizon as f64).powf((j + 1) as f64 / 20.0)).round() as u64)
        .filter(|&t| t >= 1)
        .collect();
    out.push(horizon);
    out.sort_unstable();
    out.dedup();
    out
}

/// Plays one seed for `horizon` rounds and returns its costs and ledger.
pub fn run_single(cfg: &RegretSimConfig, seed: u64, horizon: u64) -> Result<(SingleRun, RegretLedger)> {
    cfg.validate()?;
    let cs = cfg.components()?;
    let n2 = (cs.n() as f64).powi(2);
    let mut source = LossSource::new(cfg.adversary, cs.n(), horizon);
    let loss_bound = cfg.loss_bound.unwrap_or_else(|| source.bound());
    let hyper = hyper_for(cfg, &cs, horizon, loss_bound)?;
    let mut learner: Box<dyn OnlineLearner> = match cfg.learner {
        LearnerKind::Vrm | LearnerKind::Ons => Box::new(LearnerState::new(cs.k(), hyper)?),
        LearnerKind::Ogd => {
            let (g, _) =
                curvature_constants(hyper.gamma, cs.n() as f64, loss_bound, cs.c(), cs.k(), Mode::Partial);
            let eta0 = cfg.beta.unwrap_or(DIAMETER / g);
            Box::new(OgdLearner::new(cs.k(), hyper.gamma, loss_bound, StepSchedule::InvSqrt(eta0))?)
        }
    };

    let mut rng = derive_rng(seed, 21);
    let mut ledger = RegretLedger::new(cs.k());
    let mut cumulative = vec![0.0; cs.n()];
    let mut total = 0.0;
    let marks = checkpoints(horizon);
    let mut next_mark = 0;
    let mut curve = Vec::with_capacity(marks.len());
    let oracle_opts = OracleOptions::default();

    for t in 1..=horizon {
        let losses_sq = source.losses_sq(t);
        let cost = cost_full(&cs, learner.weights().as_slice(), &losses_sq)? / n2;
        match cfg.learner {
            LearnerKind::Ons => {
                full_info_round(learner.as_mut(), &cs, &losses_sq, &mut ledger)?;
                let atom = rng.random_range(0..cs.n());
                source.step(t, atom, 1.0);
            }
            _ => {
                let out = vrm_round(learner.as_mut(), &cs, &mut rng, &mut ledger, |i| {
                    losses_sq[i].sqrt()
                })?;
                ledger.set_last_true_cost(cost);
                source.step(t, out.atom, out.weight);
            }
        }
        total += cost;
        for (c, l) in cumulative.iter_mut().zip(&losses_sq) {
            *c += l;
        }
        if next_mark < marks.len() && marks[next_mark] == t {
            let oracle = hindsight_oracle(&cs, &cumulative, Domain::Full, oracle_opts)?;
            curve.push((t, total - oracle.value / n2));
            next_mark += 1;
        }
    }

    let full = hindsight_oracle(&cs, &cumulative, Domain::Full, oracle_opts)?;
    let restricted =
        hindsight_oracle(&cs, &cumulative, Domain::Restricted(hyper.gamma), oracle_opts)?;
    let run = SingleRun {
        seed,
        horizon,
        learner_cost: total,
        oracle_full: full.value / n2,
        oracle_restricted: restricted.value / n2,
        oracle_certified: full.certified && restricted.certified,
        hyper,
        final_weights: learner.weights().as_slice().to_vec(),
        curve,
        clipped: ledger.clipped(),
    };
    Ok((run, ledger))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HorizonSummary {
    pub horizon: u64,
    pub mean_regret: f64,
    pub mean_regret_restricted: f64,
    pub mean_oracle: f64,
    /// Full-information ONS bound `5 (1/alpha + G D) k ln T / n^2` at this horizon.
    pub ons_bound: f64,
    pub runs: Vec<SingleRun>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RegretSimResult {
    pub config: RegretSimConfig,
    pub horizons: Vec<HorizonSummary>,
    /// Log-log slope of mean regret against the horizon, when defined.
    pub slope: Option<f64>,
    /// Ledger of the first seed at the largest horizon.
    #[serde(skip)]
    pub ledger: RegretLedger,
}

/// Runs every (seed, horizon) pair, spreading them over `jobs` threads.
pub fn run_regret_sim(cfg: &RegretSimConfig, jobs: usize) -> Result<RegretSimResult> {
    cfg.validate()?;
    let cs = cfg.components()?;
    let largest = *cfg.horizons.iter().max().expect("validated");
    let tasks: Vec<(u64, u64)> = cfg
        .horizons
        .iter()
        .flat_map(|&h| cfg.seeds.iter().map(move |&s| (s, h)))
        .collect();
    let jobs = jobs.clamp(1, tasks.len());
    let mut outputs: Vec<Option<Result<(SingleRun, RegretLedger)>>> =
        (0..tasks.len()).map(|_| None).collect();
    std::thread::scope(|scope| {
        for (chunk_tasks, chunk_out) in tasks
            .chunks(tasks.len().div_ceil(jobs))
            .zip(outputs.chunks_mut(tasks.len().div_ceil(jobs)))
        {
            scope.spawn(move || {
                for (&(seed, h), slot) in chunk_tasks.iter().zip(chunk_out.iter_mut()) {
                    *slot = Some(run_single(cfg, seed, h));
                }
            });
        }
    });

    let mut ledger = RegretLedger::new(cs.k());
    let mut summaries = Vec::new();
    let mut results = tasks.iter().zip(outputs);
    for &h in &cfg.horizons {
        let mut runs = Vec::new();
        for _ in &cfg.seeds {
            let (&(seed, _), out) = results.next().expect("one output per task");
            let (run, run_ledger) = out.expect("every task ran")?;
            if h == largest && seed == cfg.seeds[0] && ledger.is_empty() {
                ledger = run_ledger;
            }
            runs.push(run);
        }
        let m = runs.len() as f64;
        let loss_bound = runs[0].hyper.loss_bound;
        let gamma = runs[0].hyper.gamma;
        let n = cs.n() as f64;
        summaries.push(HorizonSummary {
            horizon: h,
            mean_regret: runs.iter().map(SingleRun::regret).sum::<f64>() / m,
            mean_regret_restricted: runs.iter().map(SingleRun::regret_restricted).sum::<f64>() / m,
            mean_oracle: runs.iter().map(|r| r.oracle_full).sum::<f64>() / m,
            ons_bound: ons_regret_bound(gamma, n, loss_bound, cs.k(), h) / (n * n),
            runs,
        });
    }

    let slope = if summaries.len() >= 2 {
        let xs: Vec<f64> = summaries.iter().map(|s| s.horizon as f64).collect();
        let ys: Vec<f64> = summaries.iter().map(|s| s.mean_regret).collect();
        fit_loglog_slope(&xs, &ys).ok()
    } else {
        None
    };
    Ok(RegretSimResult {
        config: cfg.clone(),
        horizons: summaries,
        slope,
        ledger,
    })
}
