use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Experiment {
    SvmBlobs,
    LinregDpp,
    Kmeans,
}

impl fmt::Display for Experiment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Experiment::SvmBlobs => "svm-blobs",
            Experiment::LinregDpp => "linreg-dpp",
            Experiment::Kmeans => "kmeans",
        })
    }
}

/// How training points are drawn.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Sampler {
    Uniform,
    /// Mixture weights learned by Online Newton Step.
    Vrm,
    /// Mixture weights learned by projected online gradient descent.
    Ogd,
}

impl fmt::Display for Sampler {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Sampler::Uniform => "uniform",
            Sampler::Vrm => "vrm",
            Sampler::Ogd => "ogd",
        })
    }
}

impl FromStr for Sampler {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "uniform" => Ok(Sampler::Uniform),
            "vrm" => Ok(Sampler::Vrm),
            "ogd" | "ogd-baseline" => Ok(Sampler::Ogd),
            _ => Err(invalid(format!("unknown sampler '{s}'"))),
        }
    }
}

/// Parameters of one experiment run. Fields that an experiment does not use
/// are ignored; learner hyperparameters left as `None` take experiment defaults.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub experiment: Experiment,
    pub sampler: Sampler,
    pub seed: u64,
    /// Seed for data generation; the run seed when absent.
    pub data_seed: Option<u64>,

    pub n: usize,
    pub d: usize,
    /// Number of blobs (SVM) or clusters generated (k-means).
    pub blobs: usize,
    pub separation: f64,
    /// Blob / cluster standard deviation.
    pub noise: f64,
    pub scaled_points: usize,
    pub scale: f64,

    /// Step size `step0 / sqrt(t)`.
    pub step0: f64,
    pub epochs: usize,
    /// Number of minibatches (k-means); derived from epochs elsewhere.
    pub iterations: usize,
    pub batch_size: usize,
    /// Number of k-means centers.
    pub clusters: usize,
    /// Number of non-uniform mixture components (k-means).
    pub components: usize,
    /// Mass a blob component puts outside its blob.
    pub eps_mass: f64,
    /// Regularizers of the k-DPP kernels.
    pub lambdas: Vec<f64>,
    /// Soft truncation `r' = a r + c` of set importance weights.
    pub trunc: (f64, f64),
    /// Metric is recorded every this many iterations (and at the last one).
    pub eval_every: usize,
    /// Choose gamma and beta on a held-out split of the training data.
    pub tune: bool,

    pub gamma: Option<f64>,
    pub beta: Option<f64>,
    pub eps: Option<f64>,
    pub loss_bound: Option<f64>,
}

impl ExperimentConfig {
    fn base(experiment: Experiment) -> Self {
        Self {
            experiment,
            sampler: Sampler::Vrm,
            seed: 0,
            data_seed: None,
            n: 1000,
            d: 2,
            blobs: 6,
            separation: 10.0,
            noise: 1.0,
            scaled_points: 10,
            scale: 10.0,
            step0: 0.01,
            epochs: 5,
            iterations: 1000,
            batch_size: 1,
            clusters: 100,
            components: 10,
            eps_mass: 0.1,
            lambdas: vec![1.0, 10.0, 100.0],
            trunc: (0.8, 0.2),
            eval_every: 100,
            tune: false,
            gamma: None,
            beta: None,
            eps: None,
            loss_bound: None,
        }
    }

    pub fn svm_blobs() -> Self {
        Self {
            n: 10_000,
            d: 2,
            step0: 0.01,
            epochs: 5,
            batch_size: 1,
            eval_every: 500,
            beta: Some(0.1),
            ..Self::base(Experiment::SvmBlobs)
        }
    }

    pub fn linreg_dpp() -> Self {
        Self {
            n: 1000,
            d: 10,
            step0: 1e-4,
            epochs: 100,
            batch_size: 5,
            eval_every: 20,
            ..Self::base(Experiment::LinregDpp)
        }
    }

    pub fn kmeans() -> Self {
        Self {
            n: 20_000,
            d: 10,
            blobs: 100,
            separation: 10.0,
            batch_size: 100,
            clusters: 100,
            components: 10,
            iterations: 500,
            eval_every: 10,
            tune: true,
            data_seed: Some(0),
            ..Self::base(Experiment::Kmeans)
        }
    }

    pub fn defaults_for(experiment: Experiment) -> Self {
        match experiment {
            Experiment::SvmBlobs => Self::svm_blobs(),
            Experiment::LinregDpp => Self::linreg_dpp(),
            Experiment::Kmeans => Self::kmeans(),
        }
    }

    pub fn data_seed(&self) -> u64 {
        self.data_seed.unwrap_or(self.seed)
    }

    pub fn validate(&self) -> Result<()> {
        let counts = [
            ("n", self.n),
            ("d", self.d),
            ("blobs", self.blobs),
            ("epochs", self.epochs),
            ("iterations", self.iterations),
            ("batch_size", self.batch_size),
            ("clusters", self.clusters),
            ("components", self.components),
            ("eval_every", self.eval_every),
        ];
        for (name, v) in counts {
            if v == 0 {
                return Err(invalid(format!("{name} must be positive")));
            }
        }
        if !(self.step0.is_finite() && self.step0 > 0.0) {
            return Err(invalid(format!("step0 must be positive, got {}", self.step0)));
        }
        if !(self.noise.is_finite() && self.noise > 0.0) {
            return Err(invalid(format!("noise must be positive, got {}", self.noise)));
        }
        if !(self.separation.is_finite() && self.separation >= 0.0) {
            return Err(invalid(format!(
                "separation must be non-negative, got {}",
                self.separation
            )));
        }
        if !(self.scale.is_finite() && self.scale > 0.0) {
            return Err(invalid(format!("scale must be positive, got {}", self.scale)));
        }
        if self.batch_size > self.n {
            return Err(invalid("batch size exceeds the number of points"));
        }
        let (a, c) = self.trunc;
        if !(a.is_finite() && c.is_finite() && a >= 0.0 && c >= 0.0 && a + c > 0.0) {
            return Err(invalid(format!("invalid truncation ({a}, {c})")));
        }
        if self.lambdas.iter().any(|&l| !(l.is_finite() && l >= 0.0)) {
            return Err(invalid("kernel regularizers must be non-negative"));
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
        if let Some(g) = self.gamma {
            if g > 1.0 {
                return Err(invalid(format!("gamma must not exceed 1, got {g}")));
            }
        }
        Ok(())
    }

    /// Whether the soft truncation leaves importance weights unchanged.
    pub fn unbiased(&self) -> bool {
        self.trunc == (1.0, 0.0)
    }
}
