//! `vrm`: regret simulations and sampling experiments from the command line.
//!
//! Every subcommand reads an optional flat `key = value` config file
//! (`--config`); flags take precedence over it. Keys are the long flag names.

mod commands;
mod error;
mod ini;
mod settings;
mod stats;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use vrm_core::experiments::Experiment;

use error::CliError;
use settings::Settings;

#[derive(Parser)]
#[command(name = "vrm", version, about = "Variance reduction with learned sampling mixtures")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Play a loss sequence against a mixture learner and measure regret.
    RegretSim(RegretArgs),
    /// Hinge-loss SGD on Gaussian blobs with per-blob sampling components.
    SvmBlobs(ExperimentArgs),
    /// Least squares with minibatches drawn from a mixture of k-DPPs.
    LinregDpp(ExperimentArgs),
    /// Minibatch k-means with distance-based sampling components.
    Kmeans(ExperimentArgs),
    /// Project a vector onto the restricted simplex, or check random projections.
    ProjectTest(ProjectArgs),
}

#[derive(Args)]
struct Common {
    /// Flat key = value config file.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Output directory [default: $VRM_OUT_DIR, else ./vrm-out].
    #[arg(long)]
    out: Option<String>,
    /// Seeds, e.g. `7`, `1,4,9` or `1..5` (inclusive).
    #[arg(long, alias = "seed")]
    seeds: Option<String>,
    /// Worker threads [default: available cores].
    #[arg(long)]
    jobs: Option<String>,
}

impl Common {
    fn pairs(&self) -> Vec<(&'static str, Option<String>)> {
        vec![
            ("out", self.out.clone()),
            ("seeds", self.seeds.clone()),
            ("jobs", self.jobs.clone()),
        ]
    }
}

#[derive(Args)]
struct RegretArgs {
    #[command(flatten)]
    common: Common,
    /// constant | piecewise | stochastic
    #[arg(long)]
    adversary: Option<String>,
    /// vrm | ons | ogd
    #[arg(long)]
    learner: Option<String>,
    /// Horizons, comma separated.
    #[arg(long = "T", alias = "horizons", required_unless_present = "config")]
    horizons: Option<String>,
    /// Number of atoms.
    #[arg(long)]
    n: Option<String>,
    /// Components including the uniform one [default: one point mass per atom].
    #[arg(long)]
    k: Option<String>,
    #[arg(long)]
    instance_seed: Option<String>,
    #[arg(long)]
    gamma: Option<String>,
    #[arg(long)]
    beta: Option<String>,
    #[arg(long)]
    eps: Option<String>,
    #[arg(long)]
    loss_bound: Option<String>,
}

impl RegretArgs {
    fn pairs(&self) -> Vec<(&'static str, Option<String>)> {
        let mut p = self.common.pairs();
        p.extend([
            ("adversary", self.adversary.clone()),
            ("learner", self.learner.clone()),
            ("T", self.horizons.clone()),
            ("n", self.n.clone()),
            ("k", self.k.clone()),
            ("instance-seed", self.instance_seed.clone()),
            ("gamma", self.gamma.clone()),
            ("beta", self.beta.clone()),
            ("eps", self.eps.clone()),
            ("loss-bound", self.loss_bound.clone()),
        ]);
        p
    }
}

#[derive(Args)]
struct ExperimentArgs {
    #[command(flatten)]
    common: Common,
    /// uniform | vrm | ogd
    #[arg(long)]
    sampler: Option<String>,
    /// Points CSV to cluster instead of synthetic data (k-means only).
    #[arg(long)]
    data: Option<String>,
    #[arg(long)]
    data_seed: Option<String>,
    #[arg(long)]
    n: Option<String>,
    #[arg(long)]
    d: Option<String>,
    #[arg(long)]
    blobs: Option<String>,
    #[arg(long)]
    separation: Option<String>,
    #[arg(long)]
    noise: Option<String>,
    #[arg(long)]
    scaled_points: Option<String>,
    #[arg(long)]
    scale: Option<String>,
    #[arg(long)]
    step0: Option<String>,
    #[arg(long)]
    epochs: Option<String>,
    #[arg(long)]
    iterations: Option<String>,
    #[arg(long)]
    batch_size: Option<String>,
    #[arg(long)]
    clusters: Option<String>,
    #[arg(long)]
    components: Option<String>,
    #[arg(long)]
    eps_mass: Option<String>,
    /// k-DPP kernel regularizers, comma separated.
    #[arg(long)]
    lambdas: Option<String>,
    /// Soft truncation `a,c` of importance weights; `1,0` is unbiased.
    #[arg(long, allow_hyphen_values = true)]
    trunc: Option<String>,
    #[arg(long)]
    eval_every: Option<String>,
    /// true | false
    #[arg(long)]
    tune: Option<String>,
    #[arg(long)]
    gamma: Option<String>,
    #[arg(long)]
    beta: Option<String>,
    #[arg(long)]
    eps: Option<String>,
    #[arg(long)]
    loss_bound: Option<String>,
}

impl ExperimentArgs {
    fn pairs(&self) -> Vec<(&'static str, Option<String>)> {
        let mut p = self.common.pairs();
        p.extend([
            ("sampler", self.sampler.clone()),
            ("data", self.data.clone()),
            ("data-seed", self.data_seed.clone()),
            ("n", self.n.clone()),
            ("d", self.d.clone()),
            ("blobs", self.blobs.clone()),
            ("separation", self.separation.clone()),
            ("noise", self.noise.clone()),
            ("scaled-points", self.scaled_points.clone()),
            ("scale", self.scale.clone()),
            ("step0", self.step0.clone()),
            ("epochs", self.epochs.clone()),
            ("iterations", self.iterations.clone()),
            ("batch-size", self.batch_size.clone()),
            ("clusters", self.clusters.clone()),
            ("components", self.components.clone()),
            ("eps-mass", self.eps_mass.clone()),
            ("lambdas", self.lambdas.clone()),
            ("trunc", self.trunc.clone()),
            ("eval-every", self.eval_every.clone()),
            ("tune", self.tune.clone()),
            ("gamma", self.gamma.clone()),
            ("beta", self.beta.clone()),
            ("eps", self.eps.clone()),
            ("loss-bound", self.loss_bound.clone()),
        ]);
        p
    }
}

#[derive(Args)]
struct ProjectArgs {
    #[command(flatten)]
    common: Common,
    /// Vector to project, comma separated.
    #[arg(long, allow_hyphen_values = true)]
    w: Option<String>,
    #[arg(long)]
    k: Option<String>,
    #[arg(long)]
    gamma: Option<String>,
    /// Number of random inputs to check.
    #[arg(long)]
    cases: Option<String>,
}

impl ProjectArgs {
    fn pairs(&self) -> Vec<(&'static str, Option<String>)> {
        let mut p = self.common.pairs();
        p.extend([
            ("w", self.w.clone()),
            ("k", self.k.clone()),
            ("gamma", self.gamma.clone()),
            ("cases", self.cases.clone()),
        ]);
        p
    }
}

/// Config file values overlaid with the flags that were given.
fn resolve(common: &Common, pairs: Vec<(&'static str, Option<String>)>) -> Result<Settings, CliError> {
    let mut s = match &common.config {
        Some(path) => ini::load(path)?,
        None => Settings::new(),
    };
    for (key, value) in pairs {
        if let Some(v) = value {
            s.insert(key.to_string(), v);
        }
    }
    Ok(s)
}

fn dispatch(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::RegretSim(a) => commands::regret_sim(&resolve(&a.common, a.pairs())?),
        Command::SvmBlobs(a) => commands::experiment(Experiment::SvmBlobs, &resolve(&a.common, a.pairs())?),
        Command::LinregDpp(a) => commands::experiment(Experiment::LinregDpp, &resolve(&a.common, a.pairs())?),
        Command::Kmeans(a) => commands::experiment(Experiment::Kmeans, &resolve(&a.common, a.pairs())?),
        Command::ProjectTest(a) => commands::project_test(&resolve(&a.common, a.pairs())?),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("{e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
