//! Resolution of string settings (config file overlaid with flags) into typed configs.

use std::collections::BTreeMap;
use std::str::FromStr;

use vrm_core::experiments::{Adversary, ExperimentConfig, LearnerKind, RegretSimConfig, Sampler};

use crate::error::CliError;

pub type Settings = BTreeMap<String, String>;

fn usage(key: &str, value: &str, why: impl std::fmt::Display) -> CliError {
    CliError::Usage(format!("invalid value '{value}' for {key}: {why}"))
}

fn parse<T: FromStr>(key: &str, value: &str) -> Result<T, CliError>
where
    T::Err: std::fmt::Display,
{
    value.trim().parse().map_err(|e| usage(key, value, e))
}

fn parse_list<T: FromStr>(key: &str, value: &str) -> Result<Vec<T>, CliError>
where
    T::Err: std::fmt::Display,
{
    value
        .split(',')
        .filter(|s| !s.trim().is_empty())
        .map(|s| parse(key, s))
        .collect()
}

fn parse_bool(key: &str, value: &str) -> Result<bool, CliError> {
    match value.trim() {
        "true" | "yes" | "1" | "on" => Ok(true),
        "false" | "no" | "0" | "off" => Ok(false),
        _ => Err(usage(key, value, "expected true or false")),
    }
}

/// Seed lists such as `7`, `1,4,9` or `1..5` (inclusive), mixed freely.
pub fn parse_seeds(value: &str) -> Result<Vec<u64>, CliError> {
    let mut seeds = Vec::new();
    for part in value.split(',').map(str::trim).filter(|s| !s.is_empty()) {
        match part.split_once("..") {
            Some((a, b)) => {
                let a: u64 = parse("seeds", a)?;
                let b: u64 = parse("seeds", b.trim_start_matches('='))?;
                if b < a {
                    return Err(usage("seeds", part, "empty range"));
                }
                seeds.extend(a..=b);
            }
            None => seeds.push(parse("seeds", part)?),
        }
    }
    if seeds.is_empty() {
        return Err(CliError::Usage("at least one seed is required".into()));
    }
    Ok(seeds)
}

/// Settings handled by the command itself rather than the config structs.
const RUNNER_KEYS: &[&str] = &["seeds", "jobs", "out", "data"];

pub fn experiment_config(base: ExperimentConfig, s: &Settings) -> Result<ExperimentConfig, CliError> {
    let mut cfg = base;
    for (key, v) in s {
        let k = key.as_str();
        match k {
            "sampler" => cfg.sampler = parse::<Sampler>(k, v)?,
            "data-seed" => cfg.data_seed = Some(parse(k, v)?),
            "n" => cfg.n = parse(k, v)?,
            "d" => cfg.d = parse(k, v)?,
            "blobs" => cfg.blobs = parse(k, v)?,
            "separation" => cfg.separation = parse(k, v)?,
            "noise" => cfg.noise = parse(k, v)?,
            "scaled-points" => cfg.scaled_points = parse(k, v)?,
            "scale" => cfg.scale = parse(k, v)?,
            "step0" => cfg.step0 = parse(k, v)?,
            "epochs" => cfg.epochs = parse(k, v)?,
            "iterations" => cfg.iterations = parse(k, v)?,
            "batch-size" => cfg.batch_size = parse(k, v)?,
            "clusters" => cfg.clusters = parse(k, v)?,
            "components" => cfg.components = parse(k, v)?,
            "eps-mass" => cfg.eps_mass = parse(k, v)?,
            "lambdas" => cfg.lambdas = parse_list(k, v)?,
            "trunc" => {
                let t: Vec<f64> = parse_list(k, v)?;
                if t.len() != 2 {
                    return Err(usage(k, v, "expected two numbers a,c"));
                }
                cfg.trunc = (t[0], t[1]);
            }
            "eval-every" => cfg.eval_every = parse(k, v)?,
            "tune" => cfg.tune = parse_bool(k, v)?,
            "gamma" => cfg.gamma = Some(parse(k, v)?),
            "beta" => cfg.beta = Some(parse(k, v)?),
            "eps" => cfg.eps = Some(parse(k, v)?),
            "loss-bound" => cfg.loss_bound = Some(parse(k, v)?),
            _ if RUNNER_KEYS.contains(&k) => {}
            _ => return Err(CliError::Usage(format!("unknown setting '{k}'"))),
        }
    }
    cfg.validate().map_err(|e| CliError::Usage(e.to_string()))?;
    Ok(cfg)
}

pub fn regret_config(s: &Settings) -> Result<RegretSimConfig, CliError> {
    let mut cfg = RegretSimConfig::default();
    let mut have_horizon = false;
    for (key, v) in s {
        let k = key.as_str();
        match k {
            "adversary" => cfg.adversary = parse::<Adversary>(k, v)?,
            "learner" => cfg.learner = parse::<LearnerKind>(k, v)?,
            "T" | "horizons" => {
                cfg.horizons = parse_list(k, v)?;
                have_horizon = true;
            }
            "n" => cfg.n = parse(k, v)?,
            "k" => cfg.k = Some(parse(k, v)?),
            "instance-seed" => cfg.instance_seed = parse(k, v)?,
            "gamma" => cfg.gamma = Some(parse(k, v)?),
            "beta" => cfg.beta = Some(parse(k, v)?),
            "eps" => cfg.eps = Some(parse(k, v)?),
            "loss-bound" => cfg.loss_bound = Some(parse(k, v)?),
            "seeds" => cfg.seeds = parse_seeds(v)?,
            _ if RUNNER_KEYS.contains(&k) => {}
            _ => return Err(CliError::Usage(format!("unknown setting '{k}'"))),
        }
    }
    if !have_horizon {
        return Err(CliError::Usage("the horizon --T is required".into()));
    }
    cfg.validate().map_err(|e| CliError::Usage(e.to_string()))?;
    Ok(cfg)
}

pub fn jobs(s: &Settings) -> Result<usize, CliError> {
    match s.get("jobs") {
        Some(v) => {
            let j: usize = parse("jobs", v)?;
            if j == 0 {
                return Err(usage("jobs", v, "must be positive"));
            }
            Ok(j)
        }
        None => Ok(std::thread::available_parallelism().map_or(1, |n| n.get())),
    }
}
