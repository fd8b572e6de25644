//! Minibatch k-means with importance-weighted center updates.

use std::time::Instant;

use rand::Rng;

use super::config::{ExperimentConfig, Sampler};
use super::data::{gen_clusters, train_test_split};
use super::result::RunResult;
use super::sampler::{mixture_hyper, AtomSampler};
use crate::error::{invalid, Result};
use crate::learners::DIAMETER;
use crate::mixtures::{build_distance_components, ComponentSet};
use crate::points::{sq_dist, Points};
use crate::rng::derive_rng;

/// Index and squared distance of the closest center.
fn nearest(x: &[f64], centers: &Points) -> (usize, f64) {
    let mut best = (0, f64::INFINITY);
    for (c, mu) in centers.rows().enumerate() {
        let d = sq_dist(x, mu);
        if d < best.1 {
            best = (c, d);
        }
    }
    best
}

/// Mean squared distance to the closest center.
pub fn kmeans_loss(points: &Points, centers: &Points) -> f64 {
    points.rows().map(|x| nearest(x, centers).1).sum::<f64>() / points.len() as f64
}

/// k-means++ seeding: the first center uniformly, each further one with
/// probability proportional to the squared distance to the closest chosen center.
/// Returns the indices of the chosen points.
pub fn kmeans_pp<R: Rng + ?Sized>(points: &Points, k: usize, rng: &mut R) -> Result<Vec<usize>> {
    let n = points.len();
    if k == 0 || k > n {
        return Err(invalid(format!("cannot choose {k} centers from {n} points")));
    }
    let mut chosen = vec![rng.random_range(0..n)];
    let mut d2: Vec<f64> = points
        .rows()
        .map(|x| sq_dist(x, points.row(chosen[0])))
        .collect();
    while chosen.len() < k {
        let total: f64 = d2.iter().sum();
        let next = if total > 0.0 {
            let mut u = rng.random::<f64>() * total;
            let mut pick = None;
            for (i, &w) in d2.iter().enumerate() {
                if w > 0.0 {
                    pick = Some(i);
                    if u < w {
                        break;
                    }
                    u -= w;
                }
            }
            pick.expect("positive total mass")
        } else {
            // Every point coincides with a center; fall back to uniform.
            rng.random_range(0..n)
        };
        chosen.push(next);
        let mu = points.row(next).to_vec();
        for (dv, x) in d2.iter_mut().zip(points.rows()) {
            *dv = dv.min(sq_dist(x, &mu));
        }
    }
    Ok(chosen)
}

/// Full-batch Lloyd iterations until the relative change of the potential drops
/// below `tol`. Empty clusters keep their center.
pub fn lloyd(points: &Points, init: &Points, tol: f64, max_iters: usize) -> Points {
    let k = init.len();
    let d = init.dim();
    let mut centers = init.clone();
    let mut prev = f64::INFINITY;
    for _ in 0..max_iters {
        let mut sums = vec![0.0; k * d];
        let mut counts = vec![0usize; k];
        let mut potential = 0.0;
        for x in points.rows() {
            let (c, dist) = nearest(x, &centers);
            potential += dist;
            counts[c] += 1;
            for (s, v) in sums[c * d..(c + 1) * d].iter_mut().zip(x) {
                *s += v;
            }
        }
        for c in 0..k {
            if counts[c] > 0 {
                let m = counts[c] as f64;
                for (mu, s) in centers.row_mut(c).iter_mut().zip(&sums[c * d..(c + 1) * d]) {
                    *mu = s / m;
                }
            }
        }
        if (prev - potential).abs() <= tol * potential.max(f64::MIN_POSITIVE) {
            break;
        }
        prev = potential;
    }
    centers
}

/// Data and shared state for comparing samplers on one initialization.
#[derive(Debug, Clone)]
pub struct KmeansSetup {
    pub train: Points,
    pub test: Points,
    pub init: Points,
    /// Test loss of the full-batch Lloyd solution started from `init`.
    pub reference_loss: f64,
    pub components: ComponentSet,
    pub loss_bound: f64,
    /// Time spent building the mixture components.
    pub setup_secs: f64,
}

/// Synthetic clustered data for the k-means experiment.
pub fn synthetic_points(cfg: &ExperimentConfig) -> Result<Points> {
    let mut rng = derive_rng(cfg.data_seed(), 1);
    Ok(gen_clusters(cfg.n, cfg.d, cfg.blobs, cfg.separation, cfg.noise, &mut rng)?.0)
}

/// 80/20 split (fixed by the data seed), k-means++ initialization and distance
/// components (from the run seed), and the Lloyd reference.
pub fn prepare_kmeans(cfg: &ExperimentConfig, points: &Points) -> Result<KmeansSetup> {
    cfg.validate()?;
    if points.len() < cfg.clusters {
        return Err(invalid(format!(
            "{} points cannot form {} clusters",
            points.len(),
            cfg.clusters
        )));
    }
    let (train, test) = train_test_split(points, 0.8, &mut derive_rng(cfg.data_seed(), 3))?;
    if train.len() < cfg.clusters || train.len() < cfg.components {
        return Err(invalid("training split is smaller than the number of clusters"));
    }
    let init_idx = kmeans_pp(&train, cfg.clusters, &mut derive_rng(cfg.seed, 4))?;
    let init = train.select(&init_idx);
    let reference = lloyd(&train, &init, 1e-6, 1000);
    let reference_loss = kmeans_loss(&test, &reference);

    let tic = Instant::now();
    let comp_idx =
        rand::seq::index::sample(&mut derive_rng(cfg.seed, 5), train.len(), cfg.components)
            .into_vec();
    let components = build_distance_components(&train, &train.select(&comp_idx))?;
    let setup_secs = tic.elapsed().as_secs_f64();

    let loss_bound = cfg.loss_bound.unwrap_or_else(|| {
        train
            .rows()
            .map(|x| nearest(x, &init).1)
            .fold(0.0, f64::max)
            .max(f64::MIN_POSITIVE)
    });
    Ok(KmeansSetup {
        train,
        test,
        init,
        reference_loss,
        components,
        loss_bound,
        setup_secs,
    })
}

/// Minibatch k-means as in Sculley's web-scale variant with per-center counts.
/// Each batch holds `b` independent draws `i ~ w^T p`; a point with importance
/// weight `r` adds `r` to its center's count and moves the center by `r / count`.
/// Feedback `||x_i - mu(x_i)||` is averaged into one learner update per batch.
fn minibatch_kmeans(
    cfg: &ExperimentConfig,
    train: &Points,
    test: Option<(&Points, f64)>,
    init: &Points,
    components: &ComponentSet,
    loss_bound: f64,
    result: &mut RunResult,
) -> Result<Points> {
    let mut rng = derive_rng(cfg.seed, 6);
    let rounds = cfg.iterations as u64;
    let mut sampler =
        AtomSampler::new(cfg.sampler, components.clone(), rounds, loss_bound, cfg)?;
    let mut centers = init.clone();
    let mut counts = vec![0.0; centers.len()];
    let mut batch = Vec::with_capacity(cfg.batch_size);
    let mut sampler_time = 0.0;

    for t in 1..=rounds {
        let tic = Instant::now();
        batch.clear();
        for _ in 0..cfg.batch_size {
            batch.push(sampler.sample(&mut rng)?);
        }
        sampler_time += tic.elapsed().as_secs_f64();

        let assigned: Vec<(usize, f64)> = batch
            .iter()
            .map(|&(i, _)| nearest(train.row(i), &centers))
            .collect();
        for (&(i, r), &(c, _)) in batch.iter().zip(&assigned) {
            counts[c] += r;
            let eta = r / counts[c];
            for (mu, x) in centers.row_mut(c).iter_mut().zip(train.row(i)) {
                *mu = (1.0 - eta) * *mu + eta * x;
            }
        }

        let tic = Instant::now();
        for (&(i, _), &(_, d2)) in batch.iter().zip(&assigned) {
            sampler.accumulate(i, d2.sqrt());
        }
        sampler.flush();
        sampler_time += tic.elapsed().as_secs_f64();

        if let Some((test, reference)) = test {
            if t % cfg.eval_every as u64 == 0 || t == rounds {
                result.record(t, (kmeans_loss(test, &centers) - reference) / reference);
            }
        }
    }
    result.final_weights = Some(sampler.weights().to_vec());
    result.clipped = sampler.clipped();
    result.rejected = sampler.rejected();
    result.sampler_time_secs = sampler_time;
    Ok(centers)
}

/// Picks gamma and beta on an 80/20 split of the training data by the
/// validation loss after a full run. The grid spans the default (theory)
/// values and larger floors on the uniform weight.
fn tune(cfg: &ExperimentConfig, setup: &KmeansSetup) -> Result<(f64, f64)> {
    let (inner, val) = train_test_split(&setup.train, 0.8, &mut derive_rng(cfg.seed, 7))?;
    let comp_idx =
        rand::seq::index::sample(&mut derive_rng(cfg.seed, 8), inner.len(), cfg.components)
            .into_vec();
    let components = build_distance_components(&inner, &inner.select(&comp_idx))?;
    let k = components.k();
    let base = mixture_hyper(cfg, k, components.c(), cfg.iterations as u64)?;
    let mut best = (f64::INFINITY, base.gamma, base.beta);
    for gamma in [base.gamma, 0.2, 0.5] {
        for beta in [base.beta, 0.01, 0.1] {
            let trial = ExperimentConfig {
                gamma: Some(gamma),
                beta: Some(beta),
                eps: Some(1.0 / (beta * beta * DIAMETER * DIAMETER)),
                ..cfg.clone()
            };
            let mut scratch = RunResult::new(&trial);
            let centers = minibatch_kmeans(
                &trial,
                &inner,
                None,
                &setup.init,
                &components,
                setup.loss_bound,
                &mut scratch,
            )?;
            let loss = kmeans_loss(&val, &centers);
            if loss < best.0 {
                best = (loss, gamma, beta);
            }
        }
    }
    Ok((best.1, best.2))
}

/// Runs one sampler on a prepared setup. The metric is the test-set relative
/// error against the Lloyd reference.
pub fn run_kmeans_prepared(cfg: &ExperimentConfig, setup: &KmeansSetup) -> Result<RunResult> {
    cfg.validate()?;
    let start = Instant::now();
    let mut cfg = cfg.clone();
    if cfg.tune && cfg.sampler != Sampler::Uniform {
        let (gamma, beta) = tune(&cfg, setup)?;
        cfg.gamma = Some(gamma);
        cfg.beta = Some(beta);
        cfg.eps = Some(1.0 / (beta * beta * DIAMETER * DIAMETER));
    }
    let mut result = RunResult::new(&cfg);
    result.record(
        0,
        (kmeans_loss(&setup.test, &setup.init) - setup.reference_loss) / setup.reference_loss,
    );
    minibatch_kmeans(
        &cfg,
        &setup.train,
        Some((&setup.test, setup.reference_loss)),
        &setup.init,
        &setup.components,
        setup.loss_bound,
        &mut result,
    )?;
    if cfg.sampler != Sampler::Uniform {
        result.sampler_time_secs += setup.setup_secs;
    }
    result.wall_time_secs = start.elapsed().as_secs_f64();
    result.extras.insert("reference_loss".into(), setup.reference_loss);
    result.extras.insert("loss_bound".into(), setup.loss_bound);
    result.extras.insert("c".into(), setup.components.c());
    Ok(result)
}

pub fn run_kmeans(cfg: &ExperimentConfig, points: &Points) -> Result<RunResult> {
    let setup = prepare_kmeans(cfg, points)?;
    run_kmeans_prepared(cfg, &setup)
}
