//! Linear SVM trained by online subgradient descent on Gaussian blobs.

use std::time::Instant;

use super::config::ExperimentConfig;
use super::data::gen_blobs;
use super::result::RunResult;
use super::sampler::AtomSampler;
use crate::error::Result;
use crate::mixtures::build_blob_components;
use crate::points::Points;
use crate::rng::derive_rng;

fn accuracy(points: &Points, labels: &[f64], theta: &[f64], bias: f64) -> f64 {
    let correct = points
        .rows()
        .zip(labels)
        .filter(|(x, &y)| {
            let score: f64 = x.iter().zip(theta).map(|(a, b)| a * b).sum::<f64>() + bias;
            score * y > 0.0
        })
        .count();
    correct as f64 / labels.len() as f64
}

/// Hinge loss without regularizer, margin 1, step `step0 / sqrt(t)` for
/// `epochs * n` rounds. Each round samples one point, takes an
/// importance-weighted subgradient step and reports the subgradient norm to
/// the sampler. The metric is training accuracy.
pub fn run_svm_blobs(cfg: &ExperimentConfig) -> Result<RunResult> {
    cfg.validate()?;
    let start = Instant::now();
    let mut data_rng = derive_rng(cfg.data_seed(), 1);
    let mut rng = derive_rng(cfg.seed, 2);

    let blobs = gen_blobs(cfg.n, cfg.d, cfg.blobs, cfg.separation, &mut data_rng)?;
    let cs = build_blob_components(&blobs.blob, cfg.eps_mass)?;
    let loss_bound = cfg.loss_bound.unwrap_or_else(|| {
        blobs
            .points
            .rows()
            .map(|x| x.iter().map(|v| v * v).sum::<f64>() + 1.0)
            .fold(0.0, f64::max)
    });
    let rounds = (cfg.epochs * cfg.n) as u64;
    let mut sampler = AtomSampler::new(cfg.sampler, cs, rounds, loss_bound, cfg)?;

    let d = cfg.d;
    let mut theta = vec![0.0; d];
    let mut bias = 0.0;
    let mut result = RunResult::new(cfg);
    let mut sampler_time = 0.0;

    for t in 1..=rounds {
        let tic = Instant::now();
        let (i, r) = sampler.sample(&mut rng)?;
        sampler_time += tic.elapsed().as_secs_f64();

        let x = blobs.points.row(i);
        let y = blobs.labels[i];
        let score: f64 = x.iter().zip(&theta).map(|(a, b)| a * b).sum::<f64>() + bias;
        let loss = if y * score < 1.0 {
            let eta = cfg.step0 / (t as f64).sqrt() * r;
            for (th, xa) in theta.iter_mut().zip(x) {
                *th += eta * y * xa;
            }
            bias += eta * y;
            (x.iter().map(|v| v * v).sum::<f64>() + 1.0).sqrt()
        } else {
            0.0
        };

        let tic = Instant::now();
        sampler.feedback(i, loss);
        sampler_time += tic.elapsed().as_secs_f64();

        if t % cfg.eval_every as u64 == 0 || t == rounds {
            result.record(t, accuracy(&blobs.points, &blobs.labels, &theta, bias));
        }
    }

    result.final_weights = Some(sampler.weights().to_vec());
    result.clipped = sampler.clipped();
    result.rejected = sampler.rejected();
    result.sampler_time_secs = sampler_time;
    result.wall_time_secs = start.elapsed().as_secs_f64();
    result
        .extras
        .insert("loss_bound".into(), loss_bound);
    Ok(result)
}
