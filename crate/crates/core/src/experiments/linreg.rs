//! Least squares by minibatch SGD with minibatches drawn from a mixture of k-DPPs.

use std::time::Instant;

use super::config::{ExperimentConfig, Sampler};
use super::data::{gen_regression, Regression};
use super::result::RunResult;
use super::sampler::MixtureLearner;
use crate::dpp::{sample_set_mixture, DppKernel, SetMixture};
use crate::error::Result;
use crate::rng::derive_rng;

fn mse(data: &Regression, theta: &[f64]) -> f64 {
    data.x
        .rows()
        .zip(&data.y)
        .map(|(x, y)| {
            let e = x.iter().zip(theta).map(|(a, b)| a * b).sum::<f64>() - y;
            e * e
        })
        .sum::<f64>()
        / data.y.len() as f64
}

/// Gradient of the batch mean squared error `(2/b) sum (x^T theta - y) x`.
fn batch_grad(data: &Regression, theta: &[f64], batch: &[usize], out: &mut [f64]) {
    out.iter_mut().for_each(|v| *v = 0.0);
    let scale = 2.0 / batch.len() as f64;
    for &i in batch {
        let x = data.x.row(i);
        let e = x.iter().zip(theta).map(|(a, b)| a * b).sum::<f64>() - data.y[i];
        for (o, xa) in out.iter_mut().zip(x) {
            *o += scale * e * xa;
        }
    }
}

/// Minibatch SGD with step `step0 / sqrt(t)` over `epochs * n / b` rounds.
/// The mixture holds one k-DPP per regularizer in `cfg.lambdas` plus uniform
/// minibatches; the step is scaled by the truncated set weight `r'` and the
/// sampler receives the norm of the unweighted batch gradient. The metric is
/// training MSE.
pub fn run_linreg_dpp(cfg: &ExperimentConfig) -> Result<RunResult> {
    cfg.validate()?;
    let start = Instant::now();
    let mut data_rng = derive_rng(cfg.data_seed(), 1);
    let mut rng = derive_rng(cfg.seed, 2);

    let data = gen_regression(cfg.n, cfg.d, cfg.scaled_points, cfg.scale, &mut data_rng)?;
    let b = cfg.batch_size;
    let setup = Instant::now();
    let kernels = match cfg.sampler {
        Sampler::Uniform => Vec::new(),
        _ => cfg
            .lambdas
            .iter()
            .map(|&lam| DppKernel::linear(&data.x, lam, b))
            .collect::<Result<Vec<_>>>()?,
    };
    let mix = SetMixture::new(kernels, cfg.n, b)?;
    let mut sampler_time = setup.elapsed().as_secs_f64();

    // Per-point gradient norms at the starting point bound the batch gradient norm.
    let loss_bound = cfg.loss_bound.unwrap_or_else(|| {
        data.x
            .rows()
            .zip(&data.y)
            .map(|(x, y)| 4.0 * y * y * x.iter().map(|v| v * v).sum::<f64>())
            .fold(0.0, f64::max)
            .max(f64::MIN_POSITIVE)
    });
    let rounds = (cfg.epochs * cfg.n / b).max(1) as u64;
    let c = (mix.kernels().len() + 1) as f64;
    let mut learner = MixtureLearner::new(cfg.sampler, mix.k(), c, rounds, loss_bound, cfg)?;

    let mut theta = vec![0.0; cfg.d];
    let mut grad = vec![0.0; cfg.d];
    let mut result = RunResult::new(cfg);
    result.record(0, mse(&data, &theta));

    for t in 1..=rounds {
        let tic = Instant::now();
        let sample = sample_set_mixture(&mix, learner.weights(), &mut rng, cfg.trunc)?;
        sampler_time += tic.elapsed().as_secs_f64();

        batch_grad(&data, &theta, &sample.set, &mut grad);
        let eta = cfg.step0 / (t as f64).sqrt() * sample.truncated_weight;
        for (th, g) in theta.iter_mut().zip(&grad) {
            *th -= eta * g;
        }
        let norm = grad.iter().map(|g| g * g).sum::<f64>().sqrt();

        let tic = Instant::now();
        learner.feed(&sample.rel_per_component, norm);
        sampler_time += tic.elapsed().as_secs_f64();

        if t % cfg.eval_every as u64 == 0 || t == rounds {
            result.record(t, mse(&data, &theta));
        }
    }

    result.final_weights = Some(learner.weights().to_vec());
    result.clipped = learner.clipped();
    result.rejected = learner.rejected();
    result.sampler_time_secs = sampler_time;
    result.wall_time_secs = start.elapsed().as_secs_f64();
    result.extras.insert("loss_bound".into(), loss_bound);
    result
        .extras
        .insert("unbiased".into(), if cfg.unbiased() { 1.0 } else { 0.0 });
    Ok(result)
}
