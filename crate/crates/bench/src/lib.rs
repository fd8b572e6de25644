//! Fixtures shared by the benchmarks.

use rand::Rng;
use vrm_core::{seeded_rng, ComponentSet, HyperParams};

/// `k - 1` random dense components over `n` atoms plus the uniform one.
pub fn random_components(n: usize, k: usize, seed: u64) -> ComponentSet {
    let mut rng = seeded_rng(seed);
    let rows: Vec<Vec<f64>> = (0..k - 1)
        .map(|_| {
            let raw: Vec<f64> = (0..n).map(|_| rng.random_range(0.01..1.0)).collect();
            let s: f64 = raw.iter().sum();
            raw.into_iter().map(|v| v / s).collect()
        })
        .collect();
    ComponentSet::attach_uniform(&rows, n).expect("valid components")
}

pub fn bench_hyper() -> HyperParams {
    HyperParams {
        gamma: 0.05,
        beta: 0.1,
        eps: 1.0,
        loss_bound: 1.0,
    }
}

/// Random vectors of length `k` in `[-1, 1]`.
pub fn random_vectors(k: usize, count: usize, seed: u64) -> Vec<Vec<f64>> {
    let mut rng = seeded_rng(seed);
    (0..count)
        .map(|_| (0..k).map(|_| rng.random_range(-1.0..1.0)).collect())
        .collect()
}
