use serde::Serialize;
use statrs::distribution::{ContinuousCDF, StudentsT};

/// Mean and 95% confidence half-width of one checkpoint across seeds.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Checkpoint {
    pub iter: u64,
    pub mean: f64,
    /// Student-t half-width; zero with a single seed.
    pub ci95: f64,
    pub count: usize,
}

pub fn mean_ci95(values: &[f64]) -> (f64, f64) {
    let m = values.len();
    if m == 0 {
        return (f64::NAN, f64::NAN);
    }
    let mean = values.iter().sum::<f64>() / m as f64;
    if m == 1 {
        return (mean, 0.0);
    }
    let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (m - 1) as f64;
    let t = StudentsT::new(0.0, 1.0, (m - 1) as f64)
        .expect("positive degrees of freedom")
        .inverse_cdf(0.975);
    (mean, t * (var / m as f64).sqrt())
}

/// Aggregates per-seed `(iters, metric)` series over the iterations every series recorded.
pub fn checkpoints(series: &[(&[u64], &[f64])]) -> Vec<Checkpoint> {
    let Some(&(first, _)) = series.first() else {
        return Vec::new();
    };
    first
        .iter()
        .filter_map(|&it| {
            let values: Vec<f64> = series
                .iter()
                .filter_map(|(iters, metric)| iters.iter().position(|&i| i == it).map(|p| metric[p]))
                .collect();
            (values.len() == series.len()).then(|| {
                let (mean, ci95) = mean_ci95(&values);
                Checkpoint {
                    iter: it,
                    mean,
                    ci95,
                    count: values.len(),
                }
            })
        })
        .collect()
}
