//! Synthetic datasets.

use rand::seq::SliceRandom;
use rand::Rng;
use rand_distr::{Distribution, Normal};

use crate::error::{invalid, Result};
use crate::points::Points;

#[derive(Debug, Clone, PartialEq)]
pub struct Blobs {
    pub points: Points,
    /// Class labels, `-1` for the left half of the blobs and `+1` for the right.
    pub labels: Vec<f64>,
    pub blob: Vec<usize>,
}

fn std_normal() -> Normal<f64> {
    Normal::new(0.0, 1.0).expect("unit normal")
}

/// Balanced isotropic Gaussian blobs (unit std) with means `separation` apart on
/// the first axis. Point `i` belongs to blob `i % blob_count`, so any remainder
/// goes to the first blobs.
pub fn gen_blobs<R: Rng + ?Sized>(
    n: usize,
    d: usize,
    blob_count: usize,
    separation: f64,
    rng: &mut R,
) -> Result<Blobs> {
    if n == 0 || d == 0 || blob_count == 0 {
        return Err(invalid("n, d and blob count must be positive"));
    }
    if !(separation.is_finite() && separation >= 0.0) {
        return Err(invalid(format!("separation must be non-negative, got {separation}")));
    }
    let normal = std_normal();
    let center = (blob_count as f64 - 1.0) / 2.0;
    let mut data = Vec::with_capacity(n * d);
    let mut labels = Vec::with_capacity(n);
    let mut blob = Vec::with_capacity(n);
    for i in 0..n {
        let b = i % blob_count;
        for a in 0..d {
            let mean = if a == 0 { (b as f64 - center) * separation } else { 0.0 };
            data.push(mean + normal.sample(rng));
        }
        labels.push(if 2 * b < blob_count { -1.0 } else { 1.0 });
        blob.push(b);
    }
    Ok(Blobs {
        points: Points::new(d, data)?,
        labels,
        blob,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct Regression {
    pub x: Points,
    pub y: Vec<f64>,
    pub w0: Vec<f64>,
    pub scaled: Vec<usize>,
}

/// Features from a normal distribution with a random mean (`N(0, 1)`) and a
/// random standard deviation (`U(0.5, 2)`) per dimension; `scaled_points`
/// random rows multiplied by `scale`; `y = X w0 + e` with `w0 ~ N(0, 25)` and
/// standard normal noise.
pub fn gen_regression<R: Rng + ?Sized>(
    n: usize,
    d: usize,
    scaled_points: usize,
    scale: f64,
    rng: &mut R,
) -> Result<Regression> {
    if n == 0 || d == 0 {
        return Err(invalid("n and d must be positive"));
    }
    if scaled_points > n {
        return Err(invalid(format!(
            "cannot scale {scaled_points} of {n} points"
        )));
    }
    let normal = std_normal();
    let means: Vec<f64> = (0..d).map(|_| normal.sample(rng)).collect();
    let stds: Vec<f64> = (0..d).map(|_| rng.random_range(0.5..2.0)).collect();
    let mut data = Vec::with_capacity(n * d);
    for _ in 0..n {
        for a in 0..d {
            data.push(means[a] + stds[a] * normal.sample(rng));
        }
    }
    let mut x = Points::new(d, data)?;
    let mut scaled = rand::seq::index::sample(rng, n, scaled_points).into_vec();
    scaled.sort_unstable();
    for &i in &scaled {
        x.row_mut(i).iter_mut().for_each(|v| *v *= scale);
    }
    let w0: Vec<f64> = (0..d).map(|_| 5.0 * normal.sample(rng)).collect();
    let y = x
        .rows()
        .map(|row| row.iter().zip(&w0).map(|(a, b)| a * b).sum::<f64>() + normal.sample(rng))
        .collect();
    Ok(Regression { x, y, w0, scaled })
}

/// Gaussian clusters with centers uniform in `[-separation, separation]^d` and
/// per-cluster standard deviations `noise * U(0.25, 2)`. Point `i` belongs to
/// cluster `i % clusters`. Returns the points and their cluster ids.
pub fn gen_clusters<R: Rng + ?Sized>(
    n: usize,
    d: usize,
    clusters: usize,
    separation: f64,
    noise: f64,
    rng: &mut R,
) -> Result<(Points, Vec<usize>)> {
    if n == 0 || d == 0 || clusters == 0 {
        return Err(invalid("n, d and cluster count must be positive"));
    }
    if !(separation.is_finite() && separation >= 0.0 && noise.is_finite() && noise > 0.0) {
        return Err(invalid("invalid separation or noise"));
    }
    let normal = std_normal();
    let centers: Vec<Vec<f64>> = (0..clusters)
        .map(|_| {
            (0..d)
                .map(|_| rng.random_range(-1.0..=1.0) * separation)
                .collect()
        })
        .collect();
    let spreads: Vec<f64> = (0..clusters)
        .map(|_| noise * rng.random_range(0.25..2.0))
        .collect();
    let mut data = Vec::with_capacity(n * d);
    let mut ids = Vec::with_capacity(n);
    for i in 0..n {
        let c = i % clusters;
        for &m in &centers[c] {
            data.push(m + spreads[c] * normal.sample(rng));
        }
        ids.push(c);
    }
    Ok((Points::new(d, data)?, ids))
}

/// Random split into a `train_frac` part and the rest.
pub fn train_test_split<R: Rng + ?Sized>(
    points: &Points,
    train_frac: f64,
    rng: &mut R,
) -> Result<(Points, Points)> {
    if !(train_frac > 0.0 && train_frac < 1.0) {
        return Err(invalid(format!("train fraction must lie in (0, 1), got {train_frac}")));
    }
    let n = points.len();
    let n_train = ((n as f64) * train_frac).round() as usize;
    if n_train == 0 || n_train == n {
        return Err(invalid(format!("split of {n} points leaves an empty part")));
    }
    let mut idx: Vec<usize> = (0..n).collect();
    idx.shuffle(rng);
    Ok((points.select(&idx[..n_train]), points.select(&idx[n_train..])))
}
