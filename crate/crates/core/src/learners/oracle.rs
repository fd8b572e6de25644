//! Best fixed mixture in hindsight.

use serde::{Deserialize, Serialize};

use super::cost::{cost_full, grad_full};
use crate::error::{invalid, Result};
use crate::mixtures::ComponentSet;
use crate::simplex::{proj_restricted, RestrictedSimplexSpec};

/// Floor used on the uniform weight when optimizing over the full simplex; keeps
/// every mixture probability strictly positive.
pub const FULL_SIMPLEX_FLOOR: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum Domain {
    Full,
    /// Restricted simplex with the given floor on the uniform weight.
    Restricted(f64),
}

impl Domain {
    fn spec(&self, k: usize) -> Result<RestrictedSimplexSpec> {
        match *self {
            Domain::Full => RestrictedSimplexSpec::new(k, FULL_SIMPLEX_FLOOR),
            Domain::Restricted(gamma) => RestrictedSimplexSpec::new(k, gamma),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OracleOptions {
    pub max_iters: usize,
    /// Certification threshold on the gradient-mapping norm, relative to
    /// `max(1, objective)`.
    pub tol: f64,
}

impl Default for OracleOptions {
    fn default() -> Self {
        Self {
            max_iters: 20_000,
            tol: 1e-9,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OracleResult {
    pub weights: Vec<f64>,
    /// Minimal cumulative cost, unnormalized.
    pub value: f64,
    pub certified: bool,
    pub iterations: usize,
}

/// Minimizes `sum_t f_t(w) = sum_i S(i) / (w^T p(i))` over the chosen domain, where
/// `S(i) = sum_t l_t^2(i)` are the cumulative squared losses.
///
/// Projected gradient descent with backtracking; the result is certified when
/// the gradient-mapping norm falls below `tol * max(1, value)`.
pub fn hindsight_oracle(
    cs: &ComponentSet,
    cumulative_losses_sq: &[f64],
    domain: Domain,
    opts: OracleOptions,
) -> Result<OracleResult> {
    let k = cs.k();
    let spec = domain.spec(k)?;
    let s = cumulative_losses_sq;
    let w0 = proj_restricted(&vec![1.0 / k as f64; k], &spec)?;
    let mut x = w0;
    let mut fx = cost_full(cs, &x, s)?;
    let mut step = 1.0 / fx.max(1.0);
    let mut certified = false;
    let mut iterations = 0;

    for it in 0..opts.max_iters {
        iterations = it + 1;
        let g = grad_full(cs, &x, s)?;
        let mut accepted = None;
        for _ in 0..200 {
            let trial: Vec<f64> = x.iter().zip(&g).map(|(a, b)| a - step * b).collect();
            let y = proj_restricted(&trial, &spec)?;
            let d: Vec<f64> = y.iter().zip(&x).map(|(a, b)| a - b).collect();
            let fy = cost_full(cs, &y, s)?;
            let lin: f64 = g.iter().zip(&d).map(|(a, b)| a * b).sum();
            let sq: f64 = d.iter().map(|v| v * v).sum();
            if fy <= fx + lin + sq / (2.0 * step) + 1e-15 * fx.abs() {
                accepted = Some((y, fy, sq.sqrt()));
                break;
            }
            step *= 0.5;
        }
        let Some((y, fy, moved)) = accepted else {
            break;
        };
        let mapping = moved / step;
        x = y;
        fx = fy;
        if mapping <= opts.tol * fx.max(1.0) {
            certified = true;
            break;
        }
        step *= 1.5;
    }
    Ok(OracleResult {
        weights: x,
        value: fx,
        certified,
        iterations,
    })
}

/// Column sums of a `T x n` loss-square matrix.
pub fn cumulative_losses(loss_sq_rows: &[Vec<f64>]) -> Result<Vec<f64>> {
    let n = loss_sq_rows.first().map(Vec::len).unwrap_or(0);
    if loss_sq_rows.iter().any(|r| r.len() != n) {
        return Err(invalid("loss matrix rows differ in length"));
    }
    let mut s = vec![0.0; n];
    for row in loss_sq_rows {
        for (acc, v) in s.iter_mut().zip(row) {
            *acc += v;
        }
    }
    Ok(s)
}
