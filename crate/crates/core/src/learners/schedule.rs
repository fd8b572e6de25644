//! Default hyperparameters derived from the regret analysis.

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};

/// Diameter of the restricted simplex.
pub const DIAMETER: f64 = std::f64::consts::SQRT_2;

/// Full information (every loss revealed) or partial (bandit) feedback.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Full,
    Partial,
}

/// Floor on the uniform-component weight for a horizon of `t_horizon` rounds.
///
/// Full information: `3 sqrt(k) T^{-1/3} ln^{1/3} T`.
/// Partial feedback: `k^{3/8} c^{1/5} T^{-1/5}`.
/// The value is capped at `1/k` so the initial uniform weights stay feasible.
pub fn default_gamma(k: usize, t_horizon: u64, c: f64, mode: Mode) -> Result<f64> {
    if k == 0 {
        return Err(invalid("k must be positive"));
    }
    if t_horizon < 3 {
        return Err(invalid("horizon must be at least 3 rounds"));
    }
    if !(c >= 1.0 && c.is_finite()) {
        return Err(invalid(format!("c must be at least 1, got {c}")));
    }
    let kf = k as f64;
    let t = t_horizon as f64;
    let raw = match mode {
        Mode::Full => 3.0 * kf.sqrt() * t.powf(-1.0 / 3.0) * t.ln().cbrt(),
        Mode::Partial => kf.powf(3.0 / 8.0) * c.powf(0.2) * t.powf(-0.2),
    };
    Ok(raw.min(1.0 / kf))
}

/// Gradient-norm bound `G` and exp-concavity constant `alpha` of the per-round cost
/// on the restricted simplex.
pub fn curvature_constants(gamma: f64, n: f64, loss_bound: f64, c: f64, k: usize, mode: Mode) -> (f64, f64) {
    let n2 = n * n;
    let sqrt_k = (k as f64).sqrt();
    match mode {
        Mode::Full => (
            n2 * loss_bound * sqrt_k / (gamma * gamma),
            2.0 * gamma / (n2 * loss_bound),
        ),
        Mode::Partial => (
            loss_bound * n2 * c * sqrt_k / gamma.powi(3),
            2.0 * gamma * gamma / (n2 * loss_bound),
        ),
    }
}

/// Standard Online Newton Step parameters `beta = min(1/(4GD), alpha) / 2` and
/// `eps = 1 / (beta^2 D^2)`.
pub fn default_beta_eps(
    gamma: f64,
    n: f64,
    loss_bound: f64,
    c: f64,
    k: usize,
    mode: Mode,
) -> Result<(f64, f64)> {
    for (name, v) in [("gamma", gamma), ("n", n), ("L", loss_bound), ("c", c)] {
        if !(v.is_finite() && v > 0.0) {
            return Err(invalid(format!("{name} must be positive, got {v}")));
        }
    }
    if k == 0 {
        return Err(invalid("k must be positive"));
    }
    let (g, alpha) = curvature_constants(gamma, n, loss_bound, c, k, mode);
    let beta = 0.5 * (1.0 / (4.0 * g * DIAMETER)).min(alpha);
    let eps = 1.0 / (beta * beta * DIAMETER * DIAMETER);
    Ok((beta, eps))
}

/// Upper bound on the full-information restricted-domain regret of ONS in
/// unnormalized cost units: `5 (1/alpha + G D) k ln T`.
pub fn ons_regret_bound(gamma: f64, n: f64, loss_bound: f64, k: usize, t_horizon: u64) -> f64 {
    let (g, alpha) = curvature_constants(gamma, n, loss_bound, 1.0, k, Mode::Full);
    5.0 * (1.0 / alpha + g * DIAMETER) * k as f64 * (t_horizon as f64).ln()
}

/// Loss-square bound from a calibration prefix: the largest observed `l^2`.
pub fn calibrate_loss_bound(losses: impl IntoIterator<Item = f64>) -> Option<f64> {
    losses
        .into_iter()
        .filter(|l| l.is_finite())
        .map(|l| l * l)
        .fold(None, |acc: Option<f64>, v| Some(acc.map_or(v, |a| a.max(v))))
        .filter(|&m| m > 0.0)
}
