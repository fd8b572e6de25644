//! Projections onto the probability simplex and the restricted simplex
//! `{ w in simplex : w[k-1] >= gamma }`, plus the approximate projection in the
//! norm induced by a positive-definite matrix used by the Newton step.

use nalgebra::DMatrix;

use crate::error::{invalid, Result};
use crate::FEAS_TOL;

/// Dimension `k` and floor `gamma` on the last (uniform-component) coordinate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RestrictedSimplexSpec {
    k: usize,
    gamma: f64,
}

impl RestrictedSimplexSpec {
    pub fn new(k: usize, gamma: f64) -> Result<Self> {
        if k == 0 {
            return Err(invalid("simplex dimension must be at least 1"));
        }
        if !(gamma.is_finite() && gamma > 0.0 && gamma <= 1.0) {
            return Err(invalid(format!("gamma must lie in (0, 1], got {gamma}")));
        }
        Ok(Self { k, gamma })
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    /// Membership test with tolerance [`FEAS_TOL`].
    pub fn contains(&self, w: &[f64]) -> bool {
        w.len() == self.k
            && w.iter().all(|&x| x.is_finite() && x >= -FEAS_TOL)
            && (w.iter().sum::<f64>() - 1.0).abs() <= FEAS_TOL
            && w[self.k - 1] >= self.gamma - FEAS_TOL
    }
}

fn check_finite(w: &[f64]) -> Result<()> {
    if let Some(pos) = w.iter().position(|x| !x.is_finite()) {
        return Err(invalid(format!("non-finite coordinate at index {pos}")));
    }
    Ok(())
}

/// Euclidean projection of `w` onto `{ x >= 0, sum x = z }` by sorting and thresholding.
///
/// Inputs that are already feasible (within [`FEAS_TOL`]) are returned unchanged.
pub fn proj_simplex(w: &[f64], z: f64) -> Result<Vec<f64>> {
    check_finite(w)?;
    if !(z.is_finite() && z >= 0.0) {
        return Err(invalid(format!("target mass must be non-negative, got {z}")));
    }
    if w.is_empty() {
        return Err(invalid("cannot project an empty vector"));
    }
    if z == 0.0 {
        return Ok(vec![0.0; w.len()]);
    }
    if w.iter().all(|&x| x >= 0.0) && (w.iter().sum::<f64>() - z).abs() <= FEAS_TOL {
        return Ok(w.to_vec());
    }

    // Stable sort, so ties keep their original order.
    let mut u = w.to_vec();
    u.sort_by(|a, b| b.total_cmp(a));

    let mut cumsum = 0.0;
    let mut rho = 1;
    let mut rho_cumsum = u[0];
    for (j, &uj) in u.iter().enumerate() {
        cumsum += uj;
        if uj - (cumsum - z) / (j + 1) as f64 > 0.0 {
            rho = j + 1;
            rho_cumsum = cumsum;
        }
    }
    let lambda = (rho_cumsum - z) / rho as f64;
    Ok(w.iter().map(|&x| (x - lambda).max(0.0)).collect())
}

/// Euclidean projection onto the restricted simplex.
///
/// Projects onto the full simplex first; if the last coordinate falls below
/// `gamma`, it is pinned to `gamma` and the remaining coordinates are projected
/// to mass `1 - gamma`.
pub fn proj_restricted(w: &[f64], spec: &RestrictedSimplexSpec) -> Result<Vec<f64>> {
    if w.len() != spec.k {
        return Err(invalid(format!(
            "expected a vector of length {}, got {}",
            spec.k,
            w.len()
        )));
    }
    let mut x = proj_simplex(w, 1.0)?;
    let k = spec.k;
    if x[k - 1] < spec.gamma {
        x[k - 1] = spec.gamma;
        if k > 1 {
            let head = proj_simplex(&x[..k - 1], 1.0 - spec.gamma)?;
            x[..k - 1].copy_from_slice(&head);
        }
    }
    Ok(x)
}

/// KKT residual of `x` as the Euclidean projection of `w` onto the restricted simplex.
///
/// Zero (up to rounding) exactly when `x` is the projection. Infeasibility of `x`
/// is reported as part of the residual.
pub fn restricted_kkt_residual(w: &[f64], x: &[f64], spec: &RestrictedSimplexSpec) -> f64 {
    let k = spec.k;
    assert_eq!(w.len(), k);
    assert_eq!(x.len(), k);
    let tol = 1e-12;
    let mut infeas = (x.iter().sum::<f64>() - 1.0).abs();
    for (i, &xi) in x.iter().enumerate() {
        let lower = if i == k - 1 { spec.gamma } else { 0.0 };
        infeas = infeas.max(lower - xi);
    }

    let d: Vec<f64> = w.iter().zip(x).map(|(a, b)| a - b).collect();
    let is_free = |i: usize| {
        let lower = if i == k - 1 { spec.gamma } else { 0.0 };
        x[i] > lower + tol
    };
    let free: Vec<usize> = (0..k).filter(|&i| is_free(i)).collect();
    if free.is_empty() {
        return infeas.max(0.0);
    }
    let mu = free.iter().map(|&i| d[i]).sum::<f64>() / free.len() as f64;
    let mut res = infeas.max(0.0);
    for (i, di) in d.iter().enumerate() {
        let r = if is_free(i) {
            (di - mu).abs()
        } else {
            (di - mu).max(0.0)
        };
        res = res.max(r);
    }
    res
}

/// Iteration controls for [`proj_h_norm`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HProjOptions {
    pub max_iters: usize,
    pub tol: f64,
}

impl Default for HProjOptions {
    fn default() -> Self {
        Self {
            max_iters: 50,
            tol: 1e-10,
        }
    }
}

/// Approximate `argmin_{x in restricted simplex} (x - w)^T H (x - w)`.
///
/// Projected gradient descent started from the Euclidean projection of `w`,
/// with step `1 / bound` where `bound >= lambda_max(H)` is the smaller of the
/// trace and the largest absolute row sum. The result is always feasible and
/// the objective never increases across iterations.
pub fn proj_h_norm(
    w: &[f64],
    h: &DMatrix<f64>,
    spec: &RestrictedSimplexSpec,
    opts: HProjOptions,
) -> Result<Vec<f64>> {
    proj_h_norm_inner(w, h, spec, opts, None)
}

/// Same as [`proj_h_norm`] but also returns the objective value after every iterate
/// (starting with the initial Euclidean projection).
pub fn proj_h_norm_with_history(
    w: &[f64],
    h: &DMatrix<f64>,
    spec: &RestrictedSimplexSpec,
    opts: HProjOptions,
) -> Result<(Vec<f64>, Vec<f64>)> {
    let mut history = Vec::new();
    let x = proj_h_norm_inner(w, h, spec, opts, Some(&mut history))?;
    Ok((x, history))
}

pub(crate) fn h_quadratic(h: &DMatrix<f64>, x: &[f64], w: &[f64]) -> f64 {
    let k = x.len();
    let mut acc = 0.0;
    for a in 0..k {
        let da = x[a] - w[a];
        for b in 0..k {
            acc += da * h[(a, b)] * (x[b] - w[b]);
        }
    }
    acc
}

fn check_metric(h: &DMatrix<f64>, k: usize) -> Result<()> {
    if h.nrows() != k || h.ncols() != k {
        return Err(invalid(format!(
            "metric must be {k}x{k}, got {}x{}",
            h.nrows(),
            h.ncols()
        )));
    }
    if h.iter().any(|v| !v.is_finite()) {
        return Err(invalid("metric has non-finite entries"));
    }
    let scale = h.iter().fold(0.0_f64, |m, v| m.max(v.abs())).max(f64::MIN_POSITIVE);
    for a in 0..k {
        for b in 0..a {
            if (h[(a, b)] - h[(b, a)]).abs() > 1e-8 * scale {
                return Err(invalid("metric is not symmetric"));
            }
        }
    }
    if h.clone().cholesky().is_none() {
        return Err(invalid("metric is not positive-definite"));
    }
    Ok(())
}

fn proj_h_norm_inner(
    w: &[f64],
    h: &DMatrix<f64>,
    spec: &RestrictedSimplexSpec,
    opts: HProjOptions,
    mut history: Option<&mut Vec<f64>>,
) -> Result<Vec<f64>> {
    let k = spec.k;
    if w.len() != k {
        return Err(invalid(format!("expected a vector of length {k}, got {}", w.len())));
    }
    check_finite(w)?;
    check_metric(h, k)?;

    let trace: f64 = (0..k).map(|a| h[(a, a)]).sum();
    let row_sum = (0..k)
        .map(|a| (0..k).map(|b| h[(a, b)].abs()).sum::<f64>())
        .fold(0.0_f64, f64::max);
    let step = 1.0 / trace.min(row_sum);

    let mut x = proj_restricted(w, spec)?;
    if let Some(hist) = history.as_deref_mut() {
        hist.push(h_quadratic(h, &x, w));
    }
    let mut y = vec![0.0; k];
    for _ in 0..opts.max_iters {
        for a in 0..k {
            let grad_a: f64 = (0..k).map(|b| h[(a, b)] * (x[b] - w[b])).sum();
            y[a] = x[a] - step * grad_a;
        }
        let next = proj_restricted(&y, spec)?;
        let moved = next
            .iter()
            .zip(&x)
            .map(|(a, b)| (a - b) * (a - b))
            .sum::<f64>()
            .sqrt();
        x = next;
        if let Some(hist) = history.as_deref_mut() {
            hist.push(h_quadratic(h, &x, w));
        }
        if moved < opts.tol {
            break;
        }
    }
    Ok(x)
}
