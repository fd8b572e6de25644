//! Second-moment cost `f_t(w) = sum_i l_t^2(i) / (w^T p(i))` and its estimates.
//!
//! Everything here is in unnormalized units; divide by `n^2` for regret units.

use nalgebra::DMatrix;

use crate::error::{invalid, Error, Result};
use crate::mixtures::ComponentSet;

fn check_inputs(cs: &ComponentSet, w: &[f64], losses_sq: &[f64]) -> Result<()> {
    if w.len() != cs.k() {
        return Err(invalid(format!(
            "weights have length {}, expected {}",
            w.len(),
            cs.k()
        )));
    }
    if losses_sq.len() != cs.n() {
        return Err(invalid(format!(
            "loss vector has length {}, expected {}",
            losses_sq.len(),
            cs.n()
        )));
    }
    if let Some(i) = losses_sq.iter().position(|l| !l.is_finite() || *l < 0.0) {
        return Err(invalid(format!("squared loss at atom {i} is invalid")));
    }
    Ok(())
}

fn mixture_at(cs: &ComponentSet, w: &[f64], i: usize) -> Result<f64> {
    let q: f64 = (0..cs.k()).map(|j| w[j] * cs.prob(j, i)).sum();
    if q <= 0.0 {
        return Err(Error::Domain(format!("mixture assigns zero mass to atom {i}")));
    }
    Ok(q)
}

/// `f_t(w) = sum_i l^2(i) / (w^T p(i))`.
pub fn cost_full(cs: &ComponentSet, w: &[f64], losses_sq: &[f64]) -> Result<f64> {
    check_inputs(cs, w, losses_sq)?;
    let mut total = 0.0;
    for (i, &l2) in losses_sq.iter().enumerate() {
        if l2 == 0.0 {
            continue;
        }
        total += l2 / mixture_at(cs, w, i)?;
    }
    Ok(total)
}

/// `grad f_t(w) = -sum_i l^2(i) p(i) / (w^T p(i))^2`.
pub fn grad_full(cs: &ComponentSet, w: &[f64], losses_sq: &[f64]) -> Result<Vec<f64>> {
    check_inputs(cs, w, losses_sq)?;
    let k = cs.k();
    let mut g = vec![0.0; k];
    for (i, &l2) in losses_sq.iter().enumerate() {
        if l2 == 0.0 {
            continue;
        }
        let q = mixture_at(cs, w, i)?;
        let scale = l2 / (q * q);
        for (j, gj) in g.iter_mut().enumerate() {
            *gj -= scale * cs.prob(j, i);
        }
    }
    Ok(g)
}

/// `hess f_t(w) = 2 sum_i l^2(i) p(i) p(i)^T / (w^T p(i))^3`.
pub fn hessian_full(cs: &ComponentSet, w: &[f64], losses_sq: &[f64]) -> Result<DMatrix<f64>> {
    check_inputs(cs, w, losses_sq)?;
    let k = cs.k();
    let mut h = DMatrix::zeros(k, k);
    for (i, &l2) in losses_sq.iter().enumerate() {
        if l2 == 0.0 {
            continue;
        }
        let q = mixture_at(cs, w, i)?;
        let scale = 2.0 * l2 / (q * q * q);
        let p = cs.column(i);
        for a in 0..k {
            for b in 0..k {
                h[(a, b)] += scale * p[a] * p[b];
            }
        }
    }
    Ok(h)
}

/// Unbiased one-sample estimate of the cost and its gradient at the played weights.
#[derive(Debug, Clone, PartialEq)]
pub struct Estimate {
    pub cost: f64,
    pub grad: Vec<f64>,
}

/// Estimate from the loss `loss` of the sampled atom `i`:
/// cost `l^2 / (w^T p(i))^2` and gradient `-l^2 p(i) / (w^T p(i))^3`.
pub fn estimate_from_feedback(cs: &ComponentSet, w: &[f64], i: usize, loss: f64) -> Result<Estimate> {
    if w.len() != cs.k() {
        return Err(invalid(format!(
            "weights have length {}, expected {}",
            w.len(),
            cs.k()
        )));
    }
    cs.check_atom(i)?;
    if !loss.is_finite() {
        return Err(invalid("loss is not finite"));
    }
    let l2 = loss * loss;
    let q = mixture_at(cs, w, i)?;
    let q2 = q * q;
    let scale = l2 / (q2 * q);
    Ok(Estimate {
        cost: l2 / q2,
        grad: cs.column(i).iter().map(|p| -scale * p).collect(),
    })
}

/// The same estimate in regret units (divided by `N^2`, `N` the number of atoms),
/// expressed through relative probabilities `rel_j = N p_j(atom)`:
/// cost `l^2 / (w^T rel)^2`, gradient `-l^2 rel / (w^T rel)^3`.
///
/// Works for atoms that are sets, where `N` is too large to handle directly.
pub fn estimate_from_relative(rel: &[f64], w: &[f64], loss: f64) -> Result<Estimate> {
    if rel.len() != w.len() {
        return Err(invalid("relative probabilities and weights differ in length"));
    }
    if !loss.is_finite() {
        return Err(invalid("loss is not finite"));
    }
    let q: f64 = rel.iter().zip(w).map(|(r, wj)| r * wj).sum();
    if q <= 0.0 {
        return Err(Error::Domain("mixture assigns zero mass to the sampled atom".into()));
    }
    let l2 = loss * loss;
    let scale = l2 / (q * q * q);
    Ok(Estimate {
        cost: l2 / (q * q),
        grad: rel.iter().map(|r| -scale * r).collect(),
    })
}

/// Value, gradient and Hessian of the sampled cost
/// `f~(w) = l~^2 / (w^T p(i))` with `l~^2 = l^2 / (w_t^T p(i))` held fixed.
pub fn sampled_cost_derivatives(
    cs: &ComponentSet,
    w_played: &[f64],
    w: &[f64],
    i: usize,
    loss: f64,
) -> Result<(f64, Vec<f64>, DMatrix<f64>)> {
    cs.check_atom(i)?;
    let q_played = mixture_at(cs, w_played, i)?;
    let l2_tilde = loss * loss / q_played;
    let q = mixture_at(cs, w, i)?;
    let p = cs.column(i);
    let k = p.len();
    let grad = p.iter().map(|pj| -l2_tilde * pj / (q * q)).collect();
    let hess = DMatrix::from_fn(k, k, |a, b| 2.0 * l2_tilde * p[a] * p[b] / (q * q * q));
    Ok((l2_tilde / q, grad, hess))
}
