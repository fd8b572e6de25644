//! Exact k-DPP sampling and set probabilities, so that mixture components can
//! be distributions over fixed-size minibatches.
//!
//! A k-DPP with kernel `L` assigns a size-`b` set `S` the probability
//! `det(L_S) / e_b(lambda)`, where `e_b` is the elementary symmetric polynomial
//! of the eigenvalues of `L`. Sampling follows the two-phase spectral algorithm:
//! choose `b` eigenvectors using ratios of elementary symmetric polynomials, then
//! draw atoms one at a time from the span of the chosen eigenvectors.

use nalgebra::{DMatrix, SymmetricEigen};
use rand::Rng;

use crate::error::{invalid, Error, Result};
use crate::points::Points;

/// Eigenvalues below this fraction of the largest are treated as zero.
pub const EIGEN_CUTOFF: f64 = 1e-10;

/// `e_0, ..., e_b` of `lams` via `e_m^(i) = e_m^(i-1) + lam_i e_{m-1}^(i-1)`.
pub fn elementary_symmetric(lams: &[f64], b: usize) -> Result<Vec<f64>> {
    if b > lams.len() {
        return Err(invalid(format!(
            "order {b} exceeds the number of values {}",
            lams.len()
        )));
    }
    let mut e = vec![0.0; b + 1];
    e[0] = 1.0;
    for (i, &lam) in lams.iter().enumerate() {
        for m in (1..=b.min(i + 1)).rev() {
            e[m] += lam * e[m - 1];
        }
    }
    Ok(e)
}

/// `ln C(n, b)`.
pub fn ln_binomial(n: usize, b: usize) -> f64 {
    let b = b.min(n - b);
    (0..b).map(|i| ((n - i) as f64).ln() - ((i + 1) as f64).ln()).sum()
}

/// A fixed-size DPP with its spectral decomposition computed once.
#[derive(Debug, Clone)]
pub struct DppKernel {
    l: DMatrix<f64>,
    eigvals: Vec<f64>,
    eigvecs: DMatrix<f64>,
    b: usize,
    /// `esp[i][m] = e_m(lambda_0, ..., lambda_{i-1})`.
    esp: Vec<Vec<f64>>,
}

impl DppKernel {
    pub fn new(l: DMatrix<f64>, b: usize) -> Result<Self> {
        let n = l.nrows();
        if n == 0 || l.ncols() != n {
            return Err(invalid("kernel must be a non-empty square matrix"));
        }
        if b == 0 || b > n {
            return Err(invalid(format!("batch size {b} must lie in 1..={n}")));
        }
        if l.iter().any(|v| !v.is_finite()) {
            return Err(invalid("kernel has non-finite entries"));
        }
        let scale = l.iter().fold(0.0_f64, |m, v| m.max(v.abs()));
        for a in 0..n {
            for c in 0..a {
                if (l[(a, c)] - l[(c, a)]).abs() > 1e-10 * scale.max(1.0) {
                    return Err(invalid("kernel is not symmetric"));
                }
            }
        }
        let eig = SymmetricEigen::new(l.clone());
        let lam_max = eig.eigenvalues.iter().fold(0.0_f64, |m, &v| m.max(v));
        if lam_max <= 0.0 {
            return Err(Error::DegenerateKernel("kernel has no positive eigenvalue".into()));
        }
        if eig.eigenvalues.iter().any(|&v| v < -1e-8 * lam_max) {
            return Err(invalid("kernel is not positive semi-definite"));
        }
        let eigvals: Vec<f64> = eig
            .eigenvalues
            .iter()
            .map(|&v| if v < EIGEN_CUTOFF * lam_max { 0.0 } else { v })
            .collect();
        let positive = eigvals.iter().filter(|&&v| v > 0.0).count();
        if positive < b {
            return Err(Error::DegenerateKernel(format!(
                "only {positive} positive eigenvalues for batch size {b}"
            )));
        }
        let mut esp = Vec::with_capacity(n + 1);
        let mut row = vec![0.0; b + 1];
        row[0] = 1.0;
        esp.push(row.clone());
        for &lam in &eigvals {
            for m in (1..=b).rev() {
                row[m] += lam * row[m - 1];
            }
            esp.push(row.clone());
        }
        Ok(Self {
            l,
            eigvals,
            eigvecs: eig.eigenvectors,
            b,
            esp,
        })
    }

    /// Regularized linear kernel `X X^T + lambda I`.
    pub fn linear(points: &Points, lambda: f64, b: usize) -> Result<Self> {
        if !(lambda.is_finite() && lambda >= 0.0) {
            return Err(invalid(format!("regularizer must be non-negative, got {lambda}")));
        }
        let n = points.len();
        let x = DMatrix::from_row_slice(n, points.dim(), points.as_slice());
        let mut l = &x * x.transpose();
        for i in 0..n {
            l[(i, i)] += lambda;
        }
        Self::new(l, b)
    }

    pub fn n(&self) -> usize {
        self.l.nrows()
    }

    pub fn batch_size(&self) -> usize {
        self.b
    }

    pub fn eigenvalues(&self) -> &[f64] {
        &self.eigvals
    }

    pub fn eigenvectors(&self) -> &DMatrix<f64> {
        &self.eigvecs
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.l
    }

    /// Normalizer `e_b(lambda)`.
    pub fn normalizer(&self) -> f64 {
        self.esp[self.n()][self.b]
    }

    /// `det(L_S)` via Cholesky of the principal submatrix; zero when singular.
    pub fn principal_det(&self, set: &[usize]) -> f64 {
        let m = set.len();
        let sub = DMatrix::from_fn(m, m, |a, c| self.l[(set[a], set[c])]);
        match sub.cholesky() {
            Some(ch) => {
                let d = ch.l_dirty().diagonal();
                d.iter().map(|v| v * v).product()
            }
            None => 0.0,
        }
    }

    /// `P(S) = det(L_S) / e_b(lambda)`.
    pub fn set_prob(&self, set: &[usize]) -> Result<f64> {
        if set.len() != self.b {
            return Err(invalid(format!(
                "set has {} elements, expected {}",
                set.len(),
                self.b
            )));
        }
        if let Some(&i) = set.iter().find(|&&i| i >= self.n()) {
            return Err(invalid(format!("atom {i} out of range")));
        }
        Ok(self.principal_det(set) / self.normalizer())
    }

    /// Draws a size-`b` set, returned sorted.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> Vec<usize> {
        let n = self.n();
        if self.b == n {
            return (0..n).collect();
        }

        // Phase 1: choose b eigenvectors.
        let mut chosen = Vec::with_capacity(self.b);
        let mut remaining = self.b;
        for i in (0..n).rev() {
            if remaining == 0 {
                break;
            }
            let lam = self.eigvals[i];
            if lam == 0.0 {
                continue;
            }
            let p = if i + 1 == remaining {
                1.0
            } else {
                lam * self.esp[i][remaining - 1] / self.esp[i + 1][remaining]
            };
            if rng.random::<f64>() < p {
                chosen.push(i);
                remaining -= 1;
            }
        }

        // Phase 2: sequential sampling from the span of the chosen eigenvectors.
        let mut basis: Vec<Vec<f64>> = chosen
            .iter()
            .map(|&c| self.eigvecs.column(c).iter().copied().collect())
            .collect();
        let mut set = Vec::with_capacity(self.b);
        let mut weights = vec![0.0; n];
        while !basis.is_empty() {
            for (i, wi) in weights.iter_mut().enumerate() {
                *wi = basis.iter().map(|v| v[i] * v[i]).sum();
            }
            for &s in &set {
                weights[s] = 0.0;
            }
            let total: f64 = weights.iter().sum();
            let mut u = rng.random::<f64>() * total;
            let mut pick = n - 1;
            for (i, &wi) in weights.iter().enumerate() {
                if wi > 0.0 {
                    pick = i;
                }
                if u < wi {
                    pick = i;
                    break;
                }
                u -= wi;
            }
            set.push(pick);

            // Restrict the span to vectors vanishing at `pick`.
            let pivot = (0..basis.len())
                .max_by(|&a, &c| basis[a][pick].abs().total_cmp(&basis[c][pick].abs()))
                .expect("non-empty basis");
            let v = basis.swap_remove(pivot);
            for other in basis.iter_mut() {
                let factor = other[pick] / v[pick];
                for (o, vi) in other.iter_mut().zip(&v) {
                    *o -= factor * vi;
                }
            }
            // Gram-Schmidt.
            for a in 0..basis.len() {
                for c in 0..a {
                    let dot: f64 = basis[a].iter().zip(&basis[c]).map(|(x, y)| x * y).sum();
                    let (head, tail) = basis.split_at_mut(a);
                    for (o, x) in tail[0].iter_mut().zip(&head[c]) {
                        *o -= dot * x;
                    }
                }
                let norm = basis[a].iter().map(|x| x * x).sum::<f64>().sqrt();
                for o in basis[a].iter_mut() {
                    *o /= norm;
                }
            }
        }
        set.sort_unstable();
        set
    }
}

/// A sampled minibatch together with its per-component probabilities and weights.
#[derive(Debug, Clone, PartialEq)]
pub struct SetSample {
    pub set: Vec<usize>,
    pub component: usize,
    /// `p_j(S)` for every component.
    pub prob_per_component: Vec<f64>,
    /// `p_j(S) / p_uniform(S)`.
    pub rel_per_component: Vec<f64>,
    /// `p_uniform(S) / (w^T p(S))`.
    pub weight: f64,
    /// Soft-truncated weight `a r + c`.
    pub truncated_weight: f64,
}

/// `k - 1` k-DPP components plus the uniform distribution over size-`b` subsets.
#[derive(Debug, Clone)]
pub struct SetMixture {
    kernels: Vec<DppKernel>,
    n: usize,
    b: usize,
    ln_sets: f64,
}

impl SetMixture {
    pub fn new(kernels: Vec<DppKernel>, n: usize, b: usize) -> Result<Self> {
        if b == 0 || b > n {
            return Err(invalid(format!("batch size {b} must lie in 1..={n}")));
        }
        for (j, kern) in kernels.iter().enumerate() {
            if kern.n() != n || kern.batch_size() != b {
                return Err(invalid(format!(
                    "kernel {j} has (n, b) = ({}, {}), expected ({n}, {b})",
                    kern.n(),
                    kern.batch_size()
                )));
            }
        }
        Ok(Self {
            kernels,
            n,
            b,
            ln_sets: ln_binomial(n, b),
        })
    }

    pub fn k(&self) -> usize {
        self.kernels.len() + 1
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn batch_size(&self) -> usize {
        self.b
    }

    pub fn kernels(&self) -> &[DppKernel] {
        &self.kernels
    }

    /// `1 / C(n, b)`.
    pub fn uniform_set_prob(&self) -> f64 {
        (-self.ln_sets).exp()
    }

    /// Per-component probabilities and relative probabilities of `set`.
    pub fn probs(&self, set: &[usize]) -> Result<(Vec<f64>, Vec<f64>)> {
        let unif = self.uniform_set_prob();
        let mut probs = Vec::with_capacity(self.k());
        let mut rel = Vec::with_capacity(self.k());
        for kern in &self.kernels {
            let p = kern.set_prob(set)?;
            probs.push(p);
            rel.push((p.ln() + self.ln_sets).exp());
        }
        probs.push(unif);
        rel.push(1.0);
        Ok((probs, rel))
    }
}

/// Draws a component from `w`, a minibatch from that component, and the
/// set-level importance weight against uniform minibatches.
pub fn sample_set_mixture<R: Rng + ?Sized>(
    mix: &SetMixture,
    w: &[f64],
    rng: &mut R,
    trunc: (f64, f64),
) -> Result<SetSample> {
    let k = mix.k();
    if w.len() != k {
        return Err(invalid(format!("weights have length {}, expected {k}", w.len())));
    }
    let component = if k == 1 {
        0
    } else {
        let u: f64 = rng.random();
        let mut acc = 0.0;
        let mut pick = k - 1;
        for (j, &wj) in w.iter().enumerate().take(k - 1) {
            acc += wj;
            if u < acc {
                pick = j;
                break;
            }
        }
        pick
    };
    let set = if component + 1 == k {
        uniform_batch(mix.n, mix.b, rng)
    } else {
        mix.kernels[component].sample(rng)
    };
    let (prob_per_component, rel_per_component) = mix.probs(&set)?;
    let q: f64 = rel_per_component.iter().zip(w).map(|(r, wj)| r * wj).sum();
    let weight = 1.0 / q;
    Ok(SetSample {
        set,
        component,
        prob_per_component,
        rel_per_component,
        weight,
        truncated_weight: trunc.0 * weight + trunc.1,
    })
}

/// A uniformly random size-`b` subset of `0..n`, sorted.
pub fn uniform_batch<R: Rng + ?Sized>(n: usize, b: usize, rng: &mut R) -> Vec<usize> {
    let mut set = rand::seq::index::sample(rng, n, b).into_vec();
    set.sort_unstable();
    set
}
