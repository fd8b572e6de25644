//! Fixed sampling distributions over `n` atoms, their mixtures, and sampling.
//!
//! A [`ComponentSet`] always carries the uniform distribution as its last
//! component. Probabilities are also kept in relative form `n * p_j(i)`, so the
//! importance weight `1 / (n * w^T p(i))` is exactly 1 whenever all mass sits on
//! the uniform component.

use std::path::Path;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};
use crate::points::{sq_dist, Points};
use crate::simplex::RestrictedSimplexSpec;

/// Tolerance on the row sums of raw component rows before renormalization.
pub const ROW_SUM_TOL: f64 = 1e-6;

/// `k` sampling distributions over `n` atoms; the last one is uniform.
#[derive(Debug, Clone, PartialEq)]
pub struct ComponentSet {
    n: usize,
    /// Rows `0..k`, each of length `n`. Row `k - 1` is uniform.
    probs: Vec<Vec<f64>>,
    /// `n * probs`, with the uniform row stored as exact ones.
    rel: Vec<Vec<f64>>,
    /// Cumulative tables of the non-uniform rows, for inverse-CDF sampling.
    cdfs: Vec<Vec<f64>>,
    c: f64,
    /// Round from which the current rows are in effect.
    effective_from: u64,
}

fn normalize_row(row: &[f64], n: usize, j: usize) -> Result<Vec<f64>> {
    if row.len() != n {
        return Err(invalid(format!(
            "component {j} has {} entries, expected {n}",
            row.len()
        )));
    }
    if let Some(i) = row.iter().position(|&v| !v.is_finite() || v < 0.0) {
        return Err(invalid(format!(
            "component {j} has an invalid entry {} at atom {i}",
            row[i]
        )));
    }
    let sum: f64 = row.iter().sum();
    if sum == 0.0 {
        return Err(invalid(format!("component {j} has zero total mass")));
    }
    if (sum - 1.0).abs() > ROW_SUM_TOL {
        return Err(invalid(format!(
            "component {j} sums to {sum}, expected 1 within {ROW_SUM_TOL}"
        )));
    }
    Ok(row.iter().map(|v| v / sum).collect())
}

impl ComponentSet {
    /// Builds a component set from `k - 1` row-stochastic rows over `n` atoms and
    /// appends the uniform distribution.
    pub fn attach_uniform(raw: &[Vec<f64>], n: usize) -> Result<Self> {
        if n == 0 {
            return Err(invalid("component set needs at least one atom"));
        }
        let rows = raw
            .iter()
            .enumerate()
            .map(|(j, r)| normalize_row(r, n, j))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self::from_normalized(rows, n, 0))
    }

    fn from_normalized(mut rows: Vec<Vec<f64>>, n: usize, effective_from: u64) -> Self {
        let nf = n as f64;
        let mut rel: Vec<Vec<f64>> = rows
            .iter()
            .map(|r| r.iter().map(|&p| p * nf).collect())
            .collect();
        let cdfs = rows
            .iter()
            .map(|r| {
                let mut acc = 0.0;
                r.iter()
                    .map(|&p| {
                        acc += p;
                        acc
                    })
                    .collect()
            })
            .collect();
        rows.push(vec![1.0 / nf; n]);
        rel.push(vec![1.0; n]);
        let max_p = rows
            .iter()
            .flat_map(|r| r.iter().copied())
            .fold(0.0_f64, f64::max);
        Self {
            n,
            probs: rows,
            rel,
            cdfs,
            c: nf * max_p,
            effective_from,
        }
    }

    /// Number of atoms.
    pub fn n(&self) -> usize {
        self.n
    }

    /// Number of components, including the uniform one.
    pub fn k(&self) -> usize {
        self.probs.len()
    }

    /// `n * max_{i,j} p_j(i)`.
    pub fn c(&self) -> f64 {
        self.c
    }

    pub fn effective_from(&self) -> u64 {
        self.effective_from
    }

    pub fn row(&self, j: usize) -> &[f64] {
        &self.probs[j]
    }

    pub fn prob(&self, j: usize, i: usize) -> f64 {
        self.probs[j][i]
    }

    /// `p(i) = [p_1(i), ..., p_k(i)]`.
    pub fn column(&self, i: usize) -> Vec<f64> {
        self.probs.iter().map(|r| r[i]).collect()
    }

    /// `n * p(i)`.
    pub fn rel_column(&self, i: usize) -> Vec<f64> {
        self.rel.iter().map(|r| r[i]).collect()
    }

    pub(crate) fn check_atom(&self, i: usize) -> Result<()> {
        if i >= self.n {
            return Err(invalid(format!("atom {i} out of range for n = {}", self.n)));
        }
        Ok(())
    }

    /// `n * w^T p(i)`; the inverse of the importance weight of atom `i`.
    pub fn rel_mixture(&self, w: &[f64], i: usize) -> f64 {
        self.rel.iter().zip(w).map(|(r, wj)| wj * r[i]).sum()
    }

    /// Replaces the non-uniform rows from round `t` on. `new_rows` holds either the
    /// `k - 1` non-uniform rows or all `k` rows with a uniform last row.
    pub fn set_component_rows(&self, t: u64, new_rows: &[Vec<f64>]) -> Result<Self> {
        let k = self.k();
        let raw = match new_rows.len() {
            len if len + 1 == k => new_rows,
            len if len == k => {
                let last = &new_rows[k - 1];
                let u = 1.0 / self.n as f64;
                if last.len() != self.n || last.iter().any(|&v| (v - u).abs() > 1e-12) {
                    return Err(invalid("last component row must remain uniform"));
                }
                &new_rows[..k - 1]
            }
            len => {
                return Err(invalid(format!(
                    "expected {} or {k} rows, got {len}",
                    k - 1
                )))
            }
        };
        let rows = raw
            .iter()
            .enumerate()
            .map(|(j, r)| normalize_row(r, self.n, j))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self::from_normalized(rows, self.n, t))
    }

    /// Draws a component index from `w`. A single component consumes no randomness.
    fn sample_component<R: Rng + ?Sized>(&self, w: &[f64], rng: &mut R) -> usize {
        let k = self.k();
        if k == 1 {
            return 0;
        }
        let u: f64 = rng.random();
        let mut acc = 0.0;
        for (j, &wj) in w.iter().enumerate().take(k - 1) {
            acc += wj;
            if u < acc {
                return j;
            }
        }
        k - 1
    }

    /// Draws an atom from component `j`.
    pub fn sample_from_component<R: Rng + ?Sized>(&self, j: usize, rng: &mut R) -> usize {
        if j + 1 == self.k() {
            return rng.random_range(0..self.n);
        }
        let cdf = &self.cdfs[j];
        let total = cdf[self.n - 1];
        let u = rng.random::<f64>() * total;
        let i = cdf.partition_point(|&c| c <= u).min(self.n - 1);
        // Never return a zero-mass atom (possible only through rounding at the tail).
        if self.probs[j][i] > 0.0 {
            i
        } else {
            (0..=i).rev().find(|&a| self.probs[j][a] > 0.0).unwrap_or(i)
        }
    }

    /// Writes the non-uniform rows in long format (`component,atom,prob`).
    pub fn write_csv(&self, path: impl AsRef<Path>) -> Result<()> {
        let mut writer = csv::Writer::from_path(path)?;
        writer.write_record(["component", "atom", "prob"])?;
        for (j, row) in self.probs.iter().enumerate().take(self.k() - 1) {
            for (i, &p) in row.iter().enumerate() {
                if p != 0.0 {
                    writer.serialize((j, i, p))?;
                }
            }
        }
        writer.flush()?;
        Ok(())
    }

    /// Reads raw components in long format (`component,atom,prob`); atoms not listed
    /// have probability zero. The uniform component is attached on load.
    pub fn read_csv(path: impl AsRef<Path>, n: usize) -> Result<Self> {
        #[derive(Deserialize)]
        struct Entry {
            component: usize,
            atom: usize,
            prob: f64,
        }
        let mut reader = csv::ReaderBuilder::new()
            .trim(csv::Trim::All)
            .from_path(path)?;
        let mut rows: Vec<Vec<f64>> = Vec::new();
        for record in reader.deserialize() {
            let e: Entry = record?;
            if e.atom >= n {
                return Err(invalid(format!("atom {} out of range for n = {n}", e.atom)));
            }
            if rows.len() <= e.component {
                rows.resize(e.component + 1, vec![0.0; n]);
            }
            rows[e.component][e.atom] += e.prob;
        }
        Self::attach_uniform(&rows, n)
    }
}

/// Mixture weights constrained to the restricted simplex.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MixtureWeights {
    w: Vec<f64>,
    gamma: f64,
}

impl MixtureWeights {
    pub fn new(w: Vec<f64>, gamma: f64) -> Result<Self> {
        let spec = RestrictedSimplexSpec::new(w.len(), gamma)?;
        if !spec.contains(&w) {
            return Err(invalid(format!(
                "weights {w:?} are not in the restricted simplex with gamma = {gamma}"
            )));
        }
        Ok(Self { w, gamma })
    }

    /// `[1/k, ..., 1/k]`, projected if `gamma > 1/k`.
    pub fn uniform(k: usize, gamma: f64) -> Result<Self> {
        let spec = RestrictedSimplexSpec::new(k, gamma)?;
        let w = crate::simplex::proj_restricted(&vec![1.0 / k as f64; k], &spec)?;
        Ok(Self { w, gamma })
    }

    /// All mass on the last (uniform) component.
    pub fn uniform_only(k: usize) -> Result<Self> {
        let mut w = vec![0.0; k];
        if k == 0 {
            return Err(invalid("need at least one component"));
        }
        w[k - 1] = 1.0;
        Self::new(w, 1.0)
    }

    pub(crate) fn from_projected(w: Vec<f64>, gamma: f64) -> Self {
        Self { w, gamma }
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.w
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    pub fn k(&self) -> usize {
        self.w.len()
    }

    pub fn spec(&self) -> RestrictedSimplexSpec {
        RestrictedSimplexSpec::new(self.w.len(), self.gamma).expect("validated on construction")
    }
}

fn check_dims(cs: &ComponentSet, w: &MixtureWeights) -> Result<()> {
    if cs.k() != w.k() {
        return Err(invalid(format!(
            "component set has {} components but weights have {}",
            cs.k(),
            w.k()
        )));
    }
    Ok(())
}

/// Probability of sampling atom `i`: `w^T p(i)`.
pub fn mixture_prob(cs: &ComponentSet, w: &MixtureWeights, i: usize) -> Result<f64> {
    check_dims(cs, w)?;
    cs.check_atom(i)?;
    Ok(cs
        .probs
        .iter()
        .zip(w.as_slice())
        .map(|(r, wj)| wj * r[i])
        .sum())
}

/// Draws `i ~ w^T p` and returns it with its importance weight `1 / (n w^T p(i))`.
pub fn sample_atom<R: Rng + ?Sized>(
    cs: &ComponentSet,
    w: &MixtureWeights,
    rng: &mut R,
) -> Result<(usize, f64)> {
    check_dims(cs, w)?;
    let j = cs.sample_component(w.as_slice(), rng);
    let i = cs.sample_from_component(j, rng);
    Ok((i, 1.0 / cs.rel_mixture(w.as_slice(), i)))
}

/// One component per blob: mass `1 - eps_mass` spread uniformly over the blob's
/// members and `eps_mass` spread uniformly over all other points.
pub fn build_blob_components(labels: &[usize], eps_mass: f64) -> Result<ComponentSet> {
    let n = labels.len();
    if n == 0 {
        return Err(invalid("no points"));
    }
    if !(eps_mass > 0.0 && eps_mass < 1.0) {
        return Err(invalid(format!("eps_mass must lie in (0, 1), got {eps_mass}")));
    }
    let blobs = labels.iter().copied().max().unwrap_or(0) + 1;
    let mut sizes = vec![0usize; blobs];
    for &l in labels {
        sizes[l] += 1;
    }
    if let Some(b) = sizes.iter().position(|&s| s == 0) {
        return Err(invalid(format!("blob {b} has no members")));
    }
    let rows: Vec<Vec<f64>> = (0..blobs)
        .map(|b| {
            let inside = sizes[b];
            let outside = n - inside;
            let (p_in, p_out) = if outside == 0 {
                (1.0 / inside as f64, 0.0)
            } else {
                ((1.0 - eps_mass) / inside as f64, eps_mass / outside as f64)
            };
            labels
                .iter()
                .map(|&l| if l == b { p_in } else { p_out })
                .collect()
        })
        .collect();
    ComponentSet::attach_uniform(&rows, n)
}

/// Components proportional to the distance to a center, smoothed with uniform mass:
/// `p_j(i) = 0.9 d(x_i, mu_j) / sqrt(sum_l d^2(x_l, mu_j)) + 0.1 / n`, then
/// renormalized. A center that coincides with every point yields a uniform row.
pub fn build_distance_components(points: &Points, centers: &Points) -> Result<ComponentSet> {
    let n = points.len();
    if n == 0 {
        return Err(invalid("no points"));
    }
    if centers.is_empty() {
        return Err(invalid("need at least one center"));
    }
    if centers.dim() != points.dim() {
        return Err(invalid("centers and points differ in dimension"));
    }
    let nf = n as f64;
    let rows = centers
        .rows()
        .map(|mu| {
            let dists: Vec<f64> = points.rows().map(|x| sq_dist(x, mu).sqrt()).collect();
            let denom = dists.iter().map(|d| d * d).sum::<f64>().sqrt();
            if denom == 0.0 {
                return vec![1.0 / nf; n];
            }
            let raw: Vec<f64> = dists.iter().map(|d| 0.9 * d / denom + 0.1 / nf).collect();
            let sum: f64 = raw.iter().sum();
            raw.into_iter().map(|v| v / sum).collect()
        })
        .collect::<Vec<_>>();
    ComponentSet::attach_uniform(&rows, n)
}
