//! Brute-force reference implementations, independent of the library code.

#![allow(dead_code)]

use nalgebra::DMatrix;

/// Projection onto `{x >= 0, sum x = 1, x[k-1] >= gamma}` by exhaustive search:
/// the first `k - 2` coordinates run over a grid of step `h`, the last two are
/// solved in closed form on their segment.
pub fn grid_projection(w: &[f64], gamma: f64, h: f64) -> Vec<f64> {
    let k = w.len();
    assert!(k >= 2);
    let mut best = (f64::INFINITY, vec![0.0; k]);
    let mut prefix = Vec::with_capacity(k);
    search(w, gamma, h, &mut prefix, 0.0, &mut best);
    best.1
}

fn search(
    w: &[f64],
    gamma: f64,
    h: f64,
    prefix: &mut Vec<f64>,
    used: f64,
    best: &mut (f64, Vec<f64>),
) {
    let k = w.len();
    if prefix.len() == k - 2 {
        let m = 1.0 - used;
        if m < gamma - 1e-12 {
            return;
        }
        let (a, b) = (w[k - 2], w[k - 1]);
        // min (x - a)^2 + (m - x - b)^2 with 0 <= x <= m - gamma.
        let x = ((m + a - b) / 2.0).clamp(0.0, (m - gamma).max(0.0));
        let tail = [x, m - x];
        let head: f64 = prefix.iter().zip(w).map(|(p, v)| (p - v) * (p - v)).sum();
        let d = head + (x - a) * (x - a) + (m - x - b) * (m - x - b);
        if d < best.0 {
            let mut v = prefix.clone();
            v.extend_from_slice(&tail);
            *best = (d, v);
        }
        return;
    }
    let steps = ((1.0 - gamma - used) / h + 1e-9).floor() as usize;
    for s in 0..=steps {
        let x = s as f64 * h;
        prefix.push(x);
        search(w, gamma, h, prefix, used + x, best);
        prefix.pop();
    }
}

/// Determinant by Gaussian elimination with partial pivoting.
pub fn det(m: &DMatrix<f64>) -> f64 {
    let n = m.nrows();
    let mut a = m.clone();
    let mut d = 1.0;
    for c in 0..n {
        let p = (c..n)
            .max_by(|&i, &j| a[(i, c)].abs().total_cmp(&a[(j, c)].abs()))
            .unwrap();
        if a[(p, c)] == 0.0 {
            return 0.0;
        }
        if p != c {
            a.swap_rows(p, c);
            d = -d;
        }
        d *= a[(c, c)];
        for r in c + 1..n {
            let f = a[(r, c)] / a[(c, c)];
            for j in c..n {
                a[(r, j)] -= f * a[(c, j)];
            }
        }
    }
    d
}

/// All size-`b` subsets of `0..n` in lexicographic order.
pub fn subsets(n: usize, b: usize) -> Vec<Vec<usize>> {
    fn rec(start: usize, n: usize, b: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == b {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            cur.push(i);
            rec(i + 1, n, b, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(0, n, b, &mut Vec::new(), &mut out);
    out
}

/// k-DPP probabilities by enumeration: `det(L_S) / sum_T det(L_T)`.
pub fn kdpp_enumeration(l: &DMatrix<f64>, b: usize) -> Vec<(Vec<usize>, f64)> {
    let sets = subsets(l.nrows(), b);
    let dets: Vec<f64> = sets
        .iter()
        .map(|s| det(&DMatrix::from_fn(b, b, |i, j| l[(s[i], s[j])])))
        .collect();
    let z: f64 = dets.iter().sum();
    sets.into_iter().zip(dets).map(|(s, d)| (s, d / z)).collect()
}

/// Cost `sum_i l2_i / q_i`, gradient and Hessian for mixture probabilities
/// `q_i = sum_j w_j p[j][i]`, written out directly.
pub fn direct_cost_derivatives(
    p: &[Vec<f64>],
    w: &[f64],
    l2: &[f64],
) -> (f64, Vec<f64>, DMatrix<f64>) {
    let k = w.len();
    let n = l2.len();
    let mut f = 0.0;
    let mut g = vec![0.0; k];
    let mut h = DMatrix::zeros(k, k);
    for i in 0..n {
        let q: f64 = (0..k).map(|j| w[j] * p[j][i]).sum();
        f += l2[i] / q;
        for a in 0..k {
            g[a] -= l2[i] * p[a][i] / (q * q);
            for b in 0..k {
                h[(a, b)] += 2.0 * l2[i] * p[a][i] * p[b][i] / (q * q * q);
            }
        }
    }
    (f, g, h)
}

/// Smallest eigenvalue of a symmetric matrix.
pub fn min_eigenvalue(m: &DMatrix<f64>) -> f64 {
    m.clone()
        .symmetric_eigen()
        .eigenvalues
        .iter()
        .cloned()
        .fold(f64::INFINITY, f64::min)
}
