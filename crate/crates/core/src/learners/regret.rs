//! Per-round cost records and regret curves.

use std::io::Write;

use serde::Serialize;

use crate::error::{invalid, Result};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LedgerEntry {
    pub t: u64,
    /// Cost (or its one-sample estimate) at the played weights, divided by `n^2`.
    pub cost_est: f64,
    /// Exact cost `f_t(w_t) / n^2` when the harness can evaluate it.
    pub cost_true: Option<f64>,
    /// Weights played in this round.
    pub weights: Vec<f64>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct RegretLedger {
    k: usize,
    entries: Vec<LedgerEntry>,
    clipped: u64,
}

impl RegretLedger {
    pub fn new(k: usize) -> Self {
        Self {
            k,
            entries: Vec::new(),
            clipped: 0,
        }
    }

    pub fn push(&mut self, entry: LedgerEntry) {
        self.entries.push(entry);
    }

    pub fn entries(&self) -> &[LedgerEntry] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub(crate) fn record_clip(&mut self) {
        self.clipped += 1;
    }

    /// Number of rounds whose feedback exceeded the loss bound.
    pub fn clipped(&self) -> u64 {
        self.clipped
    }

    /// Attaches the exact cost of the most recent round.
    pub fn set_last_true_cost(&mut self, cost: f64) {
        if let Some(e) = self.entries.last_mut() {
            e.cost_true = Some(cost);
        }
    }

    pub fn cost_estimates(&self) -> Vec<f64> {
        self.entries.iter().map(|e| e.cost_est).collect()
    }

    /// Exact costs, if every round has one.
    pub fn true_costs(&self) -> Option<Vec<f64>> {
        self.entries.iter().map(|e| e.cost_true).collect()
    }

    /// CSV with columns `t,cost_est,cost_true,w_1..w_k`; `cost_true` is empty when unknown.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut writer = csv::Writer::from_writer(out);
        let mut header = vec!["t".to_string(), "cost_est".into(), "cost_true".into()];
        header.extend((1..=self.k).map(|j| format!("w_{j}")));
        writer.write_record(&header)?;
        for e in &self.entries {
            let mut rec = vec![e.t.to_string(), e.cost_est.to_string()];
            rec.push(e.cost_true.map(|c| c.to_string()).unwrap_or_default());
            rec.extend(e.weights.iter().map(|w| w.to_string()));
            writer.write_record(&rec)?;
        }
        writer.flush()?;
        Ok(())
    }
}

/// Prefix regrets `sum_{s<=t} cost_s - oracle_t`, all in the same (`/n^2`) units.
pub fn regret_curve(costs: &[f64], oracle_value_per_prefix: &[f64]) -> Result<Vec<f64>> {
    if costs.len() != oracle_value_per_prefix.len() {
        return Err(invalid(format!(
            "ledger has {} rounds but oracle has {} prefix values",
            costs.len(),
            oracle_value_per_prefix.len()
        )));
    }
    let mut acc = 0.0;
    Ok(costs
        .iter()
        .zip(oracle_value_per_prefix)
        .map(|(c, o)| {
            acc += c;
            acc - o
        })
        .collect())
}

/// Least-squares slope of `ln y` against `ln x`.
pub fn fit_loglog_slope(xs: &[f64], ys: &[f64]) -> Result<f64> {
    if xs.len() != ys.len() || xs.len() < 2 {
        return Err(invalid("need at least two matching points for a slope fit"));
    }
    if xs.iter().chain(ys).any(|&v| !(v > 0.0 && v.is_finite())) {
        return Err(invalid("log-log fit requires positive finite values"));
    }
    let lx: Vec<f64> = xs.iter().map(|v| v.ln()).collect();
    let ly: Vec<f64> = ys.iter().map(|v| v.ln()).collect();
    let m = lx.len() as f64;
    let mx = lx.iter().sum::<f64>() / m;
    let my = ly.iter().sum::<f64>() / m;
    let sxy: f64 = lx.iter().zip(&ly).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = lx.iter().map(|x| (x - mx) * (x - mx)).sum();
    if sxx == 0.0 {
        return Err(invalid("x values are all equal"));
    }
    Ok(sxy / sxx)
}
