use std::path::Path;

use crate::error::{invalid, Error, Result};

/// Dense row-major `n x d` point matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct Points {
    d: usize,
    data: Vec<f64>,
}

impl Points {
    pub fn new(d: usize, data: Vec<f64>) -> Result<Self> {
        if d == 0 {
            return Err(invalid("points must have at least one column"));
        }
        if data.len() % d != 0 {
            return Err(invalid(format!(
                "data length {} is not a multiple of dimension {d}",
                data.len()
            )));
        }
        Ok(Self { d, data })
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let d = rows.first().map(Vec::len).unwrap_or(0);
        if rows.iter().any(|r| r.len() != d) {
            return Err(invalid("ragged point rows"));
        }
        Self::new(d, rows.concat())
    }

    pub fn len(&self) -> usize {
        self.data.len() / self.d
    }

    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.d
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.d..(i + 1) * self.d]
    }

    pub fn row_mut(&mut self, i: usize) -> &mut [f64] {
        &mut self.data[i * self.d..(i + 1) * self.d]
    }

    pub fn rows(&self) -> impl Iterator<Item = &[f64]> {
        self.data.chunks_exact(self.d)
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    /// Rows selected by `idx`, in order.
    pub fn select(&self, idx: &[usize]) -> Points {
        let mut data = Vec::with_capacity(idx.len() * self.d);
        for &i in idx {
            data.extend_from_slice(self.row(i));
        }
        Points { d: self.d, data }
    }

    /// Reads a rectangular numeric CSV. A first row containing any non-numeric cell
    /// is treated as a header and skipped.
    pub fn load_csv(path: impl AsRef<Path>) -> Result<Points> {
        let mut reader = csv::ReaderBuilder::new()
            .has_headers(false)
            .flexible(true)
            .trim(csv::Trim::All)
            .from_path(path)?;
        let mut d = None;
        let mut data = Vec::new();
        for (row, record) in reader.records().enumerate() {
            let record = record?;
            if record.iter().all(|c| c.is_empty()) {
                continue;
            }
            let parsed: Vec<std::result::Result<f64, _>> =
                record.iter().map(|c| c.parse::<f64>()).collect();
            if row == 0 && parsed.iter().any(|p| p.is_err()) {
                continue;
            }
            match d {
                None => d = Some(record.len()),
                Some(width) if width != record.len() => {
                    return Err(Error::Parse {
                        row: row + 1,
                        col: record.len().min(width) + 1,
                        msg: format!("expected {width} columns, found {}", record.len()),
                    })
                }
                _ => {}
            }
            for (col, value) in parsed.into_iter().enumerate() {
                let value = value.map_err(|e| Error::Parse {
                    row: row + 1,
                    col: col + 1,
                    msg: e.to_string(),
                })?;
                data.push(value);
            }
        }
        match d {
            Some(d) => Points::new(d, data),
            None => Err(invalid("points file contains no data rows")),
        }
    }
}

pub(crate) fn sq_dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}
