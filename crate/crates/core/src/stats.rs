//! Ensemble summaries of `Delta` trajectories and log-log slope fits.
//!
//! A summary keeps the sorted values at every checkpoint. That makes merging
//! exact (a merge of two summaries *is* the summary of the pooled ensemble),
//! and means are summed in sorted order, so they do not depend on how the
//! ensemble was split or scheduled.

use crate::numeric::{linear_fit, LinearFit};
use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct EnsembleSummary {
    checkpoints: Vec<u64>,
    epsilons: Vec<f64>,
    sorted: Vec<Vec<f64>>,
}

/// One checkpoint's worth of summary statistics.
#[derive(Debug, Clone, PartialEq)]
pub struct SummaryRow {
    pub n: u64,
    pub mean: f64,
    pub median: f64,
    pub q05: f64,
    pub q95: f64,
    /// Empirical `P(|Delta - 1| > eps)` for each configured epsilon.
    pub exceed: Vec<f64>,
}

/// Empirical tail frequency next to a theoretical bound. Exceeding the bound
/// is a warning only: the bound's constant is existential.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize)]
pub struct EnvelopeComparison {
    pub empirical: f64,
    pub bound: f64,
    pub ratio: f64,
    pub exceeds: bool,
}

pub fn compare_envelope(empirical: f64, bound: f64) -> EnvelopeComparison {
    EnvelopeComparison { empirical, bound, ratio: empirical / bound, exceeds: empirical > bound }
}

/// Nearest-rank quantile of sorted data: the value of rank `ceil(q M)`.
pub fn nearest_rank(sorted: &[f64], q: f64) -> f64 {
    let m = sorted.len();
    let rank = ((q * m as f64).ceil() as usize).clamp(1, m);
    sorted[rank - 1]
}

/// Nearest-rank median of unsorted data.
pub fn median(values: &[f64]) -> f64 {
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    nearest_rank(&v, 0.5)
}

/// Summarizes `deltas[t][k]` (trajectory `t`, checkpoint `k`).
pub fn summarize(deltas: &[Vec<f64>], checkpoints: &[u64], epsilons: &[f64]) -> Result<EnsembleSummary> {
    if deltas.is_empty() {
        return Err(Error::domain("empty ensemble"));
    }
    if let Some(t) = deltas.iter().position(|d| d.len() != checkpoints.len()) {
        return Err(Error::domain(format!(
            "trajectory {t} has {} values for {} checkpoints",
            deltas[t].len(),
            checkpoints.len()
        )));
    }
    if epsilons.iter().any(|e| !(*e > 0.0)) {
        return Err(Error::domain("epsilons must be positive"));
    }
    let sorted = (0..checkpoints.len())
        .map(|k| {
            let mut col: Vec<f64> = deltas.iter().map(|d| d[k]).collect();
            col.sort_by(f64::total_cmp);
            col
        })
        .collect();
    Ok(EnsembleSummary { checkpoints: checkpoints.to_vec(), epsilons: epsilons.to_vec(), sorted })
}

impl EnsembleSummary {
    pub fn checkpoints(&self) -> &[u64] {
        &self.checkpoints
    }

    pub fn epsilons(&self) -> &[f64] {
        &self.epsilons
    }

    pub fn trajectories(&self) -> usize {
        self.sorted.first().map_or(0, Vec::len)
    }

    /// Sorted values at checkpoint `k`.
    pub fn values(&self, k: usize) -> &[f64] {
        &self.sorted[k]
    }

    pub fn mean(&self, k: usize) -> f64 {
        self.sorted[k].iter().sum::<f64>() / self.sorted[k].len() as f64
    }

    pub fn median(&self, k: usize) -> f64 {
        nearest_rank(&self.sorted[k], 0.5)
    }

    pub fn quantile(&self, k: usize, q: f64) -> f64 {
        nearest_rank(&self.sorted[k], q)
    }

    pub fn exceed_count(&self, k: usize, eps: f64) -> usize {
        self.sorted[k].iter().filter(|d| (*d - 1.0).abs() > eps).count()
    }

    pub fn exceed_prob(&self, k: usize, eps: f64) -> f64 {
        self.exceed_count(k, eps) as f64 / self.trajectories() as f64
    }

    pub fn row(&self, k: usize) -> SummaryRow {
        SummaryRow {
            n: self.checkpoints[k],
            mean: self.mean(k),
            median: self.median(k),
            q05: self.quantile(k, 0.05),
            q95: self.quantile(k, 0.95),
            exceed: self.epsilons.iter().map(|&e| self.exceed_prob(k, e)).collect(),
        }
    }

    pub fn rows(&self) -> Vec<SummaryRow> {
        (0..self.checkpoints.len()).map(|k| self.row(k)).collect()
    }

    /// Pools two ensembles summarized on the same grid.
    pub fn merge(&self, other: &Self) -> Result<Self> {
        if self.checkpoints != other.checkpoints || self.epsilons != other.epsilons {
            return Err(Error::domain("cannot merge summaries on different grids"));
        }
        let sorted = self
            .sorted
            .iter()
            .zip(&other.sorted)
            .map(|(a, b)| {
                let mut out = Vec::with_capacity(a.len() + b.len());
                let (mut i, mut j) = (0, 0);
                while i < a.len() && j < b.len() {
                    if a[i].total_cmp(&b[j]).is_le() {
                        out.push(a[i]);
                        i += 1;
                    } else {
                        out.push(b[j]);
                        j += 1;
                    }
                }
                out.extend_from_slice(&a[i..]);
                out.extend_from_slice(&b[j..]);
                out
            })
            .collect();
        Ok(Self { checkpoints: self.checkpoints.clone(), epsilons: self.epsilons.clone(), sorted })
    }
}

/// Least-squares slope of `log y` against `log x`.
pub fn fit_loglog_slope(xs: &[f64], ys: &[f64]) -> Result<LinearFit> {
    if xs.len() != ys.len() || xs.len() < 3 {
        return Err(Error::domain("need at least three paired points"));
    }
    if xs.iter().chain(ys).any(|v| !(*v > 0.0)) {
        return Err(Error::domain("log-log fit needs positive values"));
    }
    let lx: Vec<f64> = xs.iter().map(|x| x.ln()).collect();
    let ly: Vec<f64> = ys.iter().map(|y| y.ln()).collect();
    linear_fit(&lx, &ly).ok_or_else(|| Error::Degenerate("abscissae are all equal".into()))
}
