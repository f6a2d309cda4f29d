//! Monte Carlo trajectories of `Delta_n = sum_{i<n} 1_{B_i}(T^i x) / sum_{i<n} mu(B_i)`.

use rayon::prelude::*;
use serde::Serialize;

use crate::dbc::schedule::BallSchedule;
use crate::dynsys::systems::MP_OCCUPATION_POINTS;
use crate::dynsys::MapSystem;
use crate::stats::{summarize, EnsembleSummary};
use crate::{par, rng, Error, Result};

pub const DEFAULT_CHECKPOINT_RATIO: f64 = 1.25;

/// `ceil(ratio^k)` for `k = 0, 1, ...` below `n`, deduplicated, then `n`.
pub fn geometric_checkpoints(n: u64, ratio: f64) -> Vec<u64> {
    let mut out: Vec<u64> = Vec::new();
    let mut x = 1.0f64;
    while x.ceil() < n as f64 {
        let c = x.ceil() as u64;
        if out.last() != Some(&c) {
            out.push(c);
        }
        x *= ratio;
    }
    if n > 0 {
        out.push(n);
    }
    out
}

/// Cumulative hits `sum_{i<n} 1[d(T^i x, x0) <= r_i]` at each checkpoint `n`.
///
/// `orbit` yields `T x, T^2 x, ...`; the point `x` itself is ball `0`'s test.
pub fn trajectory_hits(
    system: &MapSystem,
    schedule: &BallSchedule,
    x: f64,
    orbit: impl Iterator<Item = f64>,
    checkpoints: &[u64],
) -> Vec<u64> {
    let metric = system.metric();
    let center = schedule.center();
    let radii = schedule.radii();
    let mut out = Vec::with_capacity(checkpoints.len());
    let mut hits = 0u64;
    let mut next = checkpoints.iter().peekable();
    for (i, p) in std::iter::once(x).chain(orbit).enumerate() {
        while next.next_if(|&&c| c == i as u64).is_some() {
            out.push(hits);
        }
        if next.peek().is_none() {
            break;
        }
        hits += u64::from(metric.dist(p, center) <= radii[i]);
    }
    out
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DbcRun {
    pub checkpoints: Vec<u64>,
    pub seeds: Vec<u64>,
    /// `sum_{i<n} mu(B_i)` at each checkpoint.
    pub sum_measure: Vec<f64>,
    /// One-sigma band on `sum_measure` when ball measures are estimated.
    pub sum_measure_band: Option<Vec<f64>>,
    /// `hits[t][k]` for seed `t` at checkpoint `k`.
    pub hits: Vec<Vec<u64>>,
    pub deltas: Vec<Vec<f64>>,
}

impl DbcRun {
    pub fn summary(&self, epsilons: &[f64]) -> Result<EnsembleSummary> {
        summarize(&self.deltas, &self.checkpoints, epsilons)
    }

    /// `Delta_N` of every seed.
    pub fn final_deltas(&self) -> Vec<f64> {
        self.deltas.iter().map(|d| *d.last().expect("at least one checkpoint")).collect()
    }
}

/// Runs one trajectory per seed, each from `x ~ mu` drawn on stream
/// `(master_seed, seed)`, and records `Delta_n` at geometric checkpoints.
pub fn run_dbc(
    system: &MapSystem,
    schedule: &BallSchedule,
    seeds: &[u64],
    n: u64,
    master_seed: u64,
    workers: usize,
) -> Result<DbcRun> {
    run_dbc_at(system, schedule, seeds, &geometric_checkpoints(n, DEFAULT_CHECKPOINT_RATIO), master_seed, workers)
}

/// [`run_dbc`] at caller-chosen increasing checkpoints.
pub fn run_dbc_at(
    system: &MapSystem,
    schedule: &BallSchedule,
    seeds: &[u64],
    checkpoints: &[u64],
    master_seed: u64,
    workers: usize,
) -> Result<DbcRun> {
    let n = *checkpoints.last().ok_or_else(|| Error::domain("no checkpoints"))?;
    if checkpoints[0] == 0 || checkpoints.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::domain("checkpoints must be positive and increasing"));
    }
    if (schedule.len() as u64) < n {
        return Err(Error::domain(format!("schedule has {} balls, {n} needed", schedule.len())));
    }
    if seeds.is_empty() {
        return Err(Error::domain("no seeds"));
    }
    let prefix = schedule.measure_prefix();
    let sum_measure: Vec<f64> = checkpoints.iter().map(|&c| prefix[c as usize]).collect();
    let sum_measure_band = (!schedule.measure_is_exact()).then(|| {
        let m = MP_OCCUPATION_POINTS as f64;
        let mut acc = 0.0;
        let mut band = Vec::with_capacity(checkpoints.len());
        let mut it = checkpoints.iter().peekable();
        for (i, &p) in schedule.measures()[..n as usize].iter().enumerate() {
            acc += (p * (1.0 - p) / m).sqrt();
            while it.next_if(|&&c| c == i as u64 + 1).is_some() {
                band.push(acc);
            }
        }
        band
    });

    let hits: Vec<Vec<u64>> = par::with_workers(workers, || {
        seeds
            .par_iter()
            .map(|&s| {
                let mut rng = rng::stream(master_seed, s);
                let (x, orbit) = system.sample_orbit(&mut rng);
                trajectory_hits(system, schedule, x, orbit, checkpoints)
            })
            .collect()
    })?;
    let deltas = hits.iter().map(|h| h.iter().zip(&sum_measure).map(|(&k, &m)| k as f64 / m).collect()).collect();
    Ok(DbcRun { checkpoints: checkpoints.to_vec(), seeds: seeds.to_vec(), sum_measure, sum_measure_band, hits, deltas })
}
