//! Monte Carlo decay of correlations for Lipschitz observables.

use std::fmt;
use std::sync::Arc;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::dynsys::systems::MapSystem;
use crate::numeric::linear_fit;
use crate::rng::{self, uniform};
use crate::{Error, Result};

/// Batches used for standard errors (and as the unit of parallel work).
pub const CORRELATION_BATCHES: u64 = 64;

/// A real observable with a declared Lipschitz bound.
#[derive(Clone)]
pub struct LipObservable {
    name: String,
    lipschitz: f64,
    f: Arc<dyn Fn(f64) -> f64 + Send + Sync>,
}

impl fmt::Debug for LipObservable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("LipObservable").field("name", &self.name).field("lipschitz", &self.lipschitz).finish()
    }
}

impl LipObservable {
    pub fn new(name: impl Into<String>, lipschitz: f64, f: impl Fn(f64) -> f64 + Send + Sync + 'static) -> Self {
        Self { name: name.into(), lipschitz, f: Arc::new(f) }
    }

    pub fn identity() -> Self {
        Self::new("identity", 1.0, |x| x)
    }

    pub fn constant(c: f64) -> Self {
        Self::new(format!("constant({c})"), 0.0, move |_| c)
    }

    /// `cos(2 pi x)`, continuous on the circle.
    pub fn cos2pi() -> Self {
        Self::new("cos2pi", 2.0 * std::f64::consts::PI, |x| (2.0 * std::f64::consts::PI * x).cos())
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn lipschitz(&self) -> f64 {
        self.lipschitz
    }

    #[inline]
    pub fn eval(&self, x: f64) -> f64 {
        (self.f)(x)
    }

    /// Largest two-point quotient `|f(x) - f(y)| / |x - y|` over `pairs`
    /// random pairs in `[0, 1)`.
    pub fn max_sampled_quotient(&self, pairs: usize, seed: u64) -> f64 {
        let mut rng = rng::stream(seed, 0);
        (0..pairs)
            .map(|_| {
                let (x, y) = (uniform(&mut rng), uniform(&mut rng));
                if x == y {
                    0.0
                } else {
                    (self.eval(x) - self.eval(y)).abs() / (x - y).abs()
                }
            })
            .fold(0.0, f64::max)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CorrelationEstimate {
    pub lag: u64,
    pub cov: f64,
    /// Standard error from batch means.
    pub std_err: f64,
}

#[derive(Clone)]
struct BatchSums {
    n: f64,
    phi: Vec<f64>,
    psi: f64,
    prod: Vec<f64>,
}

/// Estimates `int phi o T^n psi dmu - int phi dmu int psi dmu` for each lag.
///
/// Samples are split into fixed batches, each drawn from its own stream of
/// `seed`; pooled sums are combined in batch order, so the result does not
/// depend on the worker count.
pub fn estimate_correlation(
    system: &MapSystem,
    phi: &LipObservable,
    psi: &LipObservable,
    lags: &[u64],
    n_samples: u64,
    seed: u64,
) -> Result<Vec<CorrelationEstimate>> {
    if lags.is_empty() {
        return Err(Error::domain("no lags requested"));
    }
    let batches = CORRELATION_BATCHES.min(n_samples / 2);
    if batches < 2 {
        return Err(Error::domain("need at least four samples"));
    }
    let max_lag = *lags.iter().max().expect("nonempty");
    let sums: Vec<BatchSums> = (0..batches)
        .into_par_iter()
        .map(|b| {
            let count = n_samples / batches + u64::from(b < n_samples % batches);
            let mut rng = rng::stream(seed, b);
            let mut s =
                BatchSums { n: count as f64, phi: vec![0.0; lags.len()], psi: 0.0, prod: vec![0.0; lags.len()] };
            let mut along = vec![0.0; max_lag as usize + 1];
            for _ in 0..count {
                let (x, orbit) = system.sample_orbit(&mut rng);
                along[0] = x;
                for (slot, y) in along[1..].iter_mut().zip(orbit) {
                    *slot = y;
                }
                let p = psi.eval(x);
                s.psi += p;
                for (j, &lag) in lags.iter().enumerate() {
                    let f = phi.eval(along[lag as usize]);
                    s.phi[j] += f;
                    s.prod[j] += f * p;
                }
            }
            s
        })
        .collect();

    let total_n: f64 = sums.iter().map(|s| s.n).sum();
    let total_psi: f64 = sums.iter().map(|s| s.psi).sum();
    Ok(lags
        .iter()
        .enumerate()
        .map(|(j, &lag)| {
            let total_phi: f64 = sums.iter().map(|s| s.phi[j]).sum();
            let total_prod: f64 = sums.iter().map(|s| s.prod[j]).sum();
            let cov = total_prod / total_n - (total_phi / total_n) * (total_psi / total_n);
            let per_batch: Vec<f64> = sums.iter().map(|s| s.prod[j] / s.n - (s.phi[j] / s.n) * (s.psi / s.n)).collect();
            let b = per_batch.len() as f64;
            let mean = per_batch.iter().sum::<f64>() / b;
            let var = per_batch.iter().map(|c| (c - mean) * (c - mean)).sum::<f64>() / (b - 1.0);
            CorrelationEstimate { lag, cov, std_err: (var / b).sqrt() }
        })
        .collect())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "model", rename_all = "snake_case")]
pub enum DecayModel {
    /// Fit `log |c(n)|` against `log n`.
    Polynomial,
    /// Fit `log |c(n)|` against `n^beta`.
    BetaExponential { beta: f64 },
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DecayFit {
    pub rate: f64,
    pub std_err: f64,
    pub used_lags: Vec<u64>,
}

/// Minimum number of lags above the noise floor for a rate fit.
pub const MIN_FIT_LAGS: usize = 4;

/// Fits the decay rate from lags whose estimate exceeds three standard errors.
pub fn fit_decay_rate(correlations: &[CorrelationEstimate], model: DecayModel) -> Result<DecayFit> {
    let usable: Vec<&CorrelationEstimate> =
        correlations.iter().filter(|c| c.lag >= 1 && c.cov.abs() > 3.0 * c.std_err && c.cov != 0.0).collect();
    let used_lags: Vec<u64> = usable.iter().map(|c| c.lag).collect();
    if usable.len() < MIN_FIT_LAGS {
        return Err(Error::InsufficientSignal { usable: used_lags, needed: MIN_FIT_LAGS });
    }
    let xs: Vec<f64> = usable
        .iter()
        .map(|c| match model {
            DecayModel::Polynomial => (c.lag as f64).ln(),
            DecayModel::BetaExponential { beta } => (c.lag as f64).powf(beta),
        })
        .collect();
    let ys: Vec<f64> = usable.iter().map(|c| c.cov.abs().ln()).collect();
    let fit = linear_fit(&xs, &ys).ok_or_else(|| Error::Degenerate("lags collapse to one abscissa".into()))?;
    Ok(DecayFit { rate: -fit.slope, std_err: fit.slope_std_err, used_lags })
}
