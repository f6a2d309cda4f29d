//! Monte Carlo for the hit events `S_{n_i} = a sigma sqrt(n_i)` and the
//! normalized hit ratio `Delta_n`.

use rayon::prelude::*;

use crate::rng::{self, BitReader, ChaCha8Rng};
use crate::walks::exact::{exact_lattice_walk_prob, exact_simple_walk_prob, target_index};
use crate::walks::law::{IncrementLaw, LawKind};
use crate::walks::sequence::SubsequenceSpec;
use crate::{par, Error, Result};

/// A lattice walk tracked through its integer index sum.
#[derive(Debug, Clone)]
pub struct Walker<'a> {
    law: &'a IncrementLaw,
    n: u64,
    k_sum: i64,
    bits: BitReader,
}

impl<'a> Walker<'a> {
    pub fn new(law: &'a IncrementLaw) -> Result<Self> {
        if !law.is_lattice() {
            return Err(Error::Unsupported(
                "exact-equality events have probability zero for density laws; use the density oracle".into(),
            ));
        }
        Ok(Self { law, n: 0, k_sum: 0, bits: BitReader::new() })
    }

    pub fn steps(&self) -> u64 {
        self.n
    }

    pub fn index_sum(&self) -> i64 {
        self.k_sum
    }

    pub fn value(&self) -> f64 {
        self.k_sum as f64 * self.law.span_h() + self.n as f64 * self.law.offset_b()
    }

    pub fn step(&mut self, rng: &mut ChaCha8Rng) {
        self.k_sum += self.law.sample_index(rng, &mut self.bits);
        self.n += 1;
    }

    /// Advances to step `n` (no-op if already there or beyond).
    pub fn advance_to(&mut self, n: u64, rng: &mut ChaCha8Rng) {
        if n <= self.n {
            return;
        }
        let steps = n - self.n;
        if self.law.kind() == LawKind::Simple {
            // bit 1 is index 0, bit 0 is index -1
            let ones = self.bits.count_ones(rng, steps);
            self.k_sum += ones as i64 - steps as i64;
            self.n = n;
        } else {
            for _ in 0..steps {
                self.step(rng);
            }
        }
    }
}

fn checkpoints(seq: &SubsequenceSpec, n_checkpoints: usize) -> Result<&[u64]> {
    seq.terms()
        .get(..n_checkpoints)
        .ok_or_else(|| Error::domain(format!("sequence has {} terms, {n_checkpoints} requested", seq.len())))
}

/// Hit indicators `1{S_{n_i} = resolved(a sigma, n_i)}` along one trajectory.
pub fn simulate_walk_hits_with(
    law: &IncrementLaw,
    seq: &SubsequenceSpec,
    a: f64,
    n_checkpoints: usize,
    rng: &mut ChaCha8Rng,
) -> Result<Vec<bool>> {
    let cps = checkpoints(seq, n_checkpoints)?;
    let mut w = Walker::new(law)?;
    let level = a * law.sigma();
    Ok(cps
        .iter()
        .map(|&n| {
            w.advance_to(n, rng);
            w.index_sum() == target_index(level, n, law)
        })
        .collect())
}

/// [`simulate_walk_hits_with`] on stream 0 of `seed`.
pub fn simulate_walk_hits(
    law: &IncrementLaw,
    seq: &SubsequenceSpec,
    a: f64,
    seed: u64,
    n_checkpoints: usize,
) -> Result<Vec<bool>> {
    simulate_walk_hits_with(law, seq, a, n_checkpoints, &mut rng::stream(seed, 0))
}

/// Limit of the normalized hit sum: `h e^{-a^2/2} / (sqrt(2 pi) sigma)`.
pub fn aslclt_limit(law: &IncrementLaw, a: f64) -> f64 {
    law.span_h() / ((2.0 * std::f64::consts::PI).sqrt() * law.sigma()) * (-0.5 * a * a).exp()
}

/// `Delta = (hits / normalizer) / limit` where `normalizer = sum n_i^{-1/2}`.
pub fn delta_n(hits: f64, normalizer: f64, law: &IncrementLaw, a: f64) -> Result<f64> {
    if !(normalizer > 0.0) {
        return Err(Error::domain(format!("normalizer must be positive, got {normalizer}")));
    }
    Ok(hits / normalizer / aslclt_limit(law, a))
}

/// Running `sum_{i<=k} n_i^{-1/2}`.
pub fn normalizer_prefix(cps: &[u64]) -> Vec<f64> {
    cps.iter()
        .scan(0.0, |acc, &n| {
            *acc += 1.0 / (n as f64).sqrt();
            Some(*acc)
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct WalkEnsembleResult {
    pub checkpoints: Vec<u64>,
    /// `hit_counts[t][k]`: hits of trajectory `t` among the first `k + 1` checkpoints.
    pub hit_counts: Vec<Vec<u32>>,
    /// Running `sum n_i^{-1/2}`.
    pub normalizer: Vec<f64>,
    pub limit: f64,
    /// `delta[t][k]`: `Delta` of trajectory `t` after `k + 1` checkpoints.
    pub delta: Vec<Vec<f64>>,
}

/// Runs `trajectories` independent walks; trajectory `t` uses stream `t` of
/// `master_seed`, so the result does not depend on `workers`.
pub fn walk_ensemble(
    law: &IncrementLaw,
    seq: &SubsequenceSpec,
    a: f64,
    n_checkpoints: usize,
    master_seed: u64,
    trajectories: u64,
    workers: usize,
) -> Result<WalkEnsembleResult> {
    let cps = checkpoints(seq, n_checkpoints)?.to_vec();
    Walker::new(law)?;
    let hits: Vec<Vec<bool>> = par::with_workers(workers, || {
        (0..trajectories)
            .into_par_iter()
            .map(|t| simulate_walk_hits_with(law, seq, a, n_checkpoints, &mut rng::stream(master_seed, t)))
            .collect::<Result<Vec<_>>>()
    })??;
    let normalizer = normalizer_prefix(&cps);
    let limit = aslclt_limit(law, a);
    let hit_counts: Vec<Vec<u32>> = hits
        .iter()
        .map(|h| {
            h.iter()
                .scan(0u32, |c, &x| {
                    *c += x as u32;
                    Some(*c)
                })
                .collect()
        })
        .collect();
    let delta =
        hit_counts.iter().map(|hc| hc.iter().zip(&normalizer).map(|(&c, &z)| c as f64 / z / limit).collect()).collect();
    Ok(WalkEnsembleResult { checkpoints: cps, hit_counts, normalizer, limit, delta })
}

/// `P(S_n = resolved(a sigma, n))`, exactly.
pub fn exact_hit_prob(law: &IncrementLaw, n: u64, a: f64) -> Result<f64> {
    let k = target_index(a * law.sigma(), n, law);
    match law.kind() {
        LawKind::Simple => Ok(exact_simple_walk_prob(n, 2 * k + n as i64).prob),
        _ => exact_lattice_walk_prob(law, n, k as f64 * law.span_h() + n as f64 * law.offset_b()),
    }
}

/// `Delta` after each of the first `n_checkpoints` checkpoints with the hit
/// counts replaced by their exact expectations.
pub fn exact_expectation_delta(
    law: &IncrementLaw,
    seq: &SubsequenceSpec,
    a: f64,
    n_checkpoints: usize,
) -> Result<Vec<f64>> {
    let cps = checkpoints(seq, n_checkpoints)?;
    let limit = aslclt_limit(law, a);
    let mut expected = 0.0;
    let mut norm = 0.0;
    cps.iter()
        .map(|&n| {
            expected += exact_hit_prob(law, n, a)?;
            norm += 1.0 / (n as f64).sqrt();
            Ok(expected / norm / limit)
        })
        .collect()
}

/// `(1 / log N) sum_{k<=N} 1{S_k = resolved(a sigma, k)} k^{-1/2}` along one
/// trajectory drawn from stream 0 of `seed`.
pub fn aslclt_full_sum(law: &IncrementLaw, n_max: u64, a: f64, seed: u64) -> Result<f64> {
    if n_max < 2 {
        return Err(Error::domain("N must be at least 2"));
    }
    let mut rng = rng::stream(seed, 0);
    let mut w = Walker::new(law)?;
    let level = a * law.sigma();
    let mut acc = 0.0;
    for k in 1..=n_max {
        w.step(&mut rng);
        if w.index_sum() == target_index(level, k, law) {
            acc += 1.0 / (k as f64).sqrt();
        }
    }
    Ok(acc / (n_max as f64).ln())
}

/// Exact expectation of [`aslclt_full_sum`] for the simple walk.
pub fn aslclt_full_sum_expectation(law: &IncrementLaw, n_max: u64, a: f64) -> Result<f64> {
    if law.kind() != LawKind::Simple {
        return Err(Error::Unsupported("closed-form expectation is implemented for the simple walk".into()));
    }
    if n_max < 2 {
        return Err(Error::domain("N must be at least 2"));
    }
    let mut acc = 0.0;
    for k in 1..=n_max {
        acc += exact_hit_prob(law, k, a)? / (k as f64).sqrt();
    }
    Ok(acc / (n_max as f64).ln())
}
