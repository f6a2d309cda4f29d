//! Checkpoint sequences `n_i` and validators for the growth hypotheses of the
//! almost-sure local limit theorems.

use serde::{Deserialize, Serialize};

use crate::numeric::{ln_ln, ln_ln_ln, E_POW_E};
use crate::walks::law::{IncrementLaw, LawKind};
use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum SequenceKind {
    /// `n_i = c i^2`.
    Poly2 {
        c: u64,
    },
    /// `n_i = floor(c q^i)`.
    Geometric {
        c: f64,
        q: f64,
    },
    /// `n_i = floor(exp(A (log i)^2 (log log i)^alpha))`.
    LoglogExp {
        a: f64,
        alpha: f64,
    },
    Explicit,
}

/// A strictly increasing prefix of a checkpoint sequence.
///
/// Term `j` of the prefix is `n_i` with `i = first_index + j`.
#[derive(Debug, Clone, PartialEq)]
pub struct SubsequenceSpec {
    kind: SequenceKind,
    first_index: u64,
    terms: Vec<u64>,
}

impl SubsequenceSpec {
    pub fn poly2(c: u64, count: usize) -> Result<Self> {
        if c == 0 {
            return Err(Error::domain("poly2 coefficient must be positive"));
        }
        let terms = (1..=count as u64)
            .map(|i| i.checked_mul(i).and_then(|s| s.checked_mul(c)))
            .collect::<Option<Vec<_>>>()
            .ok_or_else(|| Error::Resource("poly2 terms overflow u64".into()))?;
        Self::build(SequenceKind::Poly2 { c }, 1, terms)
    }

    pub fn geometric(c: f64, q: f64, count: usize) -> Result<Self> {
        if !(c > 0.0 && q > 1.0) {
            return Err(Error::domain(format!("geometric sequence needs c > 0, q > 1 (got {c}, {q})")));
        }
        let mut terms = Vec::with_capacity(count);
        for i in 1..=count as i32 {
            let v = (c * q.powi(i)).floor();
            if v >= u64::MAX as f64 {
                return Err(Error::Resource(format!("geometric term {i} overflows u64")));
            }
            terms.push(v as u64);
        }
        Self::build(SequenceKind::Geometric { c, q }, 1, terms)
    }

    /// Materializes up to `max_terms` terms, stopping early where a term would
    /// leave the `u64` range. Indices start at the first `i >= 3` after which the
    /// sequence is strictly increasing.
    pub fn loglog_exp(a: f64, alpha: f64, max_terms: usize) -> Result<Self> {
        if !(a > 0.0) {
            return Err(Error::domain("A must be positive"));
        }
        let mut raw = Vec::new();
        let mut i = 3u64;
        while raw.len() < max_terms {
            let li = (i as f64).ln();
            let e = a * li * li * li.ln().powf(alpha);
            let v = e.exp().floor();
            if !(v < 9.0e18) {
                break;
            }
            raw.push(v as u64);
            i += 1;
        }
        let start = raw.windows(2).rposition(|w| w[1] <= w[0]).map_or(0, |p| p + 1);
        let terms = raw[start..].to_vec();
        if terms.len() < 2 {
            return Err(Error::domain("loglog_exp sequence has fewer than two increasing terms in range"));
        }
        Self::build(SequenceKind::LoglogExp { a, alpha }, 3 + start as u64, terms)
    }

    pub fn explicit(first_index: u64, terms: Vec<u64>) -> Result<Self> {
        Self::build(SequenceKind::Explicit, first_index, terms)
    }

    fn build(kind: SequenceKind, first_index: u64, terms: Vec<u64>) -> Result<Self> {
        if first_index == 0 {
            return Err(Error::domain("sequence indices start at 1"));
        }
        if terms.first() == Some(&0) {
            return Err(Error::domain("terms must be positive"));
        }
        if let Some(p) = terms.windows(2).position(|w| w[1] <= w[0]) {
            return Err(Error::domain(format!(
                "sequence not strictly increasing at i = {}",
                first_index + p as u64 + 1
            )));
        }
        Ok(Self { kind, first_index, terms })
    }

    pub fn kind(&self) -> &SequenceKind {
        &self.kind
    }

    pub fn first_index(&self) -> u64 {
        self.first_index
    }

    pub fn terms(&self) -> &[u64] {
        &self.terms
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// Whether every term has the parity the law needs for the `2[a sqrt(n)/2]`
    /// reading of the target (even `n` for the simple walk; no constraint otherwise).
    pub fn parity_ok(&self, law: &IncrementLaw) -> bool {
        law.kind() != LawKind::Simple || self.terms.iter().all(|n| n % 2 == 0)
    }

    fn pairs(&self) -> impl Iterator<Item = (u64, u64, Option<u64>)> + '_ {
        self.terms
            .iter()
            .enumerate()
            .map(move |(j, &n)| (self.first_index + j as u64, n, self.terms.get(j + 1).copied()))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Hypothesis {
    /// `n_{i+1} - n_i >= A sqrt(n_i)`.
    Gap,
    /// `n_i <= A^{-1} i^2 log i (log log i)^{-3} (log log log i)^{-2 gamma}`.
    UpperGrowth,
    /// `n_{i+1}/n_i >= 1 + A log i (log log i)^alpha / i`.
    RatioGrowth,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct ConditionResult {
    pub hypothesis: Hypothesis,
    pub holds: bool,
    pub first_violation: Option<u64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SequenceValidation {
    pub holds: bool,
    /// First index `i` at which a hypothesis fails, with the failing hypothesis.
    pub first_violation: Option<(u64, Hypothesis)>,
    /// Number of indices examined.
    pub checked: usize,
    /// Outcome of each hypothesis on its own.
    pub conditions: Vec<ConditionResult>,
}

impl SequenceValidation {
    fn new(hypotheses: &[Hypothesis]) -> Self {
        let conditions = hypotheses
            .iter()
            .map(|&hypothesis| ConditionResult { hypothesis, holds: true, first_violation: None })
            .collect();
        Self { holds: true, first_violation: None, checked: 0, conditions }
    }

    fn record(&mut self, i: u64, h: Hypothesis, ok: bool) {
        if ok {
            return;
        }
        if self.first_violation.is_none() {
            self.first_violation = Some((i, h));
            self.holds = false;
        }
        let c = self.conditions.iter_mut().find(|c| c.hypothesis == h).expect("registered hypothesis");
        if c.holds {
            c.holds = false;
            c.first_violation = Some(i);
        }
    }
}

/// Checks the gap and upper-growth hypotheses of the lattice almost-sure local
/// limit theorem over the materialized prefix, for `i >= i_min`.
pub fn validate_thm2_sequence(seq: &SubsequenceSpec, a: f64, gamma: f64, i_min: u64) -> Result<SequenceValidation> {
    if seq.is_empty() {
        return Err(Error::domain("empty sequence"));
    }
    if !(a > 0.0) || !(gamma > 1.0) {
        return Err(Error::domain(format!("need A > 0 and gamma > 1 (got {a}, {gamma})")));
    }
    if (i_min as f64) <= E_POW_E {
        return Err(Error::Range { what: "log log log i", min: E_POW_E, got: i_min as f64 });
    }
    let mut v = SequenceValidation::new(&[Hypothesis::Gap, Hypothesis::UpperGrowth]);
    for (i, n, next) in seq.pairs().filter(|p| p.0 >= i_min) {
        v.checked += 1;
        let fi = i as f64;
        let ll = ln_ln(fi).expect("i > e^e");
        let lll = ln_ln_ln(fi).expect("i > e^e");
        if let Some(m) = next {
            v.record(i, Hypothesis::Gap, (m - n) as f64 >= a * (n as f64).sqrt());
        }
        let bound = fi * fi * fi.ln() / (a * ll.powi(3) * lll.powf(2.0 * gamma));
        v.record(i, Hypothesis::UpperGrowth, n as f64 <= bound);
    }
    Ok(v)
}

/// Checks the ratio hypothesis of the density almost-sure local limit theorem.
pub fn validate_thm3_sequence(seq: &SubsequenceSpec, a: f64, alpha: f64, i_min: u64) -> Result<SequenceValidation> {
    if seq.is_empty() {
        return Err(Error::domain("empty sequence"));
    }
    if !(a > 0.0) || !(alpha > 2.0) {
        return Err(Error::domain(format!("need A > 0 and alpha > 2 (got {a}, {alpha})")));
    }
    if (i_min as f64) <= std::f64::consts::E {
        return Err(Error::Range { what: "log log i", min: std::f64::consts::E, got: i_min as f64 });
    }
    let mut v = SequenceValidation::new(&[Hypothesis::RatioGrowth]);
    for (i, n, next) in seq.pairs().filter(|p| p.0 >= i_min) {
        let Some(m) = next else { break };
        v.checked += 1;
        let fi = i as f64;
        let need = 1.0 + a * fi.ln() * ln_ln(fi).expect("i > e").powf(alpha) / fi;
        v.record(i, Hypothesis::RatioGrowth, m as f64 / n as f64 >= need);
    }
    Ok(v)
}
