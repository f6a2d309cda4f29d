//! Step distributions.

use rand_chacha::rand_core::RngCore;

use crate::rng::{BitReader, ChaCha8Rng};
use crate::{Error, Result};

const SUM_TOL: f64 = 1e-12;
// how far a support value may sit from its lattice point k h + b
const LATTICE_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LawKind {
    Simple,
    Lattice,
    Gaussian,
}

/// Distribution of a single mean-zero step.
///
/// Lattice laws live on `{k h + b : k in Z}` with `h` the maximal span; every
/// support value is stored together with its integer index `k`, so a walk can
/// be tracked exactly through its index sum `K_n` with `S_n = h K_n + n b`.
#[derive(Debug, Clone, PartialEq)]
pub struct IncrementLaw {
    kind: LawKind,
    support: Vec<(f64, f64)>,
    indices: Vec<i64>,
    // cumulative probabilities scaled to 2^64, last entry saturates
    thresholds: Vec<u64>,
    span_h: f64,
    offset_b: f64,
    sigma: f64,
    third_abs_moment: f64,
}

fn gcd(a: u64, b: u64) -> u64 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

impl IncrementLaw {
    /// The symmetric `+-1` walk: span 2, offset 1.
    pub fn simple() -> Self {
        Self {
            kind: LawKind::Simple,
            support: vec![(-1.0, 0.5), (1.0, 0.5)],
            indices: vec![-1, 0],
            thresholds: vec![1u64 << 63, u64::MAX],
            span_h: 2.0,
            offset_b: 1.0,
            sigma: 1.0,
            third_abs_moment: 1.0,
        }
    }

    /// A finitely supported lattice law with span `h` and offset `b`.
    pub fn lattice(support: Vec<(f64, f64)>, span_h: f64, offset_b: f64) -> Result<Self> {
        if support.is_empty() {
            return Err(Error::domain("empty support"));
        }
        if !(span_h > 0.0 && span_h.is_finite()) || !offset_b.is_finite() {
            return Err(Error::domain(format!("bad lattice parameters h={span_h}, b={offset_b}")));
        }
        if support.iter().any(|&(v, p)| !v.is_finite() || !(p > 0.0 && p <= 1.0)) {
            return Err(Error::domain("support values must be finite with probabilities in (0, 1]"));
        }
        let total: f64 = support.iter().map(|s| s.1).sum();
        if (total - 1.0).abs() > SUM_TOL {
            return Err(Error::domain(format!("probabilities sum to {total}, not 1")));
        }
        let mean: f64 = support.iter().map(|(v, p)| v * p).sum();
        if mean.abs() > SUM_TOL {
            return Err(Error::domain(format!("law must be centred, mean is {mean}")));
        }
        let mut indices = Vec::with_capacity(support.len());
        for &(v, _) in &support {
            let k = (v - offset_b) / span_h;
            let kr = k.round();
            if (k - kr).abs() > LATTICE_TOL * kr.abs().max(1.0) {
                return Err(Error::domain(format!("value {v} is not of the form k*{span_h} + {offset_b}")));
            }
            indices.push(kr as i64);
        }
        // h is maximal iff the index differences are coprime
        let g = indices.iter().fold(0u64, |g, &k| gcd(g, (k - indices[0]).unsigned_abs()));
        if support.len() > 1 && g != 1 {
            return Err(Error::domain(format!(
                "span {span_h} is not maximal: a sublattice of step {} carries all mass",
                g as f64 * span_h
            )));
        }
        let var: f64 = support.iter().map(|(v, p)| v * v * p).sum();
        if !(var > 0.0) {
            return Err(Error::domain("degenerate law has zero variance"));
        }
        let third_abs_moment = support.iter().map(|(v, p)| v.abs().powi(3) * p).sum();
        let mut acc = 0.0;
        let mut thresholds = Vec::with_capacity(support.len());
        for (j, &(_, p)) in support.iter().enumerate() {
            acc += p;
            thresholds.push(if j + 1 == support.len() || acc >= 1.0 {
                u64::MAX
            } else {
                (acc * 18_446_744_073_709_551_616.0) as u64
            });
        }
        Ok(Self {
            kind: LawKind::Lattice,
            support,
            indices,
            thresholds,
            span_h,
            offset_b,
            sigma: var.sqrt(),
            third_abs_moment,
        })
    }

    /// Centred normal steps with standard deviation `sigma`.
    pub fn gaussian(sigma: f64) -> Result<Self> {
        if !(sigma > 0.0 && sigma.is_finite()) {
            return Err(Error::domain(format!("sigma must be positive, got {sigma}")));
        }
        Ok(Self {
            kind: LawKind::Gaussian,
            support: Vec::new(),
            indices: Vec::new(),
            thresholds: Vec::new(),
            span_h: 0.0,
            offset_b: 0.0,
            sigma,
            third_abs_moment: sigma.powi(3) * 2.0 * (2.0 / std::f64::consts::PI).sqrt(),
        })
    }

    /// Uniform on `{-1, 0, 1}`: span 1, offset 0, variance 2/3.
    pub fn uniform_three() -> Self {
        let p = 1.0 / 3.0;
        Self::lattice(vec![(-1.0, p), (0.0, p), (1.0, 1.0 - 2.0 * p)], 1.0, 0.0).expect("valid law")
    }

    /// A skewed three-point law on `Z + 1/2`: values `-13/2, 1/2, 3/2` with
    /// probabilities `0.1, 0.7, 0.2`.
    ///
    /// Its first-order local-CLT correction is dominated by the skewness term
    /// rather than the lattice-rounding term, so the `n^{-1/2}` error rate is
    /// visible already at small `n`.
    pub fn skewed_half_integer() -> Self {
        Self::lattice(vec![(-6.5, 0.1), (0.5, 0.7), (1.5, 0.2)], 1.0, 0.5).expect("valid law")
    }

    pub fn kind(&self) -> LawKind {
        self.kind
    }

    pub fn is_lattice(&self) -> bool {
        self.kind != LawKind::Gaussian
    }

    pub fn support(&self) -> &[(f64, f64)] {
        &self.support
    }

    /// Lattice index `k` of each support value.
    pub fn indices(&self) -> &[i64] {
        &self.indices
    }

    pub fn span_h(&self) -> f64 {
        self.span_h
    }

    pub fn offset_b(&self) -> f64 {
        self.offset_b
    }

    pub fn sigma(&self) -> f64 {
        self.sigma
    }

    pub fn variance(&self) -> f64 {
        self.sigma * self.sigma
    }

    pub fn third_abs_moment(&self) -> f64 {
        self.third_abs_moment
    }

    /// Draws the lattice index of one step.
    #[inline]
    pub(crate) fn sample_index(&self, rng: &mut ChaCha8Rng, bits: &mut BitReader) -> i64 {
        match self.kind {
            LawKind::Simple => bits.bit(rng) as i64 - 1,
            _ => {
                let u = rng.next_u64();
                let j = self.thresholds.iter().position(|&t| u < t).unwrap_or(self.thresholds.len() - 1);
                self.indices[j]
            }
        }
    }
}
