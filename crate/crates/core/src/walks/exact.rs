//! Exact and asymptotic point probabilities.

use std::f64::consts::PI;

use crate::numeric::{binomial_pmf, normal_pdf};
use crate::walks::law::{IncrementLaw, LawKind};
use crate::{Error, Result};

/// Work budget (cell updates) for the lattice convolution.
pub const CONVOLUTION_BUDGET: u128 = 20_000_000_000;

/// A point probability together with whether the target was reachable by parity.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PointProb {
    pub prob: f64,
    pub parity_ok: bool,
}

/// Lattice point of level `n` at or just below `level * sqrt(n)`:
/// `floor((level sqrt(n) - n b)/h) h + n b`.
///
/// Callers wanting the event `S_n = a sigma sqrt(n)` pass `level = a * sigma`.
pub fn resolve_lattice_target(level: f64, n: u64, law: &IncrementLaw) -> f64 {
    let k = target_index(level, n, law);
    k as f64 * law.span_h() + n as f64 * law.offset_b()
}

/// The index sum `K_n` whose walk value is [`resolve_lattice_target`].
pub fn target_index(level: f64, n: u64, law: &IncrementLaw) -> i64 {
    let nf = n as f64;
    // snap values within rounding of a lattice point onto it
    ((level * nf.sqrt() - nf * law.offset_b()) / law.span_h() + 1e-9).floor() as i64
}

/// `P(S_n = target)` for the simple walk, `C(n, (n+t)/2) 2^{-n}`.
pub fn exact_simple_walk_prob(n: u64, target: i64) -> PointProb {
    let parity_ok = (n as i64 + target).rem_euclid(2) == 0;
    if !parity_ok || target.unsigned_abs() > n {
        return PointProb { prob: 0.0, parity_ok };
    }
    let k = ((n as i64 + target) / 2) as u64;
    PointProb { prob: binomial_pmf(k, n, 0.5), parity_ok }
}

/// `P(S_n = target)` by `n`-fold convolution of the step distribution over the
/// lattice. Zero when `target` is not a level-`n` lattice point.
pub fn exact_lattice_walk_prob(law: &IncrementLaw, n: u64, target: f64) -> Result<f64> {
    if !law.is_lattice() {
        return Err(Error::Unsupported("point probabilities of a density law are zero; use the density oracle".into()));
    }
    let k = (target - n as f64 * law.offset_b()) / law.span_h();
    let kr = k.round();
    if (k - kr).abs() > 1e-9 * kr.abs().max(1.0) {
        return Ok(0.0);
    }
    let dist = index_sum_distribution(law, n)?;
    let kmin = law.indices().iter().min().copied().unwrap_or(0) * n as i64;
    let pos = kr as i64 - kmin;
    Ok(if pos < 0 { 0.0 } else { dist.get(pos as usize).copied().unwrap_or(0.0) })
}

/// Distribution of the index sum `K_n`, offset so entry 0 is `n * min(k)`.
pub fn index_sum_distribution(law: &IncrementLaw, n: u64) -> Result<Vec<f64>> {
    let kmin = *law.indices().iter().min().expect("lattice law has support");
    let kmax = *law.indices().iter().max().expect("lattice law has support");
    let width = (kmax - kmin) as u128;
    let s = law.support().len() as u128;
    let work = (n as u128) * (n as u128 + 1) / 2 * width.max(1) * s;
    if work > CONVOLUTION_BUDGET {
        return Err(Error::Resource(format!(
            "convolution of {n} steps needs ~{work} updates (budget {CONVOLUTION_BUDGET})"
        )));
    }
    let offs: Vec<(usize, f64)> =
        law.indices().iter().zip(law.support()).map(|(&k, &(_, p))| ((k - kmin) as usize, p)).collect();
    let full = n as usize * width as usize + 1;
    let mut cur = vec![0.0; full];
    let mut next = vec![0.0; full];
    cur[0] = 1.0;
    let mut len = 1usize;
    for _ in 0..n {
        let new_len = len + width as usize;
        next[..new_len].iter_mut().for_each(|v| *v = 0.0);
        for &(o, p) in &offs {
            for (dst, &src) in next[o..o + len].iter_mut().zip(&cur[..len]) {
                *dst += p * src;
            }
        }
        std::mem::swap(&mut cur, &mut next);
        len = new_len;
    }
    cur.truncate(len);
    Ok(cur)
}

/// `sqrt(2/pi) n^{-1/2} e^{-a^2/2}`, the leading term of `P(S_n = 2[a sqrt(n)/2])`.
pub fn stirling_asymptotic(n: u64, a: f64) -> f64 {
    (2.0 / PI).sqrt() / (n as f64).sqrt() * (-0.5 * a * a).exp()
}

/// Local limit value: `h e^{-a^2/2} / (sqrt(2 pi n) sigma)` on a lattice, and
/// the normalized density `phi(a)` for a density law.
pub fn local_clt_value(law: &IncrementLaw, n: u64, a: f64) -> f64 {
    match law.kind() {
        LawKind::Gaussian => normal_pdf(a),
        _ => law.span_h() / ((2.0 * PI * n as f64).sqrt() * law.sigma()) * (-0.5 * a * a).exp(),
    }
}

fn check_order(n_i: u64, n_j: u64) -> Result<()> {
    if n_i == 0 || n_j <= n_i {
        return Err(Error::domain(format!("need 1 <= n_i < n_j, got n_i={n_i}, n_j={n_j}")));
    }
    Ok(())
}

/// Leading correlation factor `e^{a^2 sqrt(n_i) / (sqrt(n_j) + sqrt(n_i))}`
/// between the events at `n_i < n_j`.
pub fn r_factor(a: f64, n_i: u64, n_j: u64) -> Result<f64> {
    check_order(n_i, n_j)?;
    let (si, sj) = ((n_i as f64).sqrt(), (n_j as f64).sqrt());
    Ok((a * a * si / (sj + si)).exp())
}

/// Exact joint-to-product density ratio for Gaussian steps, paired with
/// [`r_factor`].
///
/// With normalized densities the joint event at `(n_i, n_j)` has density
/// `phi(a) phi(a t)`, `t = (sqrt(n_j) - sqrt(n_i)) / sqrt(n_j - n_i)`, since the
/// increment over `(n_i, n_j]` must cover `a (sqrt(n_j) - sqrt(n_i))`.
pub fn gaussian_joint_oracle(a: f64, n_i: u64, n_j: u64) -> Result<(f64, f64)> {
    check_order(n_i, n_j)?;
    let (si, sj) = ((n_i as f64).sqrt(), (n_j as f64).sqrt());
    let t = (sj - si) / ((n_j - n_i) as f64).sqrt();
    let joint = normal_pdf(a) * normal_pdf(a * t);
    let product = normal_pdf(a) * normal_pdf(a);
    Ok((joint / product, r_factor(a, n_i, n_j)?))
}
