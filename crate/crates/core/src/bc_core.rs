//! Variance-condition Borel–Cantelli machinery for nonnegative summands.
//!
//! For `S_n = X_1 + ... + X_n` with `X_i >= 0`, `sup E X_i < inf` and
//! `E S_n -> inf`, the normalized sum `S_n / E S_n` tends to one almost surely
//! as soon as, for some `gamma > 1`,
//!
//! ```text
//! var(S_n) = O( (E S_n)^2 / ((log E S_n) (log log E S_n)^gamma) ).
//! ```
//!
//! This module makes that hypothesis checkable on finite data: the `O(.)`
//! constant is an explicit threshold `c`, and indices where the iterated
//! logarithm is undefined are skipped and counted rather than guessed.

use crate::numeric::{ln_ln, E_POW_E};
use crate::{Error, Result};

/// Default evaluation cap for [`proof_subsequence`].
pub const DEFAULT_SEARCH_CAP: u64 = 1_000_000_000;

/// Means (and optionally variances) of the partial sums `S_n`.
///
/// Entry `k` of each vector describes `n = first_index + k`.
#[derive(Debug, Clone, PartialEq)]
pub struct SummandSeries {
    first_index: u64,
    expected_partial_sums: Vec<f64>,
    variance_partial_sums: Option<Vec<f64>>,
    sup_mean_bound: f64,
}

impl SummandSeries {
    pub fn new(
        first_index: u64,
        expected_partial_sums: Vec<f64>,
        variance_partial_sums: Option<Vec<f64>>,
        sup_mean_bound: f64,
    ) -> Result<Self> {
        if first_index == 0 {
            return Err(Error::domain("partial sums are indexed from n = 1"));
        }
        if !(sup_mean_bound.is_finite() && sup_mean_bound >= 0.0) {
            return Err(Error::domain("sup E X_i must be finite and nonnegative"));
        }
        if let Some(bad) = expected_partial_sums.iter().find(|v| !(v.is_finite() && **v >= 0.0)) {
            return Err(Error::domain(format!("E S_n entries must be finite and >= 0, got {bad}")));
        }
        if expected_partial_sums.windows(2).any(|w| w[1] < w[0]) {
            return Err(Error::domain("E S_n must be nondecreasing"));
        }
        if let Some(var) = &variance_partial_sums {
            if var.len() != expected_partial_sums.len() {
                return Err(Error::domain("variance and mean sequences differ in length"));
            }
            if let Some(bad) = var.iter().find(|v| !(v.is_finite() && **v >= 0.0)) {
                return Err(Error::domain(format!("var S_n entries must be finite and >= 0, got {bad}")));
            }
        }
        Ok(Self { first_index, expected_partial_sums, variance_partial_sums, sup_mean_bound })
    }

    pub fn first_index(&self) -> u64 {
        self.first_index
    }

    pub fn expected_partial_sums(&self) -> &[f64] {
        &self.expected_partial_sums
    }

    pub fn variance_partial_sums(&self) -> Option<&[f64]> {
        self.variance_partial_sums.as_deref()
    }

    pub fn sup_mean_bound(&self) -> f64 {
        self.sup_mean_bound
    }
}

/// Outcome of a variance-condition check.
#[derive(Debug, Clone, PartialEq)]
pub struct VarianceConditionReport {
    pub gamma: f64,
    pub threshold: f64,
    /// Supremum of the normalized variance over the evaluated indices.
    pub ratio_sup: f64,
    /// Index attaining `ratio_sup`.
    pub argmax: Option<u64>,
    /// `ratio_sup <= threshold`, up to a relative rounding allowance of 1e-12.
    pub passes: bool,
    pub evaluated: usize,
    /// Indices skipped because an iterated logarithm was undefined there.
    pub skipped: usize,
}

/// `P(|S_n - E S_n| > sigma E S_n) <= var / (sigma E S_n)^2`.
pub fn chebyshev_deviation_bound(es: f64, var: f64, sigma: f64) -> Result<f64> {
    if !(es > 0.0) {
        return Err(Error::domain(format!("E S_n must be positive, got {es}")));
    }
    if !(sigma > 0.0) {
        return Err(Error::domain(format!("sigma must be positive, got {sigma}")));
    }
    if !(var >= 0.0) {
        return Err(Error::domain(format!("variance must be nonnegative, got {var}")));
    }
    let scale = sigma * es;
    Ok(var / (scale * scale))
}

/// Normalized variance `var (log es) (log log es)^gamma / es^2`, if defined.
pub fn normalized_variance(es: f64, var: f64, gamma: f64) -> Option<f64> {
    let ll = ln_ln(es)?;
    Some(var * es.ln() * ll.powf(gamma) / (es * es))
}

// A relative allowance of 1e-12 so that inputs built to sit exactly on the
// threshold are not failed by rounding.
fn passes(ratio_sup: f64, c: f64) -> bool {
    ratio_sup <= c * (1.0 + 1e-12)
}

fn check_gamma(gamma: f64) -> Result<()> {
    if !(gamma > 1.0) {
        return Err(Error::domain(format!("gamma must exceed 1, got {gamma}")));
    }
    Ok(())
}

/// Checks the variance hypothesis with explicit constant `c` over `n >= n_min`.
///
/// Indices with `E S_n <= e` are skipped and counted in the report.
pub fn check_variance_condition(
    series: &SummandSeries,
    gamma: f64,
    c: f64,
    n_min: u64,
) -> Result<VarianceConditionReport> {
    check_gamma(gamma)?;
    let var = series.variance_partial_sums().ok_or_else(|| Error::domain("series carries no variance entries"))?;
    let mut report = VarianceConditionReport {
        gamma,
        threshold: c,
        ratio_sup: 0.0,
        argmax: None,
        passes: true,
        evaluated: 0,
        skipped: 0,
    };
    for (k, (&es, &v)) in series.expected_partial_sums().iter().zip(var).enumerate() {
        let n = series.first_index() + k as u64;
        if n < n_min {
            continue;
        }
        match normalized_variance(es, v, gamma) {
            Some(r) => {
                report.evaluated += 1;
                if report.argmax.is_none() || r > report.ratio_sup {
                    report.ratio_sup = r;
                    report.argmax = Some(n);
                }
            }
            None => report.skipped += 1,
        }
    }
    report.passes = passes(report.ratio_sup, c);
    Ok(report)
}

/// The pairwise-covariance form of the hypothesis for identically
/// distributed summands with mean `mu`.
///
/// `cross_sums[k]` is `sum_{i<j<=n} (E X_i X_j - mu^2)` for `n = k + 1`;
/// indices `n <= e^e` are skipped.
pub fn check_pairwise_cov_condition(
    cross_sums: &[f64],
    mu: f64,
    gamma: f64,
    c: f64,
) -> Result<VarianceConditionReport> {
    check_gamma(gamma)?;
    if !mu.is_finite() {
        return Err(Error::domain("mu must be finite"));
    }
    let mut report = VarianceConditionReport {
        gamma,
        threshold: c,
        ratio_sup: 0.0,
        argmax: None,
        passes: true,
        evaluated: 0,
        skipped: 0,
    };
    for (k, &cs) in cross_sums.iter().enumerate() {
        let n = (k + 1) as f64;
        if n <= E_POW_E {
            report.skipped += 1;
            continue;
        }
        let ll = ln_ln(n).expect("n > e^e");
        let r = cs * n.ln() * ll.powf(gamma) / (n * n);
        report.evaluated += 1;
        if report.argmax.is_none() || r > report.ratio_sup {
            report.ratio_sup = r;
            report.argmax = Some(k as u64 + 1);
        }
    }
    report.passes = passes(report.ratio_sup, c);
    Ok(report)
}

/// The threshold `e^{k / (log k)^theta}` defining the k-th subsequence index.
pub fn subsequence_threshold(k: u64, theta: f64) -> f64 {
    let kf = k as f64;
    (kf / kf.ln().powf(theta)).exp()
}

/// `n_k = inf { n >= 1 : E S_n >= e^{k/(log k)^theta} }` for `k = 2..=k_max`.
///
/// `es_eval` must be nondecreasing. The thresholds themselves increase only
/// for `log k > theta`, so the returned indices are nondecreasing from
/// `k > e^theta` on. At most `cap` evaluations are spent in total.
pub fn proof_subsequence<F>(es_eval: F, theta: f64, k_max: u64, cap: u64) -> Result<Vec<u64>>
where
    F: Fn(u64) -> f64,
{
    if !(theta > 0.0) {
        return Err(Error::domain(format!("theta must be positive, got {theta}")));
    }
    let mut evaluations = 0u64;
    let mut eval = |n: u64, threshold: f64| -> Result<f64> {
        if evaluations >= cap {
            return Err(Error::Exhausted { evaluations, threshold });
        }
        evaluations += 1;
        Ok(es_eval(n))
    };
    let mut out = Vec::with_capacity(k_max.saturating_sub(1) as usize);
    for k in 2..=k_max {
        let t = subsequence_threshold(k, theta);
        // exponential search for an upper bracket
        let mut hi = 1u64;
        let mut lo = 0u64; // es(lo) < t, with lo = 0 meaning "before the start"
        loop {
            if eval(hi, t)? >= t {
                break;
            }
            lo = hi;
            hi = hi.checked_mul(2).ok_or(Error::Exhausted { evaluations: 0, threshold: t })?;
        }
        while hi - lo > 1 {
            let mid = lo + (hi - lo) / 2;
            if eval(mid, t)? >= t {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        out.push(hi);
    }
    Ok(out)
}

/// Pointwise ratio `S_n / E S_n`.
pub fn normalized_sum_trajectory(partial_sums: &[f64], expected: &[f64]) -> Result<Vec<f64>> {
    if partial_sums.len() != expected.len() {
        return Err(Error::domain(format!(
            "length mismatch: {} partial sums vs {} expectations",
            partial_sums.len(),
            expected.len()
        )));
    }
    partial_sums
        .iter()
        .zip(expected)
        .map(|(&s, &e)| {
            if e > 0.0 {
                Ok(s / e)
            } else {
                Err(Error::domain(format!("expected partial sum must be positive, got {e}")))
            }
        })
        .collect()
}

/// Smallest `x0 > e^e` such that `log x (log log x)^gamma / x <= c` for every
/// `x >= x0`. With `var S_n <= E S_n` this is where the variance check passes.
pub fn indicator_mean_cutoff(gamma: f64, c: f64) -> Result<f64> {
    check_gamma(gamma)?;
    if !(c > 0.0) {
        return Err(Error::domain("threshold must be positive"));
    }
    let g = |x: f64| x.ln() * x.ln().ln().powf(gamma) / x;
    // g increases then decreases; walk a geometric grid past its peak
    let mut x = E_POW_E * (1.0 + 1e-12);
    let mut prev = g(x);
    loop {
        let next = x * 1.5;
        let gn = g(next);
        if gn < prev && gn <= c {
            break;
        }
        x = next;
        prev = gn;
        if !x.is_finite() {
            return Err(Error::domain("cutoff overflowed"));
        }
    }
    let start = x;
    if g(start) <= c && g(start * 1.5) <= c && start <= E_POW_E * 1.01 {
        return Ok(start);
    }
    // bisection on the decreasing branch between start and 1.5 start
    let (mut lo, mut hi) = (start, start * 1.5);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if g(mid) <= c {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(hi)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use std::f64::consts::E;

    #[test]
    fn independent_walk_returns_settle_near_one() {
        use crate::rng::{stream, BitReader};
        use crate::walks::exact_simple_walk_prob;
        // walk i has length 2 ceil(sqrt i) and is independent of the others
        let mut rng = stream(2024, 0);
        let mut bits = BitReader::new();
        let (mut hits, mut expect) = (0.0, 0.0);
        let (mut s, mut e) = (Vec::new(), Vec::new());
        for i in 1..=20_000u64 {
            let len = 2 * (i as f64).sqrt().ceil() as u64;
            hits += f64::from(u8::from(bits.count_ones(&mut rng, len) == len / 2));
            expect += exact_simple_walk_prob(len, 0).prob;
            s.push(hits);
            e.push(expect);
        }
        let traj = normalized_sum_trajectory(&s, &e).unwrap();
        let last_out = traj.iter().rposition(|r| !(0.9..=1.1).contains(r)).unwrap_or(0);
        assert!(last_out < 10_000, "left the band at index {last_out}");
    }

    #[test]
    fn chebyshev_examples() {
        assert_eq!(chebyshev_deviation_bound(10.0, 0.0, 0.1).unwrap(), 0.0);
        assert!((chebyshev_deviation_bound(10.0, 1.0, 0.1).unwrap() - 1.0).abs() < 1e-15);
        assert!(chebyshev_deviation_bound(0.0, 1.0, 0.1).is_err());
        assert!(chebyshev_deviation_bound(1.0, 1.0, 0.0).is_err());
        assert!(chebyshev_deviation_bound(1.0, -1.0, 0.1).is_err());
    }

    #[test]
    fn chebyshev_at_variance_equality() {
        // substitute var = es^2 / (log es (log log es)^2) and simplify by hand:
        // bound = 1 / (sigma^2 log es (log log es)^2)
        let es = E.powf(E) * 100.0;
        let var = es * es / (es.ln() * es.ln().ln().powi(2));
        let sigma = 0.5;
        let composed = chebyshev_deviation_bound(es, var, sigma).unwrap();
        let closed = 1.0 / (sigma * sigma * es.ln() * es.ln().ln().powi(2));
        assert!((composed / closed - 1.0).abs() < 1e-13);
        assert!((closed - 0.137_773_580_250_879_3).abs() < 1e-15, "{closed}");
    }

    fn series(es: Vec<f64>, var: Vec<f64>) -> SummandSeries {
        SummandSeries::new(1, es, Some(var), 1.0).unwrap()
    }

    #[test]
    fn equality_case_ratio_is_one() {
        let es: Vec<f64> = (1..=2000).map(|n| n as f64).collect();
        let var: Vec<f64> =
            es.iter().map(|&e| if e > E { e * e / (e.ln() * e.ln().ln().powi(2)) } else { 0.0 }).collect();
        let r = check_variance_condition(&series(es, var), 2.0, 1.0, 1).unwrap();
        assert!((r.ratio_sup - 1.0).abs() < 1e-12);
        assert!(r.passes);
        assert_eq!(r.skipped, 2); // n = 1, 2 have E S_n <= e
    }

    #[test]
    fn maximal_violation_fails() {
        let es: Vec<f64> = (1..=5000).map(|n| n as f64).collect();
        let var: Vec<f64> = es.iter().map(|e| e * e).collect();
        let r = check_variance_condition(&series(es, var), 1.5, 10.0, 1).unwrap();
        assert!(!r.passes);
        assert_eq!(r.argmax, Some(5000));
    }

    #[test]
    fn pairwise_independent_indicators_pass() {
        // var S_n = E S_n; the normalized variance decays like log x (log log x)^g / x
        let es: Vec<f64> = (1..=100_000).map(|n| (n as f64).sqrt()).collect();
        let var = es.clone();
        let s = series(es, var);
        let cutoff = indicator_mean_cutoff(1.5, 0.1).unwrap();
        let n_min = (cutoff * cutoff).ceil() as u64;
        assert!(n_min < 100_000);
        let r = check_variance_condition(&s, 1.5, 0.1, n_min).unwrap();
        assert!(r.passes, "{r:?}");
        assert!(r.ratio_sup <= 0.1);
    }

    #[test]
    fn missing_variances_and_bad_gamma_rejected() {
        let s = SummandSeries::new(1, vec![1.0, 2.0], None, 1.0).unwrap();
        assert!(check_variance_condition(&s, 2.0, 1.0, 1).is_err());
        let s = series(vec![1.0, 2.0], vec![0.0, 0.0]);
        assert!(check_variance_condition(&s, 1.0, 1.0, 1).is_err());
        assert!(SummandSeries::new(1, vec![2.0, 1.0], None, 1.0).is_err());
        assert!(SummandSeries::new(1, vec![1.0], Some(vec![-1.0]), 1.0).is_err());
    }

    #[test]
    fn pairwise_cov_examples() {
        let zeros = vec![0.0; 1000];
        let r = check_pairwise_cov_condition(&zeros, 0.5, 2.0, 1e-9).unwrap();
        assert_eq!(r.ratio_sup, 0.0);
        assert!(r.passes);
        assert_eq!(r.skipped, 15);

        let squares: Vec<f64> = (1..=1000).map(|n| (n * n) as f64).collect();
        let r = check_pairwise_cov_condition(&squares, 0.5, 2.0, 10.0).unwrap();
        assert!(!r.passes);

        let equality: Vec<f64> = (1..=1000u64)
            .map(|n| {
                let n = n as f64;
                if n > E {
                    n * n / (n.ln() * n.ln().ln().powi(2))
                } else {
                    0.0
                }
            })
            .collect();
        let r = check_pairwise_cov_condition(&equality, 0.5, 2.0, 1.0).unwrap();
        assert!((r.ratio_sup - 1.0).abs() < 1e-12);
    }

    #[test]
    fn subsequence_examples() {
        let es = |n: u64| n as f64;
        let ks = proof_subsequence(es, 1.0, 3, DEFAULT_SEARCH_CAP).unwrap();
        // k = 2: e^{2/log 2} = 17.91..., k = 3: e^{3/log 3} = 15.35...
        assert_eq!(ks, vec![18, 16]);
    }

    #[test]
    fn subsequence_exhaustion() {
        let bounded = |n: u64| (n as f64).min(10.0);
        let err = proof_subsequence(bounded, 1.0, 5, 1000).unwrap_err();
        assert!(matches!(err, Error::Exhausted { .. }));
        let err = proof_subsequence(|n| n as f64, 1.0, 40, 10).unwrap_err();
        assert!(matches!(err, Error::Exhausted { .. }));
    }

    #[test]
    fn normalized_trajectory_examples() {
        let e = vec![1.0, 2.0, 4.0];
        assert_eq!(normalized_sum_trajectory(&e, &e).unwrap(), vec![1.0; 3]);
        let twice: Vec<f64> = e.iter().map(|v| 2.0 * v).collect();
        assert_eq!(normalized_sum_trajectory(&twice, &e).unwrap(), vec![2.0; 3]);
        assert!(normalized_sum_trajectory(&e, &[1.0, 0.0, 1.0]).is_err());
        assert!(normalized_sum_trajectory(&e, &[1.0]).is_err());
    }

    proptest! {
        #[test]
        fn chebyshev_monotone_and_linear(
            es in 0.1f64..1e6, var in 0.0f64..1e6, sigma in 0.01f64..10.0,
            f in 1.01f64..10.0,
        ) {
            let b = chebyshev_deviation_bound(es, var, sigma).unwrap();
            prop_assert!(chebyshev_deviation_bound(es, var, sigma * f).unwrap() <= b);
            prop_assert!(chebyshev_deviation_bound(es * f, var, sigma).unwrap() <= b);
            let scaled = chebyshev_deviation_bound(es, var * f, sigma).unwrap();
            prop_assert!((scaled - f * b).abs() <= 1e-12 * scaled.abs().max(1e-300));
        }

        #[test]
        fn subsequence_satisfies_inf_property(
            increments in proptest::collection::vec(0.0f64..3.0, 1..50),
            theta in 0.2f64..2.0,
        ) {
            // random nondecreasing, unbounded es_eval: periodic increments plus a drift
            let inc = increments.clone();
            let es = move |n: u64| {
                let period = inc.len() as u64;
                let full: f64 = inc.iter().sum::<f64>() + 0.5;
                let rem: f64 = inc[..((n % period) as usize)].iter().sum();
                (n / period) as f64 * full + rem + 0.5 * (n % period) as f64 / period as f64
            };
            let k_max = 30;
            let ks = proof_subsequence(&es, theta, k_max, DEFAULT_SEARCH_CAP).unwrap();
            for (idx, &nk) in ks.iter().enumerate() {
                let k = idx as u64 + 2;
                let t = subsequence_threshold(k, theta);
                prop_assert!(es(nk) >= t);
                if nk > 1 {
                    prop_assert!(es(nk - 1) < t);
                }
            }
            let monotone_from = theta.exp().floor() as u64 + 1;
            for w in ks.windows(2).enumerate().filter(|(i, _)| *i as u64 + 2 >= monotone_from) {
                prop_assert!(w.1[0] <= w.1[1]);
            }
        }

        #[test]
        fn indicator_series_pass_beyond_cutoff(
            gamma in 1.01f64..3.0, c in 0.05f64..2.0, shrink in 0.0f64..1.0,
        ) {
            // E S_n = n^0.1 and var S_n <= E S_n
            let x0 = indicator_mean_cutoff(gamma, c).unwrap();
            let n0 = x0.powf(10.0).ceil();
            prop_assume!(n0 < 1e15);
            let first = n0 as u64;
            let es: Vec<f64> = (0..200).map(|k| ((first + k * 1000) as f64).powf(0.1)).collect();
            let var: Vec<f64> = es.iter().map(|e| e * shrink).collect();
            // entries are every 1000th index; the check only sees the listed values
            let s = SummandSeries::new(first, es, Some(var), 1.0).unwrap();
            let r = check_variance_condition(&s, gamma, c, first).unwrap();
            prop_assert!(r.passes, "{:?}", r);
        }
    }
}
