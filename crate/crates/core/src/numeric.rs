//! Numerical building blocks: guarded iterated logarithms, the binomial
//! probability mass function in saddle-point form, the normal density and
//! ordinary least squares.

use std::f64::consts::{E, PI};

/// `e^e`, below which `ln ln ln x` is not positive.
pub const E_POW_E: f64 = 15.154_262_241_479_262;

/// `ln ln x`, defined for `x > e` (positive there).
#[inline]
pub fn ln_ln(x: f64) -> Option<f64> {
    (x > E).then(|| x.ln().ln())
}

/// `ln ln ln x`, defined for `x > e^e`.
#[inline]
pub fn ln_ln_ln(x: f64) -> Option<f64> {
    (x > E_POW_E).then(|| x.ln().ln().ln())
}

/// Standard normal density.
#[inline]
pub fn normal_pdf(x: f64) -> f64 {
    (-0.5 * x * x).exp() / (2.0 * PI).sqrt()
}

// ln(n!) - ln(sqrt(2 pi n) (n/e)^n) for n = 0..=15.
const STIRLERR_SMALL: [f64; 16] = [
    0.0,
    0.081_061_466_795_327_26,
    0.041_340_695_955_409_29,
    0.027_677_925_684_998_34,
    0.020_790_672_103_765_09,
    0.016_644_691_189_821_19,
    0.013_876_128_823_070_75,
    0.011_896_709_945_891_77,
    0.010_411_265_261_972_09,
    0.009_255_462_182_712_733,
    0.008_330_563_433_362_87,
    0.007_573_675_487_951_841,
    0.006_942_840_107_209_53,
    0.006_408_994_188_004_207,
    0.005_951_370_112_758_848,
    0.005_554_733_551_962_801,
];

/// Stirling-series remainder `ln n! - ln(sqrt(2 pi n) (n/e)^n)` for integer `n`.
pub fn stirlerr(n: u64) -> f64 {
    const S0: f64 = 1.0 / 12.0;
    const S1: f64 = 1.0 / 360.0;
    const S2: f64 = 1.0 / 1260.0;
    const S3: f64 = 1.0 / 1680.0;
    const S4: f64 = 1.0 / 1188.0;
    if n <= 15 {
        return STIRLERR_SMALL[n as usize];
    }
    let n = n as f64;
    let nn = n * n;
    if n > 500.0 {
        (S0 - S1 / nn) / n
    } else if n > 80.0 {
        (S0 - (S1 - S2 / nn) / nn) / n
    } else if n > 35.0 {
        (S0 - (S1 - (S2 - S3 / nn) / nn) / nn) / n
    } else {
        (S0 - (S1 - (S2 - (S3 - S4 / nn) / nn) / nn) / nn) / n
    }
}

/// Deviance term `x ln(x/m) + m - x`, accurate when `x` is close to `m`.
pub fn bd0(x: f64, m: f64) -> f64 {
    if (x - m).abs() < 0.1 * (x + m) {
        let mut v = (x - m) / (x + m);
        let mut s = (x - m) * v;
        let mut ej = 2.0 * x * v;
        v *= v;
        let mut j = 1.0;
        loop {
            ej *= v;
            let s1 = s + ej / (2.0 * j + 1.0);
            if s1 == s {
                return s1;
            }
            s = s1;
            j += 1.0;
        }
    }
    x * (x / m).ln() + m - x
}

/// `P(Bin(n, p) = k)` in Loader's saddle-point form.
///
/// Works entirely with log-factorial remainders and deviances, so the
/// relative error stays near machine precision even for `n` in the billions,
/// where subtracting three `ln Γ` values would lose most digits.
pub fn binomial_pmf(k: u64, n: u64, p: f64) -> f64 {
    if k > n {
        return 0.0;
    }
    let q = 1.0 - p;
    if p == 0.0 {
        return if k == 0 { 1.0 } else { 0.0 };
    }
    if q == 0.0 {
        return if k == n { 1.0 } else { 0.0 };
    }
    let nf = n as f64;
    if k == 0 {
        if n == 0 {
            return 1.0;
        }
        let lc = if p < 0.1 { -bd0(nf, nf * q) - nf * p } else { nf * q.ln() };
        return lc.exp();
    }
    if k == n {
        let lc = if q < 0.1 { -bd0(nf, nf * p) - nf * q } else { nf * p.ln() };
        return lc.exp();
    }
    let kf = k as f64;
    let lc = stirlerr(n) - stirlerr(k) - stirlerr(n - k) - bd0(kf, nf * p) - bd0(nf - kf, nf * q);
    let lf = (2.0 * PI).ln() + kf.ln() + (-kf / nf).ln_1p();
    (lc - 0.5 * lf).exp()
}

/// Result of an ordinary least-squares line fit `y = intercept + slope x`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LinearFit {
    pub slope: f64,
    pub intercept: f64,
    /// Standard error of the slope; zero for exact fits and for two points.
    pub slope_std_err: f64,
}

/// Ordinary least squares; needs at least two distinct abscissae.
pub fn linear_fit(xs: &[f64], ys: &[f64]) -> Option<LinearFit> {
    let n = xs.len();
    if n < 2 || ys.len() != n {
        return None;
    }
    let nf = n as f64;
    let mx = xs.iter().sum::<f64>() / nf;
    let my = ys.iter().sum::<f64>() / nf;
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    if sxx <= 0.0 {
        return None;
    }
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let slope_std_err = if n > 2 {
        let rss: f64 = xs
            .iter()
            .zip(ys)
            .map(|(x, y)| {
                let r = y - intercept - slope * x;
                r * r
            })
            .sum();
        (rss / (nf - 2.0) / sxx).sqrt()
    } else {
        0.0
    };
    Some(LinearFit { slope, intercept, slope_std_err })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ln_factorial_exact(n: u64) -> f64 {
        (1..=n).map(|k| k as f64).product::<f64>().ln()
    }

    #[test]
    fn stirlerr_table_matches_definition() {
        for n in 1..=15u64 {
            let nf = n as f64;
            let direct = ln_factorial_exact(n) - (nf + 0.5) * nf.ln() + nf - 0.5 * (2.0 * PI).ln();
            assert!((stirlerr(n) - direct).abs() < 1e-13, "n={n}");
        }
        // series branches agree with the definition where ln n! is still exact
        for n in [16u64, 20, 30, 36, 50, 81, 100, 170] {
            let nf = n as f64;
            let lnf: f64 = (1..=n).map(|k| (k as f64).ln()).sum();
            let direct = lnf - (nf + 0.5) * nf.ln() + nf - 0.5 * (2.0 * PI).ln();
            assert!((stirlerr(n) - direct).abs() < 1e-12, "n={n}");
        }
    }

    #[test]
    fn small_binomials_exact() {
        assert!((binomial_pmf(1, 2, 0.5) - 0.5).abs() < 1e-15);
        assert!((binomial_pmf(2, 4, 0.5) - 0.375).abs() < 1e-15);
        assert!((binomial_pmf(0, 10, 0.5) - 2f64.powi(-10)).abs() < 1e-18);
        assert_eq!(binomial_pmf(11, 10, 0.5), 0.0);
        let total: f64 = (0..=40).map(|k| binomial_pmf(k, 40, 0.3)).sum();
        assert!((total - 1.0).abs() < 1e-14);
    }

    #[test]
    fn iterated_logs_guarded() {
        assert!(ln_ln(E).is_none());
        assert!(ln_ln(3.0).unwrap() > 0.0);
        assert!(ln_ln_ln(15.0).is_none());
        assert!(ln_ln_ln(16.0).unwrap() > 0.0);
    }

    #[test]
    fn linear_fit_exact_line() {
        let xs = [1.0, 2.0, 3.0, 4.0];
        let ys: Vec<f64> = xs.iter().map(|x| 3.0 - 0.5 * x).collect();
        let fit = linear_fit(&xs, &ys).unwrap();
        assert!((fit.slope + 0.5).abs() < 1e-14);
        assert!((fit.intercept - 3.0).abs() < 1e-14);
        assert!(fit.slope_std_err < 1e-12);
        assert!(linear_fit(&[1.0, 1.0], &[0.0, 1.0]).is_none());
    }
}
