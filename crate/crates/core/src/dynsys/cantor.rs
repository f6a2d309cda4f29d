//! The middle-third Cantor measure: its distribution function (the devil's
//! staircase) and integrals against it.

use crate::dynsys::orbit::DigitSource;

const STAIRCASE_DIGITS: usize = 64;

/// `F(x) = nu([0, x])` for the Cantor measure `nu`.
///
/// Reads ternary digits of `x` exactly: every `2` contributes the matching
/// binary digit, and the first `1` means `x` sits in a removed gap, where `F`
/// is flat. Accurate to `2^-64`.
pub fn cantor_cdf(x: f64) -> f64 {
    if !(x > 0.0) {
        return 0.0;
    }
    if x >= 1.0 {
        return 1.0;
    }
    let mut digits = DigitSource::of_f64(x, 3);
    let mut f = 0.0;
    let mut w = 0.5;
    for _ in 0..STAIRCASE_DIGITS {
        match digits.next_digit() {
            0 => {}
            1 => return f + w,
            _ => f += w,
        }
        w *= 0.5;
    }
    f
}

/// `nu([lo, hi])`; the measure has no atoms so open and closed agree.
pub fn cantor_interval_measure(lo: f64, hi: f64) -> f64 {
    if hi < lo {
        return 0.0;
    }
    (cantor_cdf(hi) - cantor_cdf(lo)).max(0.0)
}

const MIN_DEPTH: u32 = 3;
const MAX_DEPTH: u32 = 38;

/// `int g dnu` by adaptive midpoint quadrature on the Cantor construction
/// intervals.
///
/// On a construction interval of length `L` the Cantor measure has variance
/// `L^2/8`, so the one-point midpoint rule errs by `g'' L^2/16` per unit mass
/// and refining once divides that by 9; the parent/children difference gives a
/// Richardson correction and an acceptance test. Intervals containing one of
/// the `kinks` (points where `g` is not smooth) are always refined, down to a
/// depth where their mass is negligible.
pub fn cantor_integral<G: Fn(f64) -> f64>(g: &G, kinks: &[f64], tol: f64) -> f64 {
    refine(g, kinks, tol, 0.0, 1.0, 0, 1.0)
}

fn refine<G: Fn(f64) -> f64>(g: &G, kinks: &[f64], tol: f64, lo: f64, len: f64, depth: u32, mass: f64) -> f64 {
    let third = len / 3.0;
    let parent = g(lo + 0.5 * len) * mass;
    let children = 0.5 * mass * (g(lo + 0.5 * third) + g(lo + 2.5 * third));
    if depth >= MAX_DEPTH {
        return children;
    }
    let kinked = kinks.iter().any(|&k| lo <= k && k <= lo + len);
    if !kinked && depth >= MIN_DEPTH && (children - parent).abs() <= tol * mass {
        return children + (children - parent) / 8.0;
    }
    refine(g, kinks, tol, lo, third, depth + 1, 0.5 * mass)
        + refine(g, kinks, tol, lo + 2.0 * third, third, depth + 1, 0.5 * mass)
}
