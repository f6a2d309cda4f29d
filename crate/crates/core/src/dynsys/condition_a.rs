//! Fitting the annulus condition `mu({r < d(x, x0) < r + eps}) < C eps^delta`.

use serde::Serialize;

use crate::dynsys::systems::BallSpace;
use crate::numeric::linear_fit;
use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConditionAFit {
    /// Fitted exponent (slope of log annulus against log eps).
    pub delta: f64,
    /// Fitted constant `exp(intercept)`.
    pub c: f64,
    pub slope_std_err: f64,
    /// `(eps, max_r annulus(r, eps))` pairs that entered the fit.
    pub points: Vec<(f64, f64)>,
    /// Number of eps values dropped because every annulus had measure zero.
    pub zero_annuli: usize,
    /// Largest radius of the grid (the `r_0` actually used).
    pub r0: f64,
}

/// For each `eps`, takes the worst annulus over `radii` and regresses
/// `log annulus` on `log eps`.
pub fn check_condition_a<S: BallSpace>(
    space: &S,
    x0: S::Point,
    radii: &[f64],
    epsilons: &[f64],
) -> Result<ConditionAFit> {
    if radii.is_empty() || epsilons.len() < 2 {
        return Err(Error::domain("need at least one radius and two widths"));
    }
    if epsilons.iter().any(|&e| !(e > 0.0 && e <= 1.0)) || radii.iter().any(|&r| !(r >= 0.0)) {
        return Err(Error::domain("widths must lie in (0, 1] and radii be nonnegative"));
    }
    let inner: Vec<f64> = radii.iter().map(|&r| space.ball_measure(x0, r)).collect();
    let mut points = Vec::new();
    let mut zero_annuli = 0;
    for &eps in epsilons {
        let worst = radii.iter().zip(&inner).map(|(&r, &m)| space.ball_measure(x0, r + eps) - m).fold(0.0, f64::max);
        if worst > 0.0 {
            points.push((eps, worst));
        } else {
            zero_annuli += 1;
        }
    }
    if points.len() < 2 || zero_annuli * 2 > epsilons.len() {
        return Err(Error::Degenerate(format!("{zero_annuli} of {} widths have only null annuli", epsilons.len())));
    }
    let xs: Vec<f64> = points.iter().map(|p| p.0.ln()).collect();
    let ys: Vec<f64> = points.iter().map(|p| p.1.ln()).collect();
    let fit = linear_fit(&xs, &ys).ok_or_else(|| Error::Degenerate("widths are all equal".into()))?;
    Ok(ConditionAFit {
        delta: fit.slope,
        c: fit.intercept.exp(),
        slope_std_err: fit.slope_std_err,
        points,
        zero_annuli,
        r0: radii.iter().copied().fold(0.0, f64::max),
    })
}

/// Geometric grid `hi, hi q, hi q^2, ...` of `count` values.
pub fn geometric_grid(hi: f64, q: f64, count: usize) -> Vec<f64> {
    (0..count).map(|k| hi * q.powi(k as i32)).collect()
}

/// Radii for the Cantor measure at `0`: a geometric grid plus the left ends
/// `2 * 3^-j` of construction intervals, where the staircase is steepest.
pub fn cantor_radii(levels: u32) -> Vec<f64> {
    let mut r: Vec<f64> = (1..=levels).map(|j| 2.0 * 3f64.powi(-(j as i32))).collect();
    r.extend(geometric_grid(0.3, 0.5, 20));
    r.push(0.0);
    r
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dynsys::systems::{MapSystem, ProductSystem};

    #[test]
    fn lebesgue_is_exactly_linear() {
        let d = MapSystem::doubling();
        let radii = geometric_grid(0.2, 0.7, 10);
        let eps = geometric_grid(0.1, 0.5, 15);
        let fit = check_condition_a(&d, 0.3, &radii, &eps).unwrap();
        assert!((fit.delta - 1.0).abs() < 1e-6);
        assert!((fit.c - 2.0).abs() < 1e-6);
    }

    #[test]
    fn cantor_exponent() {
        let c = MapSystem::tripling_cantor();
        let eps = geometric_grid(0.1, 0.3, 20);
        let fit = check_condition_a(&c, 0.0, &cantor_radii(25), &eps).unwrap();
        assert!((fit.delta - 0.630_929_753_571_457_4).abs() < 0.05, "{fit:?}");
    }

    #[test]
    fn product_exponent_at_least_half() {
        let p = ProductSystem::new();
        let radii = geometric_grid(0.4, 0.6, 12);
        let eps = geometric_grid(0.05, 0.3, 10);
        let fit = check_condition_a(&p, (0.0, 0.5), &radii, &eps).unwrap();
        assert!(fit.delta >= 0.45, "{fit:?}");
    }

    #[test]
    fn degenerate_grid() {
        // balls far outside the Cantor set's support gaps: (0.4, 0.6) is a gap
        let c = MapSystem::tripling_cantor();
        let err = check_condition_a(&c, 0.5, &[0.0, 0.01], &[0.01, 0.02, 0.05]).unwrap_err();
        assert!(matches!(err, Error::Degenerate(_)));
    }
}
