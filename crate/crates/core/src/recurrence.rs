//! Quantitative recurrence: how often `T^n x` comes within `kappa(n) n^{-beta/alpha}`
//! (or `kappa(n) n^{-1/alpha}`) of a target `x0`, with the pointwise
//! dimension and lower density that set the exponents.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::dbc::{geometric_checkpoints, invert_ball_measure, DEFAULT_CHECKPOINT_RATIO};
use crate::dynsys::{BallSpace, MapSystem, SystemKind};
use crate::numeric::{linear_fit, ln_ln};
use crate::{par, rng, Error, Result};

/// Lower densities above this are reported as `+inf`.
pub const DENSITY_OVERFLOW: f64 = 1e12;

/// Which counting regime: polynomial decay of correlations (normalizer
/// `N^{1-beta} (log N)^gamma`) or `beta`-exponential decay (normalizer
/// `(log N)^{1/beta} (log log N)^gamma`).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "regime", rename_all = "snake_case")]
pub enum Regime {
    /// `delta` is the annulus exponent at `x0`.
    Poly {
        delta: f64,
    },
    Exp,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kappa", rename_all = "snake_case")]
pub enum KappaMode {
    /// Radii from inverting the ball measure; limit constant `1`.
    Generic,
    /// Closed-form `kappa` with the lower density `theta` as limit constant.
    Density { theta: f64 },
    /// A fixed `kappa`; the limit constant is `theta`.
    Constant { value: f64, theta: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RecurrenceParams {
    x0: f64,
    alpha: f64,
    beta: f64,
    gamma: f64,
    regime: Regime,
    kappa: KappaMode,
}

impl RecurrenceParams {
    /// Checks the hypotheses of the counting limit for the chosen regime:
    /// `0 < beta < 1` and `gamma > 1 + (2 - delta)(1 - beta)/(2 + delta)` for
    /// [`Regime::Poly`]; `beta > 0` and `gamma > 1` for [`Regime::Exp`].
    pub fn new(x0: f64, alpha: f64, beta: f64, gamma: f64, regime: Regime, kappa: KappaMode) -> Result<Self> {
        if !(alpha > 0.0 && alpha.is_finite()) {
            return Err(Error::domain(format!("alpha must be positive, got {alpha}")));
        }
        match regime {
            Regime::Poly { delta } => {
                if !(delta > 0.0 && delta < 2.0) {
                    return Err(Error::domain(format!("delta must lie in (0, 2), got {delta}")));
                }
                if !(beta > 0.0 && beta < 1.0) {
                    return Err(Error::domain(format!("beta must lie in (0, 1), got {beta}")));
                }
                let g = 1.0 + (2.0 - delta) * (1.0 - beta) / (2.0 + delta);
                if !(gamma > g) {
                    return Err(Error::domain(format!("gamma = {gamma} must exceed {g}")));
                }
            }
            Regime::Exp => {
                if !(beta > 0.0) {
                    return Err(Error::domain(format!("beta must be positive, got {beta}")));
                }
                if !(gamma > 1.0) {
                    return Err(Error::domain(format!("gamma = {gamma} must exceed 1")));
                }
            }
        }
        match kappa {
            KappaMode::Density { theta } | KappaMode::Constant { theta, .. } => {
                if theta == f64::INFINITY {
                    return Err(Error::Unsupported("the infinite-density branch has no stated limit".into()));
                }
                if !(theta > 0.0 && theta.is_finite()) {
                    return Err(Error::domain(format!("density must be positive and finite, got {theta}")));
                }
            }
            KappaMode::Generic => {}
        }
        if let KappaMode::Constant { value, .. } = kappa {
            if !(value >= 0.0 && value.is_finite()) {
                return Err(Error::domain(format!("kappa must be a nonnegative number, got {value}")));
            }
        }
        Ok(Self { x0, alpha, beta, gamma, regime, kappa })
    }

    pub fn x0(&self) -> f64 {
        self.x0
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    pub fn regime(&self) -> Regime {
        self.regime
    }

    pub fn kappa_mode(&self) -> KappaMode {
        self.kappa
    }

    /// `theta` in the limit: the supplied density, or `1` for generic radii.
    pub fn theta(&self) -> f64 {
        match self.kappa {
            KappaMode::Generic => 1.0,
            KappaMode::Density { theta } | KappaMode::Constant { theta, .. } => theta,
        }
    }

    /// `theta / (1 - beta)` or `theta beta`.
    pub fn predicted_limit(&self) -> f64 {
        match self.regime {
            Regime::Poly { .. } => self.theta() / (1.0 - self.beta),
            Regime::Exp => self.theta() * self.beta,
        }
    }

    /// First index where `kappa` is defined: `2`, or `16` when `log log` enters.
    pub fn first_index(&self) -> u64 {
        match self.regime {
            Regime::Poly { .. } => 2,
            Regime::Exp => 16,
        }
    }

    /// `n^{-beta/alpha}` or `n^{-1/alpha}`: the scale `kappa` multiplies.
    fn scale(&self, n: f64) -> f64 {
        match self.regime {
            Regime::Poly { .. } => n.powf(-self.beta / self.alpha),
            Regime::Exp => n.powf(-1.0 / self.alpha),
        }
    }

    /// Target ball measure `n^-beta (log n)^gamma` or
    /// `n^-1 (log n)^{1/beta - 1} (log log n)^gamma`.
    pub fn target_measure(&self, n: f64) -> f64 {
        match self.regime {
            Regime::Poly { .. } => n.powf(-self.beta) * n.ln().powf(self.gamma),
            Regime::Exp => n.recip() * n.ln().powf(1.0 / self.beta - 1.0) * n.ln().ln().powf(self.gamma),
        }
    }

    /// Normalizer of the count at `n`.
    pub fn normalizer(&self, n: f64) -> f64 {
        match self.regime {
            Regime::Poly { .. } => n.powf(1.0 - self.beta) * n.ln().powf(self.gamma),
            Regime::Exp => n.ln().powf(1.0 / self.beta) * ln_ln(n).unwrap_or(f64::NAN).powf(self.gamma),
        }
    }
}

/// Closed-form correction factors.
///
/// Polynomial regime: `max(1, C(r_i)^{-1/alpha} (log i)^{gamma/alpha})`, `i >= 2`.
/// Exponential regime: `(log i)^{(1/beta - 1)/alpha} (log log i)^{gamma/alpha}`,
/// `i >= 16`; `c_ri` is not used there.
pub fn kappa(regime: Regime, i: f64, c_ri: f64, alpha: f64, beta: f64, gamma: f64) -> Result<f64> {
    if !(c_ri > 0.0) {
        return Err(Error::domain(format!("C(r_i) must be positive, got {c_ri}")));
    }
    match regime {
        Regime::Poly { .. } => {
            if !(i >= 2.0) {
                return Err(Error::Range { what: "kappa index", min: 2.0, got: i });
            }
            Ok(c_ri.powf(-1.0 / alpha) * i.ln().powf(gamma / alpha)).map(|v| v.max(1.0))
        }
        Regime::Exp => {
            if !(i >= 16.0) {
                return Err(Error::Range { what: "kappa index", min: 16.0, got: i });
            }
            Ok(i.ln().powf((1.0 / beta - 1.0) / alpha) * i.ln().ln().powf(gamma / alpha))
        }
    }
}

/// Distance thresholds `t_n = kappa(n) * scale(n)` for `n = 0..=n_max`; `n` is
/// counted when `d(T^n x, x0) < t_n`. Entries below the first index are `0`.
///
/// Generic mode inverts `mu(B(x0, r_n)) = target(n)` on `system`, which makes
/// `t_n = max(scale(n), r_n)`; each inversion is a bisection except on the
/// doubling map.
pub fn thresholds(system: &MapSystem, params: &RecurrenceParams, n_max: u64) -> Result<Vec<f64>> {
    let first = params.first_index();
    let mut out = vec![0.0; n_max as usize + 1];
    for n in first..=n_max {
        let nf = n as f64;
        let scale = params.scale(nf);
        out[n as usize] = match params.kappa {
            KappaMode::Constant { value, .. } => value * scale,
            KappaMode::Density { .. } => match params.regime {
                Regime::Poly { .. } => nf.ln().powf(params.gamma / params.alpha) * scale,
                Regime::Exp => kappa(params.regime, nf, 1.0, params.alpha, params.beta, params.gamma)? * scale,
            },
            KappaMode::Generic => {
                let target = params.target_measure(nf);
                if target >= 1.0 {
                    // every point is within r_n; count unconditionally
                    f64::INFINITY
                } else {
                    scale.max(invert_ball_measure(system, params.x0, target)?)
                }
            }
        };
    }
    Ok(out)
}

/// Digit-shift orbits of a double stay faithful for this many steps.
pub fn precision_budget(system: &MapSystem) -> Option<u64> {
    match system.kind() {
        SystemKind::Doubling => Some(52),
        SystemKind::TriplingCantor => Some(33),
        SystemKind::MannevillePomeau { .. } => None,
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CountTrajectory {
    pub checkpoints: Vec<u64>,
    pub counts: Vec<u64>,
    pub normalized: Vec<f64>,
    pub predicted_limit: f64,
    pub theta: f64,
}

/// Streams `T x, T^2 x, ...` and counts `n <= N` with `d(T^n x, x0) < t_n`.
pub fn count_along(
    system: &MapSystem,
    params: &RecurrenceParams,
    thresholds: &[f64],
    orbit: impl Iterator<Item = f64>,
    checkpoints: &[u64],
) -> Result<CountTrajectory> {
    let n_max = *checkpoints.last().ok_or_else(|| Error::domain("no checkpoints"))?;
    if thresholds.len() as u64 <= n_max {
        return Err(Error::domain("thresholds do not reach the last checkpoint"));
    }
    let metric = system.metric();
    let mut counts = Vec::with_capacity(checkpoints.len());
    let mut next = checkpoints.iter().peekable();
    let mut count = 0u64;
    for (n, y) in (1..=n_max).zip(orbit) {
        count += u64::from(metric.dist(y, params.x0) < thresholds[n as usize]);
        while next.next_if(|&&c| c == n).is_some() {
            counts.push(count);
        }
    }
    let normalized = checkpoints.iter().zip(&counts).map(|(&c, &k)| k as f64 / params.normalizer(c as f64)).collect();
    Ok(CountTrajectory {
        checkpoints: checkpoints.to_vec(),
        counts,
        normalized,
        predicted_limit: params.predicted_limit(),
        theta: params.theta(),
    })
}

/// Counting trajectory of the double `x` up to `n_max`, at geometric
/// checkpoints. Digit-shift orbits of a double degenerate after
/// [`precision_budget`] steps, so longer requests are refused; use
/// [`recurrence_ensemble`] for typical points.
pub fn count_recurrence(system: &MapSystem, x: f64, params: &RecurrenceParams, n_max: u64) -> Result<CountTrajectory> {
    if let Some(budget) = precision_budget(system) {
        if n_max > budget {
            return Err(Error::Resource(format!(
                "a double carries {budget} faithful {} steps, {n_max} requested",
                system.name()
            )));
        }
    }
    let t = thresholds(system, params, n_max)?;
    count_along(system, params, &t, system.orbit(x), &geometric_checkpoints(n_max, DEFAULT_CHECKPOINT_RATIO))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RecurrenceEnsemble {
    pub checkpoints: Vec<u64>,
    pub predicted_limit: f64,
    /// One counting trajectory per seed, in seed order.
    pub trajectories: Vec<CountTrajectory>,
}

impl RecurrenceEnsemble {
    pub fn final_normalized(&self) -> Vec<f64> {
        self.trajectories.iter().map(|t| *t.normalized.last().expect("nonempty")).collect()
    }
}

/// Counting trajectories for `x ~ mu` drawn on streams `(master_seed, seed)`.
pub fn recurrence_ensemble(
    system: &MapSystem,
    params: &RecurrenceParams,
    n_max: u64,
    seeds: &[u64],
    master_seed: u64,
    workers: usize,
) -> Result<RecurrenceEnsemble> {
    let checkpoints = geometric_checkpoints(n_max, DEFAULT_CHECKPOINT_RATIO);
    let t = thresholds(system, params, n_max)?;
    let trajectories: Vec<CountTrajectory> = par::with_workers(workers, || {
        seeds
            .par_iter()
            .map(|&s| {
                let mut rng = rng::stream(master_seed, s);
                let (_, orbit) = system.sample_orbit(&mut rng);
                count_along(system, params, &t, orbit, &checkpoints)
            })
            .collect::<Result<Vec<_>>>()
    })??;
    Ok(RecurrenceEnsemble { checkpoints, predicted_limit: params.predicted_limit(), trajectories })
}

/// Which point the return distance is measured to.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "target", rename_all = "snake_case")]
pub enum ProbeTarget {
    Fixed {
        x0: f64,
    },
    /// `d(T^n x, x)`.
    SelfReturn,
}

/// Running minimum of `n^{1/alpha} d(T^n x, target)` at each checkpoint.
pub fn liminf_probe(
    system: &MapSystem,
    x: f64,
    orbit: impl Iterator<Item = f64>,
    target: ProbeTarget,
    alpha: f64,
    checkpoints: &[u64],
) -> Result<Vec<f64>> {
    if !(alpha > 0.0) {
        return Err(Error::domain(format!("alpha must be positive, got {alpha}")));
    }
    let n_max = *checkpoints.last().ok_or_else(|| Error::domain("no checkpoints"))?;
    let x0 = match target {
        ProbeTarget::Fixed { x0 } => x0,
        ProbeTarget::SelfReturn => x,
    };
    let metric = system.metric();
    let mut out = Vec::with_capacity(checkpoints.len());
    let mut next = checkpoints.iter().peekable();
    let mut best = f64::INFINITY;
    for (n, y) in (1..=n_max).zip(orbit) {
        best = best.min((n as f64).powf(1.0 / alpha) * metric.dist(y, x0));
        while next.next_if(|&&c| c == n).is_some() {
            out.push(best);
        }
    }
    Ok(out)
}

/// Probes for `x ~ mu` on streams `(master_seed, seed)`; one row per seed.
pub fn liminf_ensemble(
    system: &MapSystem,
    target: ProbeTarget,
    alpha: f64,
    n_max: u64,
    seeds: &[u64],
    master_seed: u64,
    workers: usize,
) -> Result<Vec<Vec<f64>>> {
    let checkpoints = geometric_checkpoints(n_max, DEFAULT_CHECKPOINT_RATIO);
    par::with_workers(workers, || {
        seeds
            .par_iter()
            .map(|&s| {
                let mut rng = rng::stream(master_seed, s);
                let (x, orbit) = system.sample_orbit(&mut rng);
                liminf_probe(system, x, orbit, target, alpha, &checkpoints)
            })
            .collect::<Result<Vec<_>>>()
    })?
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DimensionEstimate {
    /// Largest `log mu(B(x0, r)) / log r` over the tail window.
    pub tail_max: f64,
    /// Slope of `log mu` against `log r` over the same window.
    pub slope: f64,
    /// `(r, log mu / log r)` over the window.
    pub window: Vec<(f64, f64)>,
}

fn tail<S: BallSpace>(space: &S, x0: S::Point, radii: &[f64]) -> Result<Vec<(f64, f64)>> {
    if space.ball_measure(x0, 0.0) > 0.0 {
        return Err(Error::domain(format!("{x0:?} is an atom")));
    }
    if radii.len() < 2 || radii.iter().any(|&r| !(r > 0.0 && r < 1.0)) || radii.windows(2).any(|w| w[1] >= w[0]) {
        return Err(Error::domain("radii must decrease within (0, 1) and number at least two"));
    }
    let start = radii.len() / 2;
    let pts: Vec<(f64, f64)> =
        radii[start..].iter().map(|&r| (r, space.ball_measure(x0, r))).filter(|p| p.1 > 0.0).collect();
    if pts.is_empty() {
        return Err(Error::Degenerate("every ball in the tail window has measure zero".into()));
    }
    Ok(pts)
}

/// Estimates `limsup_{r -> 0} log mu(B(x0, r)) / log r` from the smaller half
/// of a decreasing radius grid.
pub fn upper_pointwise_dimension<S: BallSpace>(space: &S, x0: S::Point, radii: &[f64]) -> Result<DimensionEstimate> {
    let pts = tail(space, x0, radii)?;
    let window: Vec<(f64, f64)> = pts.iter().map(|&(r, m)| (r, m.ln() / r.ln())).collect();
    let tail_max = window.iter().map(|p| p.1).fold(f64::NEG_INFINITY, f64::max);
    let xs: Vec<f64> = pts.iter().map(|p| p.0.ln()).collect();
    let ys: Vec<f64> = pts.iter().map(|p| p.1.ln()).collect();
    let slope = linear_fit(&xs, &ys).map_or(f64::NAN, |f| f.slope);
    Ok(DimensionEstimate { tail_max, slope, window })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DensityEstimate {
    /// Smallest `mu(B(x0, r)) / r^alpha` over the tail window, or `+inf`
    /// once it passes [`DENSITY_OVERFLOW`].
    pub value: f64,
    pub window: Vec<(f64, f64)>,
}

/// Estimates `liminf_{r -> 0} mu(B(x0, r)) / r^alpha`.
pub fn lower_alpha_density<S: BallSpace>(
    space: &S,
    x0: S::Point,
    alpha: f64,
    radii: &[f64],
) -> Result<DensityEstimate> {
    if !(alpha > 0.0) {
        return Err(Error::domain(format!("alpha must be positive, got {alpha}")));
    }
    let pts = tail(space, x0, radii)?;
    let window: Vec<(f64, f64)> = pts.iter().map(|&(r, m)| (r, m / r.powf(alpha))).collect();
    let min = window.iter().map(|p| p.1).fold(f64::INFINITY, f64::min);
    Ok(DensityEstimate { value: if min > DENSITY_OVERFLOW { f64::INFINITY } else { min }, window })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dbc::{trajectory_hits, BallSchedule};
    use crate::dynsys::{geometric_grid, ProductSystem};

    fn exp_density(theta: f64) -> RecurrenceParams {
        RecurrenceParams::new(0.3, 1.0, 1.0, 1.5, Regime::Exp, KappaMode::Density { theta }).unwrap()
    }

    #[test]
    fn kappa_arithmetic() {
        let e2 = std::f64::consts::E.powi(2);
        let poly = Regime::Poly { delta: 1.0 };
        assert!((kappa(poly, e2, 1.0, 1.0, 0.5, 2.0).unwrap() - 4.0).abs() < 1e-12);
        assert_eq!(kappa(poly, e2, 1e9, 1.0, 0.5, 2.0).unwrap(), 1.0);
        let i = 1e6f64;
        assert!((kappa(Regime::Exp, i, 1.0, 1.0, 1.0, 2.0).unwrap() - i.ln().ln().powi(2)).abs() < 1e-12);
        assert!(kappa(Regime::Exp, 15.0, 1.0, 1.0, 1.0, 2.0).is_err());
        assert!(kappa(poly, 1.0, 1.0, 1.0, 0.5, 2.0).is_err());
        assert!(kappa(poly, 4.0, 0.0, 1.0, 0.5, 2.0).is_err());
    }

    #[test]
    fn kappa_shapes() {
        let poly = Regime::Poly { delta: 1.0 };
        let mut prev = 0.0;
        for i in 16..5_000 {
            let i = i as f64;
            assert!(kappa(poly, i, 3.7, 1.3, 0.5, 2.0).unwrap() >= 1.0);
            let e = kappa(Regime::Exp, i, 1.0, 0.8, 0.6, 1.5).unwrap();
            assert!(e >= prev);
            prev = e;
        }
    }

    #[test]
    fn parameter_constraints() {
        let poly = Regime::Poly { delta: 1.0 };
        // threshold for beta = 1/2, delta = 1 is 7/6
        assert!(RecurrenceParams::new(0.3, 1.0, 0.5, 1.1, poly, KappaMode::Generic).is_err());
        assert!(RecurrenceParams::new(0.3, 1.0, 0.5, 1.2, poly, KappaMode::Generic).is_ok());
        assert!(RecurrenceParams::new(0.3, 1.0, 1.0, 1.0, Regime::Exp, KappaMode::Generic).is_err());
        assert!(RecurrenceParams::new(0.3, 0.0, 1.0, 1.5, Regime::Exp, KappaMode::Generic).is_err());
        let inf = RecurrenceParams::new(0.3, 1.0, 1.0, 1.5, Regime::Exp, KappaMode::Density { theta: f64::INFINITY });
        assert!(matches!(inf, Err(Error::Unsupported(_))));
        assert_eq!(exp_density(2.0).predicted_limit(), 2.0);
        let p = RecurrenceParams::new(0.3, 1.0, 0.5, 1.5, poly, KappaMode::Density { theta: 2.0 }).unwrap();
        assert_eq!(p.predicted_limit(), 4.0);
    }

    #[test]
    fn zero_kappa_never_counts() {
        let d = MapSystem::doubling();
        let p = RecurrenceParams::new(0.3, 1.0, 1.0, 1.5, Regime::Exp, KappaMode::Constant { value: 0.0, theta: 1.0 })
            .unwrap();
        let e = recurrence_ensemble(&d, &p, 10_000, &[0, 1], 3, 1).unwrap();
        for t in &e.trajectories {
            assert!(t.counts.iter().all(|&c| c == 0));
            assert!(t.normalized.iter().skip(5).all(|&v| v == 0.0));
        }
    }

    #[test]
    fn counts_are_nondecreasing_and_match_brute_force() {
        let d = MapSystem::doubling();
        let p = exp_density(2.0);
        let e = recurrence_ensemble(&d, &p, 20_000, &[0, 1, 2], 8, 1).unwrap();
        for (s, t) in e.trajectories.iter().enumerate() {
            assert!(t.counts.windows(2).all(|w| w[0] <= w[1]));
            let mut rng = rng::stream(8, s as u64);
            let (_, orbit) = d.sample_orbit(&mut rng);
            let brute = orbit
                .take(20_000)
                .enumerate()
                .filter(|&(k, y)| {
                    let n = k as f64 + 1.0;
                    n >= 16.0 && n * d.dist(y, 0.3) < n.ln().ln().powf(1.5)
                })
                .count() as u64;
            assert_eq!(*t.counts.last().unwrap(), brute);
        }
    }

    #[test]
    fn double_start_points_respect_precision() {
        let d = MapSystem::doubling();
        let p = exp_density(2.0);
        assert!(count_recurrence(&d, 0.1, &p, 40).is_ok());
        assert!(matches!(count_recurrence(&d, 0.1, &p, 1_000), Err(Error::Resource(_))));
    }

    #[test]
    fn generic_counts_equal_dbc_hits_on_equivalent_schedule() {
        let d = MapSystem::doubling();
        let p = RecurrenceParams::new(0.3, 1.0, 0.5, 1.5, Regime::Poly { delta: 1.0 }, KappaMode::Generic).unwrap();
        let n_max = 50_000u64;
        let t = thresholds(&d, &p, n_max).unwrap();
        // kappa = max(1, ...) makes the threshold at least n^{-beta/alpha}
        for n in 2..=n_max {
            assert!(t[n as usize] >= (n as f64).powf(-0.5));
        }
        let start = p.first_index();
        let radii: Vec<f64> = t[start as usize..].iter().map(|r| r.min(0.5)).collect();
        let schedule = BallSchedule::from_radii(&d, 0.3, radii).unwrap();
        let cps = [n_max - start + 1];
        for s in 0..4 {
            let mut rng = rng::stream(21, s);
            let (_, orbit) = d.sample_orbit(&mut rng);
            let traj = count_along(&d, &p, &t, orbit.clone(), &[n_max]).unwrap();
            let mut shifted = orbit;
            let y = shifted.nth(start as usize - 1).unwrap();
            let hits = trajectory_hits(&d, &schedule, y, shifted, &cps);
            assert_eq!(traj.counts[0], hits[0], "seed {s}");
        }
    }

    #[test]
    fn self_and_fixed_probes() {
        let d = MapSystem::doubling();
        let probe = liminf_probe(&d, 0.0, d.orbit(0.0), ProbeTarget::Fixed { x0: 0.0 }, 1.0, &[1, 10]).unwrap();
        assert_eq!(probe, vec![0.0, 0.0]);
        let rows = liminf_ensemble(&d, ProbeTarget::SelfReturn, 1.0, 5_000, &[0, 1, 2], 4, 1).unwrap();
        for r in rows {
            assert!(r.windows(2).all(|w| w[1] <= w[0]));
            assert!(r.last().unwrap().is_finite());
        }
    }

    #[test]
    fn dimensions_and_densities() {
        let d = MapSystem::doubling();
        // log(2r)/log r approaches 1 only like 1/log r
        let grid = geometric_grid(0.1, 0.5, 140);
        let dim = upper_pointwise_dimension(&d, 0.37, &grid).unwrap();
        assert!((dim.tail_max - 1.0).abs() < 0.01 && (dim.slope - 1.0).abs() < 1e-9, "{dim:?}");
        let den = lower_alpha_density(&d, 0.37, 1.0, &grid).unwrap();
        assert!((den.value - 2.0).abs() < 1e-12);
        assert_eq!(lower_alpha_density(&d, 0.37, 3.0, &grid).unwrap().value, f64::INFINITY);

        let c = MapSystem::tripling_cantor();
        let grid: Vec<f64> = (1..=30).map(|k| 3f64.powi(-k)).collect();
        let dim = upper_pointwise_dimension(&c, 0.0, &grid).unwrap();
        assert!((dim.tail_max - 0.630_929_753_571_457_4).abs() < 0.05, "{dim:?}");
        let alpha = 2f64.ln() / 3f64.ln();
        let den = lower_alpha_density(&c, 0.0, alpha, &grid).unwrap();
        assert!((den.value - 1.0).abs() < 1e-6, "{den:?}");

        // a gap of the Cantor set carries no mass at small radii
        assert!(matches!(upper_pointwise_dimension(&c, 0.5, &grid), Err(Error::Degenerate(_))));
    }

    #[test]
    fn product_dimension_is_subadditive() {
        let p = ProductSystem::new();
        let grid = geometric_grid(0.05, 0.5, 16);
        let joint = upper_pointwise_dimension(&p, (0.0, 0.5), &grid).unwrap();
        let cantor = upper_pointwise_dimension(&MapSystem::tripling_cantor(), 0.0, &grid).unwrap();
        let lebesgue = upper_pointwise_dimension(&MapSystem::doubling(), 0.5, &grid).unwrap();
        assert!(joint.tail_max <= cantor.tail_max + lebesgue.tail_max + 0.05, "{joint:?}");
    }
}
