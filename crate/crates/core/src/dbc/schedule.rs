//! Ball schedules `B_i = B(x0, r_i)` with a prescribed measure profile, and the
//! growth hypotheses they are checked against.

use serde::{Deserialize, Serialize};

use crate::dynsys::{BallSpace, MapSystem, SystemKind};
use crate::numeric::{ln_ln_ln, E_POW_E};
use crate::{Error, Result};

/// Relative tolerance on the measure when inverting `r -> mu(B(x0, r))`.
pub const INVERSION_TOL: f64 = 1e-9;
const BISECTION_STEPS: u32 = 200;
/// Slack for comparing a materialized schedule with its own declared profile.
const PROFILE_SLACK: f64 = 1e-9;

/// Declared growth of the target measures.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "profile", rename_all = "snake_case")]
pub enum GrowthProfile {
    /// Every ball has the same measure.
    Constant { measure: f64 },
    /// `sum_{i<n} mu(B_i) >= n^beta (log n)^gamma`.
    SumPoly { beta: f64, gamma: f64 },
    /// `mu(B_i) >= i^-beta (log i)^gamma`, with `max(i, 2)` in place of `i`.
    PerBallPoly { beta: f64, gamma: f64 },
    /// `sum_{i<n} mu(B_i) >= (log n)^beta (log log n) (log log log n)^gamma`.
    SumLog { beta: f64, gamma: f64 },
    /// `mu(B_i) >= i^-1 (log i)^(beta-1) (log log i) (log log log i)^gamma`,
    /// with `max(i, 16)` in place of `i`.
    PerBallLog { beta: f64, gamma: f64 },
    /// Radii supplied directly; nothing is declared.
    Explicit,
}

fn sum_poly(n: f64, beta: f64, gamma: f64) -> f64 {
    if n <= 1.0 {
        0.0
    } else {
        n.powf(beta) * n.ln().powf(gamma)
    }
}

fn per_ball_poly(i: f64, beta: f64, gamma: f64) -> f64 {
    let i = i.max(2.0);
    i.powf(-beta) * i.ln().powf(gamma)
}

fn sum_log(n: f64, beta: f64, gamma: f64) -> f64 {
    match ln_ln_ln(n) {
        Some(lll) => n.ln().powf(beta) * n.ln().ln() * lll.powf(gamma),
        None => 0.0,
    }
}

fn per_ball_log(i: f64, beta: f64, gamma: f64) -> f64 {
    let i = i.max(16.0);
    let lll = ln_ln_ln(i).expect("i >= 16 > e^e");
    i.recip() * i.ln().powf(beta - 1.0) * i.ln().ln() * lll.powf(gamma)
}

impl GrowthProfile {
    /// Target measure of ball `i`. Sum profiles are met with equality by taking
    /// increments of the bound; indices before the bound becomes positive
    /// reuse the first positive increment.
    pub fn target(&self, i: u64) -> f64 {
        let x = i as f64;
        match *self {
            GrowthProfile::Constant { measure } => measure,
            GrowthProfile::PerBallPoly { beta, gamma } => per_ball_poly(x, beta, gamma),
            GrowthProfile::PerBallLog { beta, gamma } => per_ball_log(x, beta, gamma),
            GrowthProfile::SumPoly { beta, gamma } => {
                let i = i.max(1) as f64;
                sum_poly(i + 1.0, beta, gamma) - sum_poly(i, beta, gamma)
            }
            GrowthProfile::SumLog { beta, gamma } => {
                // first n with a positive bound is 16
                let i = i.max(15) as f64;
                sum_log(i + 1.0, beta, gamma) - sum_log(i, beta, gamma)
            }
            GrowthProfile::Explicit => f64::NAN,
        }
    }
}

/// Nested or moving-radius balls around a fixed center.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BallSchedule {
    center: f64,
    radii: Vec<f64>,
    measures: Vec<f64>,
    profile: GrowthProfile,
    measure_exact: bool,
}

impl BallSchedule {
    /// A schedule from explicit radii; measures are evaluated on `system`.
    pub fn from_radii(system: &MapSystem, center: f64, radii: Vec<f64>) -> Result<Self> {
        if radii.iter().any(|&r| !(r > 0.0)) {
            return Err(Error::Construction("radii must be positive".into()));
        }
        let measures: Vec<f64> = radii.iter().map(|&r| system.ball_measure(center, r)).collect();
        if let Some(i) = measures.iter().position(|&m| !(m > 0.0)) {
            return Err(Error::Construction(format!("ball {i} has measure zero")));
        }
        Ok(Self { center, radii, measures, profile: GrowthProfile::Explicit, measure_exact: system.measure_is_exact() })
    }

    pub fn center(&self) -> f64 {
        self.center
    }

    pub fn radii(&self) -> &[f64] {
        &self.radii
    }

    pub fn measures(&self) -> &[f64] {
        &self.measures
    }

    pub fn profile(&self) -> GrowthProfile {
        self.profile
    }

    pub fn len(&self) -> usize {
        self.radii.len()
    }

    pub fn is_empty(&self) -> bool {
        self.radii.is_empty()
    }

    pub fn measure_is_exact(&self) -> bool {
        self.measure_exact
    }

    /// Whether the radii are nonincreasing.
    pub fn is_nested(&self) -> bool {
        self.radii.windows(2).all(|w| w[1] <= w[0])
    }

    /// `sum_{i<n} mu(B_i)` for every `n = 0..=len`.
    pub fn measure_prefix(&self) -> Vec<f64> {
        let mut acc = 0.0;
        let mut out = Vec::with_capacity(self.measures.len() + 1);
        out.push(0.0);
        for m in &self.measures {
            acc += m;
            out.push(acc);
        }
        out
    }
}

/// Smallest `r` with `mu(B(x0, r)) >= target (1 - INVERSION_TOL)`.
pub fn invert_ball_measure(system: &MapSystem, x0: f64, target: f64) -> Result<f64> {
    if !(target > 0.0 && target <= 1.0) {
        return Err(Error::Construction(format!("target measure {target} is outside (0, 1]")));
    }
    if system.kind() == SystemKind::Doubling {
        return Ok(0.5 * target);
    }
    if system.ball_measure(x0, 0.0) > 0.0 {
        return Err(Error::Construction(format!("{x0} is an atom")));
    }
    let mut hi = 1.0;
    if system.ball_measure(x0, hi) < target * (1.0 - INVERSION_TOL) {
        return Err(Error::Construction(format!("no ball around {x0} reaches measure {target}")));
    }
    let mut lo = 0.0;
    for _ in 0..BISECTION_STEPS {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        // keep bisecting after reaching the tolerance: flat stretches of the
        // measure (gaps in the support) must resolve to their left end
        if system.ball_measure(x0, mid) >= target * (1.0 - INVERSION_TOL) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(hi)
}

/// Materializes `n` balls around `x0` whose measures follow `profile`.
pub fn build_ball_schedule(system: &MapSystem, x0: f64, profile: GrowthProfile, n: usize) -> Result<BallSchedule> {
    if matches!(profile, GrowthProfile::Explicit) {
        return Err(Error::Construction("explicit schedules are built with BallSchedule::from_radii".into()));
    }
    let mut radii = Vec::with_capacity(n);
    let mut measures = Vec::with_capacity(n);
    let mut last: Option<(f64, f64, f64)> = None;
    for i in 0..n {
        let t = profile.target(i as u64);
        let (r, m) = match last {
            Some((lt, r, m)) if lt == t => (r, m),
            _ => {
                let r =
                    invert_ball_measure(system, x0, t).map_err(|e| Error::Construction(format!("ball {i}: {e}")))?;
                (r, system.ball_measure(x0, r))
            }
        };
        last = Some((t, r, m));
        radii.push(r);
        measures.push(m);
    }
    let schedule = BallSchedule { center: x0, radii, measures, profile, measure_exact: system.measure_is_exact() };
    if let Some(i) = declared_violation(&schedule) {
        return Err(Error::Construction(format!("schedule misses its declared profile at index {i}")));
    }
    Ok(schedule)
}

fn declared_violation(s: &BallSchedule) -> Option<u64> {
    let slack = 1.0 - PROFILE_SLACK;
    match s.profile {
        GrowthProfile::Explicit => None,
        GrowthProfile::Constant { measure } => s.measures.iter().position(|&m| m < measure * slack).map(|i| i as u64),
        GrowthProfile::PerBallPoly { beta, gamma } => {
            per_ball_violation(s, 0, |i| per_ball_poly(i, beta, gamma), slack)
        }
        GrowthProfile::PerBallLog { beta, gamma } => per_ball_violation(s, 0, |i| per_ball_log(i, beta, gamma), slack),
        GrowthProfile::SumPoly { beta, gamma } => sum_violation(s, 2, |n| sum_poly(n, beta, gamma), slack),
        GrowthProfile::SumLog { beta, gamma } => sum_violation(s, 16, |n| sum_log(n, beta, gamma), slack),
    }
}

fn per_ball_violation(s: &BallSchedule, from: usize, bound: impl Fn(f64) -> f64, slack: f64) -> Option<u64> {
    (from..s.len()).find(|&i| s.measures[i] < bound(i as f64) * slack).map(|i| i as u64)
}

fn sum_violation(s: &BallSchedule, from: usize, bound: impl Fn(f64) -> f64, slack: f64) -> Option<u64> {
    let prefix = s.measure_prefix();
    (from..=s.len()).find(|&n| prefix[n] < bound(n as f64) * slack).map(|n| n as u64)
}

/// Polynomial decay rate required by the sum-growth theorem.
pub fn thm4_rate(beta: f64, delta: f64) -> f64 {
    (2.0 / delta + 1.0) / beta - 1.0
}

/// Polynomial decay rate required by the per-ball corollary.
pub fn cor4_rate(beta: f64, delta: f64) -> f64 {
    (2.0 / delta + beta) / (1.0 - beta)
}

/// Lower bound on `gamma` in the sum-growth theorem.
pub fn thm4_gamma_threshold(beta: f64, delta: f64) -> f64 {
    1.0 + (2.0 - delta) * beta / (2.0 + delta)
}

/// Lower bound on `gamma` in the per-ball corollary.
pub fn cor4_gamma_threshold(beta: f64, delta: f64) -> f64 {
    1.0 + (2.0 - delta) * (1.0 - beta) / (2.0 + delta)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum HypothesisSet {
    /// Polynomial sum growth.
    Theorem4,
    /// Polynomial per-ball growth.
    Corollary4,
    /// Logarithmic sum growth.
    Theorem5,
    /// Logarithmic per-ball growth.
    Corollary5,
}

/// Decay of correlations a hypothesis set asks for.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "decay", rename_all = "snake_case")]
pub enum RequiredDecay {
    Polynomial {
        rate: f64,
    },
    /// `c(n) <= C e^{-a n^exponent}` for some `a > 0`.
    StretchedExponential {
        exponent: f64,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HypothesisReport {
    pub set: HypothesisSet,
    pub beta: f64,
    pub gamma: f64,
    /// The growth inequality holds at every materialized index.
    pub growth_holds: bool,
    pub first_violation: Option<u64>,
    /// Every constraint on `(beta, gamma, delta)` is met.
    pub parameters_ok: bool,
    pub parameter_issues: Vec<String>,
    pub required_decay: RequiredDecay,
}

impl HypothesisReport {
    pub fn satisfied(&self) -> bool {
        self.growth_holds && self.parameters_ok
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GrowthReport {
    pub delta: f64,
    /// The schedule meets the profile it was built for.
    pub declared_profile_holds: bool,
    pub reports: Vec<HypothesisReport>,
}

impl GrowthReport {
    pub fn get(&self, set: HypothesisSet) -> &HypothesisReport {
        self.reports.iter().find(|r| r.set == set).expect("all four sets are reported")
    }
}

/// Checks the schedule against all four hypothesis sets, using the `(beta,
/// gamma)` of its declared profile (`(1/2, 0)` when none is declared).
///
/// Growth inequalities are checked from the first index where the bound is
/// defined and positive: `i, n >= 2` for the polynomial forms, `>= 16` for the
/// logarithmic ones.
pub fn validate_growth(schedule: &BallSchedule, delta: f64) -> GrowthReport {
    let (beta, gamma) = match schedule.profile {
        GrowthProfile::SumPoly { beta, gamma }
        | GrowthProfile::PerBallPoly { beta, gamma }
        | GrowthProfile::SumLog { beta, gamma }
        | GrowthProfile::PerBallLog { beta, gamma } => (beta, gamma),
        GrowthProfile::Constant { .. } | GrowthProfile::Explicit => (0.5, 0.0),
    };
    let delta_issue = (!(delta > 0.0 && delta < 2.0)).then(|| format!("delta = {delta} is outside (0, 2)"));

    let mut reports = Vec::with_capacity(4);
    for set in [HypothesisSet::Theorem4, HypothesisSet::Corollary4, HypothesisSet::Theorem5, HypothesisSet::Corollary5]
    {
        let mut issues: Vec<String> = delta_issue.iter().cloned().collect();
        let (violation, required_decay) = match set {
            HypothesisSet::Theorem4 => {
                if !(beta > 0.0 && beta < 1.0) {
                    issues.push(format!("beta = {beta} is outside (0, 1)"));
                }
                let g = thm4_gamma_threshold(beta, delta);
                if !(gamma > g) {
                    issues.push(format!("gamma = {gamma} does not exceed {g}"));
                }
                (
                    sum_violation(schedule, 2, |n| sum_poly(n, beta, gamma), 1.0),
                    RequiredDecay::Polynomial { rate: thm4_rate(beta, delta) },
                )
            }
            HypothesisSet::Corollary4 => {
                if !(beta > 0.0 && beta < 1.0) {
                    issues.push(format!("beta = {beta} is outside (0, 1)"));
                }
                let g = cor4_gamma_threshold(beta, delta);
                if !(gamma > g) {
                    issues.push(format!("gamma = {gamma} does not exceed {g}"));
                }
                (
                    per_ball_violation(schedule, 2, |i| per_ball_poly(i, beta, gamma), 1.0),
                    RequiredDecay::Polynomial { rate: cor4_rate(beta, delta) },
                )
            }
            HypothesisSet::Theorem5 | HypothesisSet::Corollary5 => {
                if !(beta > 0.0) {
                    issues.push(format!("beta = {beta} is not positive"));
                }
                if !(gamma > 1.0) {
                    issues.push(format!("gamma = {gamma} does not exceed 1"));
                }
                let v = if set == HypothesisSet::Theorem5 {
                    sum_violation(schedule, 16, |n| sum_log(n, beta, gamma), 1.0)
                } else {
                    per_ball_violation(schedule, 16, |i| per_ball_log(i, beta, gamma), 1.0)
                };
                (v, RequiredDecay::StretchedExponential { exponent: 1.0 / beta })
            }
        };
        reports.push(HypothesisReport {
            set,
            beta,
            gamma,
            growth_holds: violation.is_none(),
            first_violation: violation,
            parameters_ok: issues.is_empty(),
            parameter_issues: issues,
            required_decay,
        });
    }
    GrowthReport { delta, declared_profile_holds: declared_violation(schedule).is_none(), reports }
}

/// `(log n)^beta (log log n) (log log log n)^gamma`, the logarithmic sum bound.
pub fn log_sum_bound(n: f64, beta: f64, gamma: f64) -> Result<f64> {
    if n <= E_POW_E {
        return Err(Error::Range { what: "log log log n", min: E_POW_E, got: n });
    }
    Ok(sum_log(n, beta, gamma))
}
