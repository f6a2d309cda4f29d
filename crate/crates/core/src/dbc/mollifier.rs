//! The Lipschitz smoothing of ball indicators used to apply decay of
//! correlations, the near/far window split of the covariance sum, and the
//! resulting tail envelopes.

use serde::{Deserialize, Serialize};

use crate::dynsys::{BallSpace, Metric};
use crate::numeric::{ln_ln, ln_ln_ln, E_POW_E};
use crate::{Error, Result};

/// Ramp widths `w_n = (n (log n)^{1+theta})^{-1/delta}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MollifierSpec {
    theta: f64,
    delta: f64,
}

impl MollifierSpec {
    pub fn new(theta: f64, delta: f64) -> Result<Self> {
        if !(theta > 0.0) {
            return Err(Error::domain(format!("theta must be positive, got {theta}")));
        }
        if !(delta > 0.0 && delta < 2.0) {
            return Err(Error::domain(format!("delta must lie in (0, 2), got {delta}")));
        }
        Ok(Self { theta, delta })
    }

    pub fn theta(&self) -> f64 {
        self.theta
    }

    pub fn delta(&self) -> f64 {
        self.delta
    }

    fn check(n: u64) -> Result<f64> {
        if n < 2 {
            return Err(Error::Range { what: "mollifier index", min: 1.0, got: n as f64 });
        }
        Ok(n as f64)
    }

    /// `n (log n)^{1+theta}`; its reciprocal bounds the shell measure.
    pub fn scale(&self, n: u64) -> Result<f64> {
        let nf = Self::check(n)?;
        Ok(nf * nf.ln().powf(1.0 + self.theta))
    }

    pub fn width(&self, n: u64) -> Result<f64> {
        Ok(self.scale(n)?.powf(-1.0 / self.delta))
    }

    /// Lipschitz constant of the ramp, `1 / w_n`.
    pub fn lipschitz(&self, n: u64) -> Result<f64> {
        Ok(self.width(n)?.recip())
    }
}

/// `1` on the closed ball, a linear ramp of width `w_n` outside it, `0` beyond.
pub fn mollifier_value(spec: &MollifierSpec, center: f64, r: f64, n: u64, x: f64, metric: Metric) -> Result<f64> {
    let w = spec.width(n)?;
    let d = metric.dist(x, center);
    Ok(if d <= r {
        1.0
    } else if d >= r + w {
        0.0
    } else {
        1.0 - (d - r) / w
    })
}

/// Measure of the shell `{r < d(x, center) <= r + w_n}` where the mollifier
/// and the indicator disagree.
pub fn shell_measure<S: BallSpace>(space: &S, spec: &MollifierSpec, center: S::Point, r: f64, n: u64) -> Result<f64> {
    let w = spec.width(n)?;
    Ok(space.ball_measure(center, r + w) - space.ball_measure(center, r))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "mode", rename_all = "snake_case")]
pub enum WindowMode {
    /// `nu(n) = mu(S_n) (log n)^{-1} (log log n)^{-rho}`, `rho > 1`.
    Poly { rho: f64 },
    /// `nu(n) = A (log n)^beta`.
    Exp { a: f64, beta: f64 },
}

/// Lag separating the near pairs (bounded trivially) from the far pairs
/// (bounded by decay of correlations) in the variance of `S_n`.
pub fn nu_window(mode: WindowMode, n: u64, mu_sn: f64) -> Result<f64> {
    let nf = n as f64;
    match mode {
        WindowMode::Poly { rho } => {
            if !(rho > 1.0) {
                return Err(Error::domain(format!("rho must exceed 1, got {rho}")));
            }
            if nf <= E_POW_E {
                return Err(Error::Range { what: "window index", min: E_POW_E, got: nf });
            }
            let ll = ln_ln(nf).expect("n > e^e");
            Ok(mu_sn / (nf.ln() * ll.powf(rho)))
        }
        WindowMode::Exp { a, beta } => {
            if !(a > 0.0) {
                return Err(Error::domain(format!("A must be positive, got {a}")));
            }
            if n < 2 {
                return Err(Error::Range { what: "window index", min: 1.0, got: nf });
            }
            Ok(a * nf.ln().powf(beta))
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "theorem", rename_all = "snake_case")]
pub enum DbcEnvelope {
    /// `C (log n)^{-1} (log log n)^{-rho} + C_theta (log n)^{-theta}`.
    Polynomial { beta: f64, gamma: f64, delta: f64, rho: f64, theta: f64, c: f64, c_theta: f64 },
    /// `C (log log n)^{-1} (log log log n)^{-gamma}`.
    Logarithmic { gamma: f64, c: f64 },
}

/// Open upper end of the admissible `theta` interval of the polynomial envelope.
pub fn theta_upper(beta: f64, gamma: f64, delta: f64) -> f64 {
    (gamma * (2.0 + delta) - 1.0) / (2.0 * beta) + delta / 2.0 - 1.0
}

impl DbcEnvelope {
    fn validate(&self) -> Result<()> {
        match *self {
            DbcEnvelope::Polynomial { beta, gamma, delta, rho, theta, c, c_theta } => {
                if !(beta > 0.0 && beta < 1.0) {
                    return Err(Error::domain(format!("beta must lie in (0, 1), got {beta}")));
                }
                if !(delta > 0.0 && delta < 2.0) {
                    return Err(Error::domain(format!("delta must lie in (0, 2), got {delta}")));
                }
                if !(rho > 1.0) {
                    return Err(Error::domain(format!("rho must exceed 1, got {rho}")));
                }
                let hi = theta_upper(beta, gamma, delta);
                if !(theta > 0.0 && theta < hi) {
                    return Err(Error::domain(format!("theta = {theta} must lie in (0, {hi})")));
                }
                if !(c > 0.0 && c_theta > 0.0) {
                    return Err(Error::domain("constants must be positive"));
                }
            }
            DbcEnvelope::Logarithmic { gamma, c } => {
                if !(gamma > 1.0) {
                    return Err(Error::domain(format!("gamma must exceed 1, got {gamma}")));
                }
                if !(c > 0.0) {
                    return Err(Error::domain("constant must be positive"));
                }
            }
        }
        Ok(())
    }
}

/// Bound on `mu(|Delta_n - 1| > epsilon)`. `epsilon` only enters through the
/// supplied constants, so it is checked for positivity and otherwise unused.
pub fn dbc_deviation_envelope(envelope: DbcEnvelope, epsilon: f64, n: u64) -> Result<f64> {
    if !(epsilon > 0.0) {
        return Err(Error::domain(format!("epsilon must be positive, got {epsilon}")));
    }
    envelope.validate()?;
    let nf = n as f64;
    match envelope {
        DbcEnvelope::Polynomial { rho, theta, c, c_theta, .. } => {
            let ll = ln_ln(nf).ok_or(Error::Range { what: "log log n", min: std::f64::consts::E, got: nf })?;
            let l = nf.ln();
            Ok(c / (l * ll.powf(rho)) + c_theta * l.powf(-theta))
        }
        DbcEnvelope::Logarithmic { gamma, c } => {
            let lll = ln_ln_ln(nf).ok_or(Error::Range { what: "log log log n", min: E_POW_E, got: nf })?;
            Ok(c / (nf.ln().ln() * lll.powf(gamma)))
        }
    }
}
