//! Tail bounds for `P(|Delta_n - 1| > epsilon)`. The constants are
//! existential, so callers supply `C` (conventionally 1) and compare.

use crate::numeric::{ln_ln, ln_ln_ln, E_POW_E};
use crate::{Error, Result};

fn check_eps(epsilon: f64) -> Result<()> {
    if !(epsilon > 0.0) {
        return Err(Error::domain(format!("epsilon must be positive, got {epsilon}")));
    }
    Ok(())
}

/// `C eps^{-2} (log log n)^{-1} (log log log n)^{-gamma}` for lattice walks,
/// defined where the triple logarithm is positive (`n > e^e`).
pub fn thm2_deviation_envelope(epsilon: f64, n: u64, gamma: f64, c: f64) -> Result<f64> {
    check_eps(epsilon)?;
    let nf = n as f64;
    let lll = ln_ln_ln(nf).ok_or(Error::Range { what: "log log log n", min: E_POW_E, got: nf })?;
    let ll = ln_ln(nf).expect("n > e^e");
    Ok(c / (epsilon * epsilon) / (ll * lll.powf(gamma)))
}

/// `C eps^{-2} (log n)^{-1} (log log n)^{1 - alpha}` for density walks (`n > e^e`).
pub fn thm3_deviation_envelope(epsilon: f64, n: u64, alpha: f64, c: f64) -> Result<f64> {
    check_eps(epsilon)?;
    let nf = n as f64;
    if nf <= E_POW_E {
        return Err(Error::Range { what: "log log n", min: E_POW_E, got: nf });
    }
    let ll = ln_ln(nf).expect("n > e^e");
    Ok(c / (epsilon * epsilon) / nf.ln() * ll.powf(1.0 - alpha))
}
