//! Executable experiments for variance-condition Borel–Cantelli lemmas.
//!
//! The crate is organized by experiment family:
//!
//! - [`bc_core`]: variance-condition checks, Chebyshev deviation bounds, the
//!   geometric-type subsequence used to upgrade convergence in probability to
//!   almost-sure convergence, and normalized-sum trajectories.
//! - [`walks`]: lattice random walks, exact hitting probabilities, local-CLT
//!   asymptotics and Monte Carlo ensembles of the almost-sure local CLT.
//! - [`dynsys`]: interval maps with metric structure, exact or estimated ball
//!   measures, condition-(A) fits and correlation-decay estimates.
//! - [`dbc`]: shrinking-target (dynamical Borel–Cantelli) experiments.
//! - [`recurrence`]: pointwise dimension, lower densities and quantitative
//!   recurrence counts.
//! - [`stats`]: ensemble summaries and log-log fits.
//!
//! All Monte Carlo entry points derive one ChaCha stream per trajectory from a
//! master seed (see [`rng`]), so results do not depend on the rayon schedule.

// `!(x > 0.0)` is the idiom for rejecting NaN together with out-of-range values.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod bc_core;
pub mod dbc;
pub mod dynsys;
mod error;
pub mod numeric;
pub mod par;
pub mod recurrence;
pub mod rng;
pub mod stats;
pub mod walks;

pub use error::{Error, Result};
