//! Measure-preserving systems with metric structure: orbits, ball measures,
//! the annulus condition and decay-of-correlation estimates.

pub mod cantor;
pub mod condition_a;
pub mod correlation;
pub mod orbit;
pub mod systems;

pub use cantor::{cantor_cdf, cantor_integral};
pub use condition_a::{cantor_radii, check_condition_a, geometric_grid, ConditionAFit};
pub use correlation::{estimate_correlation, fit_decay_rate, CorrelationEstimate, DecayFit, DecayModel, LipObservable};
pub use systems::{
    builtin_system, BallSpace, Builtin, BuiltinName, DecayClass, MapSystem, Metric, Orbit, ProductSystem, SystemKind,
};

/// The orbit `T x, ..., T^n x` of `x` (lazy; nothing is stored).
pub fn iterate_orbit(system: &MapSystem, x: f64, n: usize) -> impl Iterator<Item = f64> {
    system.orbit(x).take(n)
}
