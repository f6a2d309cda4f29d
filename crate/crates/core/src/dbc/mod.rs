//! Shrinking-target experiments: does `sum_{i<n} 1_{B_i}(T^i x)` track
//! `sum_{i<n} mu(B_i)` along typical orbits?

pub mod mollifier;
pub mod run;
pub mod schedule;

pub use mollifier::{
    dbc_deviation_envelope, mollifier_value, nu_window, shell_measure, theta_upper, DbcEnvelope, MollifierSpec,
    WindowMode,
};
pub use run::{geometric_checkpoints, run_dbc, run_dbc_at, trajectory_hits, DbcRun, DEFAULT_CHECKPOINT_RATIO};
pub use schedule::{
    build_ball_schedule, cor4_gamma_threshold, cor4_rate, invert_ball_measure, thm4_gamma_threshold, thm4_rate,
    validate_growth, BallSchedule, GrowthProfile, GrowthReport, HypothesisReport, HypothesisSet, RequiredDecay,
};
