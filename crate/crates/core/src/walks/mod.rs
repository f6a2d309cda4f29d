//! Lattice random walks and almost-sure local limit theorems along
//! subsequences: exact kernels, asymptotics, simulation and validators.

pub mod envelope;
pub mod exact;
pub mod law;
pub mod sequence;
pub mod sim;

pub use envelope::{thm2_deviation_envelope, thm3_deviation_envelope};
pub use exact::{
    exact_lattice_walk_prob, exact_simple_walk_prob, gaussian_joint_oracle, local_clt_value, r_factor,
    resolve_lattice_target, stirling_asymptotic, PointProb,
};
pub use law::{IncrementLaw, LawKind};
pub use sequence::{
    validate_thm2_sequence, validate_thm3_sequence, ConditionResult, Hypothesis, SequenceValidation, SubsequenceSpec,
};
pub use sim::{
    aslclt_full_sum, aslclt_full_sum_expectation, aslclt_limit, delta_n, exact_expectation_delta, simulate_walk_hits,
    walk_ensemble, WalkEnsembleResult,
};
