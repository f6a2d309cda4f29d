//! Experiment configuration files.
//!
//! A config is a TOML (or JSON, by extension) document:
//!
//! ```toml
//! master_seed = 7
//! workers = 4            # optional, 0 = all cores; not part of the hash
//! output_dir = "out"     # optional; not part of the hash
//!
//! [experiment]
//! kind = "dbc-run"
//! ...                    # kind-specific fields
//! ```

use std::path::{Path, PathBuf};

use bcsim::dbc::{DbcEnvelope, GrowthProfile};
use bcsim::dynsys::{BuiltinName, DecayModel, SystemKind};
use bcsim::recurrence::{KappaMode, Regime};
use bcsim::walks::{IncrementLaw, SubsequenceSpec};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::CliError;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub master_seed: u64,
    #[serde(default)]
    pub workers: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output_dir: Option<PathBuf>,
    pub experiment: Experiment,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "name", rename_all = "snake_case")]
pub enum LawSpec {
    Simple,
    UniformThree,
    SkewedHalfInteger,
}

impl LawSpec {
    pub fn law(self) -> IncrementLaw {
        match self {
            LawSpec::Simple => IncrementLaw::simple(),
            LawSpec::UniformThree => IncrementLaw::uniform_three(),
            LawSpec::SkewedHalfInteger => IncrementLaw::skewed_half_integer(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "name", rename_all = "snake_case", deny_unknown_fields)]
pub enum SequenceSpec {
    /// `c i^2`.
    Poly2 {
        c: u64,
    },
    /// `ceil(c q^i)`.
    Geometric {
        c: f64,
        q: f64,
    },
    /// `floor(exp(a (log i)^2 (log log i)^alpha))`.
    LoglogExp {
        a: f64,
        alpha: f64,
    },
    Explicit {
        first_index: u64,
        terms: Vec<u64>,
    },
}

impl SequenceSpec {
    pub fn build(&self, count: usize) -> bcsim::Result<SubsequenceSpec> {
        match self {
            SequenceSpec::Poly2 { c } => SubsequenceSpec::poly2(*c, count),
            SequenceSpec::Geometric { c, q } => SubsequenceSpec::geometric(*c, *q, count),
            SequenceSpec::LoglogExp { a, alpha } => SubsequenceSpec::loglog_exp(*a, *alpha, count),
            SequenceSpec::Explicit { first_index, terms } => SubsequenceSpec::explicit(*first_index, terms.clone()),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ObservableName {
    Identity,
    Cos2pi,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "theorem", rename_all = "snake_case", deny_unknown_fields)]
pub enum SequenceTheorem {
    /// Lattice walks: gap and upper-growth hypotheses.
    Lattice { a: f64, gamma: f64, i_min: u64 },
    /// Density walks: ratio hypothesis.
    Density { a: f64, alpha: f64, i_min: u64 },
}

fn default_gamma() -> f64 {
    1.5
}

fn default_epsilons() -> Vec<f64> {
    vec![0.1, 0.5]
}

fn default_epsilon() -> f64 {
    0.1
}

fn default_thm4() -> Option<DbcEnvelope> {
    Some(DbcEnvelope::Polynomial { beta: 0.5, gamma: 1.5, delta: 1.0, rho: 2.0, theta: 1.0, c: 1.0, c_theta: 1.0 })
}

fn default_thm5() -> Option<DbcEnvelope> {
    Some(DbcEnvelope::Logarithmic { gamma: 1.5, c: 1.0 })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum Experiment {
    /// Ensemble of `Delta` along a subsequence for a lattice walk.
    WalkAslclt {
        law: LawSpec,
        sequence: SequenceSpec,
        a: f64,
        checkpoints: usize,
        trajectories: u64,
        /// Exponent of the tail envelope.
        #[serde(default = "default_gamma")]
        gamma: f64,
        #[serde(default = "default_epsilons")]
        epsilons: Vec<f64>,
    },
    /// Exact point probabilities against their asymptotics.
    WalkOracles {
        law: LawSpec,
        ns: Vec<u64>,
        #[serde(default)]
        a: f64,
    },
    /// Shrinking-target ensemble on a one-dimensional system.
    DbcRun {
        system: SystemKind,
        center: f64,
        profile: GrowthProfile,
        n: u64,
        trajectories: u64,
        /// Annulus exponent for the growth report; defaults to the system's.
        #[serde(default, skip_serializing_if = "Option::is_none")]
        delta: Option<f64>,
        #[serde(default = "default_epsilon")]
        epsilon: f64,
        #[serde(default = "default_thm4")]
        envelope_thm4: Option<DbcEnvelope>,
        #[serde(default = "default_thm5")]
        envelope_thm5: Option<DbcEnvelope>,
    },
    /// Monte Carlo correlations and a decay-rate fit.
    DecayEstimate {
        system: SystemKind,
        phi: ObservableName,
        psi: ObservableName,
        lags: Vec<u64>,
        samples: u64,
        model: DecayModel,
    },
    /// Annulus-condition exponent fit.
    ConditionA {
        system: BuiltinName,
        x0: f64,
        /// Second coordinate, for the product example.
        #[serde(default, skip_serializing_if = "Option::is_none")]
        y0: Option<f64>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        radii: Option<Vec<f64>>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        epsilons: Option<Vec<f64>>,
    },
    /// Quantitative recurrence counts.
    RecurrenceRun {
        system: SystemKind,
        /// Target point; drawn from the invariant measure when absent.
        #[serde(default, skip_serializing_if = "Option::is_none")]
        x0: Option<f64>,
        alpha: f64,
        beta: f64,
        gamma: f64,
        regime: Regime,
        kappa: KappaMode,
        n: u64,
        trajectories: u64,
    },
    /// Subsequence hypotheses.
    CheckSeq {
        sequence: SequenceSpec,
        count: usize,
        theorem: SequenceTheorem,
        #[serde(default = "default_law")]
        law: LawSpec,
    },
}

fn default_law() -> LawSpec {
    LawSpec::Simple
}

impl Experiment {
    pub fn kind(&self) -> &'static str {
        match self {
            Experiment::WalkAslclt { .. } => "walk-aslclt",
            Experiment::WalkOracles { .. } => "walk-oracles",
            Experiment::DbcRun { .. } => "dbc-run",
            Experiment::DecayEstimate { .. } => "decay-estimate",
            Experiment::ConditionA { .. } => "condition-a",
            Experiment::RecurrenceRun { .. } => "recurrence-run",
            Experiment::CheckSeq { .. } => "check-seq",
        }
    }

    /// A small working example of each kind.
    pub fn example(kind: &str) -> Option<Self> {
        Some(match kind {
            "walk-aslclt" => Experiment::WalkAslclt {
                law: LawSpec::Simple,
                sequence: SequenceSpec::Poly2 { c: 2 },
                a: 0.0,
                checkpoints: 500,
                trajectories: 64,
                gamma: default_gamma(),
                epsilons: default_epsilons(),
            },
            "walk-oracles" => {
                Experiment::WalkOracles { law: LawSpec::Simple, ns: vec![100, 400, 1_600, 6_400], a: 0.0 }
            }
            "dbc-run" => Experiment::DbcRun {
                system: SystemKind::Doubling,
                center: 0.5,
                profile: GrowthProfile::PerBallPoly { beta: 0.5, gamma: 0.0 },
                n: 100_000,
                trajectories: 16,
                delta: None,
                epsilon: default_epsilon(),
                envelope_thm4: default_thm4(),
                envelope_thm5: default_thm5(),
            },
            "decay-estimate" => Experiment::DecayEstimate {
                system: SystemKind::Doubling,
                phi: ObservableName::Identity,
                psi: ObservableName::Identity,
                lags: (1..=12).collect(),
                samples: 1_000_000,
                model: DecayModel::BetaExponential { beta: 1.0 },
            },
            "condition-a" => Experiment::ConditionA {
                system: BuiltinName::TriplingCantor,
                x0: 0.0,
                y0: None,
                radii: None,
                epsilons: None,
            },
            "recurrence-run" => Experiment::RecurrenceRun {
                system: SystemKind::Doubling,
                x0: None,
                alpha: 1.0,
                beta: 1.0,
                gamma: 1.5,
                regime: Regime::Exp,
                kappa: KappaMode::Density { theta: 2.0 },
                n: 100_000,
                trajectories: 16,
            },
            "check-seq" => Experiment::CheckSeq {
                sequence: SequenceSpec::Poly2 { c: 2 },
                count: 400,
                theorem: SequenceTheorem::Lattice { a: 2.0, gamma: 1.5, i_min: 20 },
                law: LawSpec::Simple,
            },
            _ => return None,
        })
    }
}

pub const KINDS: [&str; 7] =
    ["walk-aslclt", "walk-oracles", "dbc-run", "decay-estimate", "condition-a", "recurrence-run", "check-seq"];

impl ExperimentConfig {
    pub fn parse(text: &str, json: bool) -> Result<Self, CliError> {
        if json {
            serde_json::from_str(text).map_err(|e| CliError::Config(e.to_string()))
        } else {
            toml::from_str(text).map_err(|e| CliError::Config(e.to_string()))
        }
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::parse(&text, path.extension().is_some_and(|e| e == "json"))
    }

    pub fn to_toml(&self) -> Result<String, CliError> {
        toml::to_string(self).map_err(|e| CliError::Config(e.to_string()))
    }

    /// SHA-256 over the canonical JSON of the seed and the experiment; the
    /// worker count and output directory do not affect results and are left out.
    pub fn hash(&self) -> String {
        #[derive(Serialize)]
        struct Hashed<'a> {
            master_seed: u64,
            experiment: &'a Experiment,
        }
        let bytes = serde_json::to_vec(&Hashed { master_seed: self.master_seed, experiment: &self.experiment })
            .expect("configs serialize");
        hex::encode(Sha256::digest(bytes))
    }
}
