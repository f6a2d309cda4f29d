//! Dispatch from a config to the library, collecting tables and checks.

use bcsim::dbc::{build_ball_schedule, dbc_deviation_envelope, run_dbc, validate_growth, DbcEnvelope};
use bcsim::dynsys::{
    builtin_system, cantor_radii, check_condition_a, estimate_correlation, fit_decay_rate, geometric_grid, Builtin,
    BuiltinName, LipObservable, MapSystem,
};
use bcsim::recurrence::{recurrence_ensemble, RecurrenceParams};
use bcsim::stats::{compare_envelope, median, summarize};
use bcsim::walks::sim::exact_hit_prob;
use bcsim::walks::{
    local_clt_value, stirling_asymptotic, thm2_deviation_envelope, validate_thm2_sequence, validate_thm3_sequence,
    walk_ensemble, LawKind,
};
use bcsim::{par, rng};
use serde_json::json;

use crate::config::{Experiment, ExperimentConfig, ObservableName, SequenceTheorem};
use crate::output::{num, Check, Outputs, Table};
use crate::CliError;

/// Stream index reserved for drawing the recurrence target when none is given.
pub const X0_STREAM: u64 = u64::MAX;

/// Band the ensemble median of `Delta` is expected to sit in.
const MEDIAN_BAND: (f64, f64) = (0.85, 1.15);
const DBC_MEDIAN_BAND: (f64, f64) = (0.8, 1.2);

fn in_band(x: f64, band: (f64, f64)) -> bool {
    band.0 <= x && x <= band.1
}

fn opt(x: Option<f64>) -> String {
    x.map_or_else(|| "nan".to_owned(), num)
}

fn seeds(trajectories: u64) -> Result<Vec<u64>, CliError> {
    if trajectories == 0 {
        return Err(CliError::Config("trajectories must be positive".into()));
    }
    Ok((0..trajectories).collect())
}

fn observable(name: ObservableName) -> LipObservable {
    match name {
        ObservableName::Identity => LipObservable::identity(),
        ObservableName::Cos2pi => LipObservable::cos2pi(),
    }
}

pub fn run(cfg: &ExperimentConfig) -> Result<Outputs, CliError> {
    let seed = cfg.master_seed;
    let workers = cfg.workers;
    let mut out = Outputs::default();
    match &cfg.experiment {
        Experiment::WalkAslclt { law, sequence, a, checkpoints, trajectories, gamma, epsilons } => {
            let law = law.law();
            let seq = sequence.build(*checkpoints)?;
            let ens = walk_ensemble(&law, &seq, *a, *checkpoints, seed, *trajectories, workers)?;
            let summary = summarize(&ens.delta, &ens.checkpoints, epsilons)?;
            let mut t = Table::new(
                "aslclt_summary.csv",
                "aslclt_summary",
                &["checkpoint_n", "epsilon", "mean", "median", "q05", "q95", "exceed_prob", "envelope_thm2"],
            );
            for row in summary.rows() {
                for (&eps, &p) in epsilons.iter().zip(&row.exceed) {
                    let env = thm2_deviation_envelope(eps, row.n, *gamma, 1.0).ok();
                    t.row(&[
                        row.n.to_string(),
                        num(eps),
                        num(row.mean),
                        num(row.median),
                        num(row.q05),
                        num(row.q95),
                        num(p),
                        opt(env),
                    ]);
                }
            }
            out.tables.push(t);
            let mut f = Table::new("aslclt_final.csv", "aslclt_final", &["seed", "checkpoint_n", "hits", "delta"]);
            let n_last = *ens.checkpoints.last().expect("nonempty checkpoints");
            for (s, (h, d)) in ens.hit_counts.iter().zip(&ens.delta).enumerate() {
                f.row(&[s.to_string(), n_last.to_string(), h.last().unwrap().to_string(), num(*d.last().unwrap())]);
            }
            out.tables.push(f);

            let last = summary.row(summary.checkpoints().len() - 1);
            out.checks.push(Check::new(
                "median_delta_band",
                in_band(last.median, MEDIAN_BAND),
                json!({ "median": last.median, "band": MEDIAN_BAND, "checkpoint_n": last.n }),
            ));
            for (&eps, &p) in epsilons.iter().zip(&last.exceed) {
                if let Ok(bound) = thm2_deviation_envelope(eps, last.n, *gamma, 1.0) {
                    let cmp = compare_envelope(p, bound);
                    out.checks.push(Check::new(format!("envelope_thm2_eps_{eps}"), !cmp.exceeds, cmp));
                }
            }
            out.checks.push(Check::new("parity", seq.parity_ok(&law), json!({ "law": law.kind() })));
            out.result("limit", ens.limit);
        }

        Experiment::WalkOracles { law, ns, a } => {
            let law = law.law();
            if ns.is_empty() || ns.contains(&0) {
                return Err(CliError::Config("ns must be a nonempty list of positive integers".into()));
            }
            let mut t = Table::new("walk_oracles.csv", "walk_oracles", &["n", "exact", "stirling", "ratio"]);
            let mut errs = Vec::with_capacity(ns.len());
            for &n in ns {
                let exact = exact_hit_prob(&law, n, *a)?;
                let asym = match law.kind() {
                    LawKind::Simple => stirling_asymptotic(n, *a),
                    _ => local_clt_value(&law, n, *a),
                };
                let ratio = exact / asym;
                errs.push((n, (ratio - 1.0).abs()));
                t.row(&[n.to_string(), num(exact), num(asym), num(ratio)]);
            }
            out.tables.push(t);
            let (n_last, e_last) = *errs.last().expect("nonempty");
            out.checks.push(Check::new(
                "ratio_tends_to_one",
                errs.windows(2).all(|w| w[1].0 <= w[0].0 || w[1].1 <= w[0].1),
                json!({ "largest_n": n_last, "abs_error": e_last }),
            ));
        }

        Experiment::DbcRun {
            system,
            center,
            profile,
            n,
            trajectories,
            delta,
            epsilon,
            envelope_thm4,
            envelope_thm5,
        } => {
            let sys = MapSystem::from_kind(*system)?;
            let schedule = build_ball_schedule(&sys, *center, *profile, *n as usize)?;
            let seeds = seeds(*trajectories)?;
            let run = run_dbc(&sys, &schedule, &seeds, *n, seed, workers)?;
            let envelope = |e: &Option<DbcEnvelope>, n: u64| -> Result<Option<f64>, CliError> {
                match e {
                    None => Ok(None),
                    Some(env) => match dbc_deviation_envelope(*env, *epsilon, n) {
                        Ok(v) => Ok(Some(v)),
                        Err(bcsim::Error::Range { .. }) => Ok(None),
                        Err(e) => Err(e.into()),
                    },
                }
            };
            let env4: Vec<Option<f64>> =
                run.checkpoints.iter().map(|&c| envelope(envelope_thm4, c)).collect::<Result<_, _>>()?;
            let env5: Vec<Option<f64>> =
                run.checkpoints.iter().map(|&c| envelope(envelope_thm5, c)).collect::<Result<_, _>>()?;

            let mut t = Table::new(
                "dbc_trajectories.csv",
                "dbc_trajectories",
                &["seed", "checkpoint_n", "sum_hits", "sum_measure", "delta", "envelope_thm4", "envelope_thm5"],
            );
            for (s, (hits, deltas)) in run.seeds.iter().zip(run.hits.iter().zip(&run.deltas)) {
                for k in 0..run.checkpoints.len() {
                    t.row(&[
                        s.to_string(),
                        run.checkpoints[k].to_string(),
                        hits[k].to_string(),
                        num(run.sum_measure[k]),
                        num(deltas[k]),
                        opt(env4[k]),
                        opt(env5[k]),
                    ]);
                }
            }
            out.tables.push(t);

            let summary = run.summary(&[*epsilon])?;
            let mut st = Table::new(
                "dbc_summary.csv",
                "dbc_summary",
                &[
                    "checkpoint_n",
                    "sum_measure",
                    "sum_measure_band",
                    "mean",
                    "median",
                    "q05",
                    "q95",
                    "median_abs_dev",
                    "exceed_prob",
                ],
            );
            let mut abs_dev = Vec::with_capacity(run.checkpoints.len());
            for (k, row) in summary.rows().into_iter().enumerate() {
                let dev: Vec<f64> = run.deltas.iter().map(|d| (d[k] - 1.0).abs()).collect();
                let m = median(&dev);
                abs_dev.push(m);
                let band = run.sum_measure_band.as_ref().map(|b| b[k]);
                st.row(&[
                    row.n.to_string(),
                    num(run.sum_measure[k]),
                    opt(band),
                    num(row.mean),
                    num(row.median),
                    num(row.q05),
                    num(row.q95),
                    num(m),
                    num(row.exceed[0]),
                ]);
            }
            out.tables.push(st);

            let k_last = run.checkpoints.len() - 1;
            let last = summary.row(k_last);
            out.checks.push(Check::new(
                "median_delta_band",
                in_band(last.median, DBC_MEDIAN_BAND),
                json!({ "median": last.median, "band": DBC_MEDIAN_BAND, "checkpoint_n": last.n }),
            ));
            if abs_dev.len() >= 3 {
                // all pairwise comparisons among the last three checkpoints
                let tail = &abs_dev[abs_dev.len() - 3..];
                let nonincreasing = [(0, 1), (1, 2), (0, 2)].iter().filter(|&&(a, b)| tail[b] <= tail[a]).count();
                out.checks.push(Check::new(
                    "median_abs_dev_nonincreasing",
                    nonincreasing >= 2,
                    json!({ "last_three": tail, "nonincreasing_comparisons": nonincreasing }),
                ));
            }
            for (name, env) in [("envelope_thm4", env4[k_last]), ("envelope_thm5", env5[k_last])] {
                if let Some(bound) = env {
                    let cmp = compare_envelope(last.exceed[0], bound);
                    out.checks.push(Check::new(name, !cmp.exceeds, cmp));
                }
            }
            match delta.or_else(|| sys.holder_delta()) {
                Some(d) => {
                    let growth = validate_growth(&schedule, d);
                    out.checks.push(Check::new(
                        "declared_profile_holds",
                        growth.declared_profile_holds,
                        json!({ "profile": profile }),
                    ));
                    out.checks.push(Check::info("growth_hypotheses", &growth));
                }
                None => out.checks.push(Check::info(
                    "growth_hypotheses",
                    "skipped: the system has no known annulus exponent; set `delta`",
                )),
            }
            out.result("final_median_delta", last.median);
            out.result("measure_is_exact", schedule.measure_is_exact());
        }

        Experiment::DecayEstimate { system, phi, psi, lags, samples, model } => {
            let sys = MapSystem::from_kind(*system)?;
            let (phi_o, psi_o) = (observable(*phi), observable(*psi));
            let est = par::with_workers(workers, || estimate_correlation(&sys, &phi_o, &psi_o, lags, *samples, seed))??;
            // closed form for the doubling map with identity observables
            let oracle = |lag: u64| -> Option<f64> {
                let identity = *phi == ObservableName::Identity && *psi == ObservableName::Identity;
                (sys.kind() == bcsim::dynsys::SystemKind::Doubling && identity)
                    .then(|| 1.0 / (12.0 * 2f64.powi(lag as i32)))
            };
            let mut t = Table::new("correlations.csv", "correlations", &["lag", "cov", "std_err", "oracle"]);
            let mut within = true;
            for e in &est {
                let o = oracle(e.lag);
                if let Some(o) = o {
                    within &= (e.cov - o).abs() <= 3.0 * e.std_err;
                }
                t.row(&[e.lag.to_string(), num(e.cov), num(e.std_err), opt(o)]);
            }
            out.tables.push(t);
            if oracle(1).is_some() {
                out.checks.push(Check::new("oracle_within_3se", within, json!({ "lags": lags })));
            }
            match fit_decay_rate(&est, *model) {
                Ok(fit) => {
                    out.checks.push(Check::info("decay_fit", &fit));
                    out.result("rate", fit.rate);
                }
                Err(e @ bcsim::Error::InsufficientSignal { .. }) => {
                    out.checks.push(Check::new("decay_fit", false, e.to_string()));
                }
                Err(e) => return Err(e.into()),
            }
            out.result("declared_decay", sys.decay_class());
        }

        Experiment::ConditionA { system, x0, y0, radii, epsilons } => {
            let cantor = matches!(system, BuiltinName::TriplingCantor);
            let radii =
                radii.clone().unwrap_or_else(|| if cantor { cantor_radii(25) } else { geometric_grid(0.4, 0.6, 12) });
            let epsilons = epsilons.clone().unwrap_or_else(|| {
                if cantor {
                    geometric_grid(0.1, 0.3, 20)
                } else {
                    geometric_grid(0.05, 0.3, 10)
                }
            });
            let (fit, declared) = match builtin_system(*system)? {
                Builtin::Interval(sys) => {
                    if y0.is_some() {
                        return Err(CliError::Config("y0 only applies to the product example".into()));
                    }
                    (check_condition_a(&sys, *x0, &radii, &epsilons)?, sys.holder_delta())
                }
                Builtin::Product(p) => {
                    let y0 = y0.ok_or_else(|| CliError::Config("the product example needs y0".into()))?;
                    (check_condition_a(&p, (*x0, y0), &radii, &epsilons)?, Some(p.holder_delta()))
                }
            };
            let mut t = Table::new("condition_a.csv", "condition_a", &["epsilon", "worst_annulus"]);
            for &(eps, m) in &fit.points {
                t.row(&[num(eps), num(m)]);
            }
            out.tables.push(t);
            if let Some(d) = declared {
                // a fit below the known exponent by more than the fit's slack is suspicious
                out.checks.push(Check::new(
                    "exponent_at_least_declared",
                    fit.delta >= d - 0.05,
                    json!({ "fitted": fit.delta, "declared": d }),
                ));
            }
            out.result("fit", &fit);
        }

        Experiment::RecurrenceRun { system, x0, alpha, beta, gamma, regime, kappa, n, trajectories } => {
            let sys = MapSystem::from_kind(*system)?;
            let x0 = x0.unwrap_or_else(|| sys.sample(&mut rng::stream(seed, X0_STREAM)));
            let params = RecurrenceParams::new(x0, *alpha, *beta, *gamma, *regime, *kappa)?;
            let seeds = seeds(*trajectories)?;
            let ens = recurrence_ensemble(&sys, &params, *n, &seeds, seed, workers)?;
            let mut t = Table::new(
                "recurrence_counts.csv",
                "recurrence_counts",
                &["seed", "checkpoint_n", "count", "normalized"],
            );
            for (s, tr) in seeds.iter().zip(&ens.trajectories) {
                for k in 0..tr.checkpoints.len() {
                    t.row(&[
                        s.to_string(),
                        tr.checkpoints[k].to_string(),
                        tr.counts[k].to_string(),
                        num(tr.normalized[k]),
                    ]);
                }
            }
            out.tables.push(t);
            let med = median(&ens.final_normalized());
            let limit = ens.predicted_limit;
            out.checks.push(Check::new(
                "median_within_factor_two",
                med >= limit / 2.0 && med <= 2.0 * limit,
                json!({ "median": med, "predicted_limit": limit }),
            ));
            out.result("x0", x0);
            out.result("theta", params.theta());
        }

        Experiment::CheckSeq { sequence, count, theorem, law } => {
            let seq = sequence.build(*count)?;
            let v = match *theorem {
                SequenceTheorem::Lattice { a, gamma, i_min } => validate_thm2_sequence(&seq, a, gamma, i_min)?,
                SequenceTheorem::Density { a, alpha, i_min } => validate_thm3_sequence(&seq, a, alpha, i_min)?,
            };
            let mut t = Table::new("sequence.csv", "sequence", &["i", "n_i"]);
            for (j, &n) in seq.terms().iter().enumerate() {
                t.row(&[(seq.first_index() + j as u64).to_string(), n.to_string()]);
            }
            out.tables.push(t);
            for c in &v.conditions {
                let name = serde_json::to_value(c.hypothesis).expect("serializable");
                out.checks.push(Check::new(name.as_str().unwrap_or("condition"), c.holds, c));
            }
            out.checks.push(Check::new("parity", seq.parity_ok(&law.law()), json!({ "law": law })));
            out.result("holds", v.holds);
            out.result("checked", v.checked);
            out.result("conditions", &v.conditions);
        }
    }
    Ok(out)
}
