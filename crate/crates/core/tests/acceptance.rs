//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits with a
//! failure status if any criterion fails.

use std::process::ExitCode;
use std::time::Instant;

use bcsim::dbc::{
    build_ball_schedule, mollifier_value, run_dbc, shell_measure, validate_growth, DbcRun, GrowthProfile,
    HypothesisSet, MollifierSpec, RequiredDecay,
};
use bcsim::dynsys::{
    cantor_radii, check_condition_a, estimate_correlation, fit_decay_rate, geometric_grid, CorrelationEstimate,
    DecayModel, LipObservable, MapSystem, ProductSystem,
};
use bcsim::numeric::linear_fit;
use bcsim::recurrence::{recurrence_ensemble, KappaMode, RecurrenceEnsemble, RecurrenceParams, Regime};
use bcsim::rng::{stream, uniform};
use bcsim::stats::median;
use bcsim::walks::{
    exact_expectation_delta, exact_lattice_walk_prob, exact_simple_walk_prob, gaussian_joint_oracle, local_clt_value,
    resolve_lattice_target, stirling_asymptotic, thm2_deviation_envelope, walk_ensemble, IncrementLaw, SubsequenceSpec,
    WalkEnsembleResult,
};
use bcsim::{dbc, par};

const SEED: u64 = 20_240_611;
const WORKER_COUNTS: [usize; 3] = [1, 4, 8];

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: String) -> Outcome {
    Outcome { pass, detail }
}

fn sci(v: &[f64]) -> String {
    let parts: Vec<String> = v.iter().map(|x| format!("{x:.3e}")).collect();
    format!("[{}]", parts.join(", "))
}

fn slope(xs: &[f64], ys: &[f64]) -> f64 {
    let lx: Vec<f64> = xs.iter().map(|x| x.ln()).collect();
    let ly: Vec<f64> = ys.iter().map(|y| y.ln()).collect();
    linear_fit(&lx, &ly).expect("distinct abscissae").slope
}

fn c1_stirling() -> Outcome {
    let ns = [100u64, 400, 1600, 6400];
    let errs: Vec<f64> =
        ns.iter().map(|&n| (exact_simple_walk_prob(n, 0).prob / stirling_asymptotic(n, 0.0) - 1.0).abs()).collect();
    let pointwise = ns.iter().zip(&errs).all(|(&n, &e)| e <= 3.0 / n as f64);
    let xs: Vec<f64> = ns.iter().map(|&n| n as f64).collect();
    let s = slope(&xs, &errs);
    outcome(pointwise && (s + 1.0).abs() <= 0.15, format!("errors {}, slope {s:.4}", sci(&errs)))
}

fn c2_local_clt() -> Outcome {
    let law = IncrementLaw::skewed_half_integer();
    let ns = [100u64, 1_000, 10_000];
    let errs: Vec<f64> = ns
        .iter()
        .map(|&n| {
            let target = resolve_lattice_target(law.sigma(), n, &law);
            let p = exact_lattice_walk_prob(&law, n, target).expect("within budget");
            (p / local_clt_value(&law, n, 1.0) - 1.0).abs()
        })
        .collect();
    let xs: Vec<f64> = ns.iter().map(|&n| n as f64).collect();
    let s = slope(&xs, &errs);
    outcome((s + 0.5).abs() <= 0.15, format!("errors {}, slope {s:.4}", sci(&errs)))
}

fn c3_r_factor() -> Outcome {
    let mut rng = stream(SEED, 3);
    let mut worst: f64 = 0.0;
    for _ in 0..10_000 {
        let a = 6.0 * uniform(&mut rng) - 3.0;
        let n_i = 1 + (uniform(&mut rng) * 1e6) as u64;
        let n_j = n_i + 1 + (uniform(&mut rng) * 1e6) as u64;
        let (lhs, rhs) = gaussian_joint_oracle(a, n_i, n_j).expect("ordered");
        worst = worst.max((lhs - rhs).abs() / rhs.abs().max(1.0));
    }
    outcome(worst <= 1e-12, format!("max relative gap {worst:.3e}"))
}

const C4_K: usize = 2_000;

fn c4_run(workers: usize) -> WalkEnsembleResult {
    let seq = SubsequenceSpec::poly2(2, C4_K).unwrap();
    walk_ensemble(&IncrementLaw::simple(), &seq, 0.0, C4_K, SEED, 256, workers).unwrap()
}

fn c4_aslclt(r: &WalkEnsembleResult) -> Outcome {
    let last: Vec<f64> = r.delta.iter().map(|d| *d.last().unwrap()).collect();
    let med = median(&last);
    let tail = last.iter().filter(|d| (*d - 1.0).abs() > 0.5).count() as f64 / last.len() as f64;
    let env = thm2_deviation_envelope(0.5, C4_K as u64, 1.5, 1.0).unwrap();
    let warn = if tail <= 5.0 * env { "within" } else { "WARN: above" };
    outcome(
        (0.85..=1.15).contains(&med),
        format!(
            "median Delta {med:.4} at n_K = {}; P(|Delta-1|>0.5) = {tail:.3}, {warn} 5x envelope {env:.3}",
            r.checkpoints[C4_K - 1]
        ),
    )
}

fn c5_exact_expectation() -> Outcome {
    let seq = SubsequenceSpec::poly2(2, 500).unwrap();
    let d = exact_expectation_delta(&IncrementLaw::simple(), &seq, 0.0, 500).unwrap();
    let last = *d.last().unwrap();
    outcome((last - 1.0).abs() <= 0.01, format!("Delta at K = 500 is {last:.6}"))
}

fn c6_condition_a() -> Outcome {
    let d =
        check_condition_a(&MapSystem::doubling(), 0.3, &geometric_grid(0.2, 0.7, 10), &geometric_grid(0.1, 0.5, 15))
            .unwrap();
    let c = check_condition_a(&MapSystem::tripling_cantor(), 0.0, &cantor_radii(25), &geometric_grid(0.1, 0.3, 20))
        .unwrap();
    let p = check_condition_a(
        &ProductSystem::new(),
        (0.0, 0.5),
        &geometric_grid(0.4, 0.6, 12),
        &geometric_grid(0.05, 0.3, 10),
    )
    .unwrap();
    let target = 2f64.ln() / 3f64.ln();
    outcome(
        (d.delta - 1.0).abs() <= 0.01 && (c.delta - target).abs() <= 0.05 && p.delta >= 0.45,
        format!("doubling {:.4}, cantor {:.4}, product {:.4}", d.delta, c.delta, p.delta),
    )
}

fn c7_run(workers: usize) -> Vec<CorrelationEstimate> {
    let lags: Vec<u64> = (1..=12).collect();
    let id = LipObservable::identity();
    par::with_workers(workers, || estimate_correlation(&MapSystem::doubling(), &id, &id, &lags, 10_000_000, SEED))
        .unwrap()
        .unwrap()
}

fn c7_correlation(est: &[CorrelationEstimate]) -> Outcome {
    let misses: Vec<u64> = est
        .iter()
        .filter(|e| (e.cov - 1.0 / (12.0 * 2f64.powi(e.lag as i32))).abs() > 3.0 * e.std_err)
        .map(|e| e.lag)
        .collect();
    match fit_decay_rate(est, DecayModel::BetaExponential { beta: 1.0 }) {
        Ok(fit) => outcome(
            misses.is_empty() && (0.55..=0.85).contains(&fit.rate),
            format!("lags outside 3 SE: {misses:?}; rate {:.4} from lags {:?}", fit.rate, fit.used_lags),
        ),
        Err(e) => outcome(false, format!("lags outside 3 SE: {misses:?}; fit failed: {e}")),
    }
}

fn c8_mollifier() -> Outcome {
    let spec = MollifierSpec::new(1.0, 1.0).unwrap();
    let d = MapSystem::doubling();
    let metric = d.metric();
    let (center, r) = (0.4, 0.05);
    let mut rng = stream(SEED, 8);
    let (mut lip_ok, mut sandwich_ok, mut shell_ok, mut shell_ok_with_constant) = (true, true, true, true);
    let mut ratios = Vec::new();
    // condition (A) constant of Lebesgue measure on the circle: an annulus of
    // width eps has measure 2 eps
    let c_a = check_condition_a(&d, center, &geometric_grid(0.2, 0.7, 10), &geometric_grid(0.1, 0.5, 15)).unwrap().c;
    for n in [10u64, 100, 1_000, 10_000] {
        let w = spec.width(n).unwrap();
        let lip = spec.lipschitz(n).unwrap();
        let mut best: f64 = 0.0;
        for _ in 0..20_000 {
            let near = |u: f64| center + r + 1.2 * w * u;
            let x = if uniform(&mut rng) < 0.5 { uniform(&mut rng) } else { near(uniform(&mut rng)) };
            let y = if uniform(&mut rng) < 0.5 { uniform(&mut rng) } else { near(uniform(&mut rng)) };
            let fx = mollifier_value(&spec, center, r, n, x, metric).unwrap();
            let fy = mollifier_value(&spec, center, r, n, y, metric).unwrap();
            let dxy = metric.dist(x, y);
            if dxy > 1e-9 {
                best = best.max((fx - fy).abs() / dxy);
            }
            let dx = metric.dist(x, center);
            sandwich_ok &= f64::from(u8::from(dx <= r)) <= fx && fx <= f64::from(u8::from(dx <= r + w));
        }
        lip_ok &= best <= lip * (1.0 + 1e-9) + 1e-9 && best >= 0.99 * lip;
        let shell = shell_measure(&d, &spec, center, r, n).unwrap();
        let bound = spec.scale(n).unwrap().recip();
        shell_ok &= shell < bound;
        shell_ok_with_constant &= shell <= c_a * bound * (1.0 + 1e-9);
        ratios.push(shell / bound);
    }
    outcome(
        lip_ok && sandwich_ok && shell_ok,
        format!(
            "lipschitz {lip_ok}, sandwich {sandwich_ok}, shell < bound {shell_ok} (shell/bound {ratios:.6?}); \
             with the annulus constant C = {c_a:.3}: {shell_ok_with_constant}"
        ),
    )
}

const DBC_N: u64 = 1_000_000;

fn c9_run(workers: usize) -> DbcRun {
    let d = MapSystem::doubling();
    let s = build_ball_schedule(&d, 0.5, GrowthProfile::Constant { measure: 0.2 }, DBC_N as usize).unwrap();
    let seeds: Vec<u64> = (0..64).collect();
    run_dbc(&d, &s, &seeds, DBC_N, SEED, workers).unwrap()
}

fn c9_birkhoff(run: &DbcRun) -> Outcome {
    let dev: Vec<f64> = run.final_deltas().iter().map(|d| (d - 1.0).abs()).collect();
    let m = median(&dev);
    outcome(m < 0.02, format!("median |Delta_N - 1| = {m:.5}"))
}

fn c10_schedule() -> dbc::BallSchedule {
    build_ball_schedule(
        &MapSystem::doubling(),
        0.5,
        GrowthProfile::PerBallPoly { beta: 0.5, gamma: 0.0 },
        DBC_N as usize,
    )
    .unwrap()
}

fn c10_run(workers: usize) -> DbcRun {
    let seeds: Vec<u64> = (0..64).collect();
    run_dbc(&MapSystem::doubling(), &c10_schedule(), &seeds, DBC_N, SEED + 10, workers).unwrap()
}

fn c10_shrinking(run: &DbcRun) -> Outcome {
    let report = validate_growth(&c10_schedule(), 1.0);
    let cor4 = report.get(HypothesisSet::Corollary4);
    let rate = match cor4.required_decay {
        RequiredDecay::Polynomial { rate } => rate,
        RequiredDecay::StretchedExponential { .. } => f64::NAN,
    };
    let med_final = median(&run.final_deltas());
    let k = run.checkpoints.len();
    let med_dev: Vec<f64> =
        (k - 3..k).map(|j| median(&run.deltas.iter().map(|d| (d[j] - 1.0).abs()).collect::<Vec<_>>())).collect();
    let comparisons = [(0, 1), (1, 2), (0, 2)];
    let ok = comparisons.iter().filter(|&&(a, b)| med_dev[b] <= med_dev[a]).count();
    outcome(
        (0.8..=1.2).contains(&med_final) && ok >= 2 && (rate - 5.0).abs() < 1e-12,
        format!(
            "median Delta_N {med_final:.4}; median |Delta-1| at n = {:?}: {med_dev:.5?} ({ok}/3 nonincreasing); \
             per-ball growth holds {}, required rate {rate}, gamma constraint met {}",
            &run.checkpoints[k - 3..],
            cor4.growth_holds,
            cor4.parameters_ok
        ),
    )
}

fn c11_identity() -> Outcome {
    let mut rng = stream(SEED, 11);
    let mut worst: f64 = 0.0;
    for _ in 0..100 {
        let beta = 0.01 + 0.98 * uniform(&mut rng);
        let delta = 0.01 + 1.98 * uniform(&mut rng);
        let lhs = dbc::cor4_rate(beta, delta);
        let rhs = dbc::thm4_rate(1.0 - beta, delta);
        worst = worst.max((lhs - rhs).abs() / lhs.abs().max(1.0));
    }
    outcome(worst <= 1e-12, format!("max relative gap {worst:.3e}"))
}

fn c12_run(workers: usize) -> RecurrenceEnsemble {
    let d = MapSystem::doubling();
    let x0 = d.sample(&mut stream(SEED, 1_000_012));
    let p = RecurrenceParams::new(x0, 1.0, 1.0, 1.5, Regime::Exp, KappaMode::Density { theta: 2.0 }).unwrap();
    let seeds: Vec<u64> = (0..32).collect();
    recurrence_ensemble(&d, &p, 1_000_000, &seeds, SEED + 12, workers).unwrap()
}

fn c12_recurrence(e: &RecurrenceEnsemble) -> Outcome {
    let m = median(&e.final_normalized());
    let lim = e.predicted_limit;
    outcome(m >= lim / 2.0 && m <= 2.0 * lim, format!("median normalized count {m:.4}, predicted {lim}"))
}

fn bits(v: impl IntoIterator<Item = f64>) -> Vec<u64> {
    v.into_iter().map(f64::to_bits).collect()
}

fn c13_determinism(
    c4: &WalkEnsembleResult,
    c7: &[CorrelationEstimate],
    c9: &DbcRun,
    c10: &DbcRun,
    c12: &RecurrenceEnsemble,
) -> Outcome {
    let fp4 = |r: &WalkEnsembleResult| (r.hit_counts.clone(), bits(r.delta.iter().flatten().copied()));
    let fp7 = |r: &[CorrelationEstimate]| bits(r.iter().flat_map(|e| [e.cov, e.std_err]));
    let fp_dbc = |r: &DbcRun| (r.hits.clone(), bits(r.deltas.iter().flatten().copied()));
    let fp12 = |r: &RecurrenceEnsemble| bits(r.trajectories.iter().flat_map(|t| t.normalized.iter().copied()));
    let mut diverged = Vec::new();
    for &w in &WORKER_COUNTS[1..] {
        if fp4(&c4_run(w)) != fp4(c4) {
            diverged.push(format!("C4@{w}"));
        }
        if fp7(&c7_run(w)) != fp7(c7) {
            diverged.push(format!("C7@{w}"));
        }
        if fp_dbc(&c9_run(w)) != fp_dbc(c9) {
            diverged.push(format!("C9@{w}"));
        }
        if fp_dbc(&c10_run(w)) != fp_dbc(c10) {
            diverged.push(format!("C10@{w}"));
        }
        if fp12(&c12_run(w)) != fp12(c12) {
            diverged.push(format!("C12@{w}"));
        }
    }
    outcome(diverged.is_empty(), format!("workers {WORKER_COUNTS:?} on C4, C7, C9, C10, C12; diverged: {diverged:?}"))
}

fn main() -> ExitCode {
    let mut failed = Vec::new();
    let mut report = |id: &str, name: &str, f: &mut dyn FnMut() -> Outcome| {
        let t = Instant::now();
        let o = f();
        let verdict = if o.pass { "PASS" } else { "FAIL" };
        println!("{id:>3} {verdict} {name} [{:.1}s]: {}", t.elapsed().as_secs_f64(), o.detail);
        if !o.pass {
            failed.push(id.to_string());
        }
    };

    report("C1", "Stirling/local-CLT agreement", &mut c1_stirling);
    report("C2", "local-CLT rate", &mut c2_local_clt);
    report("C3", "R-factor identity", &mut c3_r_factor);
    let mut r4 = None;
    report("C4", "ASLCLT ensemble", &mut || c4_aslclt(r4.insert(c4_run(WORKER_COUNTS[0]))));
    report("C5", "exact-expectation consistency", &mut c5_exact_expectation);
    report("C6", "condition (A) exponents", &mut c6_condition_a);
    let mut r7 = None;
    report("C7", "correlation oracle", &mut || c7_correlation(r7.insert(c7_run(WORKER_COUNTS[0]))));
    report("C8", "mollifier suite", &mut c8_mollifier);
    let mut r9 = None;
    report("C9", "DBC constant ball", &mut || c9_birkhoff(r9.insert(c9_run(WORKER_COUNTS[0]))));
    let mut r10 = None;
    report("C10", "DBC shrinking balls", &mut || c10_shrinking(r10.insert(c10_run(WORKER_COUNTS[0]))));
    report("C11", "validator identity", &mut c11_identity);
    let mut r12 = None;
    report("C12", "recurrence counting", &mut || c12_recurrence(r12.insert(c12_run(WORKER_COUNTS[0]))));
    let (r4, r7, r9, r10, r12) = (r4.unwrap(), r7.unwrap(), r9.unwrap(), r10.unwrap(), r12.unwrap());
    report("C13", "determinism across worker counts", &mut || c13_determinism(&r4, &r7, &r9, &r10, &r12));

    if failed.is_empty() {
        println!("all acceptance criteria passed");
        ExitCode::SUCCESS
    } else {
        println!("failed criteria: {}", failed.join(", "));
        ExitCode::FAILURE
    }
}
