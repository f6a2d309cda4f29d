use bcsim::dynsys::MapSystem;
use bcsim::recurrence::{liminf_ensemble, recurrence_ensemble, KappaMode, ProbeTarget, RecurrenceParams, Regime};
use bcsim::stats::median;

#[test]
fn running_minimum_vanishes_above_the_dimension() {
    let d = MapSystem::doubling();
    let seeds: Vec<u64> = (0..32).collect();
    let rows = liminf_ensemble(&d, ProbeTarget::Fixed { x0: 0.3 }, 2.0, 1_000_000, &seeds, 77, 0).unwrap();
    let small = rows.iter().filter(|r| *r.last().unwrap() < 0.05).count();
    assert!(small * 10 >= 9 * rows.len(), "{small} of {}", rows.len());
}

#[test]
fn polynomial_regime_count_within_factor_two() {
    let d = MapSystem::doubling();
    let p = RecurrenceParams::new(0.3, 1.0, 0.5, 1.5, Regime::Poly { delta: 1.0 }, KappaMode::Density { theta: 2.0 })
        .unwrap();
    let seeds: Vec<u64> = (0..32).collect();
    let e = recurrence_ensemble(&d, &p, 1_000_000, &seeds, 78, 0).unwrap();
    let m = median(&e.final_normalized());
    assert_eq!(e.predicted_limit, 4.0);
    assert!((2.0..=8.0).contains(&m), "median {m}");
}

#[test]
fn self_returns_stay_finite() {
    let d = MapSystem::doubling();
    let seeds: Vec<u64> = (0..8).collect();
    let rows = liminf_ensemble(&d, ProbeTarget::SelfReturn, 1.0, 100_000, &seeds, 79, 0).unwrap();
    for r in rows {
        assert!(*r.last().unwrap() < 1.0);
    }
}
