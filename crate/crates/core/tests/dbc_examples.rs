use bcsim::dbc::{build_ball_schedule, run_dbc, GrowthProfile};
use bcsim::dynsys::MapSystem;
use bcsim::stats::median;

#[test]
fn cantor_shrinking_targets_track_their_measure() {
    let c = MapSystem::tripling_cantor();
    let s = build_ball_schedule(&c, 0.0, GrowthProfile::PerBallPoly { beta: 0.3, gamma: 0.0 }, 200_000).unwrap();
    assert!(s.is_nested());
    let seeds: Vec<u64> = (0..16).collect();
    let run = run_dbc(&c, &s, &seeds, 200_000, 5, 0).unwrap();
    let m = median(&run.final_deltas());
    assert!((0.8..=1.2).contains(&m), "median {m}");
}

#[test]
fn intermittent_map_reports_a_measure_band() {
    let mp = MapSystem::manneville_pomeau(0.5).unwrap();
    let s = build_ball_schedule(&mp, 0.7, GrowthProfile::Constant { measure: 0.1 }, 100_000).unwrap();
    let seeds: Vec<u64> = (0..8).collect();
    let run = run_dbc(&mp, &s, &seeds, 100_000, 6, 0).unwrap();
    assert!(run.sum_measure_band.is_some());
    let m = median(&run.final_deltas());
    // intermittency slows the ergodic averages; only a loose band is expected
    assert!((0.5..=1.5).contains(&m), "median {m}");
}
