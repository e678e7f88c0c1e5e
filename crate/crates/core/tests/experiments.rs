use serde_json::json;

use bhk_core::experiments::calibrate::{calibrate_regimes_on, CalibrationGrid};
use bhk_core::experiments::suite::estints_band;
use bhk_core::experiments::{emit_report, load_csv, run_bound_suite, run_rate_sweep, Format, RegimeBounds, Suite, SweepSpec, Table};
use bhk_core::Error;

#[test]
fn suites_are_deterministic() {
    let list = [Suite::Parallel, Suite::Rho, Suite::TwoSided, Suite::Ratio];
    let a = run_bound_suite(11, 300, &list).unwrap();
    let b = run_bound_suite(11, 300, &list).unwrap();
    assert_eq!(a, b);
    let c = run_bound_suite(12, 300, &list).unwrap();
    assert_ne!(a, c);
    assert!(a.all_pass(), "{a:#?}");
}

#[test]
fn suprema_grow_with_the_case_count() {
    // case sets are prefixes of each other, so a sup can only grow
    let small = run_bound_suite(3, 200, &[Suite::X0Y0, Suite::Tangent]).unwrap();
    let large = run_bound_suite(3, 800, &[Suite::X0Y0, Suite::Tangent]).unwrap();
    for (s, l) in small.entries.iter().zip(&large.entries) {
        assert_eq!(s.name, l.name);
        assert!(l.fitted >= s.fitted, "{}: {} < {}", s.name, l.fitted, s.fitted);
    }
}

#[test]
fn zero_cases_is_a_usage_error() {
    assert!(matches!(run_bound_suite(1, 0, &[]), Err(Error::Usage(_))));
}

#[test]
fn envelope_survives_a_later_window() {
    let mut spec = SweepSpec::thm1_diagonal().unwrap().shifted(0.5);
    spec.regime = RegimeBounds::default();
    let fit = run_rate_sweep(&spec).unwrap();
    assert!(fit.envelope_c > 0.0 && fit.envelope_c <= 10.0, "{}", fit.envelope_c);
    assert_eq!(fit.n_flagged, 0);
}

#[test]
fn estints_band_is_stable_under_refinement() {
    let e = [1.6, 2.0, 3.0];
    let coarse = estints_band(&e, 6).unwrap();
    let fine = estints_band(&e, 11).unwrap();
    assert!((fine.c() / coarse.c() - 1.0).abs() <= 0.15, "{} vs {}", coarse.c(), fine.c());
    assert!(fine.c() <= 20.0);
}

#[test]
fn suite_report_round_trips_through_csv() {
    let rep = run_bound_suite(5, 100, &[Suite::Parallel, Suite::Vdb]).unwrap();
    let table = Table::from(&rep);
    let csv = emit_report(&table, &json!({}), Format::Csv).unwrap();
    assert!(table.same(&load_csv(&csv).unwrap()));
    let doc: serde_json::Value = serde_json::from_slice(&emit_report(&table, &json!({"seed": 5}), Format::Json).unwrap()).unwrap();
    assert_eq!(doc["records"].as_array().unwrap().len(), rep.entries.len());
    assert_eq!(doc["config"]["seed"], 5);
}

fn small_grid() -> CalibrationGrid {
    CalibrationGrid {
        thm1_ratios: vec![1.0, 2.0, 4.0, 8.0],
        thm1_pairs: vec![(0.2, 0.0), (0.1, 0.05)],
        thm2_times: vec![1e-3, 1e-2, 5e-2],
        thm2_ratios: vec![0.05, 0.2, 0.5],
        thm2_depth_fractions: vec![1.0],
        ..CalibrationGrid::default()
    }
}

#[test]
fn calibration_thresholds_tighten_with_the_target() {
    let grid = small_grid();
    let loose = calibrate_regimes_on(0.2, &grid).unwrap();
    let tight = calibrate_regimes_on(0.05, &grid).unwrap();
    assert!(tight.config.m_thm1 >= loose.config.m_thm1);
    assert!(tight.config.m1_time <= loose.config.m1_time);
    assert_eq!(loose.grid_hash, grid.hash());
    // measured errors at the chosen edge meet the target
    for p in loose.points.iter().filter(|p| p.approximant == "thm1" && p.ratio >= loose.config.m_thm1) {
        assert!(p.rel_err.is_none_or(|e| e <= 0.2));
    }
    assert!(matches!(calibrate_regimes_on(1e-9, &grid), Err(Error::Calibration(_))));
}
