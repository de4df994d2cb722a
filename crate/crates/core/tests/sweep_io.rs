use qtradeoff_core::sweep::{
    emit_report, fit_scaling, read_rows, run_sweep, Axis, Format, InstanceFamily, RunMode, SpaceRule, SweepConfig,
};

fn config(modes: Vec<RunMode>) -> SweepConfig {
    SweepConfig {
        n: vec![64, 128, 256, 512],
        t: vec![2],
        space: SpaceRule::Absolute { values: vec![16] },
        modes,
        seeds: 3,
        family: InstanceFamily::Hard,
        out: None,
    }
}

#[test]
fn exact_totals_grow_with_n() {
    let rows = run_sweep(&config(vec![RunMode::Exact])).unwrap();
    assert_eq!(rows.len(), 12);
    assert!(rows.iter().all(|r| r.correct && r.error.is_none()));
    let medians = qtradeoff_core::sweep::cell_medians(&rows);
    let totals: Vec<f64> = medians.values().copied().collect();
    assert!(totals.windows(2).all(|w| w[0] <= w[1]), "{totals:?}");
    let fit = fit_scaling(&rows, Axis::N).unwrap();
    assert!(fit.exponent > 1.0 && fit.exponent < 2.5);
}

#[test]
fn reports_round_trip_and_are_reproducible() {
    let cfg = config(vec![RunMode::Exact, RunMode::Classical, RunMode::CostModel]);
    let rows = run_sweep(&cfg).unwrap();
    let dir = tempfile::tempdir().unwrap();

    let json = dir.path().join("rows.json");
    emit_report(&rows, Format::Json, &json).unwrap();
    assert_eq!(read_rows(&json).unwrap(), rows);

    let csv = dir.path().join("rows.csv");
    emit_report(&rows, Format::Csv, &csv).unwrap();
    assert_eq!(read_rows(&csv).unwrap(), rows);
    let text = std::fs::read_to_string(&csv).unwrap();
    assert!(text.starts_with("N,t,S,mode,seed,T,queries_x,queries_b,space,correct\n"));

    let again = dir.path().join("again.csv");
    emit_report(&run_sweep(&cfg).unwrap(), Format::Csv, &again).unwrap();
    assert_eq!(std::fs::read(&csv).unwrap(), std::fs::read(&again).unwrap());
}

#[test]
fn config_file_round_trip() {
    let text = r#"{"N": [32, 64], "t": [1, 2], "space": {"kind": "fraction-of-n-over-t", "fractions": [0.5]},
                   "modes": ["exact", "classical"], "seeds": 2}"#;
    let cfg: SweepConfig = serde_json::from_str(text).unwrap();
    assert_eq!(cfg.family, InstanceFamily::Hard);
    assert_eq!(cfg.cells().len(), 8);
    let back: SweepConfig = serde_json::from_str(&serde_json::to_string(&cfg).unwrap()).unwrap();
    assert_eq!(back, cfg);
}
