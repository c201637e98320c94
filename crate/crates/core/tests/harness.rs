use lvspread::harness::{
    load_config, parse_config, run_experiment, ExperimentConfig, ExperimentKind, LlwMode, PlotKind,
    RunRecord, SweepAxis, SweepSettings,
};
use lvspread::rd_sim::io::{read_snapshot_csv, read_trace_csv};
use lvspread::speeds::{DecayRates, ModelParams, SpreadingRegime};
use lvspread::Error;

fn reference(kind: ExperimentKind) -> ExperimentConfig {
    ExperimentConfig::new(
        kind,
        ModelParams::new(1.0, 1.0, 0.5, 0.5).unwrap(),
        DecayRates::new(1.0, 0.5, 0.5).unwrap(),
    )
}

#[test]
fn speeds_with_bound_endpoints() {
    let rec = run_experiment(&reference(ExperimentKind::Speeds)).unwrap();
    let r = rec.report.unwrap();
    assert_eq!(r.regime, SpreadingRegime::Separated);
    assert!((r.c1 - 2.5).abs() < 1e-12);
    assert!((r.c2.unwrap() - 1.5).abs() < 1e-12);
    assert!((r.c3.unwrap() + 1.5).abs() < 1e-12);
    assert!(rec.pass);
}

#[test]
fn config_file_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("cfg.json");
    let cfg = reference(ExperimentKind::Hj);
    std::fs::write(&path, serde_json::to_string_pretty(&cfg).unwrap()).unwrap();
    assert_eq!(load_config(&path).unwrap(), cfg);

    std::fs::write(&path, "{\n  \"kind\": \"speeds\",\n  \"params\": 3\n}").unwrap();
    let err = load_config(&path).unwrap_err();
    assert!(err.is_validation());
    assert!(err.to_string().contains("line 3"), "{err}");
    assert!(matches!(load_config(&dir.path().join("missing.json")), Err(Error::Io { .. })));
}

#[test]
fn hj_kind_writes_artifacts() {
    let dir = tempfile::tempdir().unwrap();
    let mut cfg = reference(ExperimentKind::Hj);
    cfg.output_dir = Some(dir.path().to_path_buf());
    let rec = run_experiment(&cfg).unwrap();
    assert!(rec.pass, "{:#?}", rec.checks);
    let hj = rec.hj.as_ref().unwrap();
    assert!((hj.zero_set_speed - 1.5).abs() < 0.03);
    for a in &rec.artifacts {
        assert!(dir.path().join(a).exists(), "{a}");
    }
    let back = RunRecord::read_json(&dir.path().join("report.json")).unwrap();
    assert_eq!(back, rec);
}

#[test]
fn tangfife_rejects_separated_speeds() {
    let mut cfg = reference(ExperimentKind::Tangfife);
    cfg.llw.mode = Some(LlwMode::LowerBound);
    let err = run_experiment(&cfg).unwrap_err();
    assert!(err.is_validation(), "{err}");
}

#[test]
fn tangfife_three_zones() {
    let dir = tempfile::tempdir().unwrap();
    let mut cfg = reference(ExperimentKind::Tangfife);
    cfg.decay = DecayRates::new(0.5, 0.5, 0.5).unwrap();
    cfg.t_end = 150.0;
    cfg.grid.dx = 0.2;
    cfg.llw.mode = Some(LlwMode::LowerBound);
    cfg.output_dir = Some(dir.path().to_path_buf());
    let rec = run_experiment(&cfg).unwrap();
    let r = rec.report.as_ref().unwrap();
    assert_eq!(r.regime, SpreadingRegime::TangFife);
    let prof = rec.profile.as_ref().unwrap();
    assert_eq!(prof.zones.len(), 3);
    assert!(prof.longest_v_plateau.is_some());

    // Every CSV re-parses into what produced it.
    let snap = dir.path().join("snapshot_150.csv");
    let (xs, state) = read_snapshot_csv(&snap).unwrap();
    assert!((state.t - 150.0).abs() < 0.01);
    assert_eq!(xs.len(), state.u.len());
    let tr = read_trace_csv(&dir.path().join("trace_u_right.csv")).unwrap();
    assert_eq!(tr.name, "u_right");
    assert!(dir.path().join("profile.svg").exists());
    for a in &rec.artifacts {
        assert!(dir.path().join(a).exists(), "{a}");
    }
}

fn mixed_sweep(dir: &std::path::Path) -> RunRecord {
    let mut cfg = reference(ExperimentKind::Sweep);
    cfg.params = ModelParams::new(1.0, 1.0, 0.5, 1.5).unwrap();
    cfg.llw.mode = Some(LlwMode::Given);
    cfg.llw.c_llw = Some(1.6);
    cfg.sweep = Some(SweepSettings {
        base: ExperimentKind::Speeds,
        axes: vec![SweepAxis {
            param: "sigma1".into(),
            start: 2.05,
            end: 4.0,
            count: 40,
        }],
    });
    cfg.output_dir = Some(dir.to_path_buf());
    run_experiment(&cfg).unwrap()
}

#[test]
fn mixed_sweep_reproduces_c2_shape() {
    let dir = tempfile::tempdir().unwrap();
    let rec = mixed_sweep(dir.path());
    assert_eq!(rec.sweep.as_ref().unwrap().points, 40);
    let mut rdr = csv::Reader::from_path(dir.path().join("sweep.csv")).unwrap();
    let h = rdr.headers().unwrap().clone();
    let ci = h.iter().position(|x| x == "c2").unwrap();
    let c2: Vec<f64> = rdr
        .records()
        .map(|r| r.unwrap()[ci].parse().unwrap())
        .collect();
    assert!(c2[0] > 1.6 + 0.1, "starts above the plateau: {}", c2[0]);
    assert!(c2.windows(2).all(|w| w[1] <= w[0] + 1e-12), "{c2:?}");
    assert!((c2.last().unwrap() - 1.6).abs() < 1e-12, "ends on the plateau");
    assert!(c2.iter().all(|&c| c >= 1.6 - 1e-12));
    assert!(dir.path().join("point_0000/report.json").exists());
    assert!(dir.path().join("speed_curve.svg").exists());
}

#[test]
fn deterministic_outputs() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    let ra = mixed_sweep(a.path());
    let rb = mixed_sweep(b.path());
    assert_ne!(ra.config_hash, rb.config_hash, "output dirs differ");
    let mut ra2 = ra.without_timestamps();
    let mut rb2 = rb.without_timestamps();
    ra2.config_hash.clear();
    rb2.config_hash.clear();
    assert_eq!(ra2, rb2);
    for f in ["sweep.csv", "speed_curve.svg"] {
        assert_eq!(
            std::fs::read(a.path().join(f)).unwrap(),
            std::fs::read(b.path().join(f)).unwrap()
        );
    }
    let cfg = reference(ExperimentKind::Speeds);
    let x = run_experiment(&cfg).unwrap().without_timestamps();
    let y = run_experiment(&cfg).unwrap().without_timestamps();
    assert_eq!(x, y);
}

#[test]
fn plot_kind_names() {
    assert_eq!(PlotKind::parse("front_trace").unwrap(), PlotKind::FrontTrace);
    assert!(PlotKind::parse("histogram").is_err());
}

#[test]
fn minimal_json_defaults() {
    let c = parse_config(
        r#"{"kind":"simulate","params":{"d":1,"r":1,"a":0.5,"b":0.5},
            "decay":{"lambda_u":1,"lambda_v_plus":0.5,"lambda_v_minus":0.5}}"#,
    )
    .unwrap();
    assert_eq!(c.kind, ExperimentKind::Simulate);
    assert!(c.output_dir.is_none());
}
