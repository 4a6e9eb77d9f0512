use std::f64::consts::PI;

use topolattice::harness::{
    emit_csv, preset_fig1, run_config, run_experiment, ExperimentConfig, Preset, Rows, ZGrid,
};
use topolattice::harness::presets::DEFAULT_G;
use topolattice::lattice::parametric_couplings;

/// PPDC oracle by a different route: midpoint rule over the unwrapped
/// Bloch angle, differentiated numerically.
fn ppdc_by_angle(j1: f64, j2: f64, z: f64) -> f64 {
    let nk = 20_000;
    let h = 2.0 * PI / nk as f64;
    let angle = |k: f64| (j2 * k.sin()).atan2(j1 + j2 * k.cos());
    let mut sum = 0.0;
    for i in 0..nk {
        let k = -PI + (i as f64 + 0.5) * h;
        let mut dtheta = angle(k + 1e-5) - angle(k - 1e-5);
        if dtheta > PI {
            dtheta -= 2.0 * PI;
        } else if dtheta < -PI {
            dtheta += 2.0 * PI;
        }
        let e = (j1 + j2 * k.cos()).hypot(j2 * k.sin());
        sum += (1.0 - (2.0 * e * z).cos()) * dtheta / 2e-5;
    }
    0.5 * sum / nk as f64
}

#[test]
fn fig1_oracle_column_recomputed() {
    for w in [0.1, 0.3, 0.9] {
        let rec = preset_fig1(w, 1.0, 5, ZGrid { min: 0.0, max: 30.0, step: 1.5 }).unwrap();
        let (j1, j2) = parametric_couplings(DEFAULT_G, 1.0, w).unwrap();
        let Rows::Ppdc(rows) = rec.rows else { panic!("ppdc rows") };
        for row in rows {
            let expect = ppdc_by_angle(j1, j2, row.z_mm);
            let got = row.ppdc_oracle.unwrap();
            assert!((got - expect).abs() <= 1e-6, "w={w} z={}: {got} vs {expect}", row.z_mm);
        }
    }
}

fn csv_with_threads(cfg: &ExperimentConfig, threads: usize) -> String {
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .unwrap()
        .install(|| run_experiment(cfg).unwrap().to_csv())
}

#[test]
fn byte_identical_across_thread_counts() {
    for preset in [Preset::Fig2d, Preset::Fig3b] {
        let cfg = preset.config(None, None).unwrap();
        assert_eq!(csv_with_threads(&cfg, 1), csv_with_threads(&cfg, 8));
    }
    let mut ensemble = Preset::Fig4d.config(None, Some(3)).unwrap();
    ensemble.disorder.as_mut().unwrap().seeds = vec![3, 1, 2];
    ensemble.experiment = topolattice::harness::ExperimentKind::DisorderEnsemble;
    assert_eq!(csv_with_threads(&ensemble, 1), csv_with_threads(&ensemble, 8));
}

#[test]
fn json_config_reproduces_preset() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = Preset::Fig2b.config(None, None).unwrap();
    let path = dir.path().join("fig2b.json");
    std::fs::write(&path, cfg.to_json()).unwrap();
    let from_file = run_config(&path).unwrap();
    let direct = run_experiment(&cfg).unwrap();
    assert_eq!(from_file.config_hash, direct.config_hash);
    assert_eq!(from_file.to_csv(), direct.to_csv());
}

#[test]
fn invalid_config_writes_nothing() {
    let dir = tempfile::tempdir().unwrap();
    let mut cfg = Preset::Fig2a.config(None, None).unwrap();
    cfg.z_step = Some(0.0);
    let out = dir.path().join("out.csv");
    let err = run_experiment(&cfg).and_then(|r| emit_csv(&r, &out)).unwrap_err();
    assert_eq!(err.exit_code(), 2);
    assert_eq!(std::fs::read_dir(dir.path()).unwrap().count(), 0);

    let bad = r#"{"schema":1,"experiment":"ppdc-sweep","cells":5,
        "model":{"kind":"parametric","g":0.4,"t":1.0,"w":1.5},
        "z_min":0,"z_max":1,"z_step":0.1}"#;
    let err = ExperimentConfig::from_json_str(bad)
        .and_then(|c| run_experiment(&c))
        .unwrap_err();
    assert!(err.to_string().contains("model.w"), "{err}");
}

#[test]
fn csv_and_sidecar_written() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("fig4d.csv");
    let rec = run_experiment(&Preset::Fig4d.config(None, None).unwrap()).unwrap();
    emit_csv(&rec, &out).unwrap();
    let csv = std::fs::read_to_string(&out).unwrap();
    assert!(csv.starts_with("j1_per_mm,j2_per_mm,ratio,delta_d_um,seed,s_t,s_t_closed_form,edge_intensity\n"));
    assert_eq!(csv.lines().count(), 12);
    let summary: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("fig4d.summary.json")).unwrap()).unwrap();
    assert_eq!(summary["summary"]["argmax_index"], 5);
    assert_eq!(summary["config_hash"].as_str().unwrap().len(), 64);
}
