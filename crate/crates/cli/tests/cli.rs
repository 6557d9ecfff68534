// SPDX-License-Identifier: Apache-2.0

use std::path::Path;
use std::process::{Command, Output};

use serde_json::json;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_kitaev-qse"))
}

fn small_config(out: &Path) -> serde_json::Value {
    json!({
        "output": out,
        "vqe": { "layers": [1], "epochs": 150, "polish_iterations": 200 },
        "qse": { "grid_max": 1, "trotter_steps": [1, 2], "n_k": 1, "n_l": 1 },
        "greens": { "n_k": 1, "n_l": 1, "omega": { "min": -5.0, "max": 5.0, "points": 21 } },
        "dsf": { "fields": { "min": 0.0, "max": 0.2, "points": 2 }, "omega": { "min": -5.0, "max": 5.0, "points": 11 } }
    })
}

fn run_with(dir: &Path, cfg: &serde_json::Value, args: &[&str]) -> Output {
    let path = dir.join("config.json");
    std::fs::write(&path, serde_json::to_string_pretty(cfg).unwrap()).unwrap();
    bin().arg("--config").arg(&path).args(args).output().unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

#[test]
fn odd_site_count_is_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let mut cfg = small_config(dir.path());
    cfg["lattice"] = json!({ "rows": 2, "cols": 2, "sites": 7 });
    let o = run_with(dir.path(), &cfg, &["vqe"]);
    assert!(!o.status.success());
    assert!(stderr(&o).contains("odd"), "{}", stderr(&o));
}

#[test]
fn empty_mu_set_is_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let mut cfg = small_config(dir.path());
    cfg["greens"]["mu"] = json!([]);
    let o = run_with(dir.path(), &cfg, &["greens"]);
    assert!(!o.status.success());
    assert!(stderr(&o).contains("greens.mu"), "{}", stderr(&o));
}

#[test]
fn out_of_range_sites_are_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let mut cfg = small_config(dir.path());
    cfg["greens"]["site_pairs"] = json!([[0, 8]]);
    let o = run_with(dir.path(), &cfg, &["greens"]);
    assert!(!o.status.success());
    assert!(stderr(&o).contains("out of range"), "{}", stderr(&o));
}

#[test]
fn unknown_field_reports_position() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("config.json");
    std::fs::write(&path, "{\n  \"lattice\": { \"rows\": 2 },\n  \"colour\": 1\n}\n").unwrap();
    let o = bin().arg("--config").arg(&path).arg("vqe").output().unwrap();
    assert!(!o.status.success());
    assert!(stderr(&o).contains("line 3"), "{}", stderr(&o));
}

#[test]
fn qse_without_reference_fails() {
    let dir = tempfile::tempdir().unwrap();
    let o = run_with(dir.path(), &small_config(dir.path()), &["qse"]);
    assert!(!o.status.success());
    assert!(stderr(&o).contains("missing reference file"), "{}", stderr(&o));
}

#[test]
fn greens_without_qse_artifact_fails() {
    let dir = tempfile::tempdir().unwrap();
    let o = run_with(dir.path(), &small_config(dir.path()), &["greens"]);
    assert!(!o.status.success());
    assert!(stderr(&o).contains("QSE ground-state artifact"), "{}", stderr(&o));
}

#[test]
fn ed_reference_matches_known_energy() {
    let dir = tempfile::tempdir().unwrap();
    let o = run_with(dir.path(), &small_config(dir.path()), &["ed-reference"]);
    assert!(o.status.success(), "{}", stderr(&o));
    let doc: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("ed_reference.json")).unwrap()).unwrap();
    let e0 = doc["data"]["instances"][0]["ground_energy"].as_f64().unwrap();
    assert!((e0 + 4.0 * 3f64.sqrt()).abs() < 1e-10, "{e0}");
    assert_eq!(doc["meta"]["seed"], 7);
}

#[test]
fn pipeline_runs_and_is_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a");
    let b = dir.path().join("b");
    let cfg = small_config(&a);
    let o = run_with(dir.path(), &cfg, &["all", "--threads", "1"]);
    assert!(o.status.success(), "{}", stderr(&o));
    let o = run_with(dir.path(), &cfg, &["vqe", "--out", b.to_str().unwrap()]);
    assert!(o.status.success(), "{}", stderr(&o));

    for name in ["vqe_sweep.csv", "vqe_reference.json", "vqe_params_d1.json"] {
        let x = std::fs::read_to_string(a.join(name)).unwrap();
        let y = std::fs::read_to_string(b.join(name)).unwrap();
        // Only the output directory differs between the two runs.
        assert_eq!(x.replace(a.to_str().unwrap(), ""), y.replace(b.to_str().unwrap(), ""), "{name}");
    }

    let sweep = std::fs::read_to_string(a.join("vqe_sweep.csv")).unwrap();
    assert!(sweep.starts_with("# kitaev-qse "));
    assert!(sweep.contains("# seed: 7"));
    let row = sweep.lines().find(|l| l.starts_with("1,")).unwrap();
    let de: f64 = row.split(',').nth(5).unwrap().parse().unwrap();
    assert!(de < 1e-6, "{row}");

    let grid = std::fs::read_to_string(a.join("qse_basis_grid.csv")).unwrap();
    let single = grid.lines().find(|l| l.starts_with("0,0,1,")).expect("single-state row");
    assert!(single.split(',').count() == 5);
    let trot = std::fs::read_to_string(a.join("qse_trotter.csv")).unwrap();
    assert_eq!(trot.lines().filter(|l| !l.starts_with('#')).count(), 3);

    let gf = std::fs::read_to_string(a.join("gf_0_1_Z.csv")).unwrap();
    assert_eq!(gf.lines().filter(|l| !l.starts_with('#')).count(), 22);
    for name in ["dsf_qse.csv", "dsf_ed.csv"] {
        let t = std::fs::read_to_string(a.join(name)).unwrap();
        let vals: Vec<f64> = t
            .lines()
            .filter(|l| !l.starts_with('#'))
            .skip(1)
            .filter_map(|l| l.split(',').last()?.parse().ok())
            .collect();
        assert!(!vals.is_empty());
        assert!(vals.iter().all(|v| (0.0..=1.0).contains(v)), "{name}");
    }
}
