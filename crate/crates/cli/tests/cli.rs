use std::f64::consts::PI;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use tflab::operator::{assemble_galerkin, eigen_spectrum};
use tflab::{CountingReport, Domain, QuadSpec, Window};

fn tflab(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_tflab")).args(args).output().expect("binary runs")
}

fn config_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("configs")
}

fn write_config(dir: &Path, name: &str, body: &str) -> PathBuf {
    let p = dir.join(name);
    fs::write(&p, body).unwrap();
    p
}

fn run_ok(cmd: &str, config: &Path, out: &Path, extra: &[&str]) {
    let mut args = vec![cmd, "--config", config.to_str().unwrap(), "--out", out.to_str().unwrap()];
    args.extend_from_slice(extra);
    let o = tflab(&args);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

#[test]
fn spectrum_leading_eigenvalue() {
    let tmp = tempfile::tempdir().unwrap();
    run_ok("spectrum", &config_dir().join("spectrum_disk2.json"), tmp.path(), &[]);
    let csv = fs::read_to_string(tmp.path().join("spectrum.csv")).unwrap();
    let mut lines = csv.lines();
    assert_eq!(lines.next(), Some("k,lambda"));
    let first: f64 = lines.next().unwrap().split(',').nth(1).unwrap().parse().unwrap();
    assert!((first - (1.0 - (-4.0 * PI).exp())).abs() < 1e-9, "{first}");
    let meta: serde_json::Value = serde_json::from_str(&fs::read_to_string(tmp.path().join("spectrum.json")).unwrap()).unwrap();
    assert_eq!(meta["points"][0]["metadata"]["basis_size"], 128);
}

#[test]
fn verify_on_disk_has_no_failures() {
    let tmp = tempfile::tempdir().unwrap();
    run_ok("verify", &config_dir().join("verify_disk2.json"), tmp.path(), &[]);
    let summary: serde_json::Value = serde_json::from_str(&fs::read_to_string(tmp.path().join("verify.json")).unwrap()).unwrap();
    assert_eq!(summary["fail"], 0);
    assert_eq!(summary["reports"], 27);
    let bounds = fs::read_to_string(tmp.path().join("bounds.csv")).unwrap();
    assert_eq!(bounds.lines().count(), 28);
    let counting = fs::read_to_string(tmp.path().join("counting.csv")).unwrap();
    assert_eq!(counting.lines().count(), 10);
}

#[test]
fn outputs_are_byte_identical_across_runs_and_pool_sizes() {
    let tmp = tempfile::tempdir().unwrap();
    for name in ["geometry_square", "sharpness_a", "fit_gs_disks"] {
        let cfg = config_dir().join(format!("{name}.json"));
        let v: serde_json::Value = serde_json::from_str(&fs::read_to_string(&cfg).unwrap()).unwrap();
        let cmd = v["command"].as_str().unwrap().to_string();
        let a = tmp.path().join(format!("{name}_a"));
        let b = tmp.path().join(format!("{name}_b"));
        run_ok(&cmd, &cfg, &a, &["--jobs", "1"]);
        run_ok(&cmd, &cfg, &b, &["--jobs", "4"]);
        let mut files: Vec<_> = fs::read_dir(&a).unwrap().map(|e| e.unwrap().file_name()).collect();
        files.sort();
        assert!(!files.is_empty());
        for f in files {
            assert_eq!(fs::read(a.join(&f)).unwrap(), fs::read(b.join(&f)).unwrap(), "{name}/{f:?}");
        }
    }
}

#[test]
fn spectrum_csv_round_trips_through_verify() {
    let tmp = tempfile::tempdir().unwrap();
    let dom = r#"{"shape": "polygon", "vertices": [[0, 0], [3, 0], [3, 1.5], [0.5, 2.5]]}"#;
    let spec_cfg = write_config(
        tmp.path(),
        "spec.json",
        &format!(r#"{{"command": "spectrum", "domain": {dom}, "basis_size": 48}}"#),
    );
    run_ok("spectrum", &spec_cfg, &tmp.path().join("s"), &[]);
    let deltas = [0.02, 0.1, 0.3, 0.5, 0.7, 0.9];
    let verify_cfg = write_config(
        tmp.path(),
        "verify.json",
        &format!(
            r#"{{"command": "verify", "domain": {dom}, "deltas": {deltas:?},
                "spectrum": {{"source": "csv", "path": "s/spectrum.csv"}},
                "window_constants": {{"gs_c": 1.2, "gs_a": 2.0, "gs_beta": 0.5, "moment_s": 3.0, "moment_cg": 3.69, "k_g": 1.0}},
                "kappa": 1.0}}"#
        ),
    );
    run_ok("verify", &verify_cfg, &tmp.path().join("v"), &[]);
    let from_cli = fs::read_to_string(tmp.path().join("v/counting.csv")).unwrap();

    let d: Domain = serde_json::from_str(dom).unwrap();
    let m = assemble_galerkin(&Window::gaussian(), &d, 48, &QuadSpec::default(), 1e-8).unwrap();
    let spec = eigen_spectrum(&m).unwrap();
    let mut expected = format!("radius,{}\n", CountingReport::CSV_HEADER);
    for delta in deltas {
        let row = CountingReport::compute(&spec, &d, delta).unwrap().csv_row();
        expected.push_str(&format!("{:.16e},{row}\n", 1.0));
    }
    assert_eq!(from_cli, expected);
}

#[test]
fn empty_delta_grid_is_a_config_error() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(
        tmp.path(),
        "c.json",
        r#"{"command": "verify", "domain": {"shape": "disk", "center": [0, 0], "radius": 2}, "deltas": []}"#,
    );
    let o = tflab(&["verify", "--config", cfg.to_str().unwrap(), "--out", tmp.path().to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("deltas"), "{}", stderr(&o));
}

#[test]
fn config_errors_exit_2_and_name_the_key() {
    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path().join("o");
    let cases = [
        (r#"{"command": "spectrum", "domain": {"shape": "empty"}, "basis_sise": 10}"#, "spectrum", "basis_sise"),
        (r#"{"command": "spectrum", "domain": {"shape": "empty"}, "eta": [1, -2]}"#, "spectrum", "eta"),
        (r#"{"command": "geometry", "domain": {"shape": "empty"}}"#, "spectrum", "command"),
        (r#"{"command": "sharpness", "deltas": [0.1], "radii": [2], "regime": "c"}"#, "sharpness", "regime"),
        (r#"{"command": "spectrum"}"#, "spectrum", "domain"),
    ];
    for (i, (body, cmd, key)) in cases.iter().enumerate() {
        let cfg = write_config(tmp.path(), &format!("c{i}.json"), body);
        let o = tflab(&[cmd, "--config", cfg.to_str().unwrap(), "--out", out.to_str().unwrap()]);
        assert_eq!(o.status.code(), Some(2), "{body}: {}", stderr(&o));
        assert!(stderr(&o).contains(key), "{body}: {}", stderr(&o));
    }
    let o = tflab(&["spectrum", "--config", tmp.path().join("missing.json").to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn numerical_and_hypothesis_exit_codes() {
    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path().join("o");
    let budget = write_config(
        tmp.path(),
        "q.json",
        r#"{"command": "spectrum", "domain": {"shape": "disk", "center": [0, 0], "radius": 2},
            "radii": [1.5], "basis_size": 64, "quadrature": {"radial": 2}}"#,
    );
    let o = tflab(&["spectrum", "--config", budget.to_str().unwrap(), "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(3), "{}", stderr(&o));
    assert!(stderr(&o).contains("R = 1.5"), "{}", stderr(&o));

    let hyp = write_config(
        tmp.path(),
        "h.json",
        r#"{"command": "verify", "domain": {"shape": "disk", "center": [0, 0], "radius": 2}, "deltas": [0.1],
            "spectrum": {"source": "analytic", "k_max": 80},
            "window_constants": {"gs_c": 1.2, "gs_a": 2.0, "gs_beta": 0.4, "moment_s": 3.0, "moment_cg": 3.69, "k_g": 1.0}}"#,
    );
    let o = tflab(&["verify", "--config", hyp.to_str().unwrap(), "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(4), "{}", stderr(&o));
}

#[test]
fn sampled_window_and_polygon_files_resolve_relative_to_the_config() {
    let tmp = tempfile::tempdir().unwrap();
    let mut w = String::from("t,value\n");
    let step = 0.02;
    for j in -300..=300 {
        let t = j as f64 * step;
        w.push_str(&format!("{t},{}\n", 2f64.powf(0.25) * (-PI * t * t).exp()));
    }
    fs::write(tmp.path().join("g.csv"), w).unwrap();
    fs::write(tmp.path().join("tri.csv"), "x,y\n0,0\n2,0\n0,2\n").unwrap();
    let cfg = write_config(
        tmp.path(),
        "c.json",
        r#"{"command": "spectrum", "window": {"kind": "sampled", "path": "g.csv"},
            "domain": {"polygon_csv": "tri.csv"}, "basis_size": 24, "output": "res"}"#,
    );
    let o = tflab(&["spectrum", "--config", cfg.to_str().unwrap()]);
    assert!(o.status.success(), "{}", stderr(&o));
    let meta: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(tmp.path().join("res/spectrum.json")).unwrap()).unwrap();
    let trace = meta["points"][0]["trace"].as_f64().unwrap();
    assert!(trace > 1.0 && trace < 2.0, "{trace}");
}
