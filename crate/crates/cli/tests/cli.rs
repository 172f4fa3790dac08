use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use wavecorr::config::RunConfig;

fn wavecorr(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_wavecorr"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn write_config(dir: &Path, body: &str) -> String {
    let path = dir.join("config.json");
    fs::write(&path, body).unwrap();
    path.to_string_lossy().into_owned()
}

/// Small lattice so every test runs in well under a second.
const SMALL: &str = r#"{
  "lattice": {"n": 21, "coupling": 290, "length": 0.004},
  "classical": {"samples": 5000, "seed": 3}
}"#;

#[test]
fn garbage_config_fails_with_parse_diagnostic() {
    let dir = tempfile::tempdir().unwrap();
    for body in ["", "{not json", "[1, 2]", r#"{"lattice": {"nn": 3}}"#] {
        let cfg = write_config(dir.path(), body);
        let out = wavecorr(&["run", "--config", &cfg, "--out", dir.path().to_str().unwrap()]);
        assert_eq!(out.status.code(), Some(1), "{body:?}");
        let err = String::from_utf8_lossy(&out.stderr);
        assert!(err.contains("configuration error"), "{err}");
    }
}

#[test]
fn invalid_field_is_named() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), r#"{"input": {"sites": [0, 99]}}"#);
    let out = wavecorr(&["run", "--config", &cfg, "--out", dir.path().to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("input.sites[1]"));
}

#[test]
fn missing_config_and_unwritable_output_are_io_errors() {
    let out = wavecorr(&["run", "--config", "/nonexistent/config.json"]);
    assert_eq!(out.status.code(), Some(3));

    let dir = tempfile::tempdir().unwrap();
    let blocker = dir.path().join("file");
    fs::write(&blocker, "x").unwrap();
    let cfg = write_config(dir.path(), SMALL);
    let target = blocker.join("sub");
    let out = wavecorr(&["run", "--config", &cfg, "--out", target.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn same_seed_gives_byte_identical_csv() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), SMALL);
    let a = dir.path().join("a");
    let b = dir.path().join("b");
    for d in [&a, &b] {
        let out = wavecorr(&["run", "--config", &cfg, "--out", d.to_str().unwrap()]);
        assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    }
    let mut csvs = 0;
    for entry in fs::read_dir(&a).unwrap() {
        let name = entry.unwrap().file_name();
        if name.to_string_lossy().ends_with(".csv") {
            csvs += 1;
            assert_eq!(fs::read(a.join(&name)).unwrap(), fs::read(b.join(&name)).unwrap());
        }
    }
    assert_eq!(csvs, 7);

    let c = dir.path().join("c");
    wavecorr(&["run", "--config", &cfg, "--out", c.to_str().unwrap(), "--seed", "4"]);
    assert_ne!(
        fs::read(a.join("gamma_classical.csv")).unwrap(),
        fs::read(c.join("gamma_classical.csv")).unwrap()
    );
    assert_eq!(
        fs::read(a.join("gamma_quantum.csv")).unwrap(),
        fs::read(c.join("gamma_quantum.csv")).unwrap()
    );
}

#[test]
fn manifest_config_round_trips() {
    let dir = tempfile::tempdir().unwrap();
    let body = r#"{
      "lattice": {"n": 15, "coupling": [290, 280, 270, 260, 250, 240, 230, 220, 210, 200, 190, 180, 170, 160]},
      "input": {"kind": "path_entangled", "sites": [1, -1], "phase": 3.141592653589793},
      "classical": {"enabled": false},
      "scan": {"z_min": 0, "z_max": 0.008, "steps": 9}
    }"#;
    let cfg_path = write_config(dir.path(), body);
    let out_dir = dir.path().join("out");
    let out = wavecorr(&[
        "run", "--config", &cfg_path, "--out", out_dir.to_str().unwrap(),
        "--format", "csv", "--format", "json", "--format", "pgm",
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));

    let manifest: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(out_dir.join("manifest.json")).unwrap()).unwrap();
    let parsed = RunConfig::from_json(&manifest["config"].to_string()).unwrap();
    let mut expected = RunConfig::from_json(body).unwrap();
    expected.output.directory = out_dir.clone();
    expected.output.formats = parsed.output.formats.clone();
    assert_eq!(parsed, expected);
    assert_eq!(parsed.output.formats.len(), 3);

    let files: Vec<&str> = manifest["files"]
        .as_array()
        .unwrap()
        .iter()
        .map(|v| v.as_str().unwrap())
        .collect();
    for f in &files {
        assert!(out_dir.join(f).exists(), "{f}");
    }
    assert!(files.contains(&"single_photon_scan.csv"));
    assert!(files.contains(&"single_photon_scan.pgm"));
    assert!(!files.contains(&"gamma_classical.csv"));
    assert!(manifest["summary"]["pgm_max"]["gamma_quantum.pgm"].as_f64().unwrap() > 0.0);
}

#[test]
fn hom_scan_table() {
    let out = wavecorr(&["hom-scan", "--coupling", "290", "--steps", "5"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "z,coincidence");
    assert_eq!(lines.len(), 6);
    let mid: f64 = lines[3].split(',').nth(1).unwrap().parse().unwrap();
    assert!(mid <= 1e-12);

    let out = wavecorr(&["hom-scan", "--steps", "1"]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn oracle_check_exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let out = wavecorr(&[
        "oracle-check", "--n", "2", "--trials", "10", "--seed", "1",
        "--out", dir.path().to_str().unwrap(),
    ]);
    assert!(out.status.success());
    assert!(String::from_utf8_lossy(&out.stdout).contains("PASS"));
    let report: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(dir.path().join("oracle_report.json")).unwrap())
            .unwrap();
    assert_eq!(report["trials"].as_array().unwrap().len(), 10);

    let out = wavecorr(&["oracle-check", "--n", "9", "--trials", "1"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("envelope"));
}
