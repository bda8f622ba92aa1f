use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};
use std::time::{Duration, Instant};

fn bin() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_cryomux"));
    c.env_remove("CRYOMUX_OUT_DIR");
    c
}

fn golden() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/golden")
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn files_in(dir: &Path) -> Vec<String> {
    let mut v: Vec<String> = match fs::read_dir(dir) {
        Ok(rd) => rd.map(|e| e.unwrap().file_name().into_string().unwrap()).collect(),
        Err(_) => Vec::new(),
    };
    v.sort();
    v
}

fn write_scenario(dir: &Path, text: &str) -> PathBuf {
    let p = dir.join("scenario.json");
    fs::write(&p, text).unwrap();
    p
}

#[test]
fn golden_outputs_match() {
    let listed = run(&["list", "--format", "json"]);
    let names: Vec<String> = serde_json::from_slice::<Vec<serde_json::Value>>(&listed.stdout)
        .unwrap()
        .iter()
        .map(|e| e["name"].as_str().unwrap().to_string())
        .collect();
    for name in names {
        let input = golden().join("inputs").join(format!("{name}.json"));
        assert!(input.exists(), "no golden input for {name}");
        let expected = golden().join("expected").join(&name);
        let out = tempfile::tempdir().unwrap();
        let start = Instant::now();
        let o = run(&[
            "run",
            input.to_str().unwrap(),
            "--out-dir",
            out.path().to_str().unwrap(),
        ]);
        assert!(o.status.success(), "{name}: {}", String::from_utf8_lossy(&o.stderr));
        assert!(
            start.elapsed() < Duration::from_secs(60),
            "{name} took {:?}",
            start.elapsed()
        );
        assert_eq!(files_in(out.path()), files_in(&expected), "{name}: file set differs");
        for f in files_in(&expected) {
            let got = fs::read(out.path().join(&f)).unwrap();
            let want = fs::read(expected.join(&f)).unwrap();
            assert!(got == want, "{name}/{f} differs from the golden file");
        }
    }
}

#[test]
fn seeded_reruns_are_byte_identical() {
    let input = golden().join("inputs/fig3f_slope.json");
    for format in ["csv", "json"] {
        let (a, b) = (tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap());
        for d in [&a, &b] {
            let o = run(&[
                "run",
                input.to_str().unwrap(),
                "--seed",
                "99",
                "--format",
                format,
                "--out-dir",
                d.path().to_str().unwrap(),
            ]);
            assert!(o.status.success());
        }
        let files = files_in(a.path());
        assert!(!files.is_empty());
        assert_eq!(files, files_in(b.path()));
        for f in files {
            assert_eq!(
                fs::read(a.path().join(&f)).unwrap(),
                fs::read(b.path().join(&f)).unwrap(),
                "{f}"
            );
        }
    }
}

#[test]
fn seed_override_changes_noisy_outputs_and_hash() {
    let input = golden().join("inputs/fig3f_slope.json");
    let (a, b) = (tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap());
    run(&["run", input.to_str().unwrap(), "--out-dir", a.path().to_str().unwrap()]);
    run(&[
        "run",
        input.to_str().unwrap(),
        "--seed",
        "5",
        "--out-dir",
        b.path().to_str().unwrap(),
    ]);
    let read = |d: &Path| fs::read_to_string(d.join("fig3f_slope_echo.csv")).unwrap();
    let (x, y) = (read(a.path()), read(b.path()));
    assert_ne!(x, y);
    assert!(y.contains("# seed: 5\n"));
    assert_ne!(x.lines().nth(1), y.lines().nth(1), "hash must include the seed");
}

#[test]
fn csv_carries_preamble_and_units() {
    let input = golden().join("inputs/methods_t1_limit.json");
    let out = tempfile::tempdir().unwrap();
    assert!(run(&[
        "run",
        input.to_str().unwrap(),
        "--out-dir",
        out.path().to_str().unwrap()
    ])
    .status
    .success());
    let text = fs::read_to_string(out.path().join("methods_t1_limit_t1_limit.csv")).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "# scenario: methods_t1_limit");
    assert!(lines[1].starts_with("# hash: sha256:") && lines[1].len() == "# hash: sha256:".len() + 64);
    assert_eq!(lines[2], "# seed: 0");
    assert_eq!(lines[3], "t1_limit [s],attenuation [dB],t1_limit_attenuated [s]");
    assert_eq!(lines.len(), 5, "single data row");
    let t1: f64 = lines[4].split(',').next().unwrap().parse().unwrap();
    assert!((t1 - 50e-6).abs() / 50e-6 < 0.05, "{t1}");
}

#[test]
fn empty_file_exits_3_without_outputs() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("out");
    for text in ["", "{", "{\"scenario\": \"fig2_power\", \"params\": {\"volts\": 1}}"] {
        let f = write_scenario(dir.path(), text);
        let o = run(&["run", f.to_str().unwrap(), "--out-dir", out.to_str().unwrap()]);
        assert_eq!(o.status.code(), Some(3), "{text:?}");
        assert!(files_in(&out).is_empty());
    }
    let o = run(&["run", dir.path().join("missing.json").to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(3));
}

#[test]
fn unknown_scenario_exits_2() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("out");
    let f = write_scenario(dir.path(), r#"{"scenario": "fig7_magic"}"#);
    let f = f.to_str().unwrap();
    assert_eq!(
        run(&["run", f, "--out-dir", out.to_str().unwrap()]).status.code(),
        Some(2)
    );
    assert_eq!(run(&["validate", f]).status.code(), Some(2));
    assert!(files_in(&out).is_empty());
}

#[test]
fn downstream_errors_exit_4_without_outputs() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("out");
    let f = write_scenario(
        dir.path(),
        r#"{"scenario": "fig2_power", "params": {"v_dd_v": [0.7, -0.1]}}"#,
    );
    let o = run(&["run", f.to_str().unwrap(), "--out-dir", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(4), "{}", String::from_utf8_lossy(&o.stderr));
    assert!(files_in(&out).is_empty());
}

#[test]
fn list_is_stable_and_json_matches_text() {
    let a = run(&["list"]);
    let b = run(&["list"]);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
    let text_names: Vec<String> = String::from_utf8(a.stdout)
        .unwrap()
        .lines()
        .map(|l| l.split_whitespace().next().unwrap().to_string())
        .collect();
    let j1 = run(&["list", "--format", "json"]);
    assert_eq!(j1.stdout, run(&["list", "--format", "json"]).stdout);
    let json: Vec<serde_json::Value> = serde_json::from_slice(&j1.stdout).unwrap();
    let json_names: Vec<String> = json.iter().map(|e| e["name"].as_str().unwrap().to_string()).collect();
    assert_eq!(text_names, json_names);
    for required in [
        "fig2_power",
        "fig3_coherence",
        "fig3f_slope",
        "fig4a_rb",
        "fig4b_tdm",
        "methods_t1_limit",
        "methods_teff",
        "scaling_capacity",
    ] {
        assert!(json_names.iter().any(|n| n == required), "{required}");
    }
}

#[test]
fn validate_writes_nothing() {
    let dir = tempfile::tempdir().unwrap();
    let f = write_scenario(dir.path(), r#"{"scenario": "fig4b_tdm", "seed": 3}"#);
    let o = bin()
        .current_dir(dir.path())
        .args(["validate", f.to_str().unwrap()])
        .output()
        .unwrap();
    assert!(o.status.success());
    assert!(String::from_utf8(o.stdout).unwrap().starts_with("ok fig4b_tdm sha256:"));
    assert_eq!(files_in(dir.path()), vec!["scenario.json".to_string()]);
}

#[test]
fn out_dir_from_environment() {
    let dir = tempfile::tempdir().unwrap();
    let f = write_scenario(dir.path(), r#"{"scenario": "scaling_capacity"}"#);
    let out = dir.path().join("env_out");
    let o = bin()
        .env("CRYOMUX_OUT_DIR", &out)
        .args(["run", f.to_str().unwrap()])
        .output()
        .unwrap();
    assert!(o.status.success());
    assert_eq!(
        files_in(&out),
        vec![
            "scaling_capacity_capacity.csv".to_string(),
            "scaling_capacity_required.csv".to_string()
        ]
    );
}

#[test]
fn tdm_default_spans_zero_to_sixty_ns() {
    let dir = tempfile::tempdir().unwrap();
    let f = write_scenario(dir.path(), r#"{"scenario": "fig4b_tdm"}"#);
    let o = run(&["run", f.to_str().unwrap(), "--out-dir", dir.path().to_str().unwrap()]);
    assert!(o.status.success());
    let text = fs::read_to_string(dir.path().join("fig4b_tdm_tdm.csv")).unwrap();
    let rows: Vec<Vec<f64>> = text
        .lines()
        .skip(4)
        .map(|l| l.split(',').map(|c| c.parse().unwrap()).collect())
        .collect();
    assert_eq!(rows.first().unwrap()[0], 0.0);
    assert_eq!(rows.last().unwrap()[0], 60.0);
    assert!(rows.iter().all(|r| (r[1] + r[2] - 1.0).abs() < 1e-12));
}
