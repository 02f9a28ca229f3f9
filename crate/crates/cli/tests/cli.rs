use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_patchkit"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exit code")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn out_arg(dir: &Path) -> String {
    dir.to_str().unwrap().to_string()
}

#[test]
fn synth_prints_dimensions_and_writes_record() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(&[
        "synth",
        "--f",
        "28",
        "--eps-r",
        "1.96",
        "--h-mm",
        "0.762",
        "--out",
        &out_arg(dir.path()),
    ]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let s = stdout(&o);
    assert!(s.contains("4.4005 mm"), "{s}");
    assert!(s.contains("3.2508 mm"), "{s}");
    assert!(s.contains("196.5"), "{s}");
    let rec: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(dir.path().join("design.json")).unwrap()).unwrap();
    assert!((rec["closed_form"]["w_patch_m"].as_f64().unwrap() - 4.400498e-3).abs() < 1e-8);
}

#[test]
fn synth_config_errors_exit_2() {
    assert_eq!(code(&run(&["synth", "--eps-r", "0.5"])), 2);
    let o = run(&["synth", "--f", "0"]);
    assert_eq!(code(&o), 2);
    assert!(stderr(&o).contains("positive"));
    assert_eq!(code(&run(&["synth", "--substrate", "fr99"])), 2);
    assert_eq!(code(&run(&["synth", "--bogus"])), 2);
}

#[test]
fn config_file_and_flag_precedence() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.json");
    fs::write(
        &cfg,
        r#"{"target":{"f_ghz":10},"substrate":{"eps_r":4.3,"h_mm":1.6}}"#,
    )
    .unwrap();
    let out = out_arg(dir.path());
    let o = run(&["synth", "--config", cfg.to_str().unwrap(), "--out", &out]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    assert!(stdout(&o).contains("9.2081 mm"), "{}", stdout(&o));
    let o = run(&[
        "synth",
        "--config",
        cfg.to_str().unwrap(),
        "--f",
        "28",
        "--eps-r",
        "1.96",
        "--h-mm",
        "0.762",
        "--out",
        &out,
    ]);
    assert!(stdout(&o).contains("4.4005 mm"), "{}", stdout(&o));

    fs::write(&cfg, r#"{"target":{"frequency":10}}"#).unwrap();
    let o = run(&["synth", "--config", cfg.to_str().unwrap()]);
    assert_eq!(code(&o), 2);
    assert_eq!(
        code(&run(&["synth", "--config", "/nonexistent/run.json"])),
        2
    );
}

#[test]
fn analyze_writes_four_files() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(&["analyze", "--out", &out_arg(dir.path())]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let s = stdout(&o);
    let f_line = s.lines().find(|l| l.starts_with("f_res")).unwrap();
    let f: f64 = f_line.split_whitespace().nth(1).unwrap().parse().unwrap();
    assert!((f - 28.0).abs() < 0.05, "{f}");
    let s11_line = s.lines().find(|l| l.starts_with("S11 at f_res")).unwrap();
    let s11: f64 = s11_line.split_whitespace().nth(3).unwrap().parse().unwrap();
    assert!(s11 <= -20.0);
    let mut names: Vec<String> = fs::read_dir(dir.path())
        .unwrap()
        .map(|e| e.unwrap().file_name().into_string().unwrap())
        .collect();
    names.sort();
    assert_eq!(
        names,
        ["patch.s1p", "pattern.csv", "report.txt", "sweep.csv"]
    );
    let report = fs::read_to_string(dir.path().join("report.txt")).unwrap();
    assert!(report.contains("Assumptions"));
}

#[test]
fn analyze_outputs_are_deterministic() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    assert_eq!(
        code(&run(&[
            "analyze",
            "--points",
            "101",
            "--out",
            &out_arg(a.path())
        ])),
        0
    );
    assert_eq!(
        code(&run(&[
            "analyze",
            "--points",
            "101",
            "--out",
            &out_arg(b.path())
        ])),
        0
    );
    for f in ["patch.s1p", "pattern.csv", "report.txt", "sweep.csv"] {
        assert_eq!(
            fs::read(a.path().join(f)).unwrap(),
            fs::read(b.path().join(f)).unwrap(),
            "{f}"
        );
    }
}

#[test]
fn analyze_band_without_resonance_exits_1() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(&[
        "analyze",
        "--band",
        "29",
        "30",
        "--out",
        &out_arg(dir.path()),
    ]);
    assert_eq!(code(&o), 1);
    assert!(
        stderr(&o).contains("resonance not bracketed"),
        "{}",
        stderr(&o)
    );
    assert_eq!(code(&run(&["analyze", "--band", "30", "29"])), 2);
    assert_eq!(code(&run(&["analyze", "--efficiency", "0"])), 2);
}

#[test]
fn tolerance_is_repeatable_and_reports_seed() {
    let args = ["tolerance", "--seed", "7", "--n", "40"];
    let a = run(&args);
    let b = run(&args);
    assert_eq!(code(&a), 0, "{}", stderr(&a));
    assert_eq!(stdout(&a), stdout(&b));
    assert!(stdout(&a).contains("seed                 7"));
}

#[test]
fn tolerance_zero_spread_and_bad_spec() {
    let o = run(&["tolerance", "--dim-tol", "0", "--eps-tol", "0", "--n", "8"]);
    assert_eq!(code(&o), 0);
    let line = stdout(&o)
        .lines()
        .find(|l| l.starts_with("f_res"))
        .unwrap()
        .to_string();
    assert!(line.contains("std 0.000000"), "{line}");
    assert_eq!(code(&run(&["tolerance", "--n", "0"])), 2);
    assert_eq!(code(&run(&["tolerance", "--dim-tol", "-0.1"])), 2);
}

#[test]
fn layout_polygon_counts() {
    let dir = tempfile::tempdir().unwrap();
    let out = out_arg(dir.path());
    let o = run(&["layout", "--uslot", "default", "--out", &out]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    assert!(stdout(&o).contains("polygons             5"));
    let json: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(dir.path().join("layout.json")).unwrap()).unwrap();
    assert_eq!(json["polygons"].as_array().unwrap().len(), 5);
    assert!(json["notes"][0].as_str().unwrap().contains("placeholder"));
    assert!(dir.path().join("layout.dxf").exists());

    let o = run(&["layout", "--out", &out]);
    assert!(stdout(&o).contains("polygons             4"));
    let json: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(dir.path().join("layout.json")).unwrap()).unwrap();
    assert!(json.get("notes").is_none());
}

#[test]
fn oversized_uslot_exits_1() {
    let o = run(&["layout", "--uslot", "default", "--uslot-w-mm", "80"]);
    assert_eq!(code(&o), 1, "{}", stderr(&o));
    assert_eq!(code(&run(&["layout", "--uslot", "wide"])), 2);
}

#[test]
fn report_with_and_without_reference_rows() {
    let o = run(&["report", "--points", "101"]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let s = stdout(&o);
    assert!(s.contains("4.40") && s.contains("3.25"));
    assert!(s.contains("TL-model estimate") && s.contains("Gaid 2024"));
    let o = run(&["report", "--points", "101", "--no-reference-rows"]);
    assert!(!stdout(&o).contains("Gaid 2024"));
}
