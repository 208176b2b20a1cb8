use std::ffi::OsString;
use std::path::{Path, PathBuf};
use std::process::Command;

use abrd_cli::run_cli;

fn corpus() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("corpus")
}

fn run(args: &[&str]) -> (i32, String, String) {
    let argv: Vec<OsString> = std::iter::once("verify").chain(args.iter().copied()).map(OsString::from).collect();
    let (mut out, mut err) = (Vec::new(), Vec::new());
    let code = run_cli(argv, &mut out, &mut err);
    (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
}

fn scenario_json(path: &Path, jobs: Option<&str>) -> (i32, String) {
    let p = path.to_str().unwrap();
    let mut args = vec!["custom-scenario", "--scenario", p, "--format", "json"];
    if let Some(j) = jobs {
        args.extend(["--jobs", j]);
    }
    let (code, out, err) = run(&args);
    assert!(err.is_empty(), "{}: {err}", path.display());
    (code, out)
}

fn scenarios() -> Vec<PathBuf> {
    let mut v: Vec<PathBuf> = std::fs::read_dir(corpus())
        .unwrap()
        .map(|e| e.unwrap().path())
        .filter(|p| p.extension().is_some_and(|x| x == "scn"))
        .collect();
    v.sort();
    v
}

/// Set `ABRD_BLESS=1` to rewrite the golden files.
#[test]
fn golden_reports() {
    let bless = std::env::var_os("ABRD_BLESS").is_some();
    let files = scenarios();
    assert!(files.len() >= 20);
    for f in files {
        let golden = corpus().join("golden").join(f.file_stem().unwrap()).with_extension("json");
        let (code, json) = scenario_json(&f, None);
        if bless {
            std::fs::write(&golden, &json).unwrap();
            continue;
        }
        let want = std::fs::read_to_string(&golden).unwrap_or_else(|_| panic!("missing {}", golden.display()));
        assert_eq!(json, want, "{} drifted from its golden report", f.display());
        let parsed: serde_json::Value = serde_json::from_str(&json).unwrap();
        assert_eq!(parsed["exit_code"], code);
        assert_eq!(parsed["schema"], "abrd-report/1");
    }
}

#[test]
fn expected_outcomes() {
    let cases = [
        ("nocs_n2_p3", 0),
        ("nocs_n3_p2", 2),
        ("nocs_n3_p3", 2),
        ("nocs_n4_p2", 2),
        ("example73_part1_p3", 0),
        ("example73_part2_p5", 0),
        ("chain_part2_p3", 0),
        ("division_shift_a2", 0),
        ("division_open", 2),
        ("charnotp_n3_p2", 0),
    ];
    for (name, want) in cases {
        let (code, _) = scenario_json(&corpus().join(name).with_extension("scn"), None);
        assert_eq!(code, want, "{name}");
    }
}

#[test]
fn deterministic_across_runs_and_jobs() {
    for name in ["nocs_n3_p3", "nocs_n4_p2", "example73_part1_p5", "charnotp_n3_p2"] {
        let f = corpus().join(name).with_extension("scn");
        let base = scenario_json(&f, Some("1")).1;
        assert_eq!(base, scenario_json(&f, Some("1")).1, "{name}: rerun");
        assert_eq!(base, scenario_json(&f, Some("4")).1, "{name}: --jobs 4");
        assert_eq!(base, scenario_json(&f, None).1, "{name}: default pool");
    }
}

#[test]
fn flag_and_scenario_forms_agree() {
    let (_, direct, _) = run(&["shift", "--n", "3", "--p", "2", "--i", "2", "--format", "json"]);
    let (_, via) = scenario_json(&corpus().join("shift_n3_p2_i2.scn"), None);
    assert_eq!(direct, via);
}

#[test]
fn exit_codes() {
    assert_eq!(run(&["--help"]).0, 0);
    assert_eq!(run(&["--version"]).0, 0);
    assert_eq!(run(&[]).0, 3);
    assert_eq!(run(&["bogus"]).0, 3);
    assert_eq!(run(&["shift", "--n", "3"]).0, 3);
    assert_eq!(run(&["shift", "--n", "3", "--p", "4", "--i", "1"]).0, 3);
    assert_eq!(run(&["no-common-splitting", "--n", "2", "--p", "2"]).0, 2);
    assert_eq!(run(&["no-common-splitting", "--n", "2", "--p", "3"]).0, 0);
    assert_eq!(run(&["prop71", "--part", "1", "--p", "3", "--toggle", "split"]).0, 1);
    assert_eq!(run(&["example73", "--part", "1", "--p", "2"]).0, 3);
    assert_eq!(run(&["custom-scenario"]).0, 3);
    assert_eq!(run(&["custom-scenario", "--scenario", "/nonexistent.scn"]).0, 3);
}

#[test]
fn max_work_guard() {
    let (code, _, err) = run(&["no-common-splitting", "--n", "4", "--p", "3", "--max-work", "10"]);
    assert_eq!(code, 3);
    assert!(err.contains("--max-work"), "{err}");
}

#[test]
fn parse_errors_carry_position() {
    let dir = tempfile::tempdir().unwrap();
    let f = dir.path().join("bad.scn");
    std::fs::write(&f, "prime 3\nvariables a b\nalgebra A = [a, b\ntask division\n").unwrap();
    let (code, out, err) = run(&["custom-scenario", "--scenario", f.to_str().unwrap()]);
    assert_eq!(code, 3);
    assert!(out.is_empty());
    assert!(err.contains("line 3, column 18"), "{err}");
}

#[test]
fn out_file_and_text_format() {
    let dir = tempfile::tempdir().unwrap();
    let f = dir.path().join("r.json");
    let (code, out, _) = run(&["counts", "--n", "3", "--p", "2", "--format", "json", "--out", f.to_str().unwrap()]);
    assert_eq!(code, 0);
    assert!(out.is_empty());
    let v: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&f).unwrap()).unwrap();
    assert_eq!(v["task"], "counts");
    let (_, text, _) = run(&["counts", "--n", "3", "--p", "2"]);
    assert!(text.contains("outcome: verified (exit 0)"));
}

#[test]
fn timing_is_opt_in() {
    let (_, plain, _) = run(&["counts", "--format", "json"]);
    assert!(!plain.contains("timing_ms"));
    let (_, timed, _) = run(&["counts", "--format", "json", "--timing"]);
    assert!(timed.contains("timing_ms"));
}

#[test]
fn binary_matches_library() {
    let out = Command::new(env!("CARGO_BIN_EXE_verify"))
        .args(["example73", "--part", "2", "--p", "3", "--format", "json"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));
    let (_, lib, _) = run(&["example73", "--part", "2", "--p", "3", "--format", "json"]);
    assert_eq!(String::from_utf8(out.stdout).unwrap(), lib);
    let bad = Command::new(env!("CARGO_BIN_EXE_verify")).arg("shift").output().unwrap();
    assert_eq!(bad.status.code(), Some(3));
}
