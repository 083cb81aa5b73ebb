use std::path::{Path, PathBuf};
use std::process::Command;

use mls_cli::run::run;
use mls_cli::scenario::{preset, ActionSpec, Scenario, VerifierSpec};

fn repo() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../..")
}

fn mls(args: &[&str]) -> std::process::Output {
    Command::new(env!("CARGO_BIN_EXE_mls"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn write(dir: &Path, name: &str, body: &str) -> PathBuf {
    let p = dir.join(name);
    std::fs::write(&p, body).unwrap();
    p
}

const MINIMAL: &str = r#"{
  "rank": 2,
  "actions": {
    "unit": { "kind": "tree" },
    "s": { "kind": "schottky", "stretches": [4, 4], "angles": [0, 1.2] }
  },
  "verifiers": [ { "name": "thm13", "x": "unit", "xstar": "s", "L": [8] } ]
}"#;

#[test]
fn parsing_fills_defaults() {
    let s = Scenario::parse(MINIMAL).unwrap();
    assert_eq!(s.seed, 0);
    assert_eq!(s.config.k, 1e4);
    assert_eq!(s.config.window_cap, 12);
    match &s.actions["unit"] {
        ActionSpec::Tree { weights } => assert_eq!(weights.as_deref(), Some(&[1.0, 1.0][..])),
        other => panic!("{other:?}"),
    }
    match &s.actions["s"] {
        ActionSpec::Schottky { delta, .. } => assert_eq!(*delta, Some(std::f64::consts::LN_2)),
        other => panic!("{other:?}"),
    }
    match &s.verifiers[0] {
        VerifierSpec::Thm13 { k, .. } => assert_eq!(*k, Some(1e4)),
        other => panic!("{other:?}"),
    }
}

#[test]
fn emit_and_parse_round_trip() {
    let s = Scenario::parse(MINIMAL).unwrap();
    assert_eq!(Scenario::parse(&s.emit()).unwrap(), s);
    for entry in std::fs::read_dir(repo().join("scenarios")).unwrap() {
        let p = entry.unwrap().path();
        if p.extension().is_some_and(|e| e == "json") {
            let s = Scenario::parse(&std::fs::read_to_string(&p).unwrap()).unwrap();
            assert_eq!(Scenario::parse(&s.emit()).unwrap(), s, "{}", p.display());
        }
    }
}

#[test]
fn unknown_field_is_named_with_its_path() {
    let bad = MINIMAL.replace("\"L\": [8]", "\"L\": [8], \"window\": 3");
    let e = Scenario::parse(&bad).unwrap_err().to_string();
    assert!(e.contains("verifiers[0]"), "{e}");
    assert!(e.contains("window"), "{e}");
}

#[test]
fn unknown_verifier_and_missing_action_are_rejected() {
    let bad = MINIMAL.replace("\"thm13\"", "\"thm99\"");
    let e = Scenario::parse(&bad).unwrap_err().to_string();
    assert!(e.contains("verifiers[0]") && e.contains("thm99"), "{e}");
    let bad = MINIMAL.replace("\"xstar\": \"s\"", "\"xstar\": \"nope\"");
    let e = Scenario::parse(&bad).unwrap_err().to_string();
    assert!(e.contains("verifiers[0].xstar") && e.contains("nope"), "{e}");
    let bad = MINIMAL.replace("\"kind\": \"tree\"", "\"kind\": \"preset\", \"name\": \"nope\"");
    let e = Scenario::parse(&bad).unwrap_err().to_string();
    assert!(e.contains("actions.unit.name"), "{e}");
}

#[test]
fn preset_matches_golden_file() {
    let golden = std::fs::read_to_string(repo().join("scenarios/presets/cor17-default.json")).unwrap();
    let golden: ActionSpec = serde_json::from_str(&golden).unwrap();
    assert_eq!(preset("cor17-default").unwrap(), golden);
    let out = mls(&["preset", "cor17-default"]);
    assert!(out.status.success());
    let printed: ActionSpec = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(printed, golden);
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let ok = write(dir.path(), "ok.json", MINIMAL);
    assert_eq!(mls(&["run", "--scenario", ok.to_str().unwrap()]).status.code(), Some(0));

    // with K = δ = D = 0 the bound is the window supremum, which the longer
    // reference window exceeds
    let violated = write(
        dir.path(),
        "violated.json",
        r#"{
          "rank": 2,
          "actions": {
            "x": { "kind": "tree", "weights": [1, 10] },
            "xs": { "kind": "tree", "weights": [1, 20] }
          },
          "verifiers": [ { "name": "thm13", "x": "x", "xstar": "xs", "L": [5], "K": 0, "delta": 0, "D": 0 } ]
        }"#,
    );
    let out = mls(&["run", "--scenario", violated.to_str().unwrap(), "--format", "csv"]);
    assert_eq!(out.status.code(), Some(1), "{}", String::from_utf8_lossy(&out.stdout));
    assert!(String::from_utf8_lossy(&out.stdout).contains("violated"));

    let capped = write(
        dir.path(),
        "capped.json",
        &MINIMAL.replace("\"verifiers\"", "\"config\": { \"class_cap\": 10 }, \"verifiers\""),
    );
    assert_eq!(mls(&["run", "--scenario", capped.to_str().unwrap()]).status.code(), Some(3));

    let broken = write(dir.path(), "broken.json", "{ \"rank\": 2, ");
    let out = mls(&["run", "--scenario", broken.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("line"));

    let missing = dir.path().join("missing.json");
    assert_eq!(mls(&["run", "--scenario", missing.to_str().unwrap()]).status.code(), Some(2));
}

#[test]
fn reports_are_byte_identical_across_runs() {
    let dir = tempfile::tempdir().unwrap();
    let scenario = write(
        dir.path(),
        "s.json",
        r#"{
          "rank": 2,
          "seed": 77,
          "actions": {
            "m": { "kind": "random_linear", "dim": 2, "count": 2 },
            "unit": { "kind": "tree" },
            "s": { "kind": "schottky", "stretches": [4, 4], "angles": [0, 1.2] }
          },
          "verifiers": [
            { "name": "bochi", "ensemble": { "dim": 2, "instances": 5 }, "n_max": 8 },
            { "name": "jsr", "matrices": "m", "n_max": 8 },
            { "name": "dilation", "x": "unit", "xstar": "s", "L": [6] }
          ]
        }"#,
    );
    let (a, b) = (dir.path().join("a"), dir.path().join("b"));
    for out in [&a, &b] {
        let o = mls(&["run", "--scenario", scenario.to_str().unwrap(), "--out", out.to_str().unwrap()]);
        assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    }
    for f in ["report.json", "summary.csv", "classes.csv"] {
        assert_eq!(
            std::fs::read(a.join(f)).unwrap(),
            std::fs::read(b.join(f)).unwrap(),
            "{f}"
        );
    }
    assert!(a.join("timing.json").exists());

    // a different seed changes the random ensemble
    let c = dir.path().join("c");
    mls(&["run", "--scenario", scenario.to_str().unwrap(), "--out", c.to_str().unwrap(), "--seed", "78"]);
    assert_ne!(std::fs::read(a.join("report.json")).unwrap(), std::fs::read(c.join("report.json")).unwrap());
}

#[test]
fn verify_runs_only_the_named_verifier() {
    let s = Scenario::parse(&std::fs::read_to_string(repo().join("scenarios/delta.json")).unwrap()).unwrap();
    let all = run(&s).unwrap();
    assert_eq!(all.outcomes.len(), 2);
    let path = repo().join("scenarios/delta.json");
    let out = mls(&["verify", "delta", "--scenario", path.to_str().unwrap(), "--format", "csv"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.lines().skip(1).all(|l| l.contains(",delta,")), "{text}");
    let out = mls(&["verify", "thm13", "--scenario", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn spectrum_lists_classes() {
    let path = repo().join("scenarios/identical.json");
    let out = mls(&["spectrum", "--scenario", path.to_str().unwrap(), "--action", "a", "--radius", "2"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    let b = text.lines().find(|l| l.starts_with("b,")).unwrap();
    assert!(b.starts_with("b,1,2,2"), "{b}");
}
