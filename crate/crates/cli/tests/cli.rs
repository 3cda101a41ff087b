use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use pnf_core::generator::{generate, GenSpec, Preset};
use pnf_core::heuristics::{pnf, Budget, HeuristicConfig, HeuristicKind};
use pnf_core::model::Solution;

fn pnf_bin(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_pnf"))
        .args(args)
        .env_remove("PNF_OUT")
        .env_remove("PNF_JOBS")
        .output()
        .unwrap()
}

fn ok(args: &[&str]) -> String {
    let out = pnf_bin(args);
    assert!(out.status.success(), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    String::from_utf8(out.stdout).unwrap()
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn probe_then_solve_matches_in_process() {
    let tmp = tempfile::tempdir().unwrap();
    let dir = tmp.path();
    for seed in 0..4u64 {
        let seed_arg = seed.to_string();
        ok(&["gen", "--preset", "b", "--seed", &seed_arg, "--out", s(dir)]);
        let spec = GenSpec::preset(Preset::B, seed);
        let mps = dir.join(format!("{}.mps", spec.instance_name()));
        let probe_file = dir.join(format!("probe{seed}.json"));
        let sol_file = dir.join(format!("sol{seed}.json"));
        ok(&["probe", s(&mps), "--budget", "40", "--out", s(&probe_file)]);
        let report = ok(&[
            "solve", s(&mps), "--cuts", s(&probe_file), "--ratio", "0.5", "--budget", "250", "--out", s(&sol_file),
        ]);
        let report: serde_json::Value = serde_json::from_str(&report).unwrap();

        let (model, _) = generate(&spec).unwrap();
        let cfg = HeuristicConfig::new(HeuristicKind::Pnf { ratio: 0.5 }, Budget::nodes(40, 250));
        let direct = pnf(&model, &cfg, 0).unwrap();
        let sol: Solution = serde_json::from_str(&fs::read_to_string(&sol_file).unwrap()).unwrap();
        let inc = direct.result.incumbent.as_ref().unwrap();
        assert_eq!(&sol, inc);
        assert_eq!(report["objective"].as_f64(), direct.objective());
        assert_eq!(report["nodes"].as_u64(), Some(direct.result.nodes));
        assert_eq!(report["selected"].as_u64(), Some(direct.report.selected as u64));
    }
}

#[test]
fn detect_prints_counts_and_verdicts() {
    let tmp = tempfile::tempdir().unwrap();
    ok(&["gen", "--preset", "a", "--count", "3", "--out", s(tmp.path())]);
    let out = ok(&["detect", s(tmp.path()), "--budget", "9"]);
    let lines: Vec<&str> = out.lines().collect();
    assert_eq!(lines.len(), 3);
    for l in lines {
        assert!(l.contains("sets=4"), "{l}");
        assert!(l.contains("keep") || l.contains("drop"), "{l}");
    }
}

#[test]
fn run_and_report_are_idempotent() {
    let tmp = tempfile::tempdir().unwrap();
    let scen = tmp.path().join("s.json");
    fs::write(
        &scen,
        r#"{"instances":[{"preset":{"preset":"B","first_seed":0,"count":2}}],
            "scenarios":[{"name":"SOLVER","total_budget":80},{"name":"PNF-0.5-20","total_budget":80}],
            "checkpoints":[0,40]}"#,
    )
    .unwrap();
    let out = tmp.path().join("out");
    ok(&["validate", s(&scen)]);
    ok(&["run", "--scenarios", s(&scen), "--out", s(&out), "--jobs", "2"]);
    assert_eq!(fs::read_dir(out.join("outcomes")).unwrap().count(), 4);
    let before = fs::read(out.join("aggregate.csv")).unwrap();
    let md = fs::read(out.join("report.md")).unwrap();
    ok(&["report", s(&out)]);
    assert_eq!(before, fs::read(out.join("aggregate.csv")).unwrap());
    assert_eq!(md, fs::read(out.join("report.md")).unwrap());

    // The output directory can come from the environment.
    let env_out = tmp.path().join("env");
    let status = Command::new(env!("CARGO_BIN_EXE_pnf"))
        .args(["run", "--scenarios", s(&scen)])
        .env("PNF_OUT", &env_out)
        .output()
        .unwrap();
    assert!(status.status.success());
    assert_eq!(before, fs::read(env_out.join("aggregate.csv")).unwrap());
}

#[test]
fn errors_exit_nonzero() {
    let tmp = tempfile::tempdir().unwrap();
    let scen = tmp.path().join("bad.json");
    fs::write(
        &scen,
        r#"{"instances":[{"preset":{"preset":"A","first_seed":0,"count":1}}],
            "scenarios":[{"name":"PNF-0.5-200","total_budget":100}]}"#,
    )
    .unwrap();
    assert!(!pnf_bin(&["validate", s(&scen)]).status.success());
    assert!(!pnf_bin(&["run", "--scenarios", s(&scen), "--out", s(tmp.path())]).status.success());
    assert!(!pnf_bin(&["solve", "/nonexistent.mps"]).status.success());
    assert_eq!(pnf_bin(&["solve"]).status.code(), Some(2));
}

#[test]
fn convert_and_validate_mps() {
    let tmp = tempfile::tempdir().unwrap();
    ok(&["gen", "--preset", "a", "--out", s(tmp.path())]);
    let name = GenSpec::preset(Preset::A, 0).instance_name();
    let src = tmp.path().join(format!("{name}.mps"));
    let dst = tmp.path().join("copy.mps");
    ok(&["convert", s(&src), s(&dst)]);
    assert_eq!(fs::read(&src).unwrap(), fs::read(&dst).unwrap());
    let out = ok(&["validate", s(&dst)]);
    assert!(out.contains("4 set-partitioning rows"), "{out}");
}
