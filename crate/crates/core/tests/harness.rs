use std::fs;
use std::path::Path;

use pnf_core::harness::{self, HarnessError, RunOptions, ScenarioFile};
use pnf_core::metrics::OutcomeStatus;
use pnf_core::model::{MipModel, VariableSpec};
use pnf_core::mps::write_mps;

fn scenario_file(json: serde_json::Value) -> ScenarioFile {
    serde_json::from_value(json).unwrap()
}

fn small() -> ScenarioFile {
    scenario_file(serde_json::json!({
        "instances": [{"preset": {"preset": "B", "first_seed": 0, "count": 3}}],
        "scenarios": [
            {"name": "SOLVER", "total_budget": 120},
            {"name": "PNF-0.5-30", "total_budget": 120},
            {"name": "RINS-0.5-30", "total_budget": 120},
        ],
        "checkpoints": [0, 50],
    }))
}

fn read_all(dir: &Path) -> Vec<(String, Vec<u8>)> {
    let mut out = Vec::new();
    for sub in [dir.to_path_buf(), dir.join("outcomes")] {
        let mut names: Vec<_> = fs::read_dir(&sub).unwrap().map(|e| e.unwrap().path()).filter(|p| p.is_file()).collect();
        names.sort();
        for p in names {
            out.push((p.file_name().unwrap().to_string_lossy().into_owned(), fs::read(&p).unwrap()));
        }
    }
    out
}

#[test]
fn reruns_are_byte_identical() {
    let tmp = tempfile::tempdir().unwrap();
    let (a, b) = (tmp.path().join("a"), tmp.path().join("b"));
    let first = harness::run(&small(), tmp.path(), &a, &RunOptions { jobs: 1, ..Default::default() }).unwrap();
    let second = harness::run(&small(), tmp.path(), &b, &RunOptions { jobs: 3, ..Default::default() }).unwrap();
    assert_eq!(first, second);
    assert_eq!(first.len(), 9);
    assert_eq!(read_all(&a), read_all(&b));

    // Regenerating the report from stored outcomes changes nothing.
    let before = read_all(&a);
    harness::report(&a).unwrap();
    assert_eq!(before, read_all(&a));
}

#[test]
fn failures_are_recorded_and_the_run_continues() {
    let tmp = tempfile::tempdir().unwrap();
    let mut m = MipModel::new("nosets");
    m.add_variable(VariableSpec::binary("x").with_cost(1.0)).unwrap();
    fs::write(tmp.path().join("nosets.mps"), write_mps(&m)).unwrap();
    let file = scenario_file(serde_json::json!({
        "instances": [{"path": "*.mps"}, {"preset": {"preset": "A", "first_seed": 0, "count": 1}}],
        "scenarios": [{"name": "SOLVER", "total_budget": 50}, {"name": "PNF-0.5-10", "total_budget": 50}],
    }));
    let out = harness::run(&file, tmp.path(), &tmp.path().join("out"), &RunOptions::default()).unwrap();
    let failed: Vec<_> = out.iter().filter(|o| o.status == OutcomeStatus::Error).collect();
    assert_eq!(failed.len(), 1);
    assert_eq!((failed[0].instance.as_str(), failed[0].scenario.as_str()), ("nosets", "PNF-0.5-10"));
    assert!(out.iter().filter(|o| o.status != OutcomeStatus::Error).all(|o| o.objective.is_some()));
    let md = fs::read_to_string(tmp.path().join("out/report.md")).unwrap();
    assert!(md.contains("Failed runs"));
}

#[test]
fn probing_over_budget_is_rejected() {
    let file = scenario_file(serde_json::json!({
        "instances": [{"preset": {"preset": "A", "first_seed": 0, "count": 1}}],
        "scenarios": [{"name": "PNF-0.5-200", "total_budget": 100}],
    }));
    let tmp = tempfile::tempdir().unwrap();
    let err = harness::run(&file, tmp.path(), tmp.path(), &RunOptions::default()).unwrap_err();
    assert!(matches!(err, HarnessError::Config(_)));
}
