use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn paraboloid(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_paraboloid")).args(args).output().expect("binary runs")
}

fn write_scene(dir: &Path, body: &str) -> String {
    let path = dir.join("scene.json");
    std::fs::write(&path, body).unwrap();
    path.to_str().unwrap().to_string()
}

const QUARTER: &str = r#"{"focal": {"f": 1}, "entities": [
    {"type": "segment", "id": "quarter", "a": [2, 0, 0], "b": [0, 2, 0]},
    {"type": "point", "id": "p", "u": 2, "v": 0, "w": 5}]}"#;

#[test]
fn length_of_horizontal_segment_is_pi() {
    let dir = tempfile::tempdir().unwrap();
    let scene = write_scene(dir.path(), QUARTER);
    let out = paraboloid(&["length", "--scene", &scene]);
    assert_eq!(out.status.code(), Some(0));
    let report: Value = serde_json::from_slice(&out.stdout).unwrap();
    let entity = &report["entities"][0];
    assert_eq!(entity["status"], "ok");
    let l1 = entity["details"]["length"]["L1"]["analytic"].as_f64().unwrap();
    assert!((l1 - std::f64::consts::PI).abs() < 1e-12);
    assert_eq!(report["entities"][1]["status"], "not-applicable");
}

#[test]
fn project_emits_bundles() {
    let dir = tempfile::tempdir().unwrap();
    let scene = write_scene(dir.path(), QUARTER);
    let out = paraboloid(&["project", "--scene", &scene, "--format", "csv"]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.starts_with("id,entity,quantity,analytic,oracle,rel_residual,bound,status,diagnostic\n"));
    assert!(text.lines().any(|l| l.starts_with("p,point,A1_distance,")));
    let json: Value = serde_json::from_slice(&paraboloid(&["project", "--scene", &scene]).stdout).unwrap();
    let a1 = &json["entities"][1]["details"]["project"]["a1"];
    assert!((a1["u"].as_f64().unwrap() - 10.385164807134504).abs() < 1e-12);
}

#[test]
fn overrides_change_the_model() {
    let dir = tempfile::tempdir().unwrap();
    let scene = write_scene(dir.path(), QUARTER);
    let out = paraboloid(&["classify", "--scene", &scene, "--focal", "2", "--tol-rel", "1e-8"]);
    let report: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(report["metadata"]["f"], 2.0);
    assert_eq!(report["metadata"]["tolerances"]["rel"], 1e-8);
    assert_eq!(report["entities"][0]["details"]["classify"]["projected_radius"], 4.0);
}

#[test]
fn degrees_flag_reads_angles_as_degrees() {
    let dir = tempfile::tempdir().unwrap();
    let scene = write_scene(
        dir.path(),
        r#"{"focal": {"f": 1}, "entities": [
            {"type": "annular_sector", "id": "a", "r_inner": 1, "r_outer": 2, "phi_from": 0, "phi_to": 90}]}"#,
    );
    let out = paraboloid(&["area", "--scene", &scene, "--degrees"]);
    let report: Value = serde_json::from_slice(&out.stdout).unwrap();
    let q = &report["entities"][0]["quantities"][0];
    assert!((q["analytic"].as_f64().unwrap() - 0.75 * std::f64::consts::PI).abs() < 1e-14);
    // without the flag the span exceeds a full turn
    assert_eq!(paraboloid(&["area", "--scene", &scene]).status.code(), Some(2));
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let missing = dir.path().join("missing.json");
    let out = paraboloid(&["validate", "--scene", missing.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("Usage"));
    assert!(out.stdout.is_empty());

    assert_eq!(paraboloid(&["validate"]).status.code(), Some(2));
    assert_eq!(paraboloid(&["bogus"]).status.code(), Some(2));
    assert_eq!(paraboloid(&["--help"]).status.code(), Some(0));

    let bad = write_scene(dir.path(), r#"{"focal": {"f": 1}, "entities": [{"type": "point", "id": "p"}]}"#);
    assert_eq!(paraboloid(&["project", "--scene", &bad]).status.code(), Some(2));

    // two Monte-Carlo samples cannot certify a surface area
    let rect = write_scene(
        dir.path(),
        r#"{"focal": {"f": 1}, "entities": [{"type": "vertical_rect", "id": "r",
            "corners": {"a": [2, 0, 1], "b": [0, 2, 1], "c": [0, 2, 0], "d": [2, 0, 0]}}]}"#,
    );
    assert_eq!(paraboloid(&["validate", "--scene", &rect, "--mc-samples", "2"]).status.code(), Some(1));
    assert_eq!(paraboloid(&["validate", "--scene", &rect, "--mc-samples", "200000"]).status.code(), Some(0));
}

#[test]
fn degenerate_entities_do_not_abort_the_batch() {
    let dir = tempfile::tempdir().unwrap();
    let scene = write_scene(
        dir.path(),
        r#"{"focal": {"f": 1}, "entities": [
            {"type": "point", "id": "axis", "u": 0, "v": 0, "w": 1},
            {"type": "segment", "id": "focus", "a": [1, 1, 1], "b": [2, 2, 2]},
            {"type": "segment", "id": "fine", "a": [1, 0, 0], "b": [1, 0, 1]}]}"#,
    );
    let out = paraboloid(&["validate", "--scene", &scene]);
    assert_eq!(out.status.code(), Some(0));
    let report: Value = serde_json::from_slice(&out.stdout).unwrap();
    let statuses: Vec<&str> = report["entities"].as_array().unwrap().iter().map(|e| e["status"].as_str().unwrap()).collect();
    assert_eq!(statuses, ["degenerate", "degenerate", "ok"]);
    assert!(report["entities"][1]["diagnostic"].as_str().unwrap().contains("focus"));
}

#[test]
fn reports_are_byte_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let scene = write_scene(
        dir.path(),
        r#"{"focal": {"f": 1}, "entities": [{"type": "vertical_rect", "id": "r",
            "corners": {"a": [3, -1, 2], "b": [3, 1, 2], "c": [3, 1, -1], "d": [3, -1, -1]}}]}"#,
    );
    let args = ["validate", "--scene", &scene, "--mc-samples", "100000", "--seed", "17", "--format", "csv"];
    assert_eq!(paraboloid(&args).stdout, paraboloid(&args).stdout);
}
