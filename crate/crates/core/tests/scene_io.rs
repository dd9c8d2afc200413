use paraboloid_core::report::{build_report, emit_report, Command, Format, RunSettings};
use paraboloid_core::scene::{parse_scene, SceneError};
use proptest::prelude::*;
use serde_json::Value;

const REFERENCE: &str = include_str!("../../../data/reference_scene.json");

#[test]
fn reference_scene_has_one_hundred_entities() {
    let scene = parse_scene(REFERENCE).unwrap();
    assert_eq!(scene.entities.len(), 100);
    assert_eq!(parse_scene(&scene.echo()).unwrap(), scene);
}

#[test]
fn parse_errors_carry_line_numbers() {
    let text = "{\n  \"focal\": {\"f\": 1},\n  \"entities\": [\n    {\"type\": \"point\", \"id\": \"p\", \"u\": 1, \"v\": }\n  ]\n}";
    match parse_scene(text) {
        Err(SceneError::Parse { line, .. }) => assert_eq!(line, 4),
        other => panic!("{other:?}"),
    }
}

fn numbers(v: &Value, out: &mut Vec<f64>) {
    match v {
        Value::Number(n) => out.push(n.as_f64().unwrap()),
        Value::Array(a) => a.iter().for_each(|x| numbers(x, out)),
        Value::Object(o) => o.values().for_each(|x| numbers(x, out)),
        _ => {}
    }
}

#[test]
fn json_and_csv_numbers_round_trip_exactly() {
    let scene = parse_scene(REFERENCE).unwrap();
    let settings = RunSettings { monte_carlo: paraboloid_core::MonteCarloOptions { samples: 1000, seed: 3 }, ..Default::default() };
    let report = build_report(&scene, Command::Length, &settings);
    let json = emit_report(&report, Format::Json);
    let parsed: Value = serde_json::from_str(&json).unwrap();
    let reencoded: Value = serde_json::from_str(&serde_json::to_string(&parsed).unwrap()).unwrap();
    assert_eq!(parsed, reencoded);

    // every analytic value in the JSON form reappears bit-for-bit in the CSV form
    let mut expected = Vec::new();
    for e in parsed["entities"].as_array().unwrap() {
        for q in e["quantities"].as_array().unwrap() {
            expected.push(q["analytic"].as_f64().unwrap());
        }
    }
    let csv = emit_report(&report, Format::Csv);
    let mut reader = csv::Reader::from_reader(csv.as_bytes());
    let got: Vec<f64> = reader.records().filter_map(|r| r.unwrap()[3].parse().ok()).collect();
    assert_eq!(got, expected);

    let mut all = Vec::new();
    numbers(&parsed, &mut all);
    assert!(all.iter().all(|x| x.is_finite()));
}

#[test]
fn same_scene_same_bytes() {
    let scene = parse_scene(REFERENCE).unwrap();
    let settings = RunSettings { monte_carlo: paraboloid_core::MonteCarloOptions { samples: 20_000, seed: 5 }, ..Default::default() };
    let a = emit_report(&build_report(&scene, Command::Validate, &settings), Format::Json);
    let b = emit_report(&build_report(&scene, Command::Validate, &settings), Format::Json);
    assert_eq!(a, b);
}

#[test]
fn every_entity_reported_once_in_order() {
    let scene = parse_scene(REFERENCE).unwrap();
    for command in [Command::Project, Command::Classify, Command::Length] {
        let report = build_report(&scene, command, &RunSettings::default());
        let ids: Vec<&str> = report.entities.iter().map(|e| e.id.as_str()).collect();
        let expected: Vec<&str> = scene.entities.iter().map(|e| e.id.as_str()).collect();
        assert_eq!(ids, expected);
    }
}

proptest! {
    #[test]
    fn echo_is_identity(coords in prop::collection::vec(-1e6f64..1e6, 6), f in 1e-3f64..1e3,
                        phi in -10f64..10.0, span in 0f64..6.0, degrees in any::<bool>()) {
        let unit = if degrees { "degrees" } else { "radians" };
        let span = if degrees { span.to_degrees() } else { span };
        let text = serde_json::json!({
            "focal": {"f": f},
            "angle_unit": unit,
            "entities": [
                {"type": "segment", "id": "s", "a": &coords[..3], "b": &coords[3..]},
                {"type": "point", "id": "p", "u": coords[0], "v": coords[1], "w": coords[2]},
                {"type": "annular_sector", "id": "a", "r_inner": 0.5, "r_outer": 1.5, "phi_from": phi, "phi_to": phi + span},
            ],
        })
        .to_string();
        let scene = parse_scene(&text).unwrap();
        prop_assert_eq!(parse_scene(&scene.echo()).unwrap(), scene);
    }
}
