#![allow(dead_code)]

use std::path::PathBuf;

use adaptive_floorplan::{parse_svg, FloorplanDocument};

pub fn fixture_path(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("fixtures")
        .join(name)
}

pub fn fixture(name: &str) -> Vec<u8> {
    std::fs::read(fixture_path(name)).unwrap_or_else(|e| panic!("{name}: {e}"))
}

pub fn fixture_doc(name: &str) -> FloorplanDocument {
    parse_svg(&fixture(name), name).unwrap()
}

/// Every committed SVG fixture.
pub fn svg_corpus() -> Vec<(String, FloorplanDocument)> {
    let mut names: Vec<String> = std::fs::read_dir(fixture_path(""))
        .unwrap()
        .filter_map(|e| e.ok()?.file_name().into_string().ok())
        .filter(|n| n.ends_with(".svg"))
        .collect();
    names.sort();
    names
        .into_iter()
        .map(|n| (n.clone(), fixture_doc(&n)))
        .collect()
}

/// Schema violations of a serialized report, empty when valid.
pub fn report_schema_errors(json: &str) -> Vec<String> {
    let schema: serde_json::Value =
        serde_json::from_str(include_str!("../../config/report.schema.json")).unwrap();
    let validator = jsonschema::validator_for(&schema).unwrap();
    let instance: serde_json::Value = serde_json::from_str(json).unwrap();
    validator
        .iter_errors(&instance)
        .map(|e| e.to_string())
        .collect()
}
