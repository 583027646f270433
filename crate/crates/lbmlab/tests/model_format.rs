//! Golden-file coverage of the plain-text model exchange format: the
//! committed files pin the exact matrices, parities and assignments; any
//! drift in polynomial evaluation, ordering or formatting shows up as a
//! byte-level diff.

use std::collections::BTreeMap;

use lbmlab::model::io::{read_model_text, write_model_text};
use lbmlab::model::{build_model, default_params, trt_rates, ModelName};

fn golden(name: &str) -> String {
    let path = format!("{}/tests/golden/{name}", env!("CARGO_MANIFEST_DIR"));
    std::fs::read_to_string(path).expect("golden file")
}

#[test]
fn d2q9_ns_export_matches_golden() {
    let params: BTreeMap<String, f64> =
        [("alpha".to_string(), -2.0), ("beta".to_string(), 1.0)].into();
    let rates: BTreeMap<String, f64> = [
        ("s3".to_string(), 1.2),
        ("s4".to_string(), 0.8),
        ("s6".to_string(), 1.1),
        ("s8".to_string(), 0.9),
    ]
    .into();
    let model = build_model(ModelName::D2Q9Ns, params, rates).unwrap();
    assert_eq!(write_model_text(&model), golden("d2q9_ns.model"));
}

#[test]
fn d3q19_ad_export_matches_golden() {
    let model = build_model(
        ModelName::D3Q19Ad,
        default_params(ModelName::D3Q19Ad),
        trt_rates(ModelName::D3Q19Ad, 1.25, 0.75),
    )
    .unwrap();
    assert_eq!(write_model_text(&model), golden("d3q19_ad.model"));
}

#[test]
fn d2q13_ns_export_matches_golden() {
    let rates: BTreeMap<String, f64> = ["s3", "s4", "s6", "s8", "s10", "s11", "s12"]
        .iter()
        .map(|s| (s.to_string(), 1.0))
        .collect();
    let model =
        build_model(ModelName::D2Q13Ns, default_params(ModelName::D2Q13Ns), rates).unwrap();
    assert_eq!(write_model_text(&model), golden("d2q13_ns.model"));
}

#[test]
fn golden_files_import_cleanly() {
    for name in ["d2q9_ns.model", "d3q19_ad.model", "d2q13_ns.model"] {
        let text = golden(name);
        let model = read_model_text(&text).expect(name);
        assert_eq!(write_model_text(&model), text, "{name} not byte-stable");
    }
}

#[test]
fn import_rejects_tampered_matrix() {
    let tampered = golden("d2q9_ns.model").replace("-4 -1 -1 -1 -1 2 2 2 2", "-4 -1 -1 -1 -1 2 2 2 3");
    assert!(read_model_text(&tampered).is_err());
}
