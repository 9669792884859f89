//! Metric values on the four-user fixture against hand computation.

mod common;

use common::panel::{expected_panel, report, TOL};
use fairflow_core::metrics::MetricReport;

#[test]
fn panel_matches_hand_computation() {
    let r = report();
    let got = [
        r.precision,
        r.alpha_ia[&1],
        r.alpha_ia[&5],
        r.long_tail,
        r.alpha_sa[&1],
        r.alpha_sa[&5],
        r.item_gini.unwrap(),
        r.item_entropy.unwrap(),
        r.supplier_gini.unwrap(),
        r.supplier_entropy.unwrap(),
    ];
    let names = MetricReport::<f64>::CSV_HEADER.split(',');
    for ((name, g), e) in names.zip(got).zip(expected_panel()) {
        assert!((g - e).abs() < TOL, "{name}: got {g}, expected {e}");
    }
}

#[test]
fn intermediate_alpha_levels() {
    let r = report();
    assert!((r.alpha_ia[&2] - 2.0 / 6.0).abs() < TOL);
    assert!((r.alpha_ia[&3] - 1.0 / 6.0).abs() < TOL);
    assert_eq!(r.alpha_ia[&4], 0.0);
    assert!((r.alpha_sa[&2] - 0.5).abs() < TOL);
}

#[test]
fn csv_row_follows_header_order() {
    let r = report();
    let cells: Vec<f64> = r.csv_row().split(',').map(|c| c.parse().unwrap()).collect();
    for (c, e) in cells.iter().zip(expected_panel()) {
        assert!((c - e).abs() < 1e-6);
    }
    assert_eq!(MetricReport::<f64>::CSV_HEADER, "P,1-IA,5-IA,LT,1-SA,5-SA,IG,IE,SG,SE");
}

#[test]
fn json_has_canonical_keys() {
    let json = serde_json::to_string(&report()).unwrap();
    let again = serde_json::to_string(&report()).unwrap();
    assert_eq!(json, again);
    assert!(json.starts_with("{\"precision\":0.375,\"alpha_ia\":{\"1\":"));
}
