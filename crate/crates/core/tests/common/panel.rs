//! The four-user evaluation fixture in `fixtures/panel` and its
//! hand-computed metric values.
//!
//! Train counts a:4 b:3 c:2 d:1 e:1 f:1 (12 ratings): the short head is {a}.
//! Final lists (n = 2): u1 [e b], u2 [d a], u3 [c e], u4 [e d], so the
//! recommendation counts are a:1 b:1 c:1 d:2 e:3 f:0 over 8 slots.
//! Suppliers A={a,b} B={c} C={d,e} D={f} get counts 2, 1, 5, 0.

use std::path::PathBuf;

use fairflow_core::ingest::{load_catalog_for, parse_ratings, Format};
use fairflow_core::metrics::{evaluate, EvaluationInput, MetricReport};
use fairflow_core::recommend::read_ranked_batch;
use fairflow_core::{Batch, Dataset, SupplierCatalog};

pub const TOL: f64 = 1e-9;

pub fn fixture(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures/panel").join(name)
}

pub fn load() -> (Dataset, Dataset, SupplierCatalog, Batch) {
    let train: Dataset = parse_ratings(fixture("train.tsv"), Format::Tsv).unwrap();
    let test: Dataset = parse_ratings(fixture("test.tsv"), Format::Tsv).unwrap();
    let catalog = load_catalog_for(fixture("suppliers.tsv"), Format::Tsv, &train).unwrap();
    let batch = read_ranked_batch(fixture("final.tsv")).unwrap();
    (train, test, catalog, batch)
}

pub fn report() -> MetricReport<f64> {
    let (train, test, catalog, batch) = load();
    evaluate(&EvaluationInput {
        batch: &batch,
        train: &train,
        test: &test,
        catalog: &catalog,
        groups: None,
    })
    .unwrap()
}

/// Expected values of the ten headline metrics, in table column order.
pub fn expected_panel() -> [f64; 10] {
    let ln = f64::ln;
    [
        // hits: u1 {e}, u2 {d}, u3 {c}, u4 {} → (1/2 + 1/2 + 1/2 + 0) / 4
        0.375,
        // 1-IA: five of six items recommended; 5-IA: none reaches five
        5.0 / 6.0,
        0.0,
        // long tail {b,c,d,e,f}; all but f recommended
        0.8,
        // 1-SA: A, B, C; 5-SA: C only
        0.75,
        0.25,
        // IG: sorted p = (0, 1, 1, 1, 2, 3)/8, sum (2k-7) p_k = 18/8, over N-1 = 5
        0.45,
        // IE: three items at 1/8, one at 1/4, one at 3/8
        3.0 / 8.0 * ln(8.0) + 0.25 * ln(4.0) + 3.0 / 8.0 * ln(8.0 / 3.0),
        // SG: sorted p = (0, 1, 2, 5)/8, sum (2k-5) p_k = 2, over N-1 = 3
        2.0 / 3.0,
        // SE: p = 1/8, 1/4, 5/8
        1.0 / 8.0 * ln(8.0) + 0.25 * ln(4.0) + 5.0 / 8.0 * ln(8.0 / 5.0),
    ]
}
