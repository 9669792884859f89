//! Edge weights mixing relevance (rank) with item or supplier visibility.

use super::graph::{normalize_onto_rank_range, to_capacity, WeightedRecGraph};
use crate::error::{Error, Result};
use crate::model::SupplierCatalog;
use crate::scalar::{Capacity, Real};

/// Fixed-point scale turning the real-valued mix into integer capacities.
pub const WEIGHT_SCALE: f64 = 100.0;

fn check_lambda<R: Real>(lambda: R) -> Result<()> {
    if lambda >= R::zero() && lambda <= R::one() {
        Ok(())
    } else {
        Err(Error::InvalidArgument(format!("lambda must lie in [0, 1], got {lambda}")))
    }
}

/// Assigns `round(100 * (lambda * rank + (1 - lambda) * visibility))` to every
/// live pair, where `visibility` is indexed by item and already normalised.
fn assign<C: Capacity, R: Real>(
    graph: &mut WeightedRecGraph<C>,
    lambda: R,
    normalized: &[Option<R>],
) -> Result<()> {
    let scale = R::of(WEIGHT_SCALE);
    let live: Vec<_> = graph.live_pairs().collect();
    for (k, pair) in live {
        let vis = normalized[pair.item as usize].expect("live items are normalised");
        let rank = R::of(pair.rank as f64);
        let w = scale * (lambda * rank + (R::one() - lambda) * vis);
        graph.set_weight(k, to_capacity(w)?);
    }
    Ok(())
}

/// Normalises per-item visibilities of the live items onto `[1, t]`.
fn normalize_live<R: Real>(raw: &[R], live: &[bool], t: usize) -> Vec<Option<R>> {
    let values: Vec<R> = raw
        .iter()
        .zip(live)
        .filter(|(_, l)| **l)
        .map(|(v, _)| *v)
        .collect();
    let mut normalized = normalize_onto_rank_range(&values, t).into_iter();
    live.iter()
        .map(|&l| if l { normalized.next() } else { None })
        .collect()
}

/// Item variant: visibility is the item's current degree.
pub fn compute_edge_weights_item<C: Capacity, R: Real>(
    graph: &mut WeightedRecGraph<C>,
    lambda: R,
    t: usize,
) -> Result<()> {
    check_lambda(lambda)?;
    let degrees = graph.item_degrees();
    let live: Vec<bool> = degrees.iter().map(|&d| d > 0).collect();
    let raw: Vec<R> = degrees.iter().map(|&d| R::of_usize(d)).collect();
    let normalized = normalize_live(&raw, &live, t);
    assign(graph, lambda, &normalized)
}

/// Supplier variant: visibility is the summed current degree of all items of
/// the item's supplier.
pub fn compute_edge_weights_supplier<C: Capacity, R: Real>(
    graph: &mut WeightedRecGraph<C>,
    catalog: &SupplierCatalog,
    lambda: R,
    t: usize,
) -> Result<()> {
    check_lambda(lambda)?;
    let degrees = graph.item_degrees();
    let suppliers: Vec<&str> = graph
        .items()
        .iter()
        .map(|i| {
            catalog
                .supplier_of(i)
                .map_err(|_| Error::Configuration(format!("item {i} has no supplier")))
        })
        .collect::<Result<_>>()?;
    let mut supplier_degree: std::collections::HashMap<&str, usize> = Default::default();
    for (s, &d) in suppliers.iter().zip(&degrees) {
        *supplier_degree.entry(s).or_default() += d;
    }
    let live: Vec<bool> = degrees.iter().map(|&d| d > 0).collect();
    let raw: Vec<R> = suppliers
        .iter()
        .map(|s| R::of_usize(supplier_degree[s]))
        .collect();
    let normalized = normalize_live(&raw, &live, t);
    assign(graph, lambda, &normalized)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{Entry, RankedBatch};
    use std::collections::BTreeMap;

    fn batch(lists: &[(&str, &[&str])]) -> RankedBatch<f64> {
        let lists: BTreeMap<String, Vec<Entry<f64>>> = lists
            .iter()
            .map(|(u, items)| {
                let l = items
                    .iter()
                    .enumerate()
                    .map(|(k, i)| Entry::new(*i, -(k as f64)))
                    .collect();
                (u.to_string(), l)
            })
            .collect();
        let size = lists.values().map(Vec::len).max().unwrap();
        RankedBatch::new(lists, size).unwrap()
    }

    fn weight_of(g: &WeightedRecGraph<i64>, item: &str, user: &str) -> i64 {
        let (k, _) = g
            .live_pairs()
            .find(|(_, p)| g.item_id(p.item) == item && g.user_id(p.user) == user)
            .unwrap();
        g.weight(k)
    }

    /// Degrees a:1, b:2, c:4 (c also holds rank 2 for user u1).
    fn skewed() -> RankedBatch<f64> {
        batch(&[
            ("u1", &["b", "c", "x1", "x2"]),
            ("u2", &["c", "b", "x3", "x4"]),
            ("u3", &["c", "a", "x5", "x6"]),
            ("u4", &["c", "x7", "x8", "x9"]),
        ])
    }

    #[test]
    fn lambda_one_is_pure_rank() {
        let mut g = WeightedRecGraph::<i64>::from_batch(&skewed());
        compute_edge_weights_item(&mut g, 1.0, 4).unwrap();
        for (k, p) in g.live_pairs() {
            assert_eq!(g.weight(k), 100 * p.rank as i64);
        }
    }

    #[test]
    fn lambda_zero_equal_degree_equal_weight() {
        let mut g = WeightedRecGraph::<i64>::from_batch(&skewed());
        compute_edge_weights_item(&mut g, 0.0, 4).unwrap();
        assert_eq!(weight_of(&g, "x1", "u1"), weight_of(&g, "x9", "u4"));
        assert_eq!(weight_of(&g, "c", "u1"), weight_of(&g, "c", "u4"));
    }

    #[test]
    fn hand_evaluated_mix() {
        // Degrees over {a, b, c, x*} are {1, 2, 4, 1}: min 1, max 4, so with
        // t = 4 the normalised degree equals the degree. Edge (c, u1) has
        // rank 2: round(100 * (0.5 * 2 + 0.5 * 4)) = 300.
        let mut g = WeightedRecGraph::<i64>::from_batch(&skewed());
        compute_edge_weights_item(&mut g, 0.5, 4).unwrap();
        assert_eq!(weight_of(&g, "c", "u1"), 300);
        assert_eq!(weight_of(&g, "b", "u1"), 150);
        assert_eq!(weight_of(&g, "a", "u3"), 150);
    }

    #[test]
    fn constant_degree_normalises_to_one() {
        let mut g = WeightedRecGraph::<i64>::from_batch(&batch(&[("u1", &["a", "b"]), ("u2", &["b", "a"])]));
        compute_edge_weights_item(&mut g, 0.0, 2).unwrap();
        assert!(g.live_pairs().all(|(k, _)| g.weight(k) == 100));
    }

    #[test]
    fn singleton_suppliers_reduce_to_item_weights() {
        let b = skewed();
        let catalog = SupplierCatalog::singleton(b.iter().flat_map(|(_, l)| l.iter().map(|e| e.item.clone())));
        for lambda in [0.0, 0.25, 0.5, 0.75, 1.0] {
            let mut gi = WeightedRecGraph::<i64>::from_batch(&b);
            let mut gs = gi.clone();
            compute_edge_weights_item(&mut gi, lambda, 4).unwrap();
            compute_edge_weights_supplier(&mut gs, &catalog, lambda, 4).unwrap();
            for (k, _) in gi.live_pairs() {
                assert_eq!(gi.weight(k), gs.weight(k));
            }
        }
    }

    #[test]
    fn supplier_visibility_sums_item_degrees() {
        // b (degree 2) and c (degree 4) share supplier S: both carry 6, the
        // maximum, so both normalise to t; x-items (degree 1) normalise to 1.
        let b = skewed();
        let pairs: Vec<(String, String)> = b
            .iter()
            .flat_map(|(_, l)| l.iter().map(|e| e.item.clone()))
            .map(|i| {
                let s = if i == "b" || i == "c" { "S".to_string() } else { i.clone() };
                (i, s)
            })
            .collect();
        let catalog = SupplierCatalog::from_pairs(pairs).unwrap();
        let mut g = WeightedRecGraph::<i64>::from_batch(&b);
        compute_edge_weights_supplier(&mut g, &catalog, 0.0, 4).unwrap();
        assert_eq!(weight_of(&g, "b", "u1"), 400);
        assert_eq!(weight_of(&g, "c", "u3"), 400);
        assert_eq!(weight_of(&g, "x1", "u1"), 100);
        // a: supplier visibility 1 → 1
        assert_eq!(weight_of(&g, "a", "u3"), 100);
    }

    #[test]
    fn missing_supplier_is_configuration_error() {
        let mut g = WeightedRecGraph::<i64>::from_batch(&skewed());
        let catalog = SupplierCatalog::singleton(["a"]);
        assert!(matches!(
            compute_edge_weights_supplier(&mut g, &catalog, 0.5, 4),
            Err(Error::Configuration(_))
        ));
    }

    #[test]
    fn rejects_lambda_outside_unit_interval() {
        let mut g = WeightedRecGraph::<i64>::from_batch(&skewed());
        assert!(compute_edge_weights_item(&mut g, 1.5, 4).is_err());
    }
}
