use std::collections::BTreeMap;

use super::visibility::{by_supplier, recommendation_counts, Level};
use crate::model::{InteractionDataset, RankedBatch, SupplierCatalog};
use crate::scalar::Real;

/// Fraction of catalog entities recommended at least `alpha` times.
pub fn alpha_aggregate_diversity<R: Real>(
    batch: &RankedBatch<R>,
    catalog: &SupplierCatalog,
    level: Level,
    alpha: usize,
) -> R {
    assert!(alpha >= 1, "alpha must be positive");
    let counts = recommendation_counts(batch, catalog);
    let counts: BTreeMap<String, usize> = match level {
        Level::Item => counts,
        Level::Supplier => by_supplier(&counts, catalog),
    };
    if counts.is_empty() {
        return R::zero();
    }
    let hit = counts.values().filter(|&&c| c >= alpha).count();
    R::of_usize(hit) / R::of_usize(counts.len())
}

/// Items outside the short head: the smallest set of most-rated training items
/// (ties by id) holding at least 20% of all training ratings.
pub fn long_tail_items<R: Real>(train: &InteractionDataset<R>) -> Vec<&str> {
    let counts = train.item_counts();
    let mut order: Vec<usize> = (0..counts.len()).collect();
    order.sort_by(|&a, &b| counts[b].cmp(&counts[a]).then(train.items().id(a as u32).cmp(train.items().id(b as u32))));
    let total: usize = counts.iter().sum();
    let mut head = 0;
    let mut cumulative = 0;
    // cumulative / total >= 0.2, in integers
    while head < order.len() && cumulative * 5 < total {
        cumulative += counts[order[head]];
        head += 1;
    }
    order[head..].iter().map(|&i| train.items().id(i as u32)).collect()
}

/// Fraction of long-tail items recommended at least once; zero when the long
/// tail is empty.
pub fn long_tail_coverage<R: Real>(batch: &RankedBatch<R>, train: &InteractionDataset<R>) -> R {
    let tail = long_tail_items(train);
    if tail.is_empty() {
        return R::zero();
    }
    let recommended = batch.item_counts();
    let covered = tail.iter().filter(|i| recommended.contains_key(*i)).count();
    R::of_usize(covered) / R::of_usize(tail.len())
}

fn normalized<R: Real>(values: &[R]) -> Option<Vec<R>> {
    let sum: R = values.iter().copied().sum();
    (sum > R::zero()).then(|| values.iter().map(|&v| v / sum).collect())
}

/// Normalised Gini index of a visibility distribution: 0 when uniform, 1 when
/// a single entity holds everything. `None` if all values are zero.
pub fn gini<R: Real>(values: &[R]) -> Option<R> {
    let mut p = normalized(values)?;
    let n = p.len();
    if n == 1 {
        return Some(R::zero());
    }
    p.sort_by(|a, b| a.partial_cmp(b).unwrap_or(std::cmp::Ordering::Equal));
    let nr = R::of_usize(n);
    let sum: R = p
        .iter()
        .enumerate()
        .map(|(k, &pk)| (R::of_usize(2 * (k + 1)) - nr - R::one()) * pk)
        .sum();
    Some(sum / (nr - R::one()))
}

/// Shannon entropy (natural log) of a visibility distribution. `None` if all
/// values are zero.
pub fn entropy<R: Real>(values: &[R]) -> Option<R> {
    let p = normalized(values)?;
    Some(-p.iter().filter(|&&x| x > R::zero()).map(|&x| x * x.ln()).sum::<R>())
}
