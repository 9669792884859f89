use std::collections::BTreeMap;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::model::{RankedBatch, SupplierCatalog};
use crate::scalar::Real;

pub const NUM_GROUPS: usize = 10;

/// Whether a metric is computed over items or over suppliers.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Level {
    Item,
    Supplier,
}

/// Share of lists each catalog entity appears in.
///
/// `items[i]` is the fraction of lists containing `i`; `suppliers[s]` sums the
/// item shares of `s`'s items. Every catalog entity is present, unrecommended
/// ones with zero. Items outside the catalog are ignored.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VisibilityTable<R> {
    pub items: BTreeMap<String, R>,
    pub suppliers: BTreeMap<String, R>,
}

impl<R: Real> VisibilityTable<R> {
    pub fn level(&self, level: Level) -> &BTreeMap<String, R> {
        match level {
            Level::Item => &self.items,
            Level::Supplier => &self.suppliers,
        }
    }
}

/// Number of lists each catalog item appears in.
pub fn recommendation_counts<R: Real>(batch: &RankedBatch<R>, catalog: &SupplierCatalog) -> BTreeMap<String, usize> {
    let mut counts: BTreeMap<String, usize> = catalog.items().map(|i| (i.to_owned(), 0)).collect();
    for (item, c) in batch.item_counts() {
        if let Some(slot) = counts.get_mut(item) {
            *slot += c;
        }
    }
    counts
}

/// Per-supplier sums of per-item values.
pub(crate) fn by_supplier<T: Copy + Default + std::ops::AddAssign>(
    per_item: &BTreeMap<String, T>,
    catalog: &SupplierCatalog,
) -> BTreeMap<String, T> {
    let mut out: BTreeMap<String, T> = catalog.suppliers().map(|s| (s.to_owned(), T::default())).collect();
    for (item, &v) in per_item {
        if let Ok(s) = catalog.supplier_of(item) {
            *out.get_mut(s).expect("catalog suppliers are complete") += v;
        }
    }
    out
}

pub fn visibility_table<R: Real>(batch: &RankedBatch<R>, catalog: &SupplierCatalog) -> VisibilityTable<R> {
    let lists = R::of_usize(batch.num_users().max(1));
    let items: BTreeMap<String, R> = recommendation_counts(batch, catalog)
        .into_iter()
        .map(|(i, c)| (i, R::of_usize(c) / lists))
        .collect();
    let mut suppliers: BTreeMap<String, R> = catalog.suppliers().map(|s| (s.to_owned(), R::zero())).collect();
    for (item, &v) in &items {
        let s = catalog.supplier_of(item).expect("items come from the catalog");
        let slot = suppliers.get_mut(s).expect("catalog suppliers are complete");
        *slot = *slot + v;
    }
    VisibilityTable { items, suppliers }
}

/// Ten visibility groups, most visible first.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct GroupBinning {
    pub groups: Vec<Vec<String>>,
}

impl GroupBinning {
    pub fn sizes(&self) -> Vec<usize> {
        self.groups.iter().map(Vec::len).collect()
    }
}

/// Splits the entities with positive reference visibility into ten bins by
/// descending visibility (ties by id). The first `len % 10` bins take one
/// extra entity.
pub fn bin_by_visibility<R: Real>(reference: &VisibilityTable<R>, level: Level) -> Result<GroupBinning> {
    let mut entities: Vec<(&String, R)> = reference
        .level(level)
        .iter()
        .filter(|(_, v)| **v > R::zero())
        .map(|(e, v)| (e, *v))
        .collect();
    if entities.len() < NUM_GROUPS {
        return Err(Error::InvalidArgument(format!(
            "visibility groups need at least {NUM_GROUPS} recommended {level:?} entities, got {}",
            entities.len()
        )));
    }
    entities.sort_by(|a, b| b.1.partial_cmp(&a.1).unwrap_or(std::cmp::Ordering::Equal).then(a.0.cmp(b.0)));
    let base = entities.len() / NUM_GROUPS;
    let extra = entities.len() % NUM_GROUPS;
    let mut rest = entities.into_iter().map(|(e, _)| e.clone());
    let groups = (0..NUM_GROUPS)
        .map(|g| rest.by_ref().take(base + usize::from(g < extra)).collect())
        .collect();
    Ok(GroupBinning { groups })
}

/// Mean visibility of each group's members under `table`.
pub fn group_visibility<R: Real>(binning: &GroupBinning, table: &VisibilityTable<R>, level: Level) -> Vec<R> {
    let values = table.level(level);
    binning
        .groups
        .iter()
        .map(|g| {
            let sum: R = g.iter().map(|e| values.get(e).copied().unwrap_or_else(R::zero)).sum();
            sum / R::of_usize(g.len().max(1))
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GroupShift<R> {
    pub sizes: Vec<usize>,
    pub base: Vec<R>,
    pub reranked: Vec<R>,
    /// Relative change per group; `None` where the base visibility is zero.
    pub shift: Vec<Option<R>>,
}

/// Relative visibility change of each long-list visibility group between the
/// base top-`n` batch and a re-ranked batch.
pub fn group_visibility_shift<R: Real>(
    base: &RankedBatch<R>,
    reranked: &RankedBatch<R>,
    long: &RankedBatch<R>,
    catalog: &SupplierCatalog,
    level: Level,
) -> Result<GroupShift<R>> {
    let binning = bin_by_visibility(&visibility_table(long, catalog), level)?;
    let before = group_visibility(&binning, &visibility_table(base, catalog), level);
    let after = group_visibility(&binning, &visibility_table(reranked, catalog), level);
    let shift = before
        .iter()
        .zip(&after)
        .map(|(&b, &a)| (b > R::zero()).then(|| (a - b) / b))
        .collect();
    Ok(GroupShift {
        sizes: binning.sizes(),
        base: before,
        reranked: after,
        shift,
    })
}
