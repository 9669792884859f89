//! Shared domain types: interaction datasets, supplier catalogs, ranked
//! recommendation batches and experiment configuration.
//!
//! Ids are opaque strings at the boundary. Datasets intern them into dense
//! `u32` indices in order of first appearance.

use std::collections::{BTreeMap, BTreeSet, HashMap, HashSet};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Real;

/// Bidirectional map between string ids and dense indices.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct IdIndex {
    ids: Vec<String>,
    index: HashMap<String, u32>,
}

impl IdIndex {
    pub fn intern(&mut self, id: &str) -> u32 {
        if let Some(&idx) = self.index.get(id) {
            return idx;
        }
        let idx = self.ids.len() as u32;
        self.ids.push(id.to_owned());
        self.index.insert(id.to_owned(), idx);
        idx
    }

    pub fn get(&self, id: &str) -> Option<u32> {
        self.index.get(id).copied()
    }

    pub fn id(&self, idx: u32) -> &str {
        &self.ids[idx as usize]
    }

    pub fn len(&self) -> usize {
        self.ids.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ids.is_empty()
    }

    pub fn ids(&self) -> &[String] {
        &self.ids
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Interaction<R> {
    pub user: u32,
    pub item: u32,
    pub value: R,
}

/// User/item/value triples with dense id indices.
///
/// Each `(user, item)` pair occurs at most once.
#[derive(Debug, Clone, PartialEq)]
pub struct InteractionDataset<R> {
    users: IdIndex,
    items: IdIndex,
    interactions: Vec<Interaction<R>>,
}

impl<R: Real> Default for InteractionDataset<R> {
    fn default() -> Self {
        Self {
            users: IdIndex::default(),
            items: IdIndex::default(),
            interactions: Vec::new(),
        }
    }
}

impl<R: Real> InteractionDataset<R> {
    /// Builds a dataset from triples. A repeated `(user, item)` pair keeps the
    /// position of its first occurrence and the value of its last.
    pub fn from_triples<U, I>(triples: impl IntoIterator<Item = (U, I, R)>) -> Self
    where
        U: AsRef<str>,
        I: AsRef<str>,
    {
        let mut ds = Self::default();
        let mut seen: HashMap<(u32, u32), usize> = HashMap::new();
        for (u, i, value) in triples {
            let user = ds.users.intern(u.as_ref());
            let item = ds.items.intern(i.as_ref());
            match seen.get(&(user, item)) {
                Some(&pos) => ds.interactions[pos].value = value,
                None => {
                    seen.insert((user, item), ds.interactions.len());
                    ds.interactions.push(Interaction { user, item, value });
                }
            }
        }
        ds
    }

    pub fn users(&self) -> &IdIndex {
        &self.users
    }

    pub fn items(&self) -> &IdIndex {
        &self.items
    }

    pub fn interactions(&self) -> &[Interaction<R>] {
        &self.interactions
    }

    pub fn len(&self) -> usize {
        self.interactions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.interactions.is_empty()
    }

    pub fn num_users(&self) -> usize {
        self.users.len()
    }

    pub fn num_items(&self) -> usize {
        self.items.len()
    }

    /// Iterates `(userId, itemId, value)` in storage order.
    pub fn triples(&self) -> impl Iterator<Item = (&str, &str, R)> + '_ {
        self.interactions
            .iter()
            .map(|x| (self.users.id(x.user), self.items.id(x.item), x.value))
    }

    /// Per-user `(item, value)` lists, indexed by dense user index, in storage order.
    pub fn profiles(&self) -> Vec<Vec<(u32, R)>> {
        let mut out = vec![Vec::new(); self.users.len()];
        for x in &self.interactions {
            out[x.user as usize].push((x.item, x.value));
        }
        out
    }

    /// Item ids each user interacted with, keyed by user id.
    pub fn profile_sets(&self) -> HashMap<&str, HashSet<&str>> {
        let mut out: HashMap<&str, HashSet<&str>> = HashMap::new();
        for (u, i, _) in self.triples() {
            out.entry(u).or_default().insert(i);
        }
        out
    }

    /// Number of interactions per dense item index.
    pub fn item_counts(&self) -> Vec<usize> {
        let mut counts = vec![0; self.items.len()];
        for x in &self.interactions {
            counts[x.item as usize] += 1;
        }
        counts
    }

    /// Number of interactions per dense user index.
    pub fn user_counts(&self) -> Vec<usize> {
        let mut counts = vec![0; self.users.len()];
        for x in &self.interactions {
            counts[x.user as usize] += 1;
        }
        counts
    }

    pub fn stats(&self) -> DatasetStats {
        let cells = self.num_users() as f64 * self.num_items() as f64;
        DatasetStats {
            users: self.num_users(),
            items: self.num_items(),
            interactions: self.len(),
            density: if cells > 0.0 { self.len() as f64 / cells } else { 0.0 },
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DatasetStats {
    pub users: usize,
    pub items: usize,
    pub interactions: usize,
    pub density: f64,
}

/// Total mapping from items to the supplier that provides them.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct SupplierCatalog {
    item_to_supplier: BTreeMap<String, String>,
    supplier_to_items: BTreeMap<String, BTreeSet<String>>,
}

impl SupplierCatalog {
    /// Builds a catalog from `(item, supplier)` pairs. Repeating an identical
    /// pair is fine; assigning a second supplier to an item is a conflict.
    pub fn from_pairs<I, S>(pairs: impl IntoIterator<Item = (I, S)>) -> Result<Self>
    where
        I: AsRef<str>,
        S: AsRef<str>,
    {
        let mut catalog = Self::default();
        for (item, supplier) in pairs {
            let (item, supplier) = (item.as_ref(), supplier.as_ref());
            if let Some(existing) = catalog.item_to_supplier.get(item) {
                if existing != supplier {
                    return Err(Error::SupplierConflict {
                        item: item.to_owned(),
                        first: existing.clone(),
                        second: supplier.to_owned(),
                    });
                }
                continue;
            }
            catalog
                .item_to_supplier
                .insert(item.to_owned(), supplier.to_owned());
            catalog
                .supplier_to_items
                .entry(supplier.to_owned())
                .or_default()
                .insert(item.to_owned());
        }
        Ok(catalog)
    }

    /// Every item is its own supplier.
    pub fn singleton<I: AsRef<str>>(items: impl IntoIterator<Item = I>) -> Self {
        Self::from_pairs(items.into_iter().map(|i| {
            let id = i.as_ref().to_owned();
            (id.clone(), id)
        }))
        .expect("singleton suppliers never conflict")
    }

    pub fn supplier_of(&self, item: &str) -> Result<&str> {
        self.item_to_supplier
            .get(item)
            .map(String::as_str)
            .ok_or_else(|| Error::MissingEntry(format!("item {item} has no supplier")))
    }

    pub fn items_of(&self, supplier: &str) -> Option<&BTreeSet<String>> {
        self.supplier_to_items.get(supplier)
    }

    pub fn contains_item(&self, item: &str) -> bool {
        self.item_to_supplier.contains_key(item)
    }

    pub fn items(&self) -> impl Iterator<Item = &str> + '_ {
        self.item_to_supplier.keys().map(String::as_str)
    }

    pub fn suppliers(&self) -> impl Iterator<Item = &str> + '_ {
        self.supplier_to_items.keys().map(String::as_str)
    }

    /// `(item, supplier)` pairs in item order.
    pub fn pairs(&self) -> impl Iterator<Item = (&str, &str)> + '_ {
        self.item_to_supplier
            .iter()
            .map(|(i, s)| (i.as_str(), s.as_str()))
    }

    pub fn num_items(&self) -> usize {
        self.item_to_supplier.len()
    }

    pub fn num_suppliers(&self) -> usize {
        self.supplier_to_items.len()
    }

    /// Fails with the full list of offenders if any item lacks a supplier.
    pub fn ensure_covers<'a>(&self, items: impl IntoIterator<Item = &'a str>) -> Result<()> {
        let mut missing: Vec<String> = items
            .into_iter()
            .filter(|i| !self.contains_item(i))
            .map(str::to_owned)
            .collect();
        if missing.is_empty() {
            return Ok(());
        }
        missing.sort();
        missing.dedup();
        Err(Error::MissingSupplier(missing))
    }

    /// The sub-catalog over the given items; suppliers left without items vanish.
    pub fn restricted_to<'a>(&self, items: impl IntoIterator<Item = &'a str>) -> Result<Self> {
        let items: Vec<&str> = items.into_iter().collect();
        self.ensure_covers(items.iter().copied())?;
        Self::from_pairs(items.into_iter().map(|i| (i, self.item_to_supplier[i].as_str())))
    }
}

/// One position of a ranked list.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Entry<R> {
    pub item: String,
    pub score: R,
}

impl<R> Entry<R> {
    pub fn new(item: impl Into<String>, score: R) -> Self {
        Self {
            item: item.into(),
            score,
        }
    }
}

/// Sorts entries by descending score, breaking ties by ascending item id.
pub fn sort_by_score<R: Real>(entries: &mut [Entry<R>]) {
    entries.sort_by(|a, b| {
        b.score
            .partial_cmp(&a.score)
            .unwrap_or(std::cmp::Ordering::Equal)
            .then_with(|| a.item.cmp(&b.item))
    });
}

/// Per-user ordered recommendation lists. Position `k` has rank `k + 1`.
///
/// Lists produced by a base recommender are score ordered (see
/// [`RankedBatch::new`]). Re-ranked lists keep their entries' original scores
/// but are ordered by the re-ranker, so only rank order is meaningful there.
#[derive(Debug, Clone, PartialEq)]
pub struct RankedBatch<R> {
    lists: BTreeMap<String, Vec<Entry<R>>>,
    list_size: usize,
}

impl<R: Real> RankedBatch<R> {
    /// Score-ordered lists of exactly `list_size` entries each.
    pub fn new(lists: BTreeMap<String, Vec<Entry<R>>>, list_size: usize) -> Result<Self> {
        Self::validate(&lists, list_size, true, true)?;
        Ok(Self { lists, list_size })
    }

    /// Lists of exactly `list_size` entries in caller-defined order.
    pub fn from_ranked(lists: BTreeMap<String, Vec<Entry<R>>>, list_size: usize) -> Result<Self> {
        Self::validate(&lists, list_size, true, false)?;
        Ok(Self { lists, list_size })
    }

    /// Score-ordered lists of at most `list_size` entries; used when the
    /// candidate pool is too small to fill every list.
    pub fn new_partial(lists: BTreeMap<String, Vec<Entry<R>>>, list_size: usize) -> Result<Self> {
        Self::validate(&lists, list_size, false, true)?;
        Ok(Self { lists, list_size })
    }

    /// Lists of at most `list_size` entries in caller-defined order.
    pub fn from_ranked_partial(lists: BTreeMap<String, Vec<Entry<R>>>, list_size: usize) -> Result<Self> {
        Self::validate(&lists, list_size, false, false)?;
        Ok(Self { lists, list_size })
    }

    /// True when every list holds exactly `list_size` entries.
    pub fn is_complete(&self) -> bool {
        self.lists.values().all(|l| l.len() == self.list_size)
    }

    fn validate(
        lists: &BTreeMap<String, Vec<Entry<R>>>,
        list_size: usize,
        exact: bool,
        score_ordered: bool,
    ) -> Result<()> {
        if list_size == 0 {
            return Err(Error::InvalidArgument("list size must be positive".into()));
        }
        for (user, list) in lists {
            if list.len() > list_size || (exact && list.len() != list_size) {
                return Err(Error::InvalidData(format!(
                    "user {user}: list has {} entries, expected {list_size}",
                    list.len()
                )));
            }
            let mut seen = HashSet::with_capacity(list.len());
            for e in list {
                if !seen.insert(e.item.as_str()) {
                    return Err(Error::InvalidData(format!(
                        "user {user}: item {} listed twice",
                        e.item
                    )));
                }
                if e.score.is_nan() {
                    return Err(Error::InvalidData(format!(
                        "user {user}: item {} has a NaN score",
                        e.item
                    )));
                }
            }
            if score_ordered {
                if let Some(w) = list.windows(2).find(|w| w[0].score < w[1].score) {
                    return Err(Error::Consistency(format!(
                        "user {user}: item {} scored below item {} but ranked above it",
                        w[0].item, w[1].item
                    )));
                }
            }
        }
        Ok(())
    }

    pub fn list_size(&self) -> usize {
        self.list_size
    }

    pub fn num_users(&self) -> usize {
        self.lists.len()
    }

    pub fn is_empty(&self) -> bool {
        self.lists.is_empty()
    }

    pub fn users(&self) -> impl Iterator<Item = &str> + '_ {
        self.lists.keys().map(String::as_str)
    }

    pub fn list(&self, user: &str) -> Option<&[Entry<R>]> {
        self.lists.get(user).map(Vec::as_slice)
    }

    /// `(user, list)` in ascending user-id order.
    pub fn iter(&self) -> impl Iterator<Item = (&str, &[Entry<R>])> + '_ {
        self.lists.iter().map(|(u, l)| (u.as_str(), l.as_slice()))
    }

    pub fn lists(&self) -> &BTreeMap<String, Vec<Entry<R>>> {
        &self.lists
    }

    pub fn into_lists(self) -> BTreeMap<String, Vec<Entry<R>>> {
        self.lists
    }

    /// Total number of entries over all lists.
    pub fn total_entries(&self) -> usize {
        self.lists.values().map(Vec::len).sum()
    }

    /// How many lists each item appears in.
    pub fn item_counts(&self) -> BTreeMap<&str, usize> {
        let mut counts = BTreeMap::new();
        for e in self.lists.values().flatten() {
            *counts.entry(e.item.as_str()).or_insert(0) += 1;
        }
        counts
    }

    /// Keeps the first `n` entries of every list.
    pub fn truncate(&self, n: usize) -> Result<Self> {
        if n == 0 || n > self.list_size {
            return Err(Error::InvalidArgument(format!(
                "cannot truncate lists of size {} to {n}",
                self.list_size
            )));
        }
        let lists = self
            .lists
            .iter()
            .map(|(u, l)| (u.clone(), l[..n.min(l.len())].to_vec()))
            .collect();
        Ok(Self {
            lists,
            list_size: n,
        })
    }

    /// The batch restricted to the given users.
    pub fn select_users<'a>(&self, users: impl IntoIterator<Item = &'a str>) -> Self {
        let lists = users
            .into_iter()
            .filter_map(|u| self.lists.get_key_value(u))
            .map(|(u, l)| (u.clone(), l.clone()))
            .collect();
        Self {
            lists,
            list_size: self.list_size,
        }
    }
}

/// Extracts the base top-`n` lists from top-`t` lists.
pub fn truncate<R: Real>(batch: &RankedBatch<R>, n: usize) -> Result<RankedBatch<R>> {
    batch.truncate(n)
}

/// Which visibility FairMatch optimizes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Variant {
    Item,
    Supplier,
}

impl std::fmt::Display for Variant {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Variant::Item => "item",
            Variant::Supplier => "supplier",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    /// Long list size fed to the re-ranker.
    pub t: usize,
    /// Final list size.
    pub n: usize,
    /// Relevance weight; `1 - lambda` goes to visibility.
    pub lambda: f64,
    /// Fraction of the final list that may be replaced by candidates.
    pub beta: f64,
    pub variant: Variant,
    pub seed: u64,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            t: 50,
            n: 10,
            lambda: 0.5,
            beta: 1.0,
            variant: Variant::Item,
            seed: 0,
        }
    }
}

impl ExperimentConfig {
    pub fn validate(&self) -> Result<()> {
        if self.n == 0 || self.t <= self.n {
            return Err(Error::InvalidArgument(format!(
                "need 0 < n < t, got n={} t={}",
                self.n, self.t
            )));
        }
        if !(0.0..=1.0).contains(&self.lambda) {
            return Err(Error::InvalidArgument(format!(
                "lambda must lie in [0, 1], got {}",
                self.lambda
            )));
        }
        if !(self.beta > 0.0 && self.beta <= 1.0) {
            return Err(Error::InvalidArgument(format!(
                "beta must lie in (0, 1], got {}",
                self.beta
            )));
        }
        Ok(())
    }
}
