use std::collections::{BTreeSet, HashMap};

use crate::error::{Error, Result};
use crate::model::RankedBatch;
use crate::scalar::{Capacity, Real};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Pair {
    pub item: u32,
    pub user: u32,
    /// 1-based position of the item in the user's long list.
    pub rank: u32,
}

/// The recommendation graph FairMatch shrinks: one `(item, user)` pair per
/// long-list entry, with ranks frozen at construction.
#[derive(Debug, Clone)]
pub struct WeightedRecGraph<C> {
    items: Vec<String>,
    users: Vec<String>,
    pairs: Vec<Pair>,
    alive: Vec<bool>,
    weights: Vec<C>,
}

impl<C: Capacity> WeightedRecGraph<C> {
    /// Items are indexed in ascending id order, users in batch order.
    pub fn from_batch<R: Real>(batch: &RankedBatch<R>) -> Self {
        let items: Vec<String> = batch
            .iter()
            .flat_map(|(_, l)| l.iter().map(|e| e.item.clone()))
            .collect::<BTreeSet<_>>()
            .into_iter()
            .collect();
        let index: HashMap<&str, u32> = items
            .iter()
            .enumerate()
            .map(|(k, i)| (i.as_str(), k as u32))
            .collect();
        let mut users = Vec::with_capacity(batch.num_users());
        let mut pairs = Vec::with_capacity(batch.total_entries());
        for (u, (user, list)) in batch.iter().enumerate() {
            users.push(user.to_owned());
            for (pos, e) in list.iter().enumerate() {
                pairs.push(Pair {
                    item: index[e.item.as_str()],
                    user: u as u32,
                    rank: pos as u32 + 1,
                });
            }
        }
        let n = pairs.len();
        Self {
            items,
            users,
            pairs,
            alive: vec![true; n],
            weights: vec![C::zero(); n],
        }
    }

    pub fn item_id(&self, item: u32) -> &str {
        &self.items[item as usize]
    }

    pub fn user_id(&self, user: u32) -> &str {
        &self.users[user as usize]
    }

    pub fn items(&self) -> &[String] {
        &self.items
    }

    pub fn users(&self) -> &[String] {
        &self.users
    }

    /// `(pair index, pair)` for pairs still in the graph.
    pub fn live_pairs(&self) -> impl Iterator<Item = (usize, Pair)> + '_ {
        self.pairs
            .iter()
            .enumerate()
            .filter(|(k, _)| self.alive[*k])
            .map(|(k, p)| (k, *p))
    }

    pub fn num_pairs(&self) -> usize {
        self.alive.iter().filter(|&&a| a).count()
    }

    /// Current degree of every item (zero once removed).
    pub fn item_degrees(&self) -> Vec<usize> {
        let mut degree = vec![0; self.items.len()];
        for (_, p) in self.live_pairs() {
            degree[p.item as usize] += 1;
        }
        degree
    }

    /// Items and users that still have at least one pair.
    pub fn active(&self) -> (Vec<u32>, Vec<u32>) {
        let mut items = vec![false; self.items.len()];
        let mut users = vec![false; self.users.len()];
        for (_, p) in self.live_pairs() {
            items[p.item as usize] = true;
            users[p.user as usize] = true;
        }
        let pick = |flags: Vec<bool>| {
            flags
                .into_iter()
                .enumerate()
                .filter(|(_, f)| *f)
                .map(|(k, _)| k as u32)
                .collect()
        };
        (pick(items), pick(users))
    }

    pub fn weight(&self, pair: usize) -> C {
        self.weights[pair]
    }

    pub(crate) fn set_weight(&mut self, pair: usize, weight: C) {
        self.weights[pair] = weight;
    }

    /// Sum of the current weights of live pairs.
    pub fn total_weight(&self) -> C {
        self.live_pairs().map(|(k, _)| self.weights[k]).sum()
    }

    /// Removes every live pair incident to the given items and returns them
    /// with their current weights.
    pub fn remove_items(&mut self, items: &[u32]) -> Vec<(Pair, C)> {
        let mut selected = vec![false; self.items.len()];
        for &i in items {
            selected[i as usize] = true;
        }
        let mut removed = Vec::new();
        for k in 0..self.pairs.len() {
            if self.alive[k] && selected[self.pairs[k].item as usize] {
                self.alive[k] = false;
                removed.push((self.pairs[k], self.weights[k]));
            }
        }
        removed
    }
}

/// Min-max normalisation onto `[1, t]`; a constant input maps to 1.
pub(crate) fn normalize_onto_rank_range<R: Real>(values: &[R], t: usize) -> Vec<R> {
    let Some(min) = values.iter().copied().reduce(R::min) else {
        return Vec::new();
    };
    let max = values.iter().copied().fold(min, R::max);
    if max == min {
        return vec![R::one(); values.len()];
    }
    let span = R::of_usize(t) - R::one();
    values
        .iter()
        .map(|&v| R::one() + (v - min) * span / (max - min))
        .collect()
}

pub(crate) fn to_capacity<C: Capacity, R: Real>(value: R) -> Result<C> {
    value
        .round()
        .to_i64()
        .and_then(C::of_i64)
        .ok_or_else(|| Error::InternalLogic(format!("weight {value} does not fit the capacity type")))
}
