use std::collections::{BTreeMap, HashSet};

use crate::error::Result;
use crate::model::{Entry, InteractionDataset, RankedBatch};
use crate::scalar::Real;

/// Items by descending training count, ties by ascending item id.
pub(crate) fn popularity_order<R: Real>(train: &InteractionDataset<R>) -> Vec<(u32, usize)> {
    let counts = train.item_counts();
    let mut order: Vec<(u32, usize)> = counts
        .iter()
        .enumerate()
        .map(|(i, &c)| (i as u32, c))
        .collect();
    order.sort_by(|a, b| {
        b.1.cmp(&a.1)
            .then_with(|| train.items().id(a.0).cmp(train.items().id(b.0)))
    });
    order
}

/// Top-`t` unseen items per user by training count.
///
/// Users whose unseen catalog is smaller than `t` get shorter lists.
pub fn most_popular<R: Real>(train: &InteractionDataset<R>, t: usize) -> Result<RankedBatch<R>> {
    let order = popularity_order(train);
    let profiles = train.profiles();
    let mut short = 0usize;
    let mut lists = BTreeMap::new();
    for (user, profile) in profiles.iter().enumerate() {
        let seen: HashSet<u32> = profile.iter().map(|&(i, _)| i).collect();
        let list: Vec<Entry<R>> = order
            .iter()
            .filter(|(i, _)| !seen.contains(i))
            .take(t)
            .map(|&(i, c)| Entry::new(train.items().id(i), R::of_usize(c)))
            .collect();
        short += usize::from(list.len() < t);
        lists.insert(train.users().id(user as u32).to_owned(), list);
    }
    if short > 0 {
        log::warn!("{short} user(s) have fewer than {t} unseen items; their lists are short");
        RankedBatch::new_partial(lists, t)
    } else {
        RankedBatch::new(lists, t)
    }
}
