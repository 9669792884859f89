//! Seeded popularity-skewed corpora for directional checks.
//!
//! Items get Zipf popularity weights over a random permutation and belong to
//! one of several taste clusters. Each user prefers one cluster: most of a
//! user's interactions are drawn (by popularity) from that cluster, the rest
//! from the whole catalog. Ratings are higher inside the preferred cluster.

use rand::seq::SliceRandom;
use rand::distributions::{Distribution, WeightedIndex};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::model::{InteractionDataset, SupplierCatalog};
use crate::scalar::Real;

#[derive(Debug, Clone, PartialEq)]
pub struct SyntheticConfig {
    pub users: usize,
    pub items: usize,
    pub suppliers: usize,
    pub zipf_exponent: f64,
    pub clusters: usize,
    /// Inclusive range of interactions per user.
    pub min_profile: usize,
    pub max_profile: usize,
    /// Probability that an interaction comes from the user's own cluster.
    pub affinity: f64,
    pub seed: u64,
}

impl Default for SyntheticConfig {
    fn default() -> Self {
        Self {
            users: 500,
            items: 300,
            suppliers: 100,
            zipf_exponent: 1.0,
            clusters: 4,
            min_profile: 15,
            max_profile: 40,
            affinity: 0.3,
            seed: 0,
        }
    }
}

#[derive(Debug, Clone)]
pub struct SyntheticCorpus<R> {
    pub ratings: InteractionDataset<R>,
    pub catalog: SupplierCatalog,
}

pub fn item_id(k: usize) -> String {
    format!("i{k:04}")
}

pub fn user_id(k: usize) -> String {
    format!("u{k:04}")
}

pub fn supplier_id(k: usize) -> String {
    format!("s{k:03}")
}

/// Draws up to `m` distinct positions of `pool` with probability
/// proportional to `weights`.
fn weighted_distinct(rng: &mut ChaCha8Rng, pool: &[usize], weights: &[f64], m: usize) -> Vec<usize> {
    pool.choose_multiple_weighted(rng, m.min(pool.len()), |&i| weights[i])
        .expect("weights are positive and finite")
        .copied()
        .collect()
}

pub fn generate<R: Real>(config: &SyntheticConfig) -> Result<SyntheticCorpus<R>> {
    let c = config;
    if c.users == 0 || c.items == 0 || c.clusters == 0 || c.clusters > c.items {
        return Err(Error::InvalidArgument("synthetic corpus needs users, items and 1..=items clusters".into()));
    }
    if c.suppliers == 0 || c.suppliers > c.items {
        return Err(Error::InvalidArgument(format!(
            "{} suppliers cannot each own one of {} items",
            c.suppliers, c.items
        )));
    }
    if c.min_profile == 0 || c.min_profile > c.max_profile || c.max_profile > c.items {
        return Err(Error::InvalidArgument("profile sizes must satisfy 0 < min <= max <= items".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(c.seed);

    let mut order: Vec<usize> = (0..c.items).collect();
    order.shuffle(&mut rng);
    let mut popularity = vec![0.0; c.items];
    for (rank, &i) in order.iter().enumerate() {
        popularity[i] = 1.0 / ((rank + 1) as f64).powf(c.zipf_exponent);
    }
    let cluster_of: Vec<usize> = (0..c.items).map(|i| i % c.clusters).collect();
    let members: Vec<Vec<usize>> = (0..c.clusters)
        .map(|k| (0..c.items).filter(|&i| cluster_of[i] == k).collect())
        .collect();
    let all: Vec<usize> = (0..c.items).collect();

    let mut triples = Vec::new();
    for u in 0..c.users {
        let home = rng.gen_range(0..c.clusters);
        let m = rng.gen_range(c.min_profile..=c.max_profile);
        let local = (0..m).filter(|_| rng.gen_bool(c.affinity)).count();
        let mut picked = weighted_distinct(&mut rng, &members[home], &popularity, local);
        let rest: Vec<usize> = all.iter().copied().filter(|i| !picked.contains(i)).collect();
        picked.extend(weighted_distinct(&mut rng, &rest, &popularity, m - picked.len()));
        for i in picked {
            let bonus = if cluster_of[i] == home { 1.5 } else { 0.0 };
            let rating = (2.5 + bonus + rng.gen_range(-1.0..1.0f64)).round().clamp(1.0, 5.0);
            triples.push((user_id(u), item_id(i), R::of(rating)));
        }
    }

    // Every supplier owns one item of a random permutation; the remaining
    // items go to suppliers drawn with Zipf weights, so most suppliers stay
    // small and a few own many items.
    let supplier_weights: Vec<f64> = (0..c.suppliers)
        .map(|k| 1.0 / ((k + 1) as f64).powf(c.zipf_exponent))
        .collect();
    let extra = WeightedIndex::new(&supplier_weights).expect("weights are positive");
    let mut owners: Vec<usize> = (0..c.items)
        .map(|k| if k < c.suppliers { k } else { extra.sample(&mut rng) })
        .collect();
    owners.shuffle(&mut rng);
    let catalog = SupplierCatalog::from_pairs((0..c.items).map(|i| (item_id(i), supplier_id(owners[i]))))?;

    Ok(SyntheticCorpus {
        ratings: InteractionDataset::from_triples(triples),
        catalog,
    })
}
