use std::collections::BTreeMap;
use std::str::FromStr;

use rayon::prelude::*;

use super::popular::popularity_order;
use crate::error::{Error, Result};
use crate::model::{sort_by_score, Entry, IdIndex, InteractionDataset, RankedBatch};
use crate::scalar::Real;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Similarity {
    /// Dot product over co-rated items divided by the full profile norms.
    #[default]
    Cosine,
    /// Pearson correlation over co-rated items; zero below two co-ratings.
    Pearson,
}

impl FromStr for Similarity {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "cosine" => Ok(Similarity::Cosine),
            "pearson" => Ok(Similarity::Pearson),
            other => Err(Error::InvalidArgument(format!("unknown similarity {other:?}"))),
        }
    }
}

/// Per-user top-`k` neighbours with strictly positive similarity.
#[derive(Debug, Clone)]
pub struct NeighborModel<R> {
    k: usize,
    similarity: Similarity,
    users: IdIndex,
    neighbors: Vec<Vec<(u32, R)>>,
}

impl<R: Real> NeighborModel<R> {
    pub fn k(&self) -> usize {
        self.k
    }

    pub fn similarity_kind(&self) -> Similarity {
        self.similarity
    }

    /// Neighbours of a user as `(userId, similarity)`, most similar first.
    pub fn neighbors(&self, user: &str) -> Vec<(&str, R)> {
        self.users
            .get(user)
            .map(|u| {
                self.neighbors[u as usize]
                    .iter()
                    .map(|&(v, s)| (self.users.id(v), s))
                    .collect()
            })
            .unwrap_or_default()
    }
}

#[derive(Default, Clone)]
struct PairSums {
    dot: f64,
    sum_u: f64,
    sum_v: f64,
    sq_u: f64,
    sq_v: f64,
    n: u32,
}

/// Builds the neighbourhood model. Candidates with similarity `<= 0` are
/// excluded; ties keep the earlier user.
pub fn train_user_knn<R: Real>(
    train: &InteractionDataset<R>,
    k: usize,
    similarity: Similarity,
) -> Result<NeighborModel<R>> {
    if k == 0 {
        return Err(Error::InvalidArgument("neighbourhood size must be at least 1".into()));
    }
    if train.is_empty() {
        return Err(Error::InvalidArgument("cannot train on an empty dataset".into()));
    }
    let profiles: Vec<Vec<(u32, f64)>> = train
        .profiles()
        .into_iter()
        .map(|p| p.into_iter().map(|(i, r)| (i, r.to_f64_lossy())).collect())
        .collect();
    let mut raters: Vec<Vec<(u32, f64)>> = vec![Vec::new(); train.num_items()];
    for (u, profile) in profiles.iter().enumerate() {
        for &(i, r) in profile {
            raters[i as usize].push((u as u32, r));
        }
    }
    let norms: Vec<f64> = profiles
        .iter()
        .map(|p| p.iter().map(|&(_, r)| r * r).sum::<f64>().sqrt())
        .collect();

    let num_users = profiles.len();
    let neighbors = (0..num_users)
        .into_par_iter()
        .map_init(
            || (vec![PairSums::default(); num_users], Vec::<u32>::new()),
            |(sums, touched), u| {
                for &(i, ru) in &profiles[u] {
                    for &(v, rv) in &raters[i as usize] {
                        if v as usize == u {
                            continue;
                        }
                        let s = &mut sums[v as usize];
                        if s.n == 0 {
                            touched.push(v);
                        }
                        s.dot += ru * rv;
                        s.sum_u += ru;
                        s.sum_v += rv;
                        s.sq_u += ru * ru;
                        s.sq_v += rv * rv;
                        s.n += 1;
                    }
                }
                let mut scored: Vec<(u32, f64)> = touched
                    .iter()
                    .map(|&v| {
                        let s = &sums[v as usize];
                        let sim = match similarity {
                            Similarity::Cosine => {
                                let denom = norms[u] * norms[v as usize];
                                if denom > 0.0 {
                                    s.dot / denom
                                } else {
                                    0.0
                                }
                            }
                            Similarity::Pearson => pearson(s),
                        };
                        (v, sim)
                    })
                    .filter(|&(_, sim)| sim > 0.0)
                    .collect();
                for &v in touched.iter() {
                    sums[v as usize] = PairSums::default();
                }
                touched.clear();
                scored.sort_by(|a, b| b.1.total_cmp(&a.1).then(a.0.cmp(&b.0)));
                scored.truncate(k);
                scored
                    .into_iter()
                    .map(|(v, sim)| (v, R::of(sim)))
                    .collect::<Vec<_>>()
            },
        )
        .collect();

    Ok(NeighborModel {
        k,
        similarity,
        users: train.users().clone(),
        neighbors,
    })
}

fn pearson(s: &PairSums) -> f64 {
    if s.n < 2 {
        return 0.0;
    }
    let n = s.n as f64;
    let cov = n * s.dot - s.sum_u * s.sum_v;
    let var = (n * s.sq_u - s.sum_u * s.sum_u) * (n * s.sq_v - s.sum_v * s.sum_v);
    if var <= 0.0 {
        0.0
    } else {
        (cov / var.sqrt()).clamp(-1.0, 1.0)
    }
}

/// Top-`t` unseen items per training user.
///
/// `score(u, i) = sum_{v in N(u)} sim(u, v) * r(v, i) / sum_{v in N(u)} |sim(u, v)|`
/// over items some neighbour rated. Lists short of `t` are padded with the
/// most popular remaining unseen items, scored below every neighbour-based
/// score while keeping popularity order.
pub fn recommend_top_t<R: Real>(
    model: &NeighborModel<R>,
    train: &InteractionDataset<R>,
    t: usize,
) -> Result<RankedBatch<R>> {
    if t == 0 {
        return Err(Error::InvalidArgument("list size must be positive".into()));
    }
    if model.users != *train.users() {
        return Err(Error::InvalidArgument(
            "neighbour model was trained on a different dataset".into(),
        ));
    }
    let profiles = train.profiles();
    let popular = popularity_order(train);
    let max_count = popular.first().map_or(0, |p| p.1);
    let num_items = train.num_items();

    let lists: Vec<(String, Vec<Entry<R>>)> = (0..profiles.len())
        .into_par_iter()
        .map_init(
            || (vec![0.0f64; num_items], vec![false; num_items], vec![false; num_items]),
            |(acc, rated, seen), u| {
                for &(i, _) in &profiles[u] {
                    seen[i as usize] = true;
                }
                let mut candidates = Vec::new();
                let mut norm = 0.0;
                for &(v, sim) in &model.neighbors[u] {
                    let sim = sim.to_f64_lossy();
                    norm += sim.abs();
                    for &(i, r) in &profiles[v as usize] {
                        let idx = i as usize;
                        if seen[idx] {
                            continue;
                        }
                        if !rated[idx] {
                            rated[idx] = true;
                            candidates.push(i);
                        }
                        acc[idx] += sim * r.to_f64_lossy();
                    }
                }
                let mut list: Vec<Entry<R>> = candidates
                    .iter()
                    .map(|&i| Entry::new(train.items().id(i), R::of(acc[i as usize] / norm)))
                    .collect();
                sort_by_score(&mut list);
                list.truncate(t);
                if list.len() < t {
                    let pad = popular
                        .iter()
                        .filter(|(i, _)| !seen[*i as usize] && !rated[*i as usize])
                        .take(t - list.len())
                        .map(|&(i, c)| {
                            let score = c as f64 - (max_count as f64 + 1.0);
                            Entry::new(train.items().id(i), R::of(score))
                        });
                    list.extend(pad);
                }
                for &i in &candidates {
                    acc[i as usize] = 0.0;
                    rated[i as usize] = false;
                }
                for &(i, _) in &profiles[u] {
                    seen[i as usize] = false;
                }
                (train.users().id(u as u32).to_owned(), list)
            },
        )
        .collect();

    let short = lists.iter().filter(|(_, l)| l.len() < t).count();
    let lists: BTreeMap<String, Vec<Entry<R>>> = lists.into_iter().collect();
    if short > 0 {
        log::warn!("{short} user(s) have fewer than {t} unseen items; their lists are short");
        RankedBatch::new_partial(lists, t)
    } else {
        RankedBatch::new(lists, t)
    }
}
