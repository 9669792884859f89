//! The FairMatch re-ranker.
//!
//! Each iteration weights the remaining recommendation graph, solves a
//! maximum flow over it and moves every item whose label ended above the
//! source's into the candidate set, together with all of its pairs. The loop
//! stops once an iteration finds no candidate. Candidates then replace the
//! most visible entries of each user's final list.

mod capacity;
mod graph;
mod reconstruct;
mod weights;

use std::collections::{BTreeMap, HashMap};

use log::{debug, info};
use serde::Serialize;

pub use capacity::assign_terminal_capacities;
pub use graph::{Pair, WeightedRecGraph};
pub use reconstruct::reconstruct_lists;
pub use weights::{compute_edge_weights_item, compute_edge_weights_supplier, WEIGHT_SCALE};

use crate::error::{Error, Result};
use crate::flow::{low_capacity_left_nodes, max_flow, FlowNetwork};
use crate::model::{ExperimentConfig, RankedBatch, SupplierCatalog, Variant};
use crate::scalar::{Capacity, Real};

/// A pair moved into the candidate set, with its weight at removal time.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CandidateEdge {
    pub item: String,
    pub user: String,
    pub weight: i64,
}

#[derive(Debug, Clone, Default, Serialize)]
pub struct CandidateAssignment {
    /// Pairs removed by each productive iteration.
    pub subgraphs: Vec<Vec<CandidateEdge>>,
    /// Candidate items per user, in discovery order; items found in the same
    /// iteration follow the user's ranking.
    pub candidates_by_user: BTreeMap<String, Vec<String>>,
}

impl CandidateAssignment {
    /// Distinct candidate items across all iterations.
    pub fn candidate_items(&self) -> std::collections::BTreeSet<&str> {
        self.subgraphs.iter().flatten().map(|e| e.item.as_str()).collect()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct IterationStats {
    pub iteration: usize,
    pub items_remaining: usize,
    pub users_remaining: usize,
    pub pairs_remaining: usize,
    pub source_capacity: i64,
    pub sink_capacity: i64,
    pub flow: i64,
    pub candidates: usize,
}

#[derive(Debug, Clone)]
pub struct FairMatchResult<R> {
    pub final_batch: RankedBatch<R>,
    pub assignment: CandidateAssignment,
    /// Number of maximum-flow problems solved.
    pub iterations: usize,
    pub per_iteration: Vec<IterationStats>,
}

/// Runs FairMatch with `i64` capacities.
pub fn run_fairmatch<R: Real>(
    long: &RankedBatch<R>,
    catalog: Option<&SupplierCatalog>,
    config: &ExperimentConfig,
) -> Result<FairMatchResult<R>> {
    run_fairmatch_with::<R, i64>(long, catalog, config)
}

pub fn run_fairmatch_with<R: Real, C: Capacity>(
    long: &RankedBatch<R>,
    catalog: Option<&SupplierCatalog>,
    config: &ExperimentConfig,
) -> Result<FairMatchResult<R>> {
    config.validate()?;
    if long.list_size() != config.t || !long.is_complete() {
        return Err(Error::InvalidArgument(format!(
            "FairMatch needs complete lists of size t = {}, got size {}",
            config.t,
            long.list_size()
        )));
    }
    if config.variant == Variant::Supplier && catalog.is_none() {
        return Err(Error::Configuration("the supplier variant needs a supplier catalog".into()));
    }
    let lambda = R::of(config.lambda);
    let mut graph = WeightedRecGraph::<C>::from_batch(long);
    let limit = graph.items().len();
    let mut assignment = CandidateAssignment::default();
    let mut per_iteration = Vec::new();

    while graph.num_pairs() > 0 {
        if per_iteration.len() >= limit {
            return Err(Error::LoopStuck { limit });
        }
        match (config.variant, catalog) {
            (Variant::Supplier, Some(c)) => compute_edge_weights_supplier(&mut graph, c, lambda, config.t)?,
            _ => compute_edge_weights_item(&mut graph, lambda, config.t)?,
        }
        let (items, users) = graph.active();
        let Some((source_w, sink_w)) = assign_terminal_capacities(graph.total_weight(), items.len(), users.len())?
        else {
            break;
        };

        let mut item_slot = vec![usize::MAX; graph.items().len()];
        for (k, &i) in items.iter().enumerate() {
            item_slot[i as usize] = k;
        }
        let mut user_slot = vec![usize::MAX; graph.users().len()];
        for (k, &u) in users.iter().enumerate() {
            user_slot[u as usize] = k;
        }
        let mut net = FlowNetwork::<C>::new(items.len(), users.len());
        for k in 0..items.len() {
            net.add_source_edge(k, source_w);
        }
        for (k, pair) in graph.live_pairs() {
            net.add_edge(item_slot[pair.item as usize], user_slot[pair.user as usize], graph.weight(k));
        }
        for k in 0..users.len() {
            net.add_sink_edge(k, sink_w);
        }
        let flow = max_flow(&mut net)?;
        let selected: Vec<u32> = low_capacity_left_nodes(flow.labels(), &net)
            .into_iter()
            .map(|k| items[k])
            .collect();

        let stats = IterationStats {
            iteration: per_iteration.len() + 1,
            items_remaining: items.len(),
            users_remaining: users.len(),
            pairs_remaining: graph.num_pairs(),
            source_capacity: source_w.to_i64().unwrap_or(i64::MAX),
            sink_capacity: sink_w.to_i64().unwrap_or(i64::MAX),
            flow: flow.value.to_i64().unwrap_or(i64::MAX),
            candidates: selected.len(),
        };
        debug!("fairmatch iteration {stats:?}");
        per_iteration.push(stats);
        if selected.is_empty() {
            if per_iteration.len() == 1 {
                info!(
                    "no candidate in the first iteration (capacities {source_w:?}/{sink_w:?}); final lists equal base top-n"
                );
            }
            break;
        }

        let mut removed = graph.remove_items(&selected);
        removed.sort_by_key(|(p, _)| (p.user, p.rank));
        let mut gamma = Vec::with_capacity(removed.len());
        for (pair, weight) in removed {
            let item = graph.item_id(pair.item).to_owned();
            let user = graph.user_id(pair.user).to_owned();
            assignment
                .candidates_by_user
                .entry(user.clone())
                .or_default()
                .push(item.clone());
            gamma.push(CandidateEdge {
                item,
                user,
                weight: weight.to_i64().unwrap_or(i64::MAX),
            });
        }
        assignment.subgraphs.push(gamma);
    }

    let base = long.truncate(config.n)?;
    let users = base.num_users().max(1);
    let visibility: HashMap<String, R> = base
        .item_counts()
        .into_iter()
        .map(|(i, c)| (i.to_owned(), R::of_usize(c) / R::of_usize(users)))
        .collect();
    let final_batch = reconstruct_lists(long, &assignment, config.n, R::of(config.beta), &visibility)?;
    Ok(FairMatchResult {
        final_batch,
        assignment,
        iterations: per_iteration.len(),
        per_iteration,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::Entry;

    fn batch(lists: Vec<(String, Vec<String>)>, size: usize) -> RankedBatch<f64> {
        let lists = lists
            .into_iter()
            .map(|(u, items)| {
                let l = items
                    .into_iter()
                    .enumerate()
                    .map(|(k, i)| Entry::new(i, 100.0 - k as f64))
                    .collect();
                (u, l)
            })
            .collect();
        RankedBatch::new(lists, size).unwrap()
    }

    fn latin(t: usize) -> RankedBatch<f64> {
        batch(
            (0..t)
                .map(|u| (format!("u{u}"), (0..t).map(|k| format!("i{}", (u + k) % t)).collect()))
                .collect(),
            t,
        )
    }

    fn config(t: usize, n: usize) -> ExperimentConfig {
        ExperimentConfig {
            t,
            n,
            ..Default::default()
        }
    }

    #[test]
    fn balanced_square_finds_nothing() {
        let out = run_fairmatch(&latin(5), None, &config(5, 2)).unwrap();
        assert_eq!(out.iterations, 1);
        assert_eq!(out.per_iteration[0].source_capacity, 1);
        assert_eq!(out.per_iteration[0].sink_capacity, 1);
        assert!(out.assignment.subgraphs.is_empty());
        assert_eq!(out.final_batch, latin(5).truncate(2).unwrap());
    }

    #[test]
    fn unpopular_item_becomes_candidate() {
        // Every user ranks the popular items p0..p2 first; the rare item r
        // shows up once, at the bottom of one list.
        let mut lists: Vec<(String, Vec<String>)> = (0..6)
            .map(|u| {
                let mut l: Vec<String> = (0..3).map(|k| format!("p{k}")).collect();
                l.push(format!("f{}", u % 3));
                (format!("u{u}"), l)
            })
            .collect();
        lists[0].1[3] = "r".into();
        let long = batch(lists, 4);
        let out = run_fairmatch(&long, None, &config(4, 3)).unwrap();
        let found = out.assignment.candidate_items();
        assert!(found.contains("r"), "{found:?}");
        assert!(!found.contains("p0"));
        let u0: Vec<&str> = out.final_batch.list("u0").unwrap().iter().map(|e| e.item.as_str()).collect();
        assert!(u0.contains(&"r"), "{u0:?}");
    }

    #[test]
    fn supplier_variant_requires_catalog() {
        let cfg = ExperimentConfig {
            variant: Variant::Supplier,
            ..config(5, 2)
        };
        assert!(matches!(run_fairmatch(&latin(5), None, &cfg), Err(Error::Configuration(_))));
    }

    #[test]
    fn wrong_list_size_rejected() {
        assert!(run_fairmatch(&latin(5), None, &config(6, 2)).is_err());
    }

    #[test]
    fn capacity_types_agree() {
        let long = latin(7);
        let a = run_fairmatch_with::<f64, i64>(&long, None, &config(7, 3)).unwrap();
        let b = run_fairmatch_with::<f64, i32>(&long, None, &config(7, 3)).unwrap();
        assert_eq!(a.final_batch, b.final_batch);
        assert_eq!(a.per_iteration, b.per_iteration);
    }
}
