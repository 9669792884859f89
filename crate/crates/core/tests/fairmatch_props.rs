mod common;

use std::collections::HashSet;

use fairflow_core::fairmatch::*;
use fairflow_core::{ExperimentConfig, SupplierCatalog, Variant};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use common::{cyclic_batch, items_of, random_batch, terminal_capacities_oracle};

const LAMBDAS: [f64; 5] = [0.0, 0.25, 0.5, 0.75, 1.0];

fn case(seed: u64) -> (fairflow_core::Batch, ExperimentConfig) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let t = rng.gen_range(2..=6);
    let items = rng.gen_range(t..=t + 12);
    let users = rng.gen_range(1..=14);
    let config = ExperimentConfig {
        t,
        n: rng.gen_range(1..t),
        lambda: LAMBDAS[rng.gen_range(0..5)],
        beta: [0.3, 0.5, 1.0][rng.gen_range(0..3)],
        variant: Variant::Item,
        seed,
    };
    (random_batch(&mut rng, users, items, t), config)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(150))]

    #[test]
    fn final_lists_come_from_the_long_lists(seed in any::<u64>()) {
        let (long, config) = case(seed);
        let out = run_fairmatch(&long, None, &config).unwrap();
        prop_assert_eq!(out.final_batch.list_size(), config.n);
        for user in long.users() {
            let pool: HashSet<String> = items_of(&long, user).into_iter().collect();
            let got = items_of(&out.final_batch, user);
            prop_assert_eq!(got.len(), config.n);
            prop_assert_eq!(got.iter().collect::<HashSet<_>>().len(), config.n);
            prop_assert!(got.iter().all(|i| pool.contains(i)));
        }
    }

    #[test]
    fn subgraphs_are_disjoint_and_the_graph_shrinks(seed in any::<u64>()) {
        let (long, config) = case(seed);
        let out = run_fairmatch(&long, None, &config).unwrap();
        let mut seen = HashSet::new();
        for edge in out.assignment.subgraphs.iter().flatten() {
            prop_assert!(seen.insert((edge.item.clone(), edge.user.clone())));
            prop_assert!(items_of(&long, &edge.user).contains(&edge.item));
        }
        for w in out.per_iteration.windows(2) {
            prop_assert!(w[0].candidates > 0);
            prop_assert!(w[1].pairs_remaining < w[0].pairs_remaining);
        }
        let removed: usize = out.assignment.subgraphs.iter().map(Vec::len).sum();
        prop_assert!(removed <= long.total_entries());
        prop_assert!(out.iterations <= long.total_entries());
    }

    #[test]
    fn candidates_of_a_user_follow_discovery_then_rank(seed in any::<u64>()) {
        let (long, config) = case(seed);
        let out = run_fairmatch(&long, None, &config).unwrap();
        for (user, cands) in &out.assignment.candidates_by_user {
            let list = items_of(&long, user);
            let mut expected = Vec::new();
            for gamma in &out.assignment.subgraphs {
                let mut mine: Vec<&String> = gamma.iter().filter(|e| &e.user == user).map(|e| &e.item).collect();
                mine.sort_by_key(|i| list.iter().position(|x| x == *i));
                expected.extend(mine.into_iter().cloned());
            }
            prop_assert_eq!(cands, &expected);
        }
    }

    #[test]
    fn singleton_suppliers_reduce_to_the_item_variant(seed in any::<u64>()) {
        let (long, config) = case(seed);
        let catalog = SupplierCatalog::singleton(long.users().flat_map(|u| items_of(&long, u)));
        let item = run_fairmatch(&long, Some(&catalog), &config).unwrap();
        let supplier = run_fairmatch(&long, Some(&catalog), &ExperimentConfig { variant: Variant::Supplier, ..config }).unwrap();
        prop_assert_eq!(item.final_batch, supplier.final_batch);
        prop_assert_eq!(item.per_iteration, supplier.per_iteration);
    }

    #[test]
    fn terminal_capacities_match_the_formula(total in 0u64..5_000_000, items in 1u64..4000, users in 1u64..8000) {
        let got = assign_terminal_capacities(total as i64, items as usize, users as usize).unwrap();
        if total == 0 {
            prop_assert_eq!(got, None);
        } else {
            let (s, t) = terminal_capacities_oracle(total, items, users);
            prop_assert_eq!(got, Some((s as i64, t as i64)));
        }
    }
}

#[test]
fn balanced_batches_are_left_untouched_at_full_relevance() {
    for (users, items, t) in [(5, 5, 5), (12, 6, 4), (30, 10, 6), (40, 20, 8)] {
        let long = cyclic_batch(users, items, t);
        for n in 1..t {
            let config = ExperimentConfig { t, n, lambda: 1.0, ..Default::default() };
            let out = run_fairmatch(&long, None, &config).unwrap();
            assert_eq!(out.final_batch, long.truncate(n).unwrap(), "{users}x{items} t={t} n={n}");
        }
    }
}

#[test]
fn lone_relevant_item_is_found_first() {
    // Six users share the same three head items; one user also has a rare
    // item at rank 1. Low degree plus top rank gives it the lightest edges.
    let mut lists: Vec<(String, Vec<&str>)> = (0..6).map(|u| (format!("u{u}"), vec!["h0", "h1", "h2"])).collect();
    lists[0].1 = vec!["rare", "h0", "h1"];
    let long = fairflow_core::Batch::new(
        lists
            .into_iter()
            .map(|(u, l)| (u, l.iter().enumerate().map(|(k, i)| fairflow_core::Entry::new(*i, -(k as f64))).collect()))
            .collect(),
        3,
    )
    .unwrap();
    let out = run_fairmatch(&long, None, &ExperimentConfig { t: 3, n: 2, lambda: 0.5, ..Default::default() }).unwrap();
    let first: Vec<&str> = out.assignment.subgraphs[0].iter().map(|e| e.item.as_str()).collect();
    assert!(first.contains(&"rare"), "{first:?}");
    assert_eq!(out.assignment.candidates_by_user["u0"][0], "rare");
}

#[test]
fn iteration_stats_serialise_as_a_json_array() {
    let out = run_fairmatch(&cyclic_batch(12, 6, 4), None, &ExperimentConfig { t: 4, n: 2, ..Default::default() }).unwrap();
    let json = serde_json::to_value(&out.per_iteration).unwrap();
    let first = &json.as_array().unwrap()[0];
    for key in ["iteration", "items_remaining", "pairs_remaining", "candidates"] {
        assert!(first.get(key).is_some(), "{key}");
    }
}
