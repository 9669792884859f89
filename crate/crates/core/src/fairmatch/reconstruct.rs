use std::collections::{BTreeMap, HashMap, HashSet};

use super::CandidateAssignment;
use crate::error::{Error, Result};
use crate::model::{Entry, RankedBatch};
use crate::scalar::Real;

/// Builds the final top-`n` lists.
///
/// For each user with `c` candidates, `r = min(floor(beta * n), c)` entries of
/// the base top-`n` list with the highest base visibility are dropped (ties:
/// the lower-ranked entry goes first) and replaced by the user's `r`
/// least-visible candidates not already kept. If too few candidates remain,
/// the gap is filled from the long list past position `n`. Kept entries stay
/// in their original order, followed by the inserted ones.
pub fn reconstruct_lists<R: Real>(
    long: &RankedBatch<R>,
    assignment: &CandidateAssignment,
    n: usize,
    beta: R,
    base_visibility: &HashMap<String, R>,
) -> Result<RankedBatch<R>> {
    if n == 0 || n > long.list_size() {
        return Err(Error::InvalidArgument(format!(
            "final size {n} must lie in 1..={}",
            long.list_size()
        )));
    }
    if !(beta > R::zero() && beta <= R::one()) {
        return Err(Error::InvalidArgument(format!("beta must lie in (0, 1], got {beta}")));
    }
    let quota = (beta * R::of_usize(n)).floor().to_usize().unwrap_or(0);
    let vis = |item: &str| base_visibility.get(item).copied().unwrap_or_else(R::zero);

    let mut lists = BTreeMap::new();
    for (user, list) in long.iter() {
        if list.len() < n {
            return Err(Error::InvalidArgument(format!(
                "user {user} has {} entries, fewer than {n}",
                list.len()
            )));
        }
        let rank: HashMap<&str, usize> = list.iter().enumerate().map(|(k, e)| (e.item.as_str(), k)).collect();
        let candidates = assignment.candidates_by_user.get(user).map(Vec::as_slice).unwrap_or(&[]);
        let r = quota.min(candidates.len());
        if r == 0 {
            lists.insert(user.to_owned(), list[..n].to_vec());
            continue;
        }

        let mut by_visibility: Vec<usize> = (0..n).collect();
        by_visibility.sort_by(|&a, &b| {
            vis(&list[a].item)
                .partial_cmp(&vis(&list[b].item))
                .unwrap_or(std::cmp::Ordering::Equal)
                .then(a.cmp(&b))
        });
        let dropped: Vec<usize> = by_visibility[n - r..].to_vec();
        let mut keep = vec![true; n];
        for &d in &dropped {
            keep[d] = false;
        }
        let retained: Vec<&Entry<R>> = (0..n).filter(|&k| keep[k]).map(|k| &list[k]).collect();
        let mut taken: HashSet<&str> = retained.iter().map(|e| e.item.as_str()).collect();

        let mut ordered: Vec<&str> = candidates.iter().map(String::as_str).collect();
        ordered.sort_by(|a, b| {
            vis(a)
                .partial_cmp(&vis(b))
                .unwrap_or(std::cmp::Ordering::Equal)
                .then(rank.get(a).cmp(&rank.get(b)))
                .then(a.cmp(b))
        });
        let mut inserted: Vec<&Entry<R>> = Vec::with_capacity(r);
        for item in ordered {
            if inserted.len() == r {
                break;
            }
            let Some(&k) = rank.get(item) else {
                return Err(Error::Consistency(format!(
                    "candidate {item} is not in the long list of user {user}"
                )));
            };
            if taken.insert(item) {
                inserted.push(&list[k]);
            }
        }
        // Backfill from the tail of the long list, then from the dropped
        // entries if the tail runs out.
        let backfill = (n..list.len()).chain(dropped.iter().rev().copied());
        for k in backfill {
            if inserted.len() == r {
                break;
            }
            if taken.insert(list[k].item.as_str()) {
                inserted.push(&list[k]);
            }
        }
        let final_list: Vec<Entry<R>> = retained.into_iter().chain(inserted).cloned().collect();
        lists.insert(user.to_owned(), final_list);
    }
    RankedBatch::from_ranked(lists, n)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn long() -> RankedBatch<f64> {
        let items = ["a", "b", "c", "d", "x", "y", "z"];
        let list = items.iter().enumerate().map(|(k, i)| Entry::new(*i, 10.0 - k as f64)).collect();
        RankedBatch::new(BTreeMap::from([("u".to_string(), list)]), 7).unwrap()
    }

    fn assignment(cands: &[&str]) -> CandidateAssignment {
        CandidateAssignment {
            subgraphs: Vec::new(),
            candidates_by_user: BTreeMap::from([(
                "u".to_string(),
                cands.iter().map(|c| c.to_string()).collect(),
            )]),
        }
    }

    fn visibility(pairs: &[(&str, f64)]) -> HashMap<String, f64> {
        pairs.iter().map(|(i, v)| (i.to_string(), *v)).collect()
    }

    fn items(b: &RankedBatch<f64>) -> Vec<&str> {
        b.list("u").unwrap().iter().map(|e| e.item.as_str()).collect()
    }

    #[test]
    fn replaces_most_visible() {
        let vis = visibility(&[("a", 5.0), ("b", 1.0), ("c", 3.0), ("d", 4.0), ("x", 0.0), ("y", 2.0), ("z", 6.0)]);
        let out = reconstruct_lists(&long(), &assignment(&["z", "y", "x"]), 4, 0.5, &vis).unwrap();
        assert_eq!(items(&out), ["b", "c", "x", "y"]);
    }

    #[test]
    fn full_replacement() {
        let vis = visibility(&[("a", 5.0), ("b", 1.0), ("c", 3.0), ("d", 4.0), ("x", 0.0), ("y", 2.0), ("z", 6.0)]);
        let out = reconstruct_lists(&long(), &assignment(&["z", "y", "x", "a"]), 4, 1.0, &vis).unwrap();
        assert_eq!(items(&out), ["x", "y", "a", "z"]);
    }

    #[test]
    fn beta_caps_replacements() {
        let vis = visibility(&[("a", 0.9), ("b", 0.1), ("c", 0.2), ("d", 0.8)]);
        let out = reconstruct_lists(&long(), &assignment(&["x", "y"]), 4, 0.25, &vis).unwrap();
        assert_eq!(items(&out), ["b", "c", "d", "x"]);
    }

    #[test]
    fn no_candidates_keeps_base() {
        let out = reconstruct_lists(&long(), &assignment(&[]), 4, 1.0, &HashMap::new()).unwrap();
        assert_eq!(items(&out), ["a", "b", "c", "d"]);
    }

    #[test]
    fn candidate_already_in_base_is_backfilled() {
        // Candidates b and x; b is kept, so the second slot comes from the
        // long list tail: x is taken as candidate, y fills the gap.
        let vis = visibility(&[("a", 0.9), ("b", 0.0), ("c", 0.2), ("d", 0.8)]);
        let out = reconstruct_lists(&long(), &assignment(&["b", "x"]), 4, 1.0, &vis).unwrap();
        assert_eq!(items(&out), ["b", "c", "x", "y"]);
    }

    #[test]
    fn visibility_ties_drop_lower_ranked_first() {
        let out = reconstruct_lists(&long(), &assignment(&["x"]), 4, 1.0, &HashMap::new()).unwrap();
        assert_eq!(items(&out), ["a", "b", "c", "x"]);
    }

    #[test]
    fn rejects_bad_parameters() {
        let a = assignment(&[]);
        assert!(reconstruct_lists(&long(), &a, 0, 1.0, &HashMap::new()).is_err());
        assert!(reconstruct_lists(&long(), &a, 8, 1.0, &HashMap::new()).is_err());
        assert!(reconstruct_lists(&long(), &a, 4, 0.0, &HashMap::new()).is_err());
    }
}
