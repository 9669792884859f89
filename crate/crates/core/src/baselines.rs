//! Reference re-rankers bracketing the accuracy/diversity trade-off.

use std::collections::BTreeMap;

use rand::seq::index::sample;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::model::RankedBatch;
use crate::scalar::Real;

fn check_size<R: Real>(long: &RankedBatch<R>, n: usize) -> Result<()> {
    if n == 0 || n > long.list_size() {
        return Err(Error::InvalidArgument(format!(
            "final size {n} must lie in 1..={}",
            long.list_size()
        )));
    }
    Ok(())
}

/// The last `n` entries of every long list, bottom entry first.
pub fn reverse_rerank<R: Real>(long: &RankedBatch<R>, n: usize) -> Result<RankedBatch<R>> {
    check_size(long, n)?;
    let lists = long
        .iter()
        .map(|(u, l)| {
            let take = n.min(l.len());
            (u.to_owned(), l.iter().rev().take(take).cloned().collect())
        })
        .collect();
    RankedBatch::from_ranked_partial(lists, n)
}

/// A uniform `n`-subset of every long list, kept in score order.
///
/// Each user draws from its own ChaCha stream (stream index = position in the
/// batch), so results do not depend on evaluation order.
pub fn random_rerank<R: Real>(long: &RankedBatch<R>, n: usize, seed: u64) -> Result<RankedBatch<R>> {
    check_size(long, n)?;
    let lists: BTreeMap<_, _> = long
        .iter()
        .enumerate()
        .map(|(k, (u, l))| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(k as u64);
            let mut picked = sample(&mut rng, l.len(), n.min(l.len())).into_vec();
            picked.sort_unstable();
            (u.to_owned(), picked.into_iter().map(|i| l[i].clone()).collect())
        })
        .collect();
    RankedBatch::from_ranked_partial(lists, n)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::Entry;

    fn long() -> RankedBatch<f64> {
        let l = ["a", "b", "c", "d", "e"]
            .iter()
            .enumerate()
            .map(|(k, i)| Entry::new(*i, 5.0 - k as f64))
            .collect();
        RankedBatch::new(BTreeMap::from([("u".to_string(), l)]), 5).unwrap()
    }

    fn items(b: &RankedBatch<f64>) -> Vec<&str> {
        b.list("u").unwrap().iter().map(|e| e.item.as_str()).collect()
    }

    #[test]
    fn reverse_suffix() {
        assert_eq!(items(&reverse_rerank(&long(), 2).unwrap()), ["e", "d"]);
        assert_eq!(items(&reverse_rerank(&long(), 5).unwrap()), ["e", "d", "c", "b", "a"]);
        assert!(reverse_rerank(&long(), 6).is_err());
    }

    #[test]
    fn random_is_seeded_and_score_ordered() {
        let a = random_rerank(&long(), 3, 7).unwrap();
        assert_eq!(a, random_rerank(&long(), 3, 7).unwrap());
        let scores: Vec<f64> = a.list("u").unwrap().iter().map(|e| e.score).collect();
        assert!(scores.windows(2).all(|w| w[0] > w[1]));
        assert_eq!(items(&random_rerank(&long(), 5, 1).unwrap()), ["a", "b", "c", "d", "e"]);
    }
}
