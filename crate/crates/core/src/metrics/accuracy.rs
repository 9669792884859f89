use std::collections::HashSet;

use serde::Serialize;
use statrs::distribution::{ChiSquared, ContinuousCDF};

use crate::error::{Error, Result};
use crate::model::{InteractionDataset, RankedBatch};
use crate::scalar::Real;

/// Mean over users of the fraction of the list found in the user's test
/// profile. Users without test interactions count as zero hits.
pub fn precision<R: Real>(batch: &RankedBatch<R>, test: &InteractionDataset<R>) -> R {
    if batch.is_empty() {
        return R::zero();
    }
    let profiles = test.profile_sets();
    let n = R::of_usize(batch.list_size());
    let sum: R = batch
        .iter()
        .map(|(user, list)| {
            let hits = profiles
                .get(user)
                .map_or(0, |p| list.iter().filter(|e| p.contains(e.item.as_str())).count());
            R::of_usize(hits) / n
        })
        .sum();
    sum / R::of_usize(batch.num_users())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct McNemar {
    /// Pairs hit by the first batch only.
    pub only_first: usize,
    /// Pairs hit by the second batch only.
    pub only_second: usize,
    pub statistic: f64,
    pub p_value: f64,
}

/// Continuity-corrected McNemar statistic with its chi-square (1 df) p-value.
/// `None` when there are no discordant pairs.
pub fn mcnemar_from_counts(b: usize, c: usize) -> Option<McNemar> {
    if b + c == 0 {
        return None;
    }
    let diff = (b as f64 - c as f64).abs() - 1.0;
    let statistic = diff.max(0.0).powi(2) / (b + c) as f64;
    let chi2 = ChiSquared::new(1.0).expect("one degree of freedom is valid");
    Some(McNemar {
        only_first: b,
        only_second: c,
        statistic,
        p_value: chi2.sf(statistic),
    })
}

/// Paired test over `(user, test item)` pairs recommended by either batch.
pub fn mcnemar<R: Real>(
    first: &RankedBatch<R>,
    second: &RankedBatch<R>,
    test: &InteractionDataset<R>,
) -> Result<Option<McNemar>> {
    if !first.users().eq(second.users()) {
        return Err(Error::InvalidArgument("McNemar needs batches over the same users".into()));
    }
    let profiles = test.profile_sets();
    let (mut b, mut c) = (0, 0);
    for (user, list_a) in first.iter() {
        let Some(profile) = profiles.get(user) else { continue };
        let list_b = second.list(user).expect("same users");
        let a: HashSet<&str> = list_a.iter().map(|e| e.item.as_str()).filter(|i| profile.contains(i)).collect();
        let bb: HashSet<&str> = list_b.iter().map(|e| e.item.as_str()).filter(|i| profile.contains(i)).collect();
        b += a.difference(&bb).count();
        c += bb.difference(&a).count();
    }
    Ok(mcnemar_from_counts(b, c))
}
