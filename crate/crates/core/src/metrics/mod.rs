//! Evaluation panel: accuracy, aggregate diversity, long-tail coverage,
//! exposure concentration and visibility-group shifts.

mod accuracy;
mod diversity;
mod visibility;

use std::collections::BTreeMap;

use serde::Serialize;

pub use accuracy::{mcnemar, mcnemar_from_counts, precision, McNemar};
pub use diversity::{alpha_aggregate_diversity, entropy, gini, long_tail_coverage, long_tail_items};
pub use visibility::{
    bin_by_visibility, group_visibility, group_visibility_shift, recommendation_counts, visibility_table,
    GroupBinning, GroupShift, Level, VisibilityTable, NUM_GROUPS,
};

use crate::error::Result;
use crate::model::{InteractionDataset, RankedBatch, SupplierCatalog};
use crate::scalar::Real;

/// Thresholds reported for the alpha-aggregate diversity curves.
pub const ALPHAS: [usize; 5] = [1, 2, 3, 4, 5];

pub struct EvaluationInput<'a, R> {
    pub batch: &'a RankedBatch<R>,
    pub train: &'a InteractionDataset<R>,
    pub test: &'a InteractionDataset<R>,
    /// Item universe and supplier map; must cover every recommended item.
    pub catalog: &'a SupplierCatalog,
    /// Base top-`n` and long lists; when present the group shifts are computed.
    pub groups: Option<(&'a RankedBatch<R>, &'a RankedBatch<R>)>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MetricReport<R> {
    pub precision: R,
    pub alpha_ia: BTreeMap<usize, R>,
    pub alpha_sa: BTreeMap<usize, R>,
    pub long_tail: R,
    pub item_gini: Option<R>,
    pub item_entropy: Option<R>,
    pub supplier_gini: Option<R>,
    pub supplier_entropy: Option<R>,
    pub ivs: Option<GroupShift<R>>,
    pub svs: Option<GroupShift<R>>,
}

impl<R: Real> MetricReport<R> {
    pub const CSV_HEADER: &'static str = "P,1-IA,5-IA,LT,1-SA,5-SA,IG,IE,SG,SE";

    /// The ten headline values in `CSV_HEADER` order; undefined ones are `NA`.
    pub fn csv_row(&self) -> String {
        let fmt = |v: Option<R>| v.map_or_else(|| "NA".to_string(), |x| format!("{:.6}", x.to_f64_lossy()));
        [
            Some(self.precision),
            self.alpha_ia.get(&1).copied(),
            self.alpha_ia.get(&5).copied(),
            Some(self.long_tail),
            self.alpha_sa.get(&1).copied(),
            self.alpha_sa.get(&5).copied(),
            self.item_gini,
            self.item_entropy,
            self.supplier_gini,
            self.supplier_entropy,
        ]
        .into_iter()
        .map(fmt)
        .collect::<Vec<_>>()
        .join(",")
    }
}

fn concentration<R: Real>(table: &VisibilityTable<R>, level: Level) -> (Option<R>, Option<R>) {
    let values: Vec<R> = table.level(level).values().copied().collect();
    (gini(&values), entropy(&values))
}

/// Computes the full panel. Independent parts run concurrently.
pub fn evaluate<R: Real>(input: &EvaluationInput<'_, R>) -> Result<MetricReport<R>> {
    let catalog = input.catalog;
    catalog.ensure_covers(input.batch.iter().flat_map(|(_, l)| l.iter().map(|e| e.item.as_str())))?;
    let ((precision, long_tail), (table, (ivs, svs))) = rayon::join(
        || {
            rayon::join(
                || precision(input.batch, input.test),
                || long_tail_coverage(input.batch, input.train),
            )
        },
        || {
            rayon::join(
                || visibility_table(input.batch, catalog),
                || match input.groups {
                    Some((base, long)) => (
                        Some(group_visibility_shift(base, input.batch, long, catalog, Level::Item)),
                        Some(group_visibility_shift(base, input.batch, long, catalog, Level::Supplier)),
                    ),
                    None => (None, None),
                },
            )
        },
    );
    let alpha = |level| {
        ALPHAS
            .iter()
            .map(|&a| (a, alpha_aggregate_diversity(input.batch, catalog, level, a)))
            .collect()
    };
    let (item_gini, item_entropy) = concentration(&table, Level::Item);
    let (supplier_gini, supplier_entropy) = concentration(&table, Level::Supplier);
    Ok(MetricReport {
        precision,
        alpha_ia: alpha(Level::Item),
        alpha_sa: alpha(Level::Supplier),
        long_tail,
        item_gini,
        item_entropy,
        supplier_gini,
        supplier_entropy,
        ivs: ivs.transpose()?,
        svs: svs.transpose()?,
    })
}
