//! Glue for end-to-end runs: re-ranking by method name, the synthetic
//! harness and parameter sweeps.

use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::Serialize;

use crate::baselines::{random_rerank, reverse_rerank};
use crate::error::{Error, Result};
use crate::fairmatch::run_fairmatch;
use crate::ingest::split_train_test;
use crate::metrics::{evaluate, EvaluationInput, MetricReport};
use crate::model::{ExperimentConfig, InteractionDataset, RankedBatch, SupplierCatalog, Variant};
use crate::recommend::{recommend_top_t, train_user_knn, Similarity};
use crate::scalar::Real;
use crate::synthetic::{generate, SyntheticConfig};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    /// Base top-`n`.
    None,
    Item,
    Supplier,
    Random,
    Reverse,
}

impl Method {
    pub const ALL: [Method; 5] = [Method::None, Method::Item, Method::Supplier, Method::Random, Method::Reverse];

    pub fn uses_lambda(self) -> bool {
        matches!(self, Method::Item | Method::Supplier)
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Method::None => "none",
            Method::Item => "item",
            Method::Supplier => "supplier",
            Method::Random => "random",
            Method::Reverse => "reverse",
        })
    }
}

impl FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Method::ALL
            .into_iter()
            .find(|m| m.to_string() == s.to_ascii_lowercase())
            .ok_or_else(|| Error::InvalidArgument(format!("unknown variant {s:?}; expected none, item, supplier, random or reverse")))
    }
}

/// Produces the final top-`n` lists from the long lists.
pub fn rerank<R: Real>(
    long: &RankedBatch<R>,
    catalog: Option<&SupplierCatalog>,
    method: Method,
    config: &ExperimentConfig,
) -> Result<RankedBatch<R>> {
    config.validate()?;
    match method {
        Method::None => long.truncate(config.n),
        Method::Random => random_rerank(long, config.n, config.seed),
        Method::Reverse => reverse_rerank(long, config.n),
        Method::Item | Method::Supplier => {
            let variant = if method == Method::Item { Variant::Item } else { Variant::Supplier };
            let config = ExperimentConfig { variant, ..*config };
            Ok(run_fairmatch(long, catalog, &config)?.final_batch)
        }
    }
}

/// Train/test split, catalog and base long lists for one run.
#[derive(Debug, Clone)]
pub struct Prepared<R> {
    pub train: InteractionDataset<R>,
    pub test: InteractionDataset<R>,
    /// Restricted to items present in `train`.
    pub catalog: SupplierCatalog,
    pub long: RankedBatch<R>,
}

impl<R: Real> Prepared<R> {
    pub fn evaluate(&self, batch: &RankedBatch<R>, with_groups: bool) -> Result<MetricReport<R>> {
        let base;
        let groups = if with_groups {
            base = self.long.truncate(batch.list_size())?;
            Some((&base, &self.long))
        } else {
            None
        };
        evaluate(&EvaluationInput {
            batch,
            train: &self.train,
            test: &self.test,
            catalog: &self.catalog,
            groups,
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct HarnessConfig {
    pub corpus: SyntheticConfig,
    pub train_fraction: f64,
    pub k: usize,
    pub similarity: Similarity,
    pub t: usize,
}

impl Default for HarnessConfig {
    fn default() -> Self {
        Self {
            corpus: SyntheticConfig::default(),
            train_fraction: 0.8,
            k: 50,
            similarity: Similarity::Cosine,
            t: 50,
        }
    }
}

/// Splits `ratings` and builds UserKNN long lists over the training part.
pub fn prepare<R: Real>(
    ratings: &InteractionDataset<R>,
    catalog: &SupplierCatalog,
    train_fraction: f64,
    seed: u64,
    k: usize,
    similarity: Similarity,
    t: usize,
) -> Result<Prepared<R>> {
    let (train, test) = split_train_test(ratings, train_fraction, seed)?;
    let catalog = catalog.restricted_to(train.items().ids().iter().map(String::as_str))?;
    let model = train_user_knn(&train, k, similarity)?;
    let long = recommend_top_t(&model, &train, t)?;
    Ok(Prepared { train, test, catalog, long })
}

/// Generates the synthetic corpus for `seed` and prepares it.
pub fn prepare_synthetic<R: Real>(config: &HarnessConfig, seed: u64) -> Result<Prepared<R>> {
    let corpus = generate::<R>(&SyntheticConfig { seed, ..config.corpus.clone() })?;
    prepare(&corpus.ratings, &corpus.catalog, config.train_fraction, seed, config.k, config.similarity, config.t)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SweepCell {
    pub method: Method,
    pub lambda: f64,
    pub beta: f64,
}

/// Every method × lambda × beta combination; methods that ignore lambda or
/// beta get a single cell.
pub fn grid(methods: &[Method], lambdas: &[f64], betas: &[f64]) -> Vec<SweepCell> {
    let mut cells = Vec::new();
    for &method in methods {
        let (ls, bs): (&[f64], &[f64]) = if method.uses_lambda() { (lambdas, betas) } else { (&lambdas[..1], &betas[..1]) };
        for &lambda in ls {
            for &beta in bs {
                cells.push(SweepCell { method, lambda, beta });
            }
        }
    }
    cells
}

#[derive(Debug)]
pub struct SweepRow<R> {
    pub cell: SweepCell,
    pub report: Result<MetricReport<R>>,
}

/// Runs every cell concurrently on the current rayon pool.
pub fn sweep<R: Real>(prepared: &Prepared<R>, cells: &[SweepCell], base: &ExperimentConfig) -> Vec<SweepRow<R>> {
    cells
        .par_iter()
        .map(|&cell| {
            let config = ExperimentConfig {
                lambda: cell.lambda,
                beta: cell.beta,
                ..*base
            };
            let report = rerank(&prepared.long, Some(&prepared.catalog), cell.method, &config)
                .and_then(|batch| prepared.evaluate(&batch, false));
            SweepRow { cell, report }
        })
        .collect()
}

pub const SWEEP_HEADER: &str = "variant,lambda,beta,status,P,1-IA,5-IA,LT,1-SA,5-SA,IG,IE,SG,SE";

/// Tidy CSV of a sweep; failed cells carry an error status and `NA` metrics.
pub fn sweep_csv<R: Real>(rows: &[SweepRow<R>]) -> String {
    let mut out = String::from(SWEEP_HEADER);
    out.push('\n');
    for row in rows {
        let c = row.cell;
        let tail = match &row.report {
            Ok(r) => format!("ok,{}", r.csv_row()),
            Err(e) => format!("\"error: {}\",{}", e.to_string().replace('"', "'"), ["NA"; 10].join(",")),
        };
        out.push_str(&format!("{},{},{},{}\n", c.method, c.lambda, c.beta, tail));
    }
    out
}
