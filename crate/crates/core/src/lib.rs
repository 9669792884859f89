//! Exposure-fair re-ranking of recommendation lists.
//!
//! A base recommender produces long top-`t` lists. FairMatch turns them into a
//! weighted bipartite flow network, repeatedly solves maximum flow with
//! push-relabel, and collects the items that could not route their source
//! flow: relevant items with little exposure. Those items then replace the
//! most exposed entries of each user's top-`n` list.
//!
//! The crate is generic over the score type ([`Real`]: `f32`/`f64`) and the
//! capacity type ([`Capacity`]: `i32`/`i64`); the aliases below fix the usual
//! choice.

pub mod baselines;
pub mod error;
pub mod experiment;
pub mod fairmatch;
pub mod flow;
pub mod ingest;
pub mod metrics;
pub mod model;
pub mod recommend;
pub mod scalar;
pub mod synthetic;

pub use error::{Error, Result};
pub use model::{
    truncate, Entry, ExperimentConfig, IdIndex, InteractionDataset, RankedBatch, SupplierCatalog, Variant,
};
pub use scalar::{Capacity, Real};

pub type Dataset = InteractionDataset<f64>;
pub type Batch = RankedBatch<f64>;
pub type Network = flow::FlowNetwork<i64>;
pub type Report = metrics::MetricReport<f64>;
pub type FairMatchOutput = fairmatch::FairMatchResult<f64>;
