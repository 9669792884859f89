use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use log::{info, warn};
use serde_json::json;

use fairflow_core::experiment::{grid, prepare_synthetic, rerank as rerank_with, sweep as run_sweep, sweep_csv, HarnessConfig, Method, Prepared};
use fairflow_core::fairmatch::run_fairmatch;
use fairflow_core::ingest::{
    apply_core_filter, load_catalog_for, parse_ratings, parse_supplier_map, split_train_test, write_ratings,
    write_supplier_map, CoreFilter, Format,
};
use fairflow_core::metrics::{evaluate as evaluate_batch, mcnemar, EvaluationInput, GroupShift};
use fairflow_core::recommend::{import_ranked_batch, most_popular, read_ranked_batch, recommend_top_t, train_user_knn, write_ranked_batch, Similarity};
use fairflow_core::{Batch, Dataset, ExperimentConfig, Report, SupplierCatalog, Variant};

use crate::config::{list, Settings};
use crate::{EvaluateArgs, IngestArgs, RecommendArgs, RerankArgs, SweepArgs, UsageError};

fn format_for(path: &Path, explicit: Option<String>) -> Result<Format> {
    Ok(match explicit {
        Some(f) => f.parse().map_err(|e: fairflow_core::Error| UsageError(e.to_string()))?,
        None => Format::from_path(path),
    })
}

fn write_json(path: &Path, value: &serde_json::Value) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    fs::write(path, text).with_context(|| format!("writing {}", path.display()))
}

fn load_catalog(path: Option<&Path>, train: &Dataset, batch_items: impl IntoIterator<Item = String>) -> Result<SupplierCatalog> {
    match path {
        Some(p) => Ok(load_catalog_for(p, Format::from_path(p), train)?),
        None => {
            info!("no supplier map given; every item is its own supplier");
            let mut items: Vec<String> = train.items().ids().to_vec();
            items.extend(batch_items);
            Ok(SupplierCatalog::singleton(items))
        }
    }
}

fn batch_items(batch: &Batch) -> Vec<String> {
    batch.item_counts().into_keys().map(str::to_owned).collect()
}

pub fn ingest(a: IngestArgs, s: &Settings) -> Result<()> {
    let ratings: PathBuf = s.require(a.ratings, "ratings")?;
    let format = format_for(&ratings, s.opt(a.format, "format")?)?;
    let seed = s.get(a.seed, "seed", 0)?;
    let train_fraction = s.get(a.train_fraction, "train-fraction", 0.8)?;
    let filter = CoreFilter {
        min_user_ratings: s.get(a.min_user, "min-user", 0)?,
        min_item_ratings: s.get(a.min_item, "min-item", 0)?,
        sample_users: s.opt(a.sample_users, "sample-users")?,
        seed,
        iterate: false,
    };
    let out: PathBuf = s.require(a.out, "out")?;
    let suppliers: Option<PathBuf> = s.opt(a.suppliers, "suppliers")?;

    let mut ds: Dataset = parse_ratings(&ratings, format)?;
    let catalog = suppliers
        .as_deref()
        .map(|p| parse_supplier_map(p, Format::from_path(p)))
        .transpose()?;
    if let Some(catalog) = &catalog {
        let before = ds.len();
        ds = Dataset::from_triples(ds.triples().filter(|(_, i, _)| catalog.contains_item(i)));
        if ds.len() < before {
            warn!("dropped {} ratings of items without a supplier", before - ds.len());
        }
    }
    let ds = apply_core_filter(&ds, &filter)?;
    let (train, test) = split_train_test(&ds, train_fraction, seed)?;

    fs::create_dir_all(&out).with_context(|| format!("creating {}", out.display()))?;
    write_ratings(&train, out.join("train.tsv"), Format::Tsv)?;
    write_ratings(&test, out.join("test.tsv"), Format::Tsv)?;
    let num_suppliers = match &catalog {
        Some(c) => {
            let c = c.restricted_to(ds.items().ids().iter().map(String::as_str))?;
            write_supplier_map(&c, out.join("suppliers.tsv"), Format::Tsv)?;
            Some(c.num_suppliers())
        }
        None => None,
    };
    let stats = ds.stats();
    write_json(
        &out.join("stats.json"),
        &json!({
            "users": stats.users,
            "items": stats.items,
            "suppliers": num_suppliers,
            "ratings": stats.interactions,
            "density": stats.density,
            "train_ratings": train.len(),
            "test_ratings": test.len(),
            "train_fraction": train_fraction,
            "seed": seed,
        }),
    )
}

pub fn recommend(a: RecommendArgs, s: &Settings) -> Result<()> {
    let algo: String = s.get(a.algo, "algo", "userknn".into())?;
    let t = s.get(a.t, "t", 50)?;
    let out: PathBuf = s.require(a.out, "out")?;
    let batch: Batch = match algo.as_str() {
        "import" => import_ranked_batch(s.require::<PathBuf>(a.file, "file")?, t)?,
        "userknn" | "popular" => {
            let train: Dataset = {
                let path: PathBuf = s.require(a.train, "train")?;
                parse_ratings(&path, Format::from_path(&path))?
            };
            if algo == "popular" {
                most_popular(&train, t)?
            } else {
                let k = s.get(a.k, "k", 50)?;
                let similarity: Similarity = s
                    .get(a.similarity, "similarity", "cosine".to_owned())?
                    .parse()
                    .map_err(|e: fairflow_core::Error| UsageError(e.to_string()))?;
                let model = train_user_knn(&train, k, similarity)?;
                recommend_top_t(&model, &train, t)?
            }
        }
        other => bail!(UsageError(format!("unknown recommender {other:?}; expected userknn, popular or import"))),
    };
    write_ranked_batch(&batch, &out)?;
    Ok(())
}

pub fn rerank(a: RerankArgs, s: &Settings) -> Result<()> {
    let long_path: PathBuf = s.require(a.long, "long")?;
    let long: Batch = read_ranked_batch(&long_path)?;
    let method: Method = s.get(a.variant, "variant", "item".to_owned())?.parse()?;
    let t = s.get(a.t, "t", long.list_size())?;
    if long.list_size() != t || !long.is_complete() {
        return Err(fairflow_core::Error::Format(format!(
            "{}: every user needs exactly t = {t} entries",
            long_path.display()
        ))
        .into());
    }
    let config = ExperimentConfig {
        t,
        n: s.get(a.n, "n", 10)?,
        lambda: s.get(a.lambda, "lambda", 0.5)?,
        beta: s.get(a.beta, "beta", 1.0)?,
        variant: if method == Method::Supplier { Variant::Supplier } else { Variant::Item },
        seed: s.get(a.seed, "seed", 0)?,
    };
    let catalog = s
        .opt::<PathBuf>(a.suppliers, "suppliers")?
        .map(|p| parse_supplier_map(&p, Format::from_path(&p)))
        .transpose()?;
    let out: PathBuf = s.require(a.out, "out")?;

    let batch = if method.uses_lambda() {
        let result = run_fairmatch(&long, catalog.as_ref(), &config)?;
        let stats_path = match s.opt::<PathBuf>(a.stats, "stats")? {
            Some(p) => p,
            None => {
                let mut p = out.clone().into_os_string();
                p.push(".iterations.json");
                PathBuf::from(p)
            }
        };
        write_json(
            &stats_path,
            &json!({
                "variant": method,
                "config": config,
                "candidates": result.assignment.candidate_items().len(),
                "iterations": result.per_iteration,
            }),
        )?;
        result.final_batch
    } else {
        rerank_with(&long, catalog.as_ref(), method, &config)?
    };
    write_ranked_batch(&batch, &out)?;
    Ok(())
}

fn groups_csv(ivs: Option<&GroupShift<f64>>, svs: Option<&GroupShift<f64>>) -> String {
    let mut out = String::from("level,group,size,base,reranked,shift\n");
    for (level, shift) in [("item", ivs), ("supplier", svs)] {
        let Some(g) = shift else { continue };
        for k in 0..g.sizes.len() {
            let rel = g.shift[k].map_or_else(|| "NA".to_owned(), |v| format!("{v:.6}"));
            out.push_str(&format!(
                "{level},{},{},{:.6},{:.6},{rel}\n",
                k + 1,
                g.sizes[k],
                g.base[k],
                g.reranked[k]
            ));
        }
    }
    out
}

pub fn evaluate(a: EvaluateArgs, s: &Settings) -> Result<()> {
    let read = |flag: Option<PathBuf>, key: &str| -> Result<Dataset> {
        let path: PathBuf = s.require(flag, key)?;
        Ok(parse_ratings(&path, Format::from_path(&path))?)
    };
    let batch: Batch = read_ranked_batch(s.require::<PathBuf>(a.file, "file")?)?;
    let train = read(a.train, "train")?;
    let test = read(a.test, "test")?;
    let catalog = load_catalog(s.opt::<PathBuf>(a.suppliers, "suppliers")?.as_deref(), &train, batch_items(&batch))?;

    let with_groups = s.flag(a.groups, "groups")?;
    let long = s.opt::<PathBuf>(a.long, "long")?.map(read_ranked_batch::<f64>).transpose()?;
    let base = match (&long, with_groups) {
        (Some(long), true) => Some(long.truncate(batch.list_size())?),
        (None, true) => bail!(UsageError("--groups needs --long".into())),
        _ => None,
    };
    let report: Report = evaluate_batch(&EvaluationInput {
        batch: &batch,
        train: &train,
        test: &test,
        catalog: &catalog,
        groups: base.as_ref().zip(long.as_ref()),
    })?;
    let paired = match s.opt::<PathBuf>(a.mcnemar, "mcnemar")? {
        Some(p) => mcnemar(&batch, &read_ranked_batch::<f64>(&p)?, &test)?,
        None => None,
    };
    let doc = json!({ "report": report, "mcnemar": paired });

    match s.opt::<PathBuf>(a.out, "out")? {
        None => println!("{}", serde_json::to_string_pretty(&doc)?),
        Some(stem) => {
            let with = |ext: &str| {
                let mut p = stem.clone().into_os_string();
                p.push(ext);
                PathBuf::from(p)
            };
            write_json(&with(".json"), &doc)?;
            let csv = format!("{}\n{}\n", Report::CSV_HEADER, report.csv_row());
            fs::write(with(".csv"), csv).context("writing CSV report")?;
            if with_groups {
                fs::write(with(".groups.csv"), groups_csv(report.ivs.as_ref(), report.svs.as_ref()))
                    .context("writing group table")?;
            }
        }
    }
    Ok(())
}

pub fn sweep(a: SweepArgs, s: &Settings) -> Result<()> {
    let seed = s.get(a.seed, "seed", 0)?;
    let prepared: Prepared<f64> = if s.flag(a.synthetic, "synthetic")? {
        prepare_synthetic(&HarnessConfig::default(), seed)?
    } else {
        let read = |flag: Option<PathBuf>, key: &str| -> Result<Dataset> {
            let path: PathBuf = s.require(flag, key)?;
            Ok(parse_ratings(&path, Format::from_path(&path))?)
        };
        let train = read(a.train, "train")?;
        let test = read(a.test, "test")?;
        let long: Batch = read_ranked_batch(s.require::<PathBuf>(a.long, "long")?)?;
        let catalog = load_catalog(s.opt::<PathBuf>(a.suppliers, "suppliers")?.as_deref(), &train, batch_items(&long))?;
        Prepared { train, test, catalog, long }
    };
    let methods: Vec<Method> = list(&s.get(a.variant, "variant", "item,supplier".to_owned())?, "variant")?;
    let lambdas: Vec<f64> = list(&s.get(a.lambda, "lambda", "0,0.25,0.5,0.75,1".to_owned())?, "lambda")?;
    let betas: Vec<f64> = list(&s.get(a.beta, "beta", "1".to_owned())?, "beta")?;
    let base = ExperimentConfig {
        t: prepared.long.list_size(),
        n: s.get(a.n, "n", 10)?,
        seed,
        ..Default::default()
    };

    let rows = run_sweep(&prepared, &grid(&methods, &lambdas, &betas), &base);
    let csv = sweep_csv(&rows);
    match s.opt::<PathBuf>(a.out, "out")? {
        Some(p) => fs::write(&p, csv).with_context(|| format!("writing {}", p.display()))?,
        None => print!("{csv}"),
    }
    let failed = rows.iter().filter(|r| r.report.is_err()).count();
    if failed > 0 {
        bail!("{failed} of {} sweep cells failed", rows.len());
    }
    Ok(())
}
