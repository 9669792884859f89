//! Rating and supplier file I/O plus the corpus preprocessing steps:
//! interaction-count conversion, core filtering, and per-user splitting.

use std::collections::HashMap;
use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;
use std::str::FromStr;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::model::{InteractionDataset, SupplierCatalog};
use crate::scalar::Real;

/// Field separator of a delimited text file.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Format {
    #[default]
    Tsv,
    Csv,
    /// `::`-separated, as in the MovieLens 1M dump.
    Dat,
}

impl Format {
    fn separator(self) -> &'static str {
        match self {
            Format::Tsv => "\t",
            Format::Csv => ",",
            Format::Dat => "::",
        }
    }

    /// Guesses from the file extension, defaulting to TSV.
    pub fn from_path(path: &Path) -> Self {
        match path.extension().and_then(|e| e.to_str()) {
            Some("csv") => Format::Csv,
            Some("dat") => Format::Dat,
            _ => Format::Tsv,
        }
    }
}

impl FromStr for Format {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "tsv" | "tab" => Ok(Format::Tsv),
            "csv" => Ok(Format::Csv),
            "dat" => Ok(Format::Dat),
            other => Err(Error::InvalidArgument(format!("unknown format {other:?}"))),
        }
    }
}

/// Yields `(line number, fields)` for every record, skipping blank and `#` lines.
fn records<'a>(
    reader: impl BufRead + 'a,
    format: Format,
    path: &'a Path,
) -> impl Iterator<Item = Result<(usize, Vec<String>)>> + 'a {
    reader.lines().enumerate().filter_map(move |(idx, line)| {
        let line = match line {
            Ok(l) => l,
            Err(e) => return Some(Err(Error::io(path, e))),
        };
        let trimmed = line.trim_end_matches('\r');
        if trimmed.trim().is_empty() || trimmed.trim_start().starts_with('#') {
            return None;
        }
        let fields = trimmed
            .split(format.separator())
            .map(|f| f.trim().to_owned())
            .collect();
        Some(Ok((idx + 1, fields)))
    })
}

fn parse_error(path: &Path, line: usize, message: impl Into<String>) -> Error {
    Error::Parse {
        path: path.to_owned(),
        line,
        message: message.into(),
    }
}

fn open(path: &Path) -> Result<BufReader<File>> {
    File::open(path)
        .map(BufReader::new)
        .map_err(|e| Error::io(path, e))
}

/// Reads `userId, itemId, value[, timestamp]` records.
pub fn parse_ratings<R: Real>(path: impl AsRef<Path>, format: Format) -> Result<InteractionDataset<R>> {
    let path = path.as_ref();
    read_ratings(open(path)?, format, path)
}

/// Like [`parse_ratings`] over any reader; `path` only labels errors.
pub fn read_ratings<R: Real>(
    reader: impl BufRead,
    format: Format,
    path: &Path,
) -> Result<InteractionDataset<R>> {
    let mut triples = Vec::new();
    for record in records(reader, format, path) {
        let (line, fields) = record?;
        if !(3..=4).contains(&fields.len()) {
            return Err(parse_error(
                path,
                line,
                format!("expected 3 or 4 fields, found {}", fields.len()),
            ));
        }
        if fields[0].is_empty() || fields[1].is_empty() {
            return Err(parse_error(path, line, "empty user or item id"));
        }
        let value: f64 = fields[2]
            .parse()
            .map_err(|_| parse_error(path, line, format!("bad value {:?}", fields[2])))?;
        if !value.is_finite() || value < 0.0 {
            return Err(parse_error(path, line, format!("value {value} must be finite and >= 0")));
        }
        if let Some(ts) = fields.get(3) {
            ts.parse::<i64>()
                .map_err(|_| parse_error(path, line, format!("bad timestamp {ts:?}")))?;
        }
        let mut fields = fields.into_iter();
        let (u, i) = (fields.next().unwrap(), fields.next().unwrap());
        triples.push((u, i, R::of(value)));
    }
    if triples.is_empty() {
        return Err(Error::EmptyInput(format!("{} has no rating rows", path.display())));
    }
    let rows = triples.len();
    let ds = InteractionDataset::from_triples(triples);
    log::info!(
        "{}: {rows} rows, {} interactions, {} users, {} items",
        path.display(),
        ds.len(),
        ds.num_users(),
        ds.num_items()
    );
    Ok(ds)
}

pub fn write_ratings<R: Real>(
    ds: &InteractionDataset<R>,
    path: impl AsRef<Path>,
    format: Format,
) -> Result<()> {
    let path = path.as_ref();
    let file = File::create(path).map_err(|e| Error::io(path, e))?;
    let mut w = BufWriter::new(file);
    let sep = format.separator();
    for (u, i, v) in ds.triples() {
        writeln!(w, "{u}{sep}{i}{sep}{v}").map_err(|e| Error::io(path, e))?;
    }
    w.flush().map_err(|e| Error::io(path, e))
}

/// Reads a two-column `itemId, supplierId` map.
pub fn parse_supplier_map(path: impl AsRef<Path>, format: Format) -> Result<SupplierCatalog> {
    let path = path.as_ref();
    read_supplier_map(open(path)?, format, path)
}

pub fn read_supplier_map(reader: impl BufRead, format: Format, path: &Path) -> Result<SupplierCatalog> {
    let mut pairs = Vec::new();
    for record in records(reader, format, path) {
        let (line, fields) = record?;
        if fields.len() != 2 || fields.iter().any(String::is_empty) {
            return Err(parse_error(path, line, "expected itemId and supplierId"));
        }
        pairs.push((fields[0].clone(), fields[1].clone()));
    }
    if pairs.is_empty() {
        return Err(Error::EmptyInput(format!("{} has no supplier rows", path.display())));
    }
    let catalog = SupplierCatalog::from_pairs(pairs)?;
    log::info!(
        "{}: {} items, {} suppliers",
        path.display(),
        catalog.num_items(),
        catalog.num_suppliers()
    );
    Ok(catalog)
}

/// Parses a supplier map and restricts it to the dataset's items, failing if
/// any dataset item has no supplier.
pub fn load_catalog_for<R: Real>(
    path: impl AsRef<Path>,
    format: Format,
    ds: &InteractionDataset<R>,
) -> Result<SupplierCatalog> {
    parse_supplier_map(path, format)?.restricted_to(ds.items().ids().iter().map(String::as_str))
}

pub fn write_supplier_map(catalog: &SupplierCatalog, path: impl AsRef<Path>, format: Format) -> Result<()> {
    let path = path.as_ref();
    let file = File::create(path).map_err(|e| Error::io(path, e))?;
    let mut w = BufWriter::new(file);
    let sep = format.separator();
    for (i, s) in catalog.pairs() {
        writeln!(w, "{i}{sep}{s}").map_err(|e| Error::io(path, e))?;
    }
    w.flush().map_err(|e| Error::io(path, e))
}

/// Converts interaction counts into ratings `1..=levels` per user.
///
/// A count `c` in a profile of `m` interactions maps to
/// `ceil(levels * |{c' <= c}| / m)`, its empirical-CDF quantile. The mapping
/// is monotone in the count, and a profile with a single distinct count maps
/// every item to `levels`.
pub fn interactions_to_ratings<R: Real>(raw: &InteractionDataset<R>, levels: u32) -> Result<InteractionDataset<R>> {
    if levels == 0 {
        return Err(Error::InvalidArgument("rating scale needs at least one level".into()));
    }
    if let Some((u, i, v)) = raw.triples().find(|(_, _, v)| v.partial_cmp(&R::one()).is_none_or(|o| o.is_lt())) {
        return Err(Error::InvalidData(format!(
            "interaction count {v} for ({u}, {i}) is not positive"
        )));
    }
    let profiles = raw.profiles();
    let mut rating: HashMap<(u32, u32), R> = HashMap::with_capacity(raw.len());
    for (user, profile) in profiles.iter().enumerate() {
        let mut counts: Vec<R> = profile.iter().map(|&(_, v)| v).collect();
        counts.sort_by(|a, b| a.partial_cmp(b).expect("finite counts"));
        let m = counts.len();
        for &(item, c) in profile {
            let at_most = counts.partition_point(|&x| x <= c);
            let level = (levels as usize * at_most).div_ceil(m);
            rating.insert((user as u32, item), R::of_usize(level));
        }
    }
    Ok(InteractionDataset::from_triples(raw.interactions().iter().map(|x| {
        (
            raw.users().id(x.user),
            raw.items().id(x.item),
            rating[&(x.user, x.item)],
        )
    })))
}

/// Thresholds and sampling for [`apply_core_filter`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct CoreFilter {
    pub min_user_ratings: usize,
    pub min_item_ratings: usize,
    pub sample_users: Option<usize>,
    pub seed: u64,
    /// Repeat the user/item pass until nothing changes instead of running it once.
    pub iterate: bool,
}

/// Drops users below the user threshold, then items below the item
/// threshold, then optionally samples users uniformly at random.
pub fn apply_core_filter<R: Real>(ds: &InteractionDataset<R>, filter: &CoreFilter) -> Result<InteractionDataset<R>> {
    let mut current = ds.clone();
    loop {
        let before = current.len();
        let users = current.user_counts();
        let after_users = InteractionDataset::from_triples(
            current
                .interactions()
                .iter()
                .filter(|x| users[x.user as usize] >= filter.min_user_ratings)
                .map(|x| (current.users().id(x.user), current.items().id(x.item), x.value)),
        );
        let items = after_users.item_counts();
        current = InteractionDataset::from_triples(
            after_users
                .interactions()
                .iter()
                .filter(|x| items[x.item as usize] >= filter.min_item_ratings)
                .map(|x| (after_users.users().id(x.user), after_users.items().id(x.item), x.value)),
        );
        if !filter.iterate || current.len() == before {
            break;
        }
    }

    let Some(k) = filter.sample_users else {
        return Ok(current);
    };
    if k > current.num_users() {
        return Err(Error::InvalidArgument(format!(
            "cannot sample {k} users, only {} survive filtering",
            current.num_users()
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(filter.seed);
    let mut keep = vec![false; current.num_users()];
    for idx in rand::seq::index::sample(&mut rng, current.num_users(), k) {
        keep[idx] = true;
    }
    Ok(InteractionDataset::from_triples(
        current
            .interactions()
            .iter()
            .filter(|x| keep[x.user as usize])
            .map(|x| (current.users().id(x.user), current.items().id(x.item), x.value)),
    ))
}

/// Per-user random split: `floor(train_fraction * |profile|)` interactions of
/// each user go to train, the rest to test. Users with fewer than two
/// interactions go entirely to train.
pub fn split_train_test<R: Real>(
    ds: &InteractionDataset<R>,
    train_fraction: f64,
    seed: u64,
) -> Result<(InteractionDataset<R>, InteractionDataset<R>)> {
    if !(train_fraction > 0.0 && train_fraction < 1.0) {
        return Err(Error::InvalidArgument(format!(
            "train fraction must lie in (0, 1), got {train_fraction}"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut positions: Vec<Vec<usize>> = vec![Vec::new(); ds.num_users()];
    for (pos, x) in ds.interactions().iter().enumerate() {
        positions[x.user as usize].push(pos);
    }
    let mut in_train = vec![true; ds.len()];
    let mut singletons = 0usize;
    for profile in &mut positions {
        if profile.len() < 2 {
            singletons += profile.len().min(1);
            continue;
        }
        profile.shuffle(&mut rng);
        let keep = (train_fraction * profile.len() as f64).floor() as usize;
        for &pos in &profile[keep..] {
            in_train[pos] = false;
        }
    }
    if singletons > 0 {
        log::warn!("{singletons} user(s) with a single interaction placed entirely in train");
    }
    let pick = |want: bool| {
        InteractionDataset::from_triples(
            ds.triples()
                .zip(&in_train)
                .filter(|(_, &t)| t == want)
                .map(|(x, _)| x),
        )
    };
    Ok((pick(true), pick(false)))
}
