//! Ranked-batch files: tab-separated `userId, itemId, score, rank`, one
//! block per user with ranks ascending from 1.

use std::collections::BTreeMap;
use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use crate::error::{Error, Result};
use crate::model::{Entry, RankedBatch};
use crate::scalar::Real;

pub fn write_ranked_batch_to<R: Real>(batch: &RankedBatch<R>, mut w: impl Write) -> std::io::Result<()> {
    for (user, list) in batch.iter() {
        for (pos, e) in list.iter().enumerate() {
            writeln!(w, "{user}\t{}\t{}\t{}", e.item, e.score, pos + 1)?;
        }
    }
    w.flush()
}

pub fn write_ranked_batch<R: Real>(batch: &RankedBatch<R>, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let file = File::create(path).map_err(|e| Error::io(path, e))?;
    write_ranked_batch_to(batch, BufWriter::new(file)).map_err(|e| Error::io(path, e))
}

type RawLists<R> = BTreeMap<String, Vec<(usize, Entry<R>)>>;

fn read_rows<R: Real>(reader: impl BufRead, path: &Path) -> Result<RawLists<R>> {
    let mut lists: RawLists<R> = BTreeMap::new();
    for (idx, line) in reader.lines().enumerate() {
        let line = line.map_err(|e| Error::io(path, e))?;
        let line = line.trim_end_matches('\r');
        if line.trim().is_empty() || line.starts_with('#') {
            continue;
        }
        let bad = |message: String| Error::Parse {
            path: path.to_owned(),
            line: idx + 1,
            message,
        };
        let fields: Vec<&str> = line.split('\t').map(str::trim).collect();
        if fields.len() != 4 {
            return Err(bad(format!("expected 4 tab-separated fields, found {}", fields.len())));
        }
        let score: f64 = fields[2]
            .parse()
            .map_err(|_| bad(format!("bad score {:?}", fields[2])))?;
        let rank: usize = fields[3]
            .parse()
            .map_err(|_| bad(format!("bad rank {:?}", fields[3])))?;
        lists
            .entry(fields[0].to_owned())
            .or_default()
            .push((rank, Entry::new(fields[1], R::of(score))));
    }
    if lists.is_empty() {
        return Err(Error::EmptyInput(format!("{} has no ranked rows", path.display())));
    }
    Ok(lists)
}

/// Orders each user's rows by rank and checks ranks run `1..=len` without gaps.
fn order_by_rank<R: Real>(raw: RawLists<R>) -> Result<BTreeMap<String, Vec<Entry<R>>>> {
    raw.into_iter()
        .map(|(user, mut rows)| {
            rows.sort_by_key(|(rank, _)| *rank);
            for (expected, (rank, _)) in (1..).zip(&rows) {
                if *rank != expected {
                    return Err(Error::Format(format!(
                        "user {user}: ranks must run 1..{} without gaps or repeats, found {rank} at position {expected}",
                        rows.len()
                    )));
                }
            }
            Ok((user, rows.into_iter().map(|(_, e)| e).collect()))
        })
        .collect()
}

/// Imports externally produced top-`t` lists. Ranks must run `1..=t` for
/// every user and scores must not increase with rank.
pub fn import_ranked_batch<R: Real>(path: impl AsRef<Path>, t: usize) -> Result<RankedBatch<R>> {
    let path = path.as_ref();
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    import_ranked_batch_from(BufReader::new(file), t, path)
}

pub(crate) fn import_ranked_batch_from<R: Real>(
    reader: impl BufRead,
    t: usize,
    path: &Path,
) -> Result<RankedBatch<R>> {
    let lists = order_by_rank(read_rows(reader, path)?)?;
    if let Some((user, list)) = lists.iter().find(|(_, l)| l.len() != t) {
        return Err(Error::Format(format!(
            "user {user}: expected {t} ranked entries, found {}",
            list.len()
        )));
    }
    RankedBatch::new(lists, t)
}

/// Reads any ranked-batch file, including re-ranked output whose order is not
/// score order. The list size is the longest list.
pub fn read_ranked_batch<R: Real>(path: impl AsRef<Path>) -> Result<RankedBatch<R>> {
    let path = path.as_ref();
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    let lists = order_by_rank(read_rows(BufReader::new(file), path)?)?;
    let size = lists.values().map(Vec::len).max().unwrap_or(0);
    RankedBatch::from_ranked_partial(lists, size)
}
