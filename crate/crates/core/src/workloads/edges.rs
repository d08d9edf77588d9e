use std::collections::{BTreeMap, HashMap, HashSet};
use std::io::{Read, Write};
use std::path::Path;

use crate::error::{Error, Result};
use crate::model::Dataset;

/// One `sender,receiver` interaction.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct EdgeRecord {
    pub sender: String,
    pub receiver: String,
}

pub fn load_edges(path: impl AsRef<Path>) -> Result<Vec<EdgeRecord>> {
    read_edges(std::fs::File::open(path)?)
}

/// Parses two-column CSV. A first row whose first field does not start with
/// a digit is taken as a header.
pub fn read_edges<R: Read>(r: R) -> Result<Vec<EdgeRecord>> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .trim(csv::Trim::All)
        .from_reader(r);
    let mut out = Vec::new();
    let mut saw_any = false;
    for (idx, rec) in reader.records().enumerate() {
        let rec = rec?;
        let line = rec.position().map_or(idx as u64 + 1, |p| p.line());
        if rec.len() == 1 && rec[0].is_empty() {
            continue;
        }
        let first_row = !saw_any;
        saw_any = true;
        if first_row && !rec.get(0).is_some_and(|f| f.starts_with(|c: char| c.is_ascii_digit())) {
            continue;
        }
        if rec.len() != 2 {
            return Err(Error::Parse {
                line,
                message: format!("expected 2 fields, found {}", rec.len()),
            });
        }
        if rec[0].is_empty() || rec[1].is_empty() {
            return Err(Error::Parse {
                line,
                message: "empty sender or receiver".into(),
            });
        }
        out.push(EdgeRecord {
            sender: rec[0].to_string(),
            receiver: rec[1].to_string(),
        });
    }
    if out.is_empty() {
        return Err(Error::EmptyFile);
    }
    Ok(out)
}

/// One shard per receiver holding its senders. Senders become ids
/// `0, 1, ...` in order of first appearance; receivers are ordered the same
/// way. Repeated pairs collapse.
pub fn partition_by_receiver(edges: &[EdgeRecord]) -> Result<Dataset> {
    let mut sender_ids: HashMap<&str, u64> = HashMap::new();
    let mut receiver_ids: HashMap<&str, usize> = HashMap::new();
    let mut shards: Vec<Vec<u64>> = Vec::new();
    for e in edges {
        let next = sender_ids.len() as u64;
        let s = *sender_ids.entry(&e.sender).or_insert(next);
        let next = receiver_ids.len();
        let r = *receiver_ids.entry(&e.receiver).or_insert(next);
        if r == shards.len() {
            shards.push(Vec::new());
        }
        shards[r].push(s);
    }
    if shards.is_empty() {
        return Err(Error::EmptyFile);
    }
    Dataset::new(sender_ids.len() as u64, shards)
}

/// Distinct senders per receiver, largest first.
pub fn senders_per_receiver(edges: &[EdgeRecord]) -> Vec<u64> {
    let mut per: HashMap<&str, HashSet<&str>> = HashMap::new();
    for e in edges {
        per.entry(&e.receiver).or_default().insert(&e.sender);
    }
    let mut counts: Vec<u64> = per.values().map(|s| s.len() as u64).collect();
    counts.sort_unstable_by(|a, b| b.cmp(a));
    counts
}

/// Events per sender within the receiver that has the most distinct senders
/// (ties go to the receiver seen first), largest first.
pub fn activity_in_top_receiver(edges: &[EdgeRecord]) -> Vec<u64> {
    let mut order: Vec<&str> = Vec::new();
    let mut per: HashMap<&str, HashSet<&str>> = HashMap::new();
    for e in edges {
        let set = per.entry(&e.receiver).or_insert_with(|| {
            order.push(&e.receiver);
            HashSet::new()
        });
        set.insert(&e.sender);
    }
    let Some(top) = order
        .iter()
        .copied()
        .rev()
        .max_by_key(|r| per[r].len())
    else {
        return Vec::new();
    };
    let mut activity: BTreeMap<&str, u64> = BTreeMap::new();
    for e in edges.iter().filter(|e| e.receiver == top) {
        *activity.entry(&e.sender).or_insert(0) += 1;
    }
    let mut counts: Vec<u64> = activity.into_values().collect();
    counts.sort_unstable_by(|a, b| b.cmp(a));
    counts
}

/// `rank,count` CSV with ranks from 1.
pub fn write_histogram_csv<W: Write>(w: W, counts: &[u64]) -> Result<()> {
    let mut out = csv::Writer::from_writer(w);
    out.write_record(["rank", "count"])?;
    for (i, c) in counts.iter().enumerate() {
        out.write_record([(i + 1).to_string(), c.to_string()])?;
    }
    out.flush()?;
    Ok(())
}
