//! Ordering and deduplication of record streams.

use std::collections::HashMap;

use super::{Direction, GossipRecord, NodeId, ShortChannelId};

/// Identity of the entity a record describes.
///
/// Variant order matches [`MessageKind`](super::MessageKind) so that sorting
/// by `(timestamp, kind, key)` and by `(timestamp, key)` agree.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum RecordKey {
    Node(NodeId),
    Channel(ShortChannelId),
    Update(ShortChannelId, Direction),
}

fn sort_key(rec: &GossipRecord) -> (u64, RecordKey) {
    (rec.timestamp(), rec.key())
}

/// Keeps only the newest record per key and sorts by `(timestamp, kind, key)`.
///
/// Among records with the same key and timestamp the last one in input order
/// wins.
pub fn dedup_and_order(records: Vec<GossipRecord>) -> Vec<GossipRecord> {
    let mut newest: HashMap<RecordKey, usize> = HashMap::with_capacity(records.len());
    for (i, rec) in records.iter().enumerate() {
        let key = rec.key();
        match newest.get(&key) {
            Some(&j) if records[j].timestamp() > rec.timestamp() => {}
            _ => {
                newest.insert(key, i);
            }
        }
    }
    let mut keep = vec![false; records.len()];
    for &i in newest.values() {
        keep[i] = true;
    }
    let mut out: Vec<GossipRecord> = records
        .into_iter()
        .zip(keep)
        .filter_map(|(r, k)| k.then_some(r))
        .collect();
    out.sort_by_key(sort_key);
    out
}

/// Sorts by `(timestamp, kind, key)` while keeping history.
///
/// Records that compare equal on the sort key keep their input order; exact
/// duplicates (retransmissions) are dropped. This is the input
/// [`build_snapshot`](crate::snapshot::build_snapshot) expects when earlier
/// states must stay reconstructible.
pub fn order_records(mut records: Vec<GossipRecord>) -> Vec<GossipRecord> {
    records.sort_by_key(sort_key);
    let mut out: Vec<GossipRecord> = Vec::with_capacity(records.len());
    let mut group_start = 0;
    for rec in records {
        let same_group = out
            .last()
            .is_some_and(|last| sort_key(last) == sort_key(&rec));
        if !same_group {
            group_start = out.len();
        }
        if !out[group_start..].contains(&rec) {
            out.push(rec);
        }
    }
    out
}
