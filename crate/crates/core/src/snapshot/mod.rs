//! Topology snapshots reconstructed from gossip.
//!
//! A channel belongs to the snapshot at time `at` when
//!
//! 1. its `channel_announcement` was received at or before `at`, and
//! 2. at least one direction's latest `channel_update` at or before `at` is
//!    enabled and no older than `at - liveness_window`.
//!
//! Each included channel carries the latest policy per direction (which may
//! itself be stale or disabled). Nodes are exactly the endpoints of included
//! channels; `node_announcement`s only contribute aliases.

mod io;

use std::collections::{BTreeMap, HashMap};

use thiserror::Error;

use crate::gossip::{
    ChannelUpdate, Direction, GossipMessage, GossipRecord, NodeId, ShortChannelId, Timestamp,
};

pub use io::{read_snapshot, write_snapshot, SnapshotIoError, CHANNELS_FILE, META_FILE, NODES_FILE};

/// Two weeks, the BOLT#7 pruning horizon.
pub const DEFAULT_LIVENESS_WINDOW: u64 = 14 * 86_400;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SnapshotError {
    #[error("records not sorted by timestamp at index {index}")]
    UnsortedInput { index: usize },
    #[error("schedule not strictly increasing at index {index}")]
    UnsortedSchedule { index: usize },
    #[error("invalid snapshot: {0}")]
    Invalid(String),
}

/// Routing parameters one endpoint advertises for its side of a channel.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct ChannelPolicy {
    pub direction: Direction,
    pub fee_base_msat: u32,
    pub fee_proportional_millionths: u32,
    pub cltv_expiry_delta: u16,
    pub htlc_minimum_msat: u64,
    pub htlc_maximum_msat: Option<u64>,
    pub last_update: Timestamp,
    pub disabled: bool,
}

impl ChannelPolicy {
    pub fn from_update(cu: &ChannelUpdate) -> Self {
        ChannelPolicy {
            direction: cu.direction(),
            fee_base_msat: cu.fee_base_msat,
            fee_proportional_millionths: cu.fee_proportional_millionths,
            cltv_expiry_delta: cu.cltv_expiry_delta,
            htlc_minimum_msat: cu.htlc_minimum_msat,
            htlc_maximum_msat: cu.htlc_maximum_msat,
            last_update: u64::from(cu.timestamp),
            disabled: cu.is_disabled(),
        }
    }

    /// Whether this policy keeps its channel alive at `at`.
    pub fn is_live(&self, at: Timestamp, window: u64) -> bool {
        !self.disabled && self.last_update <= at && self.last_update >= at.saturating_sub(window)
    }
}

/// A channel with its endpoints in canonical order (`endpoint_a <
/// endpoint_b`). `policy_a` is the [`Direction::Forward`] policy published by
/// `endpoint_a`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Channel {
    pub scid: ShortChannelId,
    pub endpoint_a: NodeId,
    pub endpoint_b: NodeId,
    pub policy_a: Option<ChannelPolicy>,
    pub policy_b: Option<ChannelPolicy>,
}

impl Channel {
    /// Builds a channel, swapping endpoints (and policies) into canonical
    /// order. Policy directions are rewritten to match their slot.
    pub fn new(
        scid: ShortChannelId,
        u: NodeId,
        v: NodeId,
        policy_u: Option<ChannelPolicy>,
        policy_v: Option<ChannelPolicy>,
    ) -> Self {
        let (a, b, pa, pb) = if u <= v {
            (u, v, policy_u, policy_v)
        } else {
            (v, u, policy_v, policy_u)
        };
        Channel {
            scid,
            endpoint_a: a,
            endpoint_b: b,
            policy_a: pa.map(|p| ChannelPolicy {
                direction: Direction::Forward,
                ..p
            }),
            policy_b: pb.map(|p| ChannelPolicy {
                direction: Direction::Backward,
                ..p
            }),
        }
    }

    pub fn policy(&self, direction: Direction) -> Option<&ChannelPolicy> {
        match direction {
            Direction::Forward => self.policy_a.as_ref(),
            Direction::Backward => self.policy_b.as_ref(),
        }
    }

    pub fn is_active(&self) -> bool {
        self.policy_a.is_some() || self.policy_b.is_some()
    }
}

/// The channel graph at one point in time.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Snapshot {
    pub at: Timestamp,
    pub liveness_window: u64,
    /// Node id to alias bytes (empty when never announced).
    pub nodes: BTreeMap<NodeId, Vec<u8>>,
    pub channels: BTreeMap<ShortChannelId, Channel>,
}

impl Snapshot {
    pub fn empty(at: Timestamp, liveness_window: u64) -> Self {
        Snapshot {
            at,
            liveness_window,
            nodes: BTreeMap::new(),
            channels: BTreeMap::new(),
        }
    }

    /// Builds a snapshot whose node set is the endpoint union of `channels`.
    pub fn from_channels(
        at: Timestamp,
        liveness_window: u64,
        channels: impl IntoIterator<Item = Channel>,
    ) -> Result<Self, SnapshotError> {
        let mut snap = Snapshot::empty(at, liveness_window);
        for ch in channels {
            snap.nodes.entry(ch.endpoint_a).or_default();
            snap.nodes.entry(ch.endpoint_b).or_default();
            if let Some(prev) = snap.channels.insert(ch.scid, ch) {
                return Err(SnapshotError::Invalid(format!("duplicate scid {}", prev.scid)));
            }
        }
        snap.validate()?;
        Ok(snap)
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    pub fn channel_count(&self) -> usize {
        self.channels.len()
    }

    /// Checks endpoint membership, canonical ordering, policy slots and
    /// timestamps.
    pub fn validate(&self) -> Result<(), SnapshotError> {
        for ch in self.channels.values() {
            if ch.endpoint_a >= ch.endpoint_b {
                return Err(SnapshotError::Invalid(format!(
                    "channel {} endpoints not in canonical order",
                    ch.scid
                )));
            }
            for id in [ch.endpoint_a, ch.endpoint_b] {
                if !self.nodes.contains_key(&id) {
                    return Err(SnapshotError::Invalid(format!(
                        "channel {} endpoint {id} missing from node set",
                        ch.scid
                    )));
                }
            }
            for (slot, dir) in [(&ch.policy_a, Direction::Forward), (&ch.policy_b, Direction::Backward)] {
                if let Some(p) = slot {
                    if p.direction != dir {
                        return Err(SnapshotError::Invalid(format!(
                            "channel {} policy stored under the wrong direction",
                            ch.scid
                        )));
                    }
                    if p.last_update > self.at {
                        return Err(SnapshotError::Invalid(format!(
                            "channel {} policy updated after snapshot time",
                            ch.scid
                        )));
                    }
                }
            }
        }
        Ok(())
    }

    /// True when the node set equals the union of channel endpoints.
    pub fn has_no_isolated_nodes(&self) -> bool {
        let mut used = std::collections::BTreeSet::new();
        for ch in self.channels.values() {
            used.insert(ch.endpoint_a);
            used.insert(ch.endpoint_b);
        }
        used.len() == self.nodes.len() && used.iter().all(|id| self.nodes.contains_key(id))
    }
}

fn check_sorted(records: &[GossipRecord]) -> Result<(), SnapshotError> {
    match records
        .windows(2)
        .position(|w| w[0].timestamp() > w[1].timestamp())
    {
        Some(i) => Err(SnapshotError::UnsortedInput { index: i + 1 }),
        None => Ok(()),
    }
}

/// Replay state: everything seen up to the current sweep time.
#[derive(Default)]
struct Replay<'a> {
    announcements: BTreeMap<ShortChannelId, (NodeId, NodeId)>,
    updates: HashMap<(ShortChannelId, Direction), &'a ChannelUpdate>,
    aliases: HashMap<NodeId, &'a [u8]>,
}

impl<'a> Replay<'a> {
    fn apply(&mut self, rec: &'a GossipRecord) {
        match &rec.message {
            GossipMessage::ChannelAnnouncement(ca) => {
                self.announcements
                    .insert(ca.short_channel_id, (ca.node_id_1, ca.node_id_2));
            }
            GossipMessage::ChannelUpdate(cu) => {
                self.updates.insert((cu.short_channel_id, cu.direction()), cu);
            }
            GossipMessage::NodeAnnouncement(na) => {
                self.aliases.insert(na.node_id, &na.alias);
            }
        }
    }

    fn materialize(&self, at: Timestamp, window: u64) -> Snapshot {
        let mut snap = Snapshot::empty(at, window);
        for (&scid, &(a, b)) in &self.announcements {
            let policy = |dir| {
                self.updates
                    .get(&(scid, dir))
                    .map(|cu| ChannelPolicy::from_update(cu))
            };
            let (pa, pb) = (policy(Direction::Forward), policy(Direction::Backward));
            let live = [pa, pb]
                .iter()
                .flatten()
                .any(|p| p.is_live(at, window));
            if !live {
                continue;
            }
            for id in [a, b] {
                snap.nodes
                    .entry(id)
                    .or_insert_with(|| self.aliases.get(&id).map_or_else(Vec::new, |s| s.to_vec()));
            }
            snap.channels.insert(
                scid,
                Channel {
                    scid,
                    endpoint_a: a,
                    endpoint_b: b,
                    policy_a: pa,
                    policy_b: pb,
                },
            );
        }
        snap
    }
}

/// Reconstructs the snapshot at `at` from a timestamp-ordered stream.
pub fn build_snapshot(
    records: &[GossipRecord],
    at: Timestamp,
    liveness_window: u64,
) -> Result<Snapshot, SnapshotError> {
    check_sorted(records)?;
    let mut replay = Replay::default();
    for rec in records.iter().take_while(|r| r.timestamp() <= at) {
        replay.apply(rec);
    }
    Ok(replay.materialize(at, liveness_window))
}

/// Reconstructs one snapshot per schedule entry in a single forward pass.
pub fn build_series(
    records: &[GossipRecord],
    schedule: &[Timestamp],
    liveness_window: u64,
) -> Result<Vec<Snapshot>, SnapshotError> {
    if let Some(i) = schedule.windows(2).position(|w| w[0] >= w[1]) {
        return Err(SnapshotError::UnsortedSchedule { index: i + 1 });
    }
    check_sorted(records)?;
    let mut replay = Replay::default();
    let mut next = 0;
    let mut out = Vec::with_capacity(schedule.len());
    for &at in schedule {
        while next < records.len() && records[next].timestamp() <= at {
            replay.apply(&records[next]);
            next += 1;
        }
        out.push(replay.materialize(at, liveness_window));
    }
    Ok(out)
}
