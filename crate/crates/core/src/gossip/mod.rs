//! Gossip message model and ingestion.
//!
//! Three BOLT#7 message kinds carry the public topology:
//! `channel_announcement` (256), `node_announcement` (257) and
//! `channel_update` (258). [`wire`] decodes the binary payloads, [`lines`]
//! reads and writes the tab-separated record format and [`order`] sorts and
//! deduplicates record streams.

mod ids;
pub mod lines;
pub mod order;
pub mod synth;
pub mod wire;

pub use ids::{IdError, NodeId, ShortChannelId};
pub use lines::{
    read_hex_payloads, read_length_prefixed, read_records, write_length_prefixed, write_records, ReadError, ReadOutcome,
};
pub use order::{dedup_and_order, order_records, RecordKey};
pub use wire::{encode_bolt7, parse_bolt7, parse_bolt7_with, ParseError};

/// Unix time in seconds.
pub type Timestamp = u64;

/// How ingestion treats questionable input.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ParseMode {
    /// Skip malformed records and ignore reserved flag bits.
    #[default]
    Lenient,
    /// Reject malformed records and reserved flag bits.
    Strict,
}

/// Which side of a channel a `channel_update` describes.
///
/// `Forward` is the policy of `node_id_1` (the lexicographically smaller key)
/// for payments travelling towards `node_id_2`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Direction {
    Forward = 0,
    Backward = 1,
}

impl Direction {
    pub fn from_bit(bit: u8) -> Self {
        if bit & 1 == 0 {
            Direction::Forward
        } else {
            Direction::Backward
        }
    }

    pub fn bit(self) -> u8 {
        self as u8
    }
}

/// A network address advertised in a `node_announcement`.
///
/// Descriptors are kept as raw bytes; only the framing is decoded. An
/// unrecognised type swallows the rest of the address block.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct AddressDescriptor {
    pub kind: u8,
    pub data: Vec<u8>,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct NodeAnnouncement {
    pub node_id: NodeId,
    pub timestamp: u32,
    pub features: Vec<u8>,
    pub rgb_color: [u8; 3],
    /// Alias bytes with trailing zero padding removed (at most 32 bytes).
    pub alias: Vec<u8>,
    pub addresses: Vec<AddressDescriptor>,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ChannelAnnouncement {
    pub features: Vec<u8>,
    pub chain_hash: [u8; 32],
    pub short_channel_id: ShortChannelId,
    pub node_id_1: NodeId,
    pub node_id_2: NodeId,
    pub bitcoin_key_1: [u8; 33],
    pub bitcoin_key_2: [u8; 33],
}

impl ChannelAnnouncement {
    /// Announcement with zeroed chain hash and bitcoin keys.
    pub fn new(short_channel_id: ShortChannelId, node_id_1: NodeId, node_id_2: NodeId) -> Self {
        ChannelAnnouncement {
            features: Vec::new(),
            chain_hash: [0; 32],
            short_channel_id,
            node_id_1,
            node_id_2,
            bitcoin_key_1: [0; 33],
            bitcoin_key_2: [0; 33],
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ChannelUpdate {
    pub chain_hash: [u8; 32],
    pub short_channel_id: ShortChannelId,
    pub timestamp: u32,
    pub message_flags: u8,
    pub channel_flags: u8,
    pub cltv_expiry_delta: u16,
    pub htlc_minimum_msat: u64,
    pub fee_base_msat: u32,
    pub fee_proportional_millionths: u32,
    /// Present iff bit 0 of `message_flags` is set.
    pub htlc_maximum_msat: Option<u64>,
}

impl ChannelUpdate {
    /// Channel bit 0.
    pub fn direction(&self) -> Direction {
        Direction::from_bit(self.channel_flags)
    }

    /// Channel bit 1.
    pub fn is_disabled(&self) -> bool {
        self.channel_flags & 0b10 != 0
    }
}

/// Topology-relevant fields of a `channel_update`, used to build one with
/// consistent flag bytes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PolicyFields {
    pub direction: Direction,
    pub disabled: bool,
    pub cltv_expiry_delta: u16,
    pub htlc_minimum_msat: u64,
    pub fee_base_msat: u32,
    pub fee_proportional_millionths: u32,
    pub htlc_maximum_msat: Option<u64>,
}

impl ChannelUpdate {
    pub fn new(short_channel_id: ShortChannelId, timestamp: u32, p: PolicyFields) -> Self {
        ChannelUpdate {
            chain_hash: [0; 32],
            short_channel_id,
            timestamp,
            message_flags: u8::from(p.htlc_maximum_msat.is_some()),
            channel_flags: p.direction.bit() | (u8::from(p.disabled) << 1),
            cltv_expiry_delta: p.cltv_expiry_delta,
            htlc_minimum_msat: p.htlc_minimum_msat,
            fee_base_msat: p.fee_base_msat,
            fee_proportional_millionths: p.fee_proportional_millionths,
            htlc_maximum_msat: p.htlc_maximum_msat,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum MessageKind {
    NodeAnnouncement,
    ChannelAnnouncement,
    ChannelUpdate,
}

impl MessageKind {
    pub fn wire_type(self) -> u16 {
        match self {
            MessageKind::ChannelAnnouncement => 256,
            MessageKind::NodeAnnouncement => 257,
            MessageKind::ChannelUpdate => 258,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum GossipMessage {
    NodeAnnouncement(NodeAnnouncement),
    ChannelAnnouncement(ChannelAnnouncement),
    ChannelUpdate(ChannelUpdate),
}

/// One gossip message together with the time it was observed.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct GossipRecord {
    pub received_at: Timestamp,
    pub message: GossipMessage,
}

impl GossipRecord {
    pub fn kind(&self) -> MessageKind {
        match self.message {
            GossipMessage::NodeAnnouncement(_) => MessageKind::NodeAnnouncement,
            GossipMessage::ChannelAnnouncement(_) => MessageKind::ChannelAnnouncement,
            GossipMessage::ChannelUpdate(_) => MessageKind::ChannelUpdate,
        }
    }

    /// Ordering time: the signed message timestamp for node announcements and
    /// channel updates, `received_at` for channel announcements (which carry
    /// no timestamp of their own).
    pub fn timestamp(&self) -> Timestamp {
        match &self.message {
            GossipMessage::NodeAnnouncement(na) => u64::from(na.timestamp),
            GossipMessage::ChannelAnnouncement(_) => self.received_at,
            GossipMessage::ChannelUpdate(cu) => u64::from(cu.timestamp),
        }
    }

    pub fn key(&self) -> RecordKey {
        match &self.message {
            GossipMessage::NodeAnnouncement(na) => RecordKey::Node(na.node_id),
            GossipMessage::ChannelAnnouncement(ca) => RecordKey::Channel(ca.short_channel_id),
            GossipMessage::ChannelUpdate(cu) => {
                RecordKey::Update(cu.short_channel_id, cu.direction())
            }
        }
    }

    pub fn node_announcement(na: NodeAnnouncement) -> Self {
        GossipRecord {
            received_at: u64::from(na.timestamp),
            message: GossipMessage::NodeAnnouncement(na),
        }
    }

    pub fn channel_announcement(ca: ChannelAnnouncement, received_at: Timestamp) -> Self {
        GossipRecord {
            received_at,
            message: GossipMessage::ChannelAnnouncement(ca),
        }
    }

    pub fn channel_update(cu: ChannelUpdate) -> Self {
        GossipRecord {
            received_at: u64::from(cu.timestamp),
            message: GossipMessage::ChannelUpdate(cu),
        }
    }
}
