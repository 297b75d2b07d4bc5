//! BOLT#7 binary payloads.
//!
//! Every payload starts with a 2-byte big-endian message type. Signatures are
//! skipped by length and never verified; [`encode_bolt7`] writes them as zero
//! bytes. Bytes after the fixed layout are ignored.

use thiserror::Error;

use super::{
    AddressDescriptor, ChannelAnnouncement, ChannelUpdate, GossipMessage, GossipRecord,
    MessageKind, NodeAnnouncement, NodeId, ParseMode, ShortChannelId, Timestamp,
};

const SIG_LEN: usize = 64;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ParseError {
    #[error("unknown message type {0}")]
    UnknownType(u16),
    #[error("truncated payload: need {needed} bytes at offset {offset}, {available} available")]
    Truncated {
        offset: usize,
        needed: usize,
        available: usize,
    },
    #[error("malformed field {field}: {reason}")]
    MalformedField {
        field: &'static str,
        reason: String,
    },
}

fn malformed(field: &'static str, reason: impl Into<String>) -> ParseError {
    ParseError::MalformedField {
        field,
        reason: reason.into(),
    }
}

struct Cursor<'a> {
    buf: &'a [u8],
    pos: usize,
}

impl<'a> Cursor<'a> {
    fn new(buf: &'a [u8]) -> Self {
        Cursor { buf, pos: 0 }
    }

    fn take(&mut self, n: usize) -> Result<&'a [u8], ParseError> {
        let available = self.buf.len() - self.pos;
        if n > available {
            return Err(ParseError::Truncated {
                offset: self.pos,
                needed: n,
                available,
            });
        }
        let out = &self.buf[self.pos..self.pos + n];
        self.pos += n;
        Ok(out)
    }

    fn array<const N: usize>(&mut self) -> Result<[u8; N], ParseError> {
        let mut out = [0u8; N];
        out.copy_from_slice(self.take(N)?);
        Ok(out)
    }

    fn u8(&mut self) -> Result<u8, ParseError> {
        Ok(self.take(1)?[0])
    }

    fn u16(&mut self) -> Result<u16, ParseError> {
        Ok(u16::from_be_bytes(self.array()?))
    }

    fn u32(&mut self) -> Result<u32, ParseError> {
        Ok(u32::from_be_bytes(self.array()?))
    }

    fn u64(&mut self) -> Result<u64, ParseError> {
        Ok(u64::from_be_bytes(self.array()?))
    }

    fn node_id(&mut self) -> Result<NodeId, ParseError> {
        Ok(NodeId(self.array()?))
    }

    fn scid(&mut self) -> Result<ShortChannelId, ParseError> {
        Ok(ShortChannelId::from_u64(self.u64()?))
    }

    fn var_bytes(&mut self) -> Result<&'a [u8], ParseError> {
        let len = self.u16()? as usize;
        self.take(len)
    }
}

/// Parses one payload in lenient mode.
///
/// `received_at` is taken from the message timestamp; channel announcements,
/// which have none, get `0`.
pub fn parse_bolt7(bytes: &[u8]) -> Result<GossipRecord, ParseError> {
    parse_bolt7_with(bytes, ParseMode::Lenient, None)
}

/// Parses one payload, stamping it with `received_at` when given.
pub fn parse_bolt7_with(
    bytes: &[u8],
    mode: ParseMode,
    received_at: Option<Timestamp>,
) -> Result<GossipRecord, ParseError> {
    let mut cur = Cursor::new(bytes);
    let msg_type = cur.u16()?;
    let message = match msg_type {
        256 => GossipMessage::ChannelAnnouncement(channel_announcement(&mut cur)?),
        257 => GossipMessage::NodeAnnouncement(node_announcement(&mut cur)?),
        258 => GossipMessage::ChannelUpdate(channel_update(&mut cur, mode)?),
        other => return Err(ParseError::UnknownType(other)),
    };
    let received_at = received_at.unwrap_or(match &message {
        GossipMessage::NodeAnnouncement(na) => u64::from(na.timestamp),
        GossipMessage::ChannelAnnouncement(_) => 0,
        GossipMessage::ChannelUpdate(cu) => u64::from(cu.timestamp),
    });
    Ok(GossipRecord {
        received_at,
        message,
    })
}

fn channel_announcement(cur: &mut Cursor<'_>) -> Result<ChannelAnnouncement, ParseError> {
    cur.take(4 * SIG_LEN)?;
    let features = cur.var_bytes()?.to_vec();
    let chain_hash = cur.array()?;
    let short_channel_id = cur.scid()?;
    let node_id_1 = cur.node_id()?;
    let node_id_2 = cur.node_id()?;
    let bitcoin_key_1 = cur.array()?;
    let bitcoin_key_2 = cur.array()?;
    if node_id_1 == node_id_2 {
        return Err(malformed("node_id_2", "both endpoints are the same node"));
    }
    if node_id_1 > node_id_2 {
        return Err(malformed("node_id_1", "endpoints not in ascending order"));
    }
    Ok(ChannelAnnouncement {
        features,
        chain_hash,
        short_channel_id,
        node_id_1,
        node_id_2,
        bitcoin_key_1,
        bitcoin_key_2,
    })
}

fn node_announcement(cur: &mut Cursor<'_>) -> Result<NodeAnnouncement, ParseError> {
    cur.take(SIG_LEN)?;
    let features = cur.var_bytes()?.to_vec();
    let timestamp = cur.u32()?;
    let node_id = cur.node_id()?;
    let rgb_color = cur.array()?;
    let alias_raw: [u8; 32] = cur.array()?;
    let addresses = parse_addresses(cur.var_bytes()?);
    if timestamp == 0 {
        return Err(malformed("timestamp", "must be positive"));
    }
    let alias_len = alias_raw.iter().rposition(|&b| b != 0).map_or(0, |i| i + 1);
    Ok(NodeAnnouncement {
        node_id,
        timestamp,
        features,
        rgb_color,
        alias: alias_raw[..alias_len].to_vec(),
        addresses,
    })
}

/// Fixed data length for the known descriptor types; DNS names are
/// length-prefixed.
fn address_len(kind: u8, rest: &[u8]) -> Option<usize> {
    match kind {
        1 => Some(6),
        2 => Some(18),
        3 => Some(12),
        4 => Some(37),
        5 => rest.first().map(|&l| 1 + l as usize + 2),
        _ => None,
    }
}

fn parse_addresses(mut block: &[u8]) -> Vec<AddressDescriptor> {
    let mut out = Vec::new();
    while let Some((&kind, rest)) = block.split_first() {
        match address_len(kind, rest) {
            Some(len) if len <= rest.len() => {
                out.push(AddressDescriptor {
                    kind,
                    data: rest[..len].to_vec(),
                });
                block = &rest[len..];
            }
            _ => {
                out.push(AddressDescriptor {
                    kind,
                    data: rest.to_vec(),
                });
                break;
            }
        }
    }
    out
}

fn channel_update(cur: &mut Cursor<'_>, mode: ParseMode) -> Result<ChannelUpdate, ParseError> {
    cur.take(SIG_LEN)?;
    let chain_hash = cur.array()?;
    let short_channel_id = cur.scid()?;
    let timestamp = cur.u32()?;
    let message_flags = cur.u8()?;
    let channel_flags = cur.u8()?;
    let cltv_expiry_delta = cur.u16()?;
    let htlc_minimum_msat = cur.u64()?;
    let fee_base_msat = cur.u32()?;
    let fee_proportional_millionths = cur.u32()?;
    let htlc_maximum_msat = if message_flags & 1 == 1 {
        Some(cur.u64()?)
    } else {
        None
    };
    if mode == ParseMode::Strict {
        if message_flags & !1 != 0 {
            return Err(malformed(
                "message_flags",
                format!("reserved bits set: {message_flags:#04x}"),
            ));
        }
        if channel_flags & !0b11 != 0 {
            return Err(malformed(
                "channel_flags",
                format!("reserved bits set: {channel_flags:#04x}"),
            ));
        }
    }
    if let Some(max) = htlc_maximum_msat {
        if max < htlc_minimum_msat {
            return Err(malformed(
                "htlc_maximum_msat",
                format!("{max} below htlc_minimum_msat {htlc_minimum_msat}"),
            ));
        }
    }
    Ok(ChannelUpdate {
        chain_hash,
        short_channel_id,
        timestamp,
        message_flags,
        channel_flags,
        cltv_expiry_delta,
        htlc_minimum_msat,
        fee_base_msat,
        fee_proportional_millionths,
        htlc_maximum_msat,
    })
}

/// Serializes a message to its BOLT#7 layout with zeroed signatures.
pub fn encode_bolt7(message: &GossipMessage) -> Vec<u8> {
    let mut out = Vec::with_capacity(430);
    let kind = match message {
        GossipMessage::NodeAnnouncement(_) => MessageKind::NodeAnnouncement,
        GossipMessage::ChannelAnnouncement(_) => MessageKind::ChannelAnnouncement,
        GossipMessage::ChannelUpdate(_) => MessageKind::ChannelUpdate,
    };
    out.extend_from_slice(&kind.wire_type().to_be_bytes());
    match message {
        GossipMessage::ChannelAnnouncement(ca) => {
            out.extend_from_slice(&[0u8; 4 * SIG_LEN]);
            put_var(&mut out, &ca.features);
            out.extend_from_slice(&ca.chain_hash);
            out.extend_from_slice(&ca.short_channel_id.to_u64().to_be_bytes());
            out.extend_from_slice(&ca.node_id_1.0);
            out.extend_from_slice(&ca.node_id_2.0);
            out.extend_from_slice(&ca.bitcoin_key_1);
            out.extend_from_slice(&ca.bitcoin_key_2);
        }
        GossipMessage::NodeAnnouncement(na) => {
            out.extend_from_slice(&[0u8; SIG_LEN]);
            put_var(&mut out, &na.features);
            out.extend_from_slice(&na.timestamp.to_be_bytes());
            out.extend_from_slice(&na.node_id.0);
            out.extend_from_slice(&na.rgb_color);
            let mut alias = [0u8; 32];
            let n = na.alias.len().min(32);
            alias[..n].copy_from_slice(&na.alias[..n]);
            out.extend_from_slice(&alias);
            let addresses: Vec<u8> = na
                .addresses
                .iter()
                .flat_map(|a| std::iter::once(a.kind).chain(a.data.iter().copied()))
                .collect();
            put_var(&mut out, &addresses);
        }
        GossipMessage::ChannelUpdate(cu) => {
            out.extend_from_slice(&[0u8; SIG_LEN]);
            out.extend_from_slice(&cu.chain_hash);
            out.extend_from_slice(&cu.short_channel_id.to_u64().to_be_bytes());
            out.extend_from_slice(&cu.timestamp.to_be_bytes());
            out.push(cu.message_flags);
            out.push(cu.channel_flags);
            out.extend_from_slice(&cu.cltv_expiry_delta.to_be_bytes());
            out.extend_from_slice(&cu.htlc_minimum_msat.to_be_bytes());
            out.extend_from_slice(&cu.fee_base_msat.to_be_bytes());
            out.extend_from_slice(&cu.fee_proportional_millionths.to_be_bytes());
            if let Some(max) = cu.htlc_maximum_msat {
                out.extend_from_slice(&max.to_be_bytes());
            }
        }
    }
    out
}

fn put_var(out: &mut Vec<u8>, bytes: &[u8]) {
    let len = u16::try_from(bytes.len()).expect("variable-length field exceeds u16");
    out.extend_from_slice(&len.to_be_bytes());
    out.extend_from_slice(bytes);
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gossip::Direction;

    /// channel_update assembled byte by byte from the fixed offsets.
    fn hand_packed_update() -> Vec<u8> {
        let mut b = vec![0x01, 0x02];
        b.extend_from_slice(&[0xAA; 64]); // signature
        b.extend_from_slice(&[0x6F; 32]); // chain hash
        b.extend_from_slice(&[0, 0, 0x10, 0, 0, 0x20, 0, 0x01]); // scid 16x32x1
        b.extend_from_slice(&[0x5F, 0x5E, 0x10, 0x00]); // timestamp
        b.push(0x01); // message_flags: htlc max present
        b.push(0x03); // channel_flags: direction 1, disabled
        b.extend_from_slice(&[0x00, 0x28]); // cltv
        b.extend_from_slice(&[0, 0, 0, 0, 0, 0, 0x03, 0xE8]); // htlc min 1000
        b.extend_from_slice(&[0x00, 0x00, 0x03, 0xE8]); // fee base
        b.extend_from_slice(&[0x00, 0x00, 0x00, 0x64]); // ppm 100
        b.extend_from_slice(&[0, 0, 0, 0, 0x3B, 0x9A, 0xCA, 0x00]); // htlc max 1e9
        b
    }

    #[test]
    fn hand_packed_channel_update() {
        let rec = parse_bolt7(&hand_packed_update()).unwrap();
        let GossipMessage::ChannelUpdate(cu) = rec.message else {
            panic!("wrong kind");
        };
        assert_eq!(cu.timestamp, 1_600_000_000);
        assert_eq!(cu.cltv_expiry_delta, 40);
        assert_eq!(cu.fee_base_msat, 1000);
        assert_eq!(cu.fee_proportional_millionths, 100);
        assert_eq!(cu.htlc_minimum_msat, 1000);
        assert_eq!(cu.htlc_maximum_msat, Some(1_000_000_000));
        assert_eq!(cu.short_channel_id.to_string(), "16x32x1");
        assert_eq!(cu.direction(), Direction::Backward);
        assert!(cu.is_disabled());
        assert_eq!(rec.received_at, 1_600_000_000);
    }

    #[test]
    fn type_only_is_truncated() {
        assert!(matches!(
            parse_bolt7(&[0x01, 0x01]),
            Err(ParseError::Truncated { .. })
        ));
        assert!(matches!(parse_bolt7(&[0x01]), Err(ParseError::Truncated { .. })));
        assert!(matches!(parse_bolt7(&[]), Err(ParseError::Truncated { .. })));
    }

    #[test]
    fn unknown_type() {
        assert_eq!(parse_bolt7(&[0x01, 0x03]), Err(ParseError::UnknownType(259)));
    }

    #[test]
    fn trailing_bytes_ignored() {
        let mut b = hand_packed_update();
        let base = parse_bolt7(&b).unwrap();
        b.extend_from_slice(&[9, 9, 9]);
        assert_eq!(parse_bolt7(&b).unwrap(), base);
    }

    #[test]
    fn strict_rejects_reserved_bits() {
        let mut b = hand_packed_update();
        b[2 + 64 + 32 + 8 + 4 + 1] = 0x83;
        assert!(parse_bolt7(&b).is_ok());
        assert!(matches!(
            parse_bolt7_with(&b, ParseMode::Strict, None),
            Err(ParseError::MalformedField { field: "channel_flags", .. })
        ));
    }

    #[test]
    fn htlc_max_below_min_rejected() {
        let mut b = hand_packed_update();
        let n = b.len();
        b[n - 8..].copy_from_slice(&10u64.to_be_bytes());
        assert!(matches!(
            parse_bolt7(&b),
            Err(ParseError::MalformedField { field: "htlc_maximum_msat", .. })
        ));
    }

    #[test]
    fn announcement_roundtrip_and_ordering() {
        let ca = ChannelAnnouncement::new(
            ShortChannelId::new(700_000, 12, 0).unwrap(),
            NodeId::synthetic(1),
            NodeId::synthetic(2),
        );
        let bytes = encode_bolt7(&GossipMessage::ChannelAnnouncement(ca.clone()));
        assert_eq!(bytes.len(), 2 + 256 + 2 + 32 + 8 + 4 * 33);
        let rec = parse_bolt7_with(&bytes, ParseMode::Lenient, Some(77)).unwrap();
        assert_eq!(rec.received_at, 77);
        assert_eq!(rec.message, GossipMessage::ChannelAnnouncement(ca.clone()));

        let swapped = ChannelAnnouncement {
            node_id_1: ca.node_id_2,
            node_id_2: ca.node_id_1,
            ..ca
        };
        let bytes = encode_bolt7(&GossipMessage::ChannelAnnouncement(swapped));
        assert!(matches!(parse_bolt7(&bytes), Err(ParseError::MalformedField { .. })));
    }

    #[test]
    fn node_announcement_addresses() {
        let na = NodeAnnouncement {
            node_id: NodeId::synthetic(5),
            timestamp: 1_650_000_000,
            features: vec![0x08, 0x00],
            rgb_color: [1, 2, 3],
            alias: b"satoshi".to_vec(),
            addresses: vec![
                AddressDescriptor {
                    kind: 1,
                    data: vec![127, 0, 0, 1, 0x26, 0x07],
                },
                AddressDescriptor {
                    kind: 5,
                    data: [&[4u8][..], b"ln.x", &[0x26, 0x07]].concat(),
                },
                AddressDescriptor {
                    kind: 42,
                    data: vec![1, 2, 3],
                },
            ],
        };
        let msg = GossipMessage::NodeAnnouncement(na);
        let bytes = encode_bolt7(&msg);
        assert_eq!(parse_bolt7(&bytes).unwrap().message, msg);
    }
}
