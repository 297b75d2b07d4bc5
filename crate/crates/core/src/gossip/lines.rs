//! Tab-separated gossip record format and payload containers.
//!
//! ```text
//! CU  scid  timestamp  direction  disabled  cltv  htlc_min  fee_base  fee_ppm  htlc_max|-
//! CA  scid  node_id_1  node_id_2  timestamp
//! NA  node_id  timestamp  alias_base64|-
//! ```
//!
//! `scid` is the packed 64-bit value in decimal. Blank lines are ignored.

use std::io::{self, BufRead, Read, Write};

use base64::engine::general_purpose::STANDARD as B64;
use base64::Engine;
use thiserror::Error;

use super::wire::{parse_bolt7_with, ParseError};
use super::{
    ChannelAnnouncement, ChannelUpdate, Direction, GossipMessage, GossipRecord, NodeAnnouncement,
    NodeId, ParseMode, PolicyFields, ShortChannelId, Timestamp,
};

#[derive(Debug, Error)]
pub enum ReadError {
    #[error("i/o error: {0}")]
    Io(#[from] io::Error),
    #[error("malformed record at line {line}: {reason}")]
    Malformed { line: usize, reason: String },
}

/// Records read from a stream plus the number of lines skipped in lenient
/// mode.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ReadOutcome {
    pub records: Vec<GossipRecord>,
    pub skipped: usize,
}

impl ReadOutcome {
    fn accept(
        &mut self,
        mode: ParseMode,
        line: usize,
        parsed: Result<GossipRecord, String>,
    ) -> Result<(), ReadError> {
        match parsed {
            Ok(rec) => self.records.push(rec),
            Err(reason) if mode == ParseMode::Strict => {
                return Err(ReadError::Malformed { line, reason })
            }
            Err(_) => self.skipped += 1,
        }
        Ok(())
    }
}

fn field<T: std::str::FromStr>(
    fields: &[&str],
    i: usize,
    name: &str,
) -> Result<T, String> {
    let raw = fields
        .get(i)
        .ok_or_else(|| format!("missing field {name}"))?;
    raw.parse::<T>()
        .map_err(|_| format!("invalid {name}: {raw:?}"))
}

fn flag(fields: &[&str], i: usize, name: &str) -> Result<bool, String> {
    match fields.get(i).copied() {
        Some("0") => Ok(false),
        Some("1") => Ok(true),
        Some(other) => Err(format!("invalid {name}: {other:?}")),
        None => Err(format!("missing field {name}")),
    }
}

fn expect_len(fields: &[&str], n: usize) -> Result<(), String> {
    if fields.len() != n {
        return Err(format!("expected {n} fields, got {}", fields.len()));
    }
    Ok(())
}

/// Parses one line of the record format.
pub fn parse_line(line: &str) -> Result<GossipRecord, String> {
    let fields: Vec<&str> = line.trim_end_matches(['\r', '\n']).split('\t').collect();
    match fields[0] {
        "CU" => {
            expect_len(&fields, 10)?;
            let scid = ShortChannelId::from_u64(field(&fields, 1, "scid")?);
            let timestamp: u32 = field(&fields, 2, "timestamp")?;
            let direction = match fields[3] {
                "0" => Direction::Forward,
                "1" => Direction::Backward,
                other => return Err(format!("invalid direction: {other:?}")),
            };
            let htlc_minimum_msat = field(&fields, 6, "htlc_min_msat")?;
            let htlc_maximum_msat = match fields[9] {
                "-" => None,
                _ => Some(field::<u64>(&fields, 9, "htlc_max_msat")?),
            };
            if htlc_maximum_msat.is_some_and(|max| max < htlc_minimum_msat) {
                return Err("htlc_max_msat below htlc_min_msat".into());
            }
            let cu = ChannelUpdate::new(
                scid,
                timestamp,
                PolicyFields {
                    direction,
                    disabled: flag(&fields, 4, "disabled")?,
                    cltv_expiry_delta: field(&fields, 5, "cltv")?,
                    htlc_minimum_msat,
                    fee_base_msat: field(&fields, 7, "fee_base_msat")?,
                    fee_proportional_millionths: field(&fields, 8, "fee_ppm")?,
                    htlc_maximum_msat,
                },
            );
            Ok(GossipRecord::channel_update(cu))
        }
        "CA" => {
            expect_len(&fields, 5)?;
            let scid = ShortChannelId::from_u64(field(&fields, 1, "scid")?);
            let n1: NodeId = fields[2].parse().map_err(|e| format!("node_id1: {e}"))?;
            let n2: NodeId = fields[3].parse().map_err(|e| format!("node_id2: {e}"))?;
            if n1 >= n2 {
                return Err("node ids must be distinct and ascending".into());
            }
            let ts: Timestamp = field(&fields, 4, "timestamp")?;
            Ok(GossipRecord::channel_announcement(
                ChannelAnnouncement::new(scid, n1, n2),
                ts,
            ))
        }
        "NA" => {
            expect_len(&fields, 4)?;
            let node_id: NodeId = fields[1].parse().map_err(|e| format!("node_id: {e}"))?;
            let timestamp: u32 = field(&fields, 2, "timestamp")?;
            if timestamp == 0 {
                return Err("timestamp must be positive".into());
            }
            let alias = match fields[3] {
                "-" => Vec::new(),
                b64 => B64.decode(b64).map_err(|e| format!("alias: {e}"))?,
            };
            if alias.len() > 32 {
                return Err("alias longer than 32 bytes".into());
            }
            Ok(GossipRecord::node_announcement(NodeAnnouncement {
                node_id,
                timestamp,
                features: Vec::new(),
                rgb_color: [0; 3],
                alias,
                addresses: Vec::new(),
            }))
        }
        other => Err(format!("unknown record tag {other:?}")),
    }
}

/// Formats a record as one line (without the trailing newline).
///
/// Only the fields the line format carries are written; features, addresses,
/// chain hashes and keys are dropped.
pub fn format_line(rec: &GossipRecord) -> String {
    match &rec.message {
        GossipMessage::ChannelUpdate(cu) => format!(
            "CU\t{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}",
            cu.short_channel_id.to_u64(),
            cu.timestamp,
            cu.direction().bit(),
            u8::from(cu.is_disabled()),
            cu.cltv_expiry_delta,
            cu.htlc_minimum_msat,
            cu.fee_base_msat,
            cu.fee_proportional_millionths,
            cu.htlc_maximum_msat
                .map_or_else(|| "-".to_string(), |m| m.to_string()),
        ),
        GossipMessage::ChannelAnnouncement(ca) => format!(
            "CA\t{}\t{}\t{}\t{}",
            ca.short_channel_id.to_u64(),
            ca.node_id_1,
            ca.node_id_2,
            rec.received_at
        ),
        GossipMessage::NodeAnnouncement(na) => format!(
            "NA\t{}\t{}\t{}",
            na.node_id,
            na.timestamp,
            if na.alias.is_empty() {
                "-".to_string()
            } else {
                B64.encode(&na.alias)
            }
        ),
    }
}

/// Reads the line record format. Line numbers in errors are 1-based.
pub fn read_records<R: BufRead>(reader: R, mode: ParseMode) -> Result<ReadOutcome, ReadError> {
    let mut out = ReadOutcome::default();
    for (i, line) in reader.lines().enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        out.accept(mode, i + 1, parse_line(&line))?;
    }
    Ok(out)
}

pub fn write_records<W: Write>(mut w: W, records: &[GossipRecord]) -> io::Result<()> {
    for rec in records {
        writeln!(w, "{}", format_line(rec))?;
    }
    Ok(())
}

fn describe(e: ParseError) -> String {
    e.to_string()
}

/// Reads hex-encoded BOLT#7 payloads, one per line.
///
/// A line may be prefixed by a receive timestamp and whitespace
/// (`1600000000 0102...`); otherwise `received_at` follows [`parse_bolt7`].
///
/// [`parse_bolt7`]: super::parse_bolt7
pub fn read_hex_payloads<R: BufRead>(reader: R, mode: ParseMode) -> Result<ReadOutcome, ReadError> {
    let mut out = ReadOutcome::default();
    for (i, line) in reader.lines().enumerate() {
        let line = line?;
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        let parsed = (|| {
            let (ts, payload) = match line.split_once(char::is_whitespace) {
                Some((ts, rest)) => (
                    Some(ts.parse::<Timestamp>().map_err(|_| format!("bad timestamp {ts:?}"))?),
                    rest.trim(),
                ),
                None => (None, line),
            };
            let bytes = hex::decode(payload).map_err(|e| format!("hex: {e}"))?;
            parse_bolt7_with(&bytes, mode, ts).map_err(describe)
        })();
        out.accept(mode, i + 1, parsed)?;
    }
    Ok(out)
}

/// Reads raw payloads framed by a 2-byte big-endian length.
///
/// Error positions count frames from 1. A frame cut off by end of input is
/// reported as malformed.
pub fn read_length_prefixed<R: Read>(mut reader: R, mode: ParseMode) -> Result<ReadOutcome, ReadError> {
    let mut data = Vec::new();
    reader.read_to_end(&mut data)?;
    let mut out = ReadOutcome::default();
    let mut pos = 0;
    let mut frame = 0;
    while pos < data.len() {
        frame += 1;
        if data.len() - pos < 2 {
            out.accept(mode, frame, Err("dangling length prefix".into()))?;
            break;
        }
        let len = u16::from_be_bytes([data[pos], data[pos + 1]]) as usize;
        pos += 2;
        if data.len() - pos < len {
            out.accept(mode, frame, Err("frame extends past end of input".into()))?;
            break;
        }
        let parsed = parse_bolt7_with(&data[pos..pos + len], mode, None).map_err(describe);
        out.accept(mode, frame, parsed)?;
        pos += len;
    }
    Ok(out)
}

/// Writes payloads with 2-byte big-endian length framing.
pub fn write_length_prefixed<W: Write>(mut w: W, payloads: &[Vec<u8>]) -> io::Result<()> {
    for p in payloads {
        let len = u16::try_from(p.len())
            .map_err(|_| io::Error::new(io::ErrorKind::InvalidInput, "payload exceeds 65535 bytes"))?;
        w.write_all(&len.to_be_bytes())?;
        w.write_all(p)?;
    }
    Ok(())
}
