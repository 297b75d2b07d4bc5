//! Snapshot directory format.
//!
//! - `nodes.csv`: `node_id_hex,alias_base64` (`-` for no alias)
//! - `channels.csv`: scid, both endpoints, then seven policy columns per
//!   direction (`-` throughout when a policy is absent)
//! - `meta.csv`: `at,liveness_window`
//!
//! `meta.csv` is optional on read; without it `at` is the newest policy
//! timestamp and the window is [`DEFAULT_LIVENESS_WINDOW`].

use std::collections::BTreeMap;
use std::fs;
use std::io::{self, BufRead, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};

use base64::engine::general_purpose::STANDARD as B64;
use base64::Engine;
use thiserror::Error;

use super::{Channel, ChannelPolicy, Snapshot, DEFAULT_LIVENESS_WINDOW};
use crate::gossip::{Direction, NodeId, ShortChannelId};

pub const NODES_FILE: &str = "nodes.csv";
pub const CHANNELS_FILE: &str = "channels.csv";
pub const META_FILE: &str = "meta.csv";

const NODES_HEADER: &str = "node_id_hex,alias_base64";
const META_HEADER: &str = "at,liveness_window";
const POLICY_COLUMNS: [&str; 7] = [
    "fee_base", "fee_ppm", "cltv", "htlc_min", "htlc_max", "disabled", "last_update",
];

fn channels_header() -> String {
    let mut cols = vec!["scid_u64".to_string(), "node_a_hex".into(), "node_b_hex".into()];
    for side in ["dirA", "dirB"] {
        cols.extend(POLICY_COLUMNS.iter().map(|c| format!("{side}_{c}")));
    }
    cols.join(",")
}

#[derive(Debug, Error)]
pub enum SnapshotIoError {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: io::Error,
    },
    #[error("{path}:{line}: {reason}")]
    SchemaMismatch {
        path: PathBuf,
        line: usize,
        reason: String,
    },
}

fn io_err(path: &Path) -> impl FnOnce(io::Error) -> SnapshotIoError + '_ {
    move |source| SnapshotIoError::Io {
        path: path.to_path_buf(),
        source,
    }
}

fn write_policy(out: &mut String, p: &Option<ChannelPolicy>) {
    match p {
        None => out.push_str(",-,-,-,-,-,-,-"),
        Some(p) => {
            let max = p
                .htlc_maximum_msat
                .map_or_else(|| "-".to_string(), |m| m.to_string());
            out.push_str(&format!(
                ",{},{},{},{},{},{},{}",
                p.fee_base_msat,
                p.fee_proportional_millionths,
                p.cltv_expiry_delta,
                p.htlc_minimum_msat,
                max,
                u8::from(p.disabled),
                p.last_update
            ));
        }
    }
}

/// Writes the three snapshot files into `dir`, creating it if needed.
pub fn write_snapshot(snapshot: &Snapshot, dir: &Path) -> Result<(), SnapshotIoError> {
    fs::create_dir_all(dir).map_err(io_err(dir))?;

    let path = dir.join(NODES_FILE);
    let mut w = BufWriter::new(fs::File::create(&path).map_err(io_err(&path))?);
    let mut body = format!("{NODES_HEADER}\n");
    for (id, alias) in &snapshot.nodes {
        let alias = if alias.is_empty() {
            "-".to_string()
        } else {
            B64.encode(alias)
        };
        body.push_str(&format!("{id},{alias}\n"));
    }
    w.write_all(body.as_bytes()).map_err(io_err(&path))?;
    w.flush().map_err(io_err(&path))?;

    let path = dir.join(CHANNELS_FILE);
    let mut w = BufWriter::new(fs::File::create(&path).map_err(io_err(&path))?);
    let mut body = channels_header();
    body.push('\n');
    for ch in snapshot.channels.values() {
        body.push_str(&format!(
            "{},{},{}",
            ch.scid.to_u64(),
            ch.endpoint_a,
            ch.endpoint_b
        ));
        write_policy(&mut body, &ch.policy_a);
        write_policy(&mut body, &ch.policy_b);
        body.push('\n');
    }
    w.write_all(body.as_bytes()).map_err(io_err(&path))?;
    w.flush().map_err(io_err(&path))?;

    let path = dir.join(META_FILE);
    fs::write(
        &path,
        format!("{META_HEADER}\n{},{}\n", snapshot.at, snapshot.liveness_window),
    )
    .map_err(io_err(&path))
}

struct Rows {
    path: PathBuf,
    lines: Vec<(usize, String)>,
}

impl Rows {
    fn open(path: PathBuf, header: &str) -> Result<Self, SnapshotIoError> {
        let file = fs::File::open(&path).map_err(io_err(&path))?;
        let mut lines = Vec::new();
        let mut first = true;
        for (i, line) in BufReader::new(file).lines().enumerate() {
            let line = line.map_err(io_err(&path))?;
            if first {
                if line.trim_end() != header {
                    return Err(SnapshotIoError::SchemaMismatch {
                        path,
                        line: 1,
                        reason: format!("expected header {header:?}"),
                    });
                }
                first = false;
                continue;
            }
            if !line.trim().is_empty() {
                lines.push((i + 1, line.trim_end().to_string()));
            }
        }
        if first {
            return Err(SnapshotIoError::SchemaMismatch {
                path,
                line: 0,
                reason: "missing header".into(),
            });
        }
        Ok(Rows { path, lines })
    }

    fn mismatch(&self, line: usize, reason: impl Into<String>) -> SnapshotIoError {
        SnapshotIoError::SchemaMismatch {
            path: self.path.clone(),
            line,
            reason: reason.into(),
        }
    }
}

fn parse<T: std::str::FromStr>(raw: &str, what: &str) -> Result<T, String> {
    raw.parse().map_err(|_| format!("invalid {what}: {raw:?}"))
}

fn parse_policy(cols: &[&str], direction: Direction) -> Result<Option<ChannelPolicy>, String> {
    if cols.iter().all(|c| *c == "-") {
        return Ok(None);
    }
    let disabled = match cols[5] {
        "0" => false,
        "1" => true,
        other => return Err(format!("invalid disabled flag {other:?}")),
    };
    Ok(Some(ChannelPolicy {
        direction,
        fee_base_msat: parse(cols[0], "fee_base")?,
        fee_proportional_millionths: parse(cols[1], "fee_ppm")?,
        cltv_expiry_delta: parse(cols[2], "cltv")?,
        htlc_minimum_msat: parse(cols[3], "htlc_min")?,
        htlc_maximum_msat: match cols[4] {
            "-" => None,
            raw => Some(parse(raw, "htlc_max")?),
        },
        disabled,
        last_update: parse(cols[6], "last_update")?,
    }))
}

/// Reads a snapshot directory written by [`write_snapshot`].
pub fn read_snapshot(dir: &Path) -> Result<Snapshot, SnapshotIoError> {
    let nodes_rows = Rows::open(dir.join(NODES_FILE), NODES_HEADER)?;
    let mut nodes = BTreeMap::new();
    for (line, row) in &nodes_rows.lines {
        let cols: Vec<&str> = row.split(',').collect();
        if cols.len() != 2 {
            return Err(nodes_rows.mismatch(*line, "expected 2 columns"));
        }
        let id: NodeId = cols[0]
            .parse()
            .map_err(|e| nodes_rows.mismatch(*line, format!("node id: {e}")))?;
        let alias = match cols[1] {
            "-" => Vec::new(),
            b64 => B64
                .decode(b64)
                .map_err(|e| nodes_rows.mismatch(*line, format!("alias: {e}")))?,
        };
        if nodes.insert(id, alias).is_some() {
            return Err(nodes_rows.mismatch(*line, format!("duplicate node {id}")));
        }
    }

    let ch_rows = Rows::open(dir.join(CHANNELS_FILE), &channels_header())?;
    let mut channels = BTreeMap::new();
    for (line, row) in &ch_rows.lines {
        let cols: Vec<&str> = row.split(',').collect();
        if cols.len() != 17 {
            return Err(ch_rows.mismatch(*line, format!("expected 17 columns, got {}", cols.len())));
        }
        let bad = |reason: String| ch_rows.mismatch(*line, reason);
        let scid = ShortChannelId::from_u64(parse(cols[0], "scid").map_err(bad)?);
        let endpoint_a: NodeId = cols[1].parse().map_err(|e| bad(format!("node_a: {e}")))?;
        let endpoint_b: NodeId = cols[2].parse().map_err(|e| bad(format!("node_b: {e}")))?;
        if endpoint_a >= endpoint_b {
            return Err(bad("endpoints not in canonical order".into()));
        }
        for id in [endpoint_a, endpoint_b] {
            if !nodes.contains_key(&id) {
                return Err(bad(format!("endpoint {id} not in {NODES_FILE}")));
            }
        }
        let channel = Channel {
            scid,
            endpoint_a,
            endpoint_b,
            policy_a: parse_policy(&cols[3..10], Direction::Forward).map_err(bad)?,
            policy_b: parse_policy(&cols[10..17], Direction::Backward).map_err(bad)?,
        };
        if channels.insert(scid, channel).is_some() {
            return Err(bad(format!("duplicate scid {scid}")));
        }
    }

    let meta_path = dir.join(META_FILE);
    let (at, liveness_window) = if meta_path.exists() {
        let meta = Rows::open(meta_path, META_HEADER)?;
        let (line, row) = meta
            .lines
            .first()
            .ok_or_else(|| meta.mismatch(1, "missing data row"))?;
        let cols: Vec<&str> = row.split(',').collect();
        if cols.len() != 2 {
            return Err(meta.mismatch(*line, "expected 2 columns"));
        }
        (
            parse(cols[0], "at").map_err(|e| meta.mismatch(*line, e))?,
            parse(cols[1], "liveness_window").map_err(|e| meta.mismatch(*line, e))?,
        )
    } else {
        let newest = channels
            .values()
            .flat_map(|c: &Channel| [c.policy_a, c.policy_b])
            .flatten()
            .map(|p| p.last_update)
            .max()
            .unwrap_or(0);
        (newest, DEFAULT_LIVENESS_WINDOW)
    };

    let snapshot = Snapshot {
        at,
        liveness_window,
        nodes,
        channels,
    };
    snapshot
        .validate()
        .map_err(|e| SnapshotIoError::SchemaMismatch {
            path: dir.to_path_buf(),
            line: 0,
            reason: e.to_string(),
        })?;
    Ok(snapshot)
}
