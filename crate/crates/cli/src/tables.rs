//! CSV tables written by the pipeline besides `metrics.csv`, and readers for
//! the ones the report step consumes.
//!
//! Every row repeats the snapshot timestamp and the seed that produced it.

use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};

use ln_topo_core::gossip::Timestamp;
use ln_topo_core::metrics::Mode;
use ln_topo_core::routing::{HopStatistics, HopTally, ModelKind, RoutingError};
use ln_topo_core::stability::{KsResult, Scope, SnapshotPairStats, StabilitySeries};
use thiserror::Error;

pub const LORENZ_HEADER: &str = "timestamp,mode,n_samples,seed,population_share,betweenness_share";
pub const HOPS_HEADER: &str = "timestamp,model,seed,amount_msat,node_id_hex,hops";
pub const HOPCURVE_HEADER: &str = "timestamp,model,seed,amount_msat,rank_fraction,cum_hop_share";
pub const HOPSUMMARY_HEADER: &str = "timestamp,model,status,gini,alpha,r2,n_requests,n_routed,amount_msat,seed";

#[derive(Debug, Error)]
pub enum TableError {
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: io::Error },
    #[error("{path}:{line}: {reason}")]
    Malformed { path: PathBuf, line: usize, reason: String },
}

pub fn lorenz_file(at: Timestamp) -> String {
    format!("lorenz_{at}.csv")
}

pub fn hops_file(model: ModelKind, at: Timestamp) -> String {
    format!("hops_{model}_{at}.csv")
}

pub fn hopcurve_file(model: ModelKind, at: Timestamp) -> String {
    format!("hopcurve_{model}_{at}.csv")
}

fn mode_cells(mode: Mode) -> (String, String, String) {
    match mode {
        Mode::Exact => ("exact".into(), String::new(), String::new()),
        Mode::Sampled { n_samples, seed } => ("sampled".into(), n_samples.to_string(), seed.to_string()),
    }
}

pub fn write_lorenz<W: Write>(mut w: W, at: Timestamp, curve: &[(f64, f64)], mode: Mode) -> io::Result<()> {
    writeln!(w, "{LORENZ_HEADER}")?;
    let (m, n, s) = mode_cells(mode);
    for (x, y) in curve {
        writeln!(w, "{at},{m},{n},{s},{x},{y}")?;
    }
    Ok(())
}

pub fn write_hops<W: Write>(mut w: W, at: Timestamp, tally: &HopTally, seed: u64, amount: u64) -> io::Result<()> {
    writeln!(w, "{HOPS_HEADER}")?;
    for (id, c) in tally.ids.iter().zip(&tally.counts) {
        writeln!(w, "{at},{},{seed},{amount},{},{c}", tally.model, id.to_hex())?;
    }
    Ok(())
}

pub fn write_hopcurve<W: Write>(
    mut w: W,
    at: Timestamp,
    model: ModelKind,
    curve: &[(f64, f64)],
    seed: u64,
    amount: u64,
) -> io::Result<()> {
    writeln!(w, "{HOPCURVE_HEADER}")?;
    for (x, y) in curve {
        writeln!(w, "{at},{model},{seed},{amount},{x},{y}")?;
    }
    Ok(())
}

/// One `hopsummary.csv` row per (snapshot, model).
pub struct HopSummaryRow<'a> {
    pub at: Timestamp,
    pub model: ModelKind,
    pub outcome: Result<(&'a HopTally, &'a HopStatistics), &'a RoutingError>,
    pub amount_msat: u64,
    pub seed: u64,
}

pub fn routing_error_code(e: &RoutingError) -> &'static str {
    match e {
        RoutingError::PolicyUnusable(_) => "policy_unusable",
        RoutingError::NodeNotFound(_) => "node_not_found",
        RoutingError::IndexNotFound(_) => "index_not_found",
        RoutingError::GraphTooSmall(_) => "graph_too_small",
        RoutingError::EmptyTally => "empty_tally",
    }
}

pub fn write_hopsummary<W: Write>(mut w: W, rows: &[HopSummaryRow<'_>]) -> io::Result<()> {
    writeln!(w, "{HOPSUMMARY_HEADER}")?;
    for r in rows {
        let (at, model, amount, seed) = (r.at, r.model, r.amount_msat, r.seed);
        match r.outcome {
            Ok((tally, stats)) => {
                let (alpha, r2) = match stats.fit {
                    Some(f) => (f.alpha.to_string(), f.r_squared.to_string()),
                    None => Default::default(),
                };
                writeln!(
                    w,
                    "{at},{model},ok,{},{alpha},{r2},{},{},{amount},{seed}",
                    stats.gini, tally.n_requests, tally.n_routed
                )?;
            }
            Err(e) => writeln!(w, "{at},{model},error:{},,,,,,{amount},{seed}", routing_error_code(e))?,
        }
    }
    Ok(())
}

/// Parsed data rows of a small CSV file whose header must match exactly.
fn read_rows(path: &Path, header: &str) -> Result<Vec<(usize, Vec<String>)>, TableError> {
    let text = fs::read_to_string(path).map_err(|source| TableError::Io { path: path.into(), source })?;
    let mut lines = text.lines().enumerate();
    let malformed = |line: usize, reason: String| TableError::Malformed { path: path.into(), line, reason };
    match lines.next() {
        Some((_, h)) if h == header => {}
        _ => return Err(malformed(1, format!("expected header {header:?}"))),
    }
    let width = header.split(',').count();
    lines
        .filter(|(_, l)| !l.is_empty())
        .map(|(i, l)| {
            let cells: Vec<String> = l.split(',').map(str::to_string).collect();
            if cells.len() != width {
                return Err(malformed(i + 1, format!("expected {width} cells, found {}", cells.len())));
            }
            Ok((i + 1, cells))
        })
        .collect()
}

fn num<T: std::str::FromStr>(path: &Path, line: usize, cell: &str, what: &str) -> Result<T, TableError> {
    cell.parse().map_err(|_| TableError::Malformed {
        path: path.into(),
        line,
        reason: format!("bad {what} {cell:?}"),
    })
}

fn opt(path: &Path, line: usize, cell: &str, what: &str) -> Result<Option<f64>, TableError> {
    if cell.is_empty() {
        Ok(None)
    } else {
        num(path, line, cell, what).map(Some)
    }
}

/// Reads a two-column curve (the last two cells of each row) and the
/// timestamp of its first row.
/// A curve file's timestamp (if present) and its points.
pub type TimedCurve = (Option<Timestamp>, Vec<(f64, f64)>);

fn read_curve(path: &Path, header: &str) -> Result<TimedCurve, TableError> {
    let rows = read_rows(path, header)?;
    let mut at = None;
    let mut curve = Vec::with_capacity(rows.len());
    for (line, cells) in rows {
        let t: Timestamp = num(path, line, &cells[0], "timestamp")?;
        if at.replace(t).is_some_and(|prev| prev != t) {
            return Err(TableError::Malformed { path: path.into(), line, reason: "mixed timestamps".into() });
        }
        let k = cells.len();
        curve.push((num(path, line, &cells[k - 2], "x")?, num(path, line, &cells[k - 1], "y")?));
    }
    Ok((at, curve))
}

pub fn read_lorenz(path: &Path) -> Result<TimedCurve, TableError> {
    read_curve(path, LORENZ_HEADER)
}

pub fn read_hopcurve(path: &Path) -> Result<TimedCurve, TableError> {
    read_curve(path, HOPCURVE_HEADER)
}

fn parse_scope(s: &str) -> Option<Scope> {
    match s {
        "full" => Some(Scope::Full),
        "sample_mean" => Some(Scope::SampleMean),
        "longrange" => Some(Scope::LongRange),
        _ => s.strip_prefix("sample_")?.parse().ok().map(Scope::Sample),
    }
}

/// Reads a `stability.csv` written by [`StabilitySeries::write_csv`].
pub fn read_stability(path: &Path) -> Result<StabilitySeries, TableError> {
    let mut series = StabilitySeries::default();
    for (line, c) in read_rows(path, ln_topo_core::stability::CSV_HEADER)? {
        let ks = match (opt(path, line, &c[5], "ks_D")?, opt(path, line, &c[6], "ks_p")?) {
            (Some(statistic), Some(p_value)) => Some(KsResult { statistic, p_value }),
            _ => None,
        };
        series.rows.push(SnapshotPairStats {
            t: num(path, line, &c[0], "t")?,
            t_next: num(path, line, &c[1], "t_next")?,
            i_node: opt(path, line, &c[2], "i_node")?,
            i_channel: opt(path, line, &c[3], "i_channel")?,
            hop_slack: num(path, line, &c[4], "hop_slack")?,
            ks,
            wasserstein: opt(path, line, &c[7], "wasserstein")?,
            wasserstein_norm: opt(path, line, &c[8], "wasserstein_norm")?,
            scope: parse_scope(&c[9]).ok_or_else(|| TableError::Malformed {
                path: path.into(),
                line,
                reason: format!("bad scope {:?}", c[9]),
            })?,
        });
    }
    Ok(series)
}

#[cfg(test)]
mod tests {
    use super::*;
    use ln_topo_core::stability::Scope;

    #[test]
    fn lorenz_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join(lorenz_file(7));
        let curve = vec![(0.0, 0.0), (0.5, 0.25), (1.0, 1.0)];
        let mut buf = Vec::new();
        write_lorenz(&mut buf, 7, &curve, Mode::Sampled { n_samples: 3, seed: 9 }).unwrap();
        fs::write(&path, &buf).unwrap();
        assert_eq!(read_lorenz(&path).unwrap(), (Some(7), curve));
        assert!(String::from_utf8(buf).unwrap().lines().nth(1).unwrap().starts_with("7,sampled,3,9,"));
    }

    #[test]
    fn stability_round_trip() {
        let row = |scope, ks| SnapshotPairStats {
            t: 1,
            t_next: 2,
            scope,
            hop_slack: 1,
            i_node: Some(0.5),
            i_channel: None,
            ks,
            wasserstein: Some(0.125),
            wasserstein_norm: Some(0.0625),
        };
        let series = StabilitySeries {
            rows: vec![
                row(Scope::Full, Some(KsResult { statistic: 0.25, p_value: 0.75 })),
                row(Scope::Sample(12), None),
                row(Scope::SampleMean, None),
                row(Scope::LongRange, None),
            ],
            skipped_samples: vec![],
        };
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("stability.csv");
        let mut buf = Vec::new();
        series.write_csv(&mut buf).unwrap();
        fs::write(&path, buf).unwrap();
        assert_eq!(read_stability(&path).unwrap(), series);
    }

    #[test]
    fn rejects_wrong_header() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("x.csv");
        fs::write(&path, "a,b\n1,2\n").unwrap();
        assert!(matches!(read_hopcurve(&path), Err(TableError::Malformed { line: 1, .. })));
    }
}
