//! Topological stability between consecutive snapshots.
//!
//! Node and channel intersection rates measure how much of snapshot `t`
//! survives into `t+1`; KS and Wasserstein-1 statistics compare the degree
//! distributions. [`stability_series`] evaluates these over a whole schedule,
//! optionally on ForestFire subgraphs, plus a long-range comparison between
//! the first and last snapshots.

mod stats;

use std::fmt;
use std::io::{self, Write};

use thiserror::Error;

use crate::gossip::Timestamp;
use crate::graph::{sample_forestfire_nodes, DegreeDistribution, ForestFireConfig, TopologyGraph};
use crate::par;
use crate::snapshot::Snapshot;

pub use stats::{kolmogorov_sf, ks_two_sample, wasserstein1, KsResult};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum StabilityError {
    #[error("base snapshot has nothing to compare")]
    EmptyBase,
    #[error("empty sample")]
    EmptySample,
    #[error("need at least 2 snapshots, got {0}")]
    TooFewSnapshots(usize),
}

/// `|V_t ∩ V_{t+1}| / |V_t|`, matching nodes by id.
pub fn node_intersection_rate(t: &TopologyGraph, next: &TopologyGraph) -> Result<f64, StabilityError> {
    if t.is_empty() {
        return Err(StabilityError::EmptyBase);
    }
    let shared = t.ids().iter().filter(|id| next.index_of(id).is_some()).count();
    Ok(shared as f64 / t.node_count() as f64)
}

/// Fraction of channels of `t` between shared nodes whose endpoints are at
/// most `1 + hop_slack` hops apart in `next`.
pub fn channel_intersection_rate(
    t: &TopologyGraph,
    next: &TopologyGraph,
    hop_slack: u32,
) -> Result<f64, StabilityError> {
    let map: Vec<Option<u32>> = t.ids().iter().map(|id| next.index_of(id)).collect();
    let limit = 1 + hop_slack;
    let (kept, total) = par::map_reduce_chunks(
        t.node_count(),
        || (0u64, 0u64),
        |(mut kept, mut total), range| {
            let mut ball = BoundedBfs::new(next.node_count());
            for u in range {
                let Some(nu) = map[u] else { continue };
                let targets: Vec<u32> = t
                    .neighbors(u as u32)
                    .iter()
                    .filter(|&&v| v as usize > u)
                    .filter_map(|&v| map[v as usize])
                    .collect();
                if targets.is_empty() {
                    continue;
                }
                total += targets.len() as u64;
                if hop_slack == 0 {
                    kept += targets.iter().filter(|&&nv| next.has_edge(nu, nv)).count() as u64;
                } else {
                    ball.run(next, nu, limit);
                    kept += targets.iter().filter(|&&nv| ball.within(nv)).count() as u64;
                }
            }
            (kept, total)
        },
        |a, b| (a.0 + b.0, a.1 + b.1),
    );
    if total == 0 {
        return Err(StabilityError::EmptyBase);
    }
    Ok(kept as f64 / total as f64)
}

/// Depth-limited BFS with a generation-stamped visited set.
struct BoundedBfs {
    stamp: Vec<u32>,
    generation: u32,
    frontier: Vec<u32>,
    next: Vec<u32>,
}

impl BoundedBfs {
    fn new(n: usize) -> Self {
        BoundedBfs { stamp: vec![0; n], generation: 0, frontier: Vec::new(), next: Vec::new() }
    }

    fn run(&mut self, g: &TopologyGraph, source: u32, depth: u32) {
        self.generation += 1;
        self.stamp[source as usize] = self.generation;
        self.frontier.clear();
        self.frontier.push(source);
        for _ in 0..depth {
            self.next.clear();
            for &u in &self.frontier {
                for &w in g.neighbors(u) {
                    if self.stamp[w as usize] != self.generation {
                        self.stamp[w as usize] = self.generation;
                        self.next.push(w);
                    }
                }
            }
            std::mem::swap(&mut self.frontier, &mut self.next);
        }
    }

    fn within(&self, v: u32) -> bool {
        self.stamp[v as usize] == self.generation
    }
}

/// KS test on two degree distributions.
pub fn ks_degrees(a: &DegreeDistribution, b: &DegreeDistribution) -> Result<KsResult, StabilityError> {
    ks_two_sample(&a.as_f64(), &b.as_f64())
}

/// Wasserstein-1 distance between two degree distributions, in degree units.
pub fn wasserstein_degrees(a: &DegreeDistribution, b: &DegreeDistribution) -> Result<f64, StabilityError> {
    wasserstein1(&a.as_f64(), &b.as_f64())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Scope {
    Full,
    /// The `k`-th ForestFire subgraph.
    Sample(usize),
    /// Mean over all subgraphs of one transition.
    SampleMean,
    /// First versus last snapshot.
    LongRange,
}

impl fmt::Display for Scope {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Scope::Full => f.write_str("full"),
            Scope::Sample(k) => write!(f, "sample_{k}"),
            Scope::SampleMean => f.write_str("sample_mean"),
            Scope::LongRange => f.write_str("longrange"),
        }
    }
}

/// Statistics for one snapshot transition. Values that are undefined for
/// the pair (for instance no shared channels) are `None`.
#[derive(Debug, Clone, PartialEq)]
pub struct SnapshotPairStats {
    pub t: Timestamp,
    pub t_next: Timestamp,
    pub scope: Scope,
    pub hop_slack: u32,
    pub i_node: Option<f64>,
    pub i_channel: Option<f64>,
    pub ks: Option<KsResult>,
    pub wasserstein: Option<f64>,
    /// Wasserstein distance divided by the mean degree at `t`.
    pub wasserstein_norm: Option<f64>,
}

/// Compares two graphs.
pub fn pair_stats(
    t: Timestamp,
    t_next: Timestamp,
    a: &TopologyGraph,
    b: &TopologyGraph,
    hop_slack: u32,
    scope: Scope,
) -> SnapshotPairStats {
    let (da, db) = (DegreeDistribution::from_graph(a), DegreeDistribution::from_graph(b));
    let wasserstein = wasserstein_degrees(&da, &db).ok();
    let mean = da.mean();
    SnapshotPairStats {
        t,
        t_next,
        scope,
        hop_slack,
        i_node: node_intersection_rate(a, b).ok(),
        i_channel: channel_intersection_rate(a, b, hop_slack).ok(),
        ks: ks_degrees(&da, &db).ok(),
        wasserstein,
        wasserstein_norm: wasserstein.filter(|_| mean > 0.0).map(|w| w / mean),
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StabilityConfig {
    pub hop_slack: u32,
    /// ForestFire sampling for the sampled variant; `None` disables it.
    pub sampler: Option<ForestFireConfig>,
    pub long_range: bool,
}

impl Default for StabilityConfig {
    fn default() -> Self {
        StabilityConfig { hop_slack: 0, sampler: Some(ForestFireConfig::default()), long_range: true }
    }
}

/// Rows in schedule order: for each transition the full row, then (when
/// sampling is enabled and `s_t` has a large enough component) one row per
/// subgraph and their mean. The long-range row comes last.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct StabilitySeries {
    pub rows: Vec<SnapshotPairStats>,
    /// Transitions whose sampled rows were skipped, with the reason.
    pub skipped_samples: Vec<(Timestamp, String)>,
}

pub const CSV_HEADER: &str = "t,t_next,i_node,i_channel,hop_slack,ks_D,ks_p,wasserstein,wasserstein_norm,scope";

fn cell(x: Option<f64>) -> String {
    x.map(|v| v.to_string()).unwrap_or_default()
}

impl StabilitySeries {
    pub fn rows_with_scope(&self, scope: Scope) -> impl Iterator<Item = &SnapshotPairStats> {
        self.rows.iter().filter(move |r| r.scope == scope)
    }

    pub fn write_csv<W: Write>(&self, mut w: W) -> io::Result<()> {
        writeln!(w, "{CSV_HEADER}")?;
        for r in &self.rows {
            writeln!(
                w,
                "{},{},{},{},{},{},{},{},{},{}",
                r.t,
                r.t_next,
                cell(r.i_node),
                cell(r.i_channel),
                r.hop_slack,
                cell(r.ks.map(|k| k.statistic)),
                cell(r.ks.map(|k| k.p_value)),
                cell(r.wasserstein),
                cell(r.wasserstein_norm),
                r.scope
            )?;
        }
        Ok(())
    }
}

fn mean_of(values: impl Iterator<Item = Option<f64>>) -> Option<f64> {
    let (s, c) = values.flatten().fold((0.0, 0usize), |(s, c), x| (s + x, c + 1));
    (c > 0).then(|| s / c as f64)
}

/// ForestFire subgraphs of `a`, each compared against the subgraph of `b`
/// induced by the same node ids.
fn sampled_rows(
    t: Timestamp,
    t_next: Timestamp,
    a: &TopologyGraph,
    b: &TopologyGraph,
    hop_slack: u32,
    cfg: &ForestFireConfig,
) -> Result<Vec<SnapshotPairStats>, String> {
    let samples = sample_forestfire_nodes(a, cfg).map_err(|e| e.to_string())?;
    let mut rows = par::map_collect(samples.len(), |k| {
        let sub = a.induced(&samples[k]);
        let image: Vec<u32> = sub.ids().iter().filter_map(|id| b.index_of(id)).collect();
        let image = b.induced(&image);
        pair_stats(t, t_next, &sub, &image, hop_slack, Scope::Sample(k))
    });
    let n = rows.len();
    let ks_mean = |f: fn(&KsResult) -> f64| mean_of(rows.iter().map(|r| r.ks.as_ref().map(f)));
    let mean = SnapshotPairStats {
        t,
        t_next,
        scope: Scope::SampleMean,
        hop_slack,
        i_node: mean_of(rows.iter().map(|r| r.i_node)),
        i_channel: mean_of(rows.iter().map(|r| r.i_channel)),
        ks: ks_mean(|k| k.statistic)
            .zip(ks_mean(|k| k.p_value))
            .map(|(statistic, p_value)| KsResult { statistic, p_value }),
        wasserstein: mean_of(rows.iter().map(|r| r.wasserstein)),
        wasserstein_norm: mean_of(rows.iter().map(|r| r.wasserstein_norm)),
    };
    debug_assert_eq!(n, cfg.count);
    rows.push(mean);
    Ok(rows)
}

/// Stability statistics over consecutive snapshot pairs.
pub fn stability_series(snapshots: &[Snapshot], cfg: &StabilityConfig) -> Result<StabilitySeries, StabilityError> {
    if snapshots.len() < 2 {
        return Err(StabilityError::TooFewSnapshots(snapshots.len()));
    }
    let graphs = par::map_collect(snapshots.len(), |i| TopologyGraph::from_snapshot(&snapshots[i]));
    let per_pair = par::map_collect(snapshots.len() - 1, |i| {
        let (t, t_next) = (snapshots[i].at, snapshots[i + 1].at);
        let (a, b) = (&graphs[i], &graphs[i + 1]);
        let full = pair_stats(t, t_next, a, b, cfg.hop_slack, Scope::Full);
        let sampled = cfg.sampler.map(|s| sampled_rows(t, t_next, a, b, cfg.hop_slack, &s));
        (t, full, sampled)
    });
    let mut series = StabilitySeries::default();
    for (t, full, sampled) in per_pair {
        series.rows.push(full);
        match sampled {
            Some(Ok(rows)) => series.rows.extend(rows),
            Some(Err(reason)) => series.skipped_samples.push((t, reason)),
            None => {}
        }
    }
    if cfg.long_range {
        let (first, last) = (&snapshots[0], &snapshots[snapshots.len() - 1]);
        let (a, b) = (&graphs[0], &graphs[graphs.len() - 1]);
        series.rows.push(pair_stats(first.at, last.at, a, b, cfg.hop_slack, Scope::LongRange));
    }
    Ok(series)
}

#[cfg(test)]
mod tests;
