//! Link-prediction indices averaged over a pair set.

use std::collections::HashSet;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::clustering::common_neighbors;
use super::MetricError;
use crate::graph::{TopologyGraph, UNREACHABLE};
use crate::par;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LinkIndex {
    ResourceAllocation,
    Jaccard,
    PreferentialAttachment,
}

/// Which node pairs the averages run over.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum PairSource {
    #[default]
    Edges,
    /// `n` distinct non-adjacent pairs drawn uniformly with the given seed.
    SampledNonEdges { n: usize, seed: u64 },
}

/// Builds the pair list for `source`, each pair as `(u, v)` with `u < v`.
pub fn pairs(g: &TopologyGraph, source: PairSource) -> Result<Vec<(u32, u32)>, MetricError> {
    let out: Vec<(u32, u32)> = match source {
        PairSource::Edges => g.edges().collect(),
        PairSource::SampledNonEdges { n, seed } => {
            let nodes = g.node_count() as u64;
            let available = (nodes * nodes.saturating_sub(1) / 2).saturating_sub(g.edge_count() as u64);
            let want = (n as u64).min(available) as usize;
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let mut seen = HashSet::with_capacity(want);
            let mut out = Vec::with_capacity(want);
            while out.len() < want {
                let u = rng.gen_range(0..nodes as u32);
                let v = rng.gen_range(0..nodes as u32);
                let p = (u.min(v), u.max(v));
                if u != v && !g.has_edge(u, v) && seen.insert(p) {
                    out.push(p);
                }
            }
            out
        }
    };
    if out.is_empty() {
        return Err(MetricError::NoPairs);
    }
    Ok(out)
}

fn score(g: &TopologyGraph, index: LinkIndex, u: u32, v: u32) -> f64 {
    match index {
        LinkIndex::ResourceAllocation => {
            let (a, b) = (g.neighbors(u), g.neighbors(v));
            let (mut i, mut j, mut s) = (0, 0, 0.0);
            while i < a.len() && j < b.len() {
                match a[i].cmp(&b[j]) {
                    std::cmp::Ordering::Less => i += 1,
                    std::cmp::Ordering::Greater => j += 1,
                    std::cmp::Ordering::Equal => {
                        s += 1.0 / g.degree(a[i]) as f64;
                        i += 1;
                        j += 1;
                    }
                }
            }
            s
        }
        LinkIndex::Jaccard => {
            let common = common_neighbors(g, u, v);
            let union = g.degree(u) + g.degree(v) - common;
            if union == 0 {
                0.0
            } else {
                common as f64 / union as f64
            }
        }
        LinkIndex::PreferentialAttachment => (g.degree(u) * g.degree(v)) as f64,
    }
}

fn mean_over(pairs: &[(u32, u32)], f: impl Fn(u32, u32) -> f64 + Sync + Send) -> f64 {
    let sum = par::map_reduce_chunks(
        pairs.len(),
        || 0.0,
        |acc, r| acc + pairs[r].iter().map(|&(u, v)| f(u, v)).sum::<f64>(),
        |a, b| a + b,
    );
    sum / pairs.len() as f64
}

/// Mean of a link-prediction index over the pairs from `source`.
pub fn avg_link_prediction(g: &TopologyGraph, index: LinkIndex, source: PairSource) -> Result<f64, MetricError> {
    let pairs = pairs(g, source)?;
    Ok(mean_over(&pairs, |u, v| score(g, index, u, v)))
}

/// Mean common-neighbour centrality `α·|Γ(u)∩Γ(v)| + (1−α)·n/d(u,v)`; the
/// distance term is zero for pairs in different components.
pub fn avg_common_neighbor_centrality(
    g: &TopologyGraph,
    alpha: f64,
    source: PairSource,
) -> Result<f64, MetricError> {
    let mut pairs = pairs(g, source)?;
    let n = g.node_count() as f64;
    if matches!(source, PairSource::Edges) {
        return Ok(mean_over(&pairs, |u, v| {
            alpha * common_neighbors(g, u, v) as f64 + (1.0 - alpha) * n
        }));
    }
    // Group by first endpoint so each distinct source needs one BFS.
    pairs.sort_unstable();
    let starts: Vec<usize> = (0..pairs.len())
        .filter(|&i| i == 0 || pairs[i].0 != pairs[i - 1].0)
        .collect();
    let sum = par::map_reduce_chunks(
        starts.len(),
        || 0.0,
        |mut acc, r| {
            let mut dist = vec![UNREACHABLE; g.node_count()];
            let mut queue = Vec::new();
            for gi in r {
                let lo = starts[gi];
                let hi = starts.get(gi + 1).copied().unwrap_or(pairs.len());
                let u = pairs[lo].0;
                g.bfs_into(u, &mut dist, &mut queue);
                for &(u, v) in &pairs[lo..hi] {
                    let d = dist[v as usize];
                    let reach = if d == UNREACHABLE { 0.0 } else { n / d as f64 };
                    acc += alpha * common_neighbors(g, u, v) as f64 + (1.0 - alpha) * reach;
                }
                for &w in &queue {
                    dist[w as usize] = UNREACHABLE;
                }
            }
            acc
        },
        |a, b| a + b,
    );
    Ok(sum / pairs.len() as f64)
}
