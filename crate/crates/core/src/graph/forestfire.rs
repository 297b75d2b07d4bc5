//! ForestFire sampling of connected subgraphs.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{GraphError, TopologyGraph};
use crate::par;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ForestFireConfig {
    /// Nodes per sample.
    pub target_size: usize,
    /// Number of samples.
    pub count: usize,
    /// Probability that a burning node ignites each untouched neighbor.
    pub p_forward: f64,
    pub seed: u64,
}

impl Default for ForestFireConfig {
    fn default() -> Self {
        ForestFireConfig {
            target_size: 100,
            count: 100,
            p_forward: 0.7,
            seed: 0,
        }
    }
}

/// Draws `count` connected induced subgraphs of exactly `target_size` nodes.
///
/// Each sample ignites a uniformly chosen node of a large enough component
/// and spreads in BFS order, burning every untouched neighbor independently
/// with probability `p_forward`. When the fire dies out early it re-ignites
/// from a random burned node that still has untouched neighbors, and that
/// node burns at least one of them. The last wave is truncated so the sample
/// hits `target_size` exactly.
///
/// Sample `i` uses ChaCha stream `i` of `seed`, so results do not depend on
/// evaluation order.
pub fn sample_forestfire(
    g: &TopologyGraph,
    cfg: &ForestFireConfig,
) -> Result<Vec<TopologyGraph>, GraphError> {
    Ok(sample_forestfire_nodes(g, cfg)?
        .iter()
        .map(|nodes| g.induced(nodes))
        .collect())
}

/// Like [`sample_forestfire`] but returns the sampled node indices of `g`,
/// in burn order.
pub fn sample_forestfire_nodes(
    g: &TopologyGraph,
    cfg: &ForestFireConfig,
) -> Result<Vec<Vec<u32>>, GraphError> {
    let (label, count) = g.component_labels();
    let mut sizes = vec![0usize; count];
    for &l in &label {
        sizes[l as usize] += 1;
    }
    let largest = sizes.iter().copied().max().unwrap_or(0);
    if cfg.target_size == 0 || largest < cfg.target_size {
        return Err(GraphError::ComponentTooSmall {
            needed: cfg.target_size.max(1),
            largest,
        });
    }
    let ignitable: Vec<u32> = g
        .nodes()
        .filter(|&v| sizes[label[v as usize] as usize] >= cfg.target_size)
        .collect();
    let p = cfg.p_forward.clamp(0.0, 1.0);
    Ok(par::map_collect(cfg.count, |i| {
        let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
        rng.set_stream(i as u64);
        burn(g, &ignitable, cfg.target_size, p, &mut rng)
    }))
}

fn burn(g: &TopologyGraph, ignitable: &[u32], target: usize, p: f64, rng: &mut ChaCha8Rng) -> Vec<u32> {
    let mut burned = vec![false; g.node_count()];
    let mut order = Vec::with_capacity(target);
    let start = ignitable[rng.gen_range(0..ignitable.len())];
    burned[start as usize] = true;
    order.push(start);
    let mut queue = std::collections::VecDeque::from([start]);
    let mut wave = Vec::new();

    while order.len() < target {
        let (v, forced) = match queue.pop_front() {
            Some(v) => (v, false),
            None => {
                // Re-ignite from a burned node on the fire's boundary.
                let frontier: Vec<u32> = order
                    .iter()
                    .copied()
                    .filter(|&u| g.neighbors(u).iter().any(|&w| !burned[w as usize]))
                    .collect();
                (frontier[rng.gen_range(0..frontier.len())], true)
            }
        };
        wave.clear();
        let untouched: Vec<u32> = g
            .neighbors(v)
            .iter()
            .copied()
            .filter(|&w| !burned[w as usize])
            .collect();
        for &w in &untouched {
            if rng.gen_bool(p) {
                wave.push(w);
            }
        }
        if forced && wave.is_empty() {
            wave.push(*untouched.choose(rng).expect("frontier node has untouched neighbors"));
        }
        wave.truncate(target - order.len());
        for &w in &wave {
            burned[w as usize] = true;
            order.push(w);
            queue.push_back(w);
        }
    }
    order
}
