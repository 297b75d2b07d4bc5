//! Small deterministic graph families and seeded random models.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::TopologyGraph;

fn build(n: usize, edges: Vec<(u32, u32)>) -> TopologyGraph {
    TopologyGraph::with_synthetic_ids(n, edges).expect("generator edges in range")
}

pub fn path(n: usize) -> TopologyGraph {
    build(n, (1..n as u32).map(|i| (i - 1, i)).collect())
}

pub fn cycle(n: usize) -> TopologyGraph {
    let mut edges: Vec<(u32, u32)> = (1..n as u32).map(|i| (i - 1, i)).collect();
    if n > 2 {
        edges.push((n as u32 - 1, 0));
    }
    build(n, edges)
}

/// Hub `0` joined to `leaves` leaves.
pub fn star(leaves: usize) -> TopologyGraph {
    build(leaves + 1, (1..=leaves as u32).map(|i| (0, i)).collect())
}

pub fn complete(n: usize) -> TopologyGraph {
    let n32 = n as u32;
    build(
        n,
        (0..n32)
            .flat_map(|u| (u + 1..n32).map(move |v| (u, v)))
            .collect(),
    )
}

/// Disjoint union; `b`'s nodes are shifted past `a`'s.
pub fn disjoint_union(a: &TopologyGraph, b: &TopologyGraph) -> TopologyGraph {
    let off = a.node_count() as u32;
    let edges = a
        .edges()
        .chain(b.edges().map(|(u, v)| (u + off, v + off)))
        .collect();
    build(a.node_count() + b.node_count(), edges)
}

/// G(n, p) random graph.
pub fn erdos_renyi(n: usize, p: f64, seed: u64) -> TopologyGraph {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut edges = Vec::new();
    for u in 0..n as u32 {
        for v in u + 1..n as u32 {
            if rng.gen_bool(p.clamp(0.0, 1.0)) {
                edges.push((u, v));
            }
        }
    }
    build(n, edges)
}

/// Barabási–Albert preferential attachment: `m` seed nodes, then every new
/// node attaches to `m` distinct existing nodes chosen proportionally to
/// degree.
pub fn barabasi_albert(n: usize, m: usize, seed: u64) -> TopologyGraph {
    assert!(m >= 1 && m < n, "need 1 <= m < n");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut edges = Vec::with_capacity(n * m);
    let mut repeated: Vec<u32> = Vec::with_capacity(2 * n * m);
    let mut targets: Vec<u32> = (0..m as u32).collect();
    let mut chosen = Vec::with_capacity(m);
    for source in m as u32..n as u32 {
        for &t in &targets {
            edges.push((source, t));
            repeated.push(t);
            repeated.push(source);
        }
        chosen.clear();
        while chosen.len() < m {
            let t = *repeated.choose(&mut rng).expect("nonempty after first node");
            if !chosen.contains(&t) {
                chosen.push(t);
            }
        }
        targets.clone_from(&chosen);
    }
    build(n, edges)
}
