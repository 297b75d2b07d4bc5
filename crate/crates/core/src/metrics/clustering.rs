//! Triangle-based metrics.

use crate::graph::TopologyGraph;
use crate::par;

fn sorted_intersection_count(a: &[u32], b: &[u32]) -> usize {
    let (mut i, mut j, mut c) = (0, 0, 0);
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            std::cmp::Ordering::Less => i += 1,
            std::cmp::Ordering::Greater => j += 1,
            std::cmp::Ordering::Equal => {
                c += 1;
                i += 1;
                j += 1;
            }
        }
    }
    c
}

/// Common neighbours of `u` and `v`.
pub fn common_neighbors(g: &TopologyGraph, u: u32, v: u32) -> usize {
    sorted_intersection_count(g.neighbors(u), g.neighbors(v))
}

/// Number of triangles through each node.
pub fn triangles(g: &TopologyGraph) -> Vec<u64> {
    par::map_collect(g.node_count(), |v| {
        let v = v as u32;
        let nb = g.neighbors(v);
        let mut t = 0u64;
        for &u in nb {
            // Count each triangle {v, u, w} once per node with u < w.
            let higher = &g.neighbors(u)[g.neighbors(u).partition_point(|&x| x <= u)..];
            t += sorted_intersection_count(nb, higher) as u64;
        }
        t
    })
}

/// `3 × triangles / connected triples`; 0 when there are no triples.
pub fn transitivity(g: &TopologyGraph, tri: &[u64]) -> f64 {
    let closed: u64 = tri.iter().sum();
    let triples: u64 = g
        .nodes()
        .map(|v| {
            let d = g.degree(v) as u64;
            d * d.saturating_sub(1) / 2
        })
        .sum();
    if triples == 0 {
        0.0
    } else {
        closed as f64 / triples as f64
    }
}

pub fn local_clustering(g: &TopologyGraph, tri: &[u64]) -> Vec<f64> {
    g.nodes()
        .map(|v| {
            let d = g.degree(v) as f64;
            if d < 2.0 {
                0.0
            } else {
                2.0 * tri[v as usize] as f64 / (d * (d - 1.0))
            }
        })
        .collect()
}
