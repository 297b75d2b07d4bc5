//! Closeness vitality.

use crate::graph::{TopologyGraph, UNREACHABLE};
use crate::par;

/// Sum of distances over unordered reachable pairs, skipping `removed`.
fn wiener_without(g: &TopologyGraph, removed: Option<u32>) -> u64 {
    let n = g.node_count();
    let total = par::map_reduce_chunks(
        n,
        || 0u64,
        |mut acc, r| {
            let mut dist = vec![UNREACHABLE; n];
            let mut queue = Vec::new();
            for s in r {
                let s = s as u32;
                if Some(s) == removed {
                    continue;
                }
                if let Some(x) = removed {
                    // Blocking the removed node keeps BFS from passing through it.
                    dist[x as usize] = 0;
                }
                g.bfs_into(s, &mut dist, &mut queue);
                for &w in &queue {
                    acc += dist[w as usize] as u64;
                    dist[w as usize] = UNREACHABLE;
                }
                if let Some(x) = removed {
                    dist[x as usize] = UNREACHABLE;
                }
            }
            acc
        },
        |a, b| a + b,
    );
    total / 2
}

/// Closeness vitality per node: the Wiener index of the graph minus the
/// Wiener index of the graph without that node, both over reachable pairs.
pub fn closeness_vitality(g: &TopologyGraph) -> Vec<f64> {
    let base = wiener_without(g, None);
    g.nodes()
        .map(|v| base as f64 - wiener_without(g, Some(v)) as f64)
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::generators::{complete, cycle, erdos_renyi};

    fn brute(g: &TopologyGraph, v: u32) -> f64 {
        let w = |h: &TopologyGraph| -> u64 {
            h.all_pairs_distances()
                .flat_map(|row| row.into_iter().filter(|&d| d != UNREACHABLE).map(u64::from))
                .sum::<u64>()
                / 2
        };
        let keep: Vec<u32> = g.nodes().filter(|&x| x != v).collect();
        w(g) as f64 - w(&g.induced(&keep)) as f64
    }

    #[test]
    fn triangle() {
        assert_eq!(closeness_vitality(&complete(3)), vec![2.0, 2.0, 2.0]);
    }

    #[test]
    fn matches_induced_subgraph_oracle() {
        for g in [cycle(6), erdos_renyi(15, 0.2, 1), erdos_renyi(15, 0.3, 2)] {
            let cv = closeness_vitality(&g);
            for v in g.nodes() {
                assert_eq!(cv[v as usize], brute(&g, v));
            }
        }
    }
}
