//! Shortest-path aggregates from per-source BFS.

use crate::graph::{TopologyGraph, UNREACHABLE};
use crate::par;

/// Sums over `(source, target)` pairs with `source` in the evaluated source
/// set and `target` reachable and distinct.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct DistanceSummary {
    pub sources: usize,
    pub ordered_pairs: u64,
    pub distance_sum: u64,
    pub inverse_sum: f64,
    pub max_distance: u32,
}

impl DistanceSummary {
    fn merge(self, o: DistanceSummary) -> DistanceSummary {
        DistanceSummary {
            sources: self.sources + o.sources,
            ordered_pairs: self.ordered_pairs + o.ordered_pairs,
            distance_sum: self.distance_sum + o.distance_sum,
            inverse_sum: self.inverse_sum + o.inverse_sum,
            max_distance: self.max_distance.max(o.max_distance),
        }
    }
}

/// BFS from every node in `sources`. The inverse-distance sum is reduced in
/// fixed chunk order.
pub fn distance_summary(g: &TopologyGraph, sources: &[u32]) -> DistanceSummary {
    let n = g.node_count();
    par::map_reduce_chunks(
        sources.len(),
        DistanceSummary::default,
        |mut acc, range| {
            let mut dist = vec![UNREACHABLE; n];
            let mut queue = Vec::with_capacity(n);
            for &s in &sources[range] {
                g.bfs_into(s, &mut dist, &mut queue);
                let mut inv = 0.0;
                for &t in &queue[1..] {
                    let d = dist[t as usize];
                    acc.distance_sum += u64::from(d);
                    acc.max_distance = acc.max_distance.max(d);
                    inv += 1.0 / f64::from(d);
                }
                acc.ordered_pairs += (queue.len() - 1) as u64;
                acc.inverse_sum += inv;
                acc.sources += 1;
                for &t in queue.iter() {
                    dist[t as usize] = UNREACHABLE;
                }
            }
            acc
        },
        DistanceSummary::merge,
    )
}
