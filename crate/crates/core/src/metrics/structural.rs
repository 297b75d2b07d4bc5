//! Burt's structural-hole measures on unweighted graphs.

use crate::graph::TopologyGraph;
use crate::par;

/// Burt's constraint per node with tie strength `p(u, w) = 1 / deg(u)`.
/// Isolated nodes get `None`.
pub fn constraint(g: &TopologyGraph) -> Vec<Option<f64>> {
    par::map_collect(g.node_count(), |v| {
        let v = v as u32;
        let nb = g.neighbors(v);
        if nb.is_empty() {
            return None;
        }
        let pv = 1.0 / nb.len() as f64;
        let mut total = 0.0;
        for &w in nb {
            // Indirect strength through common neighbours q of v and w.
            let indirect: f64 = nb
                .iter()
                .filter(|&&q| q != w && g.has_edge(q, w))
                .map(|&q| pv / g.degree(q) as f64)
                .sum();
            let local = pv + indirect;
            total += local * local;
        }
        Some(total)
    })
}

/// Effective size `deg − 2 t / deg`, where `t` counts ties among the ego's
/// neighbours. Isolated nodes get `None`.
pub fn effective_size(g: &TopologyGraph, tri: &[u64]) -> Vec<Option<f64>> {
    g.nodes()
        .map(|v| {
            let d = g.degree(v) as f64;
            (d > 0.0).then(|| d - 2.0 * tri[v as usize] as f64 / d)
        })
        .collect()
}

/// Effective size divided by ego degree.
pub fn burts_effective_size(g: &TopologyGraph, tri: &[u64]) -> Vec<Option<f64>> {
    effective_size(g, tri)
        .into_iter()
        .zip(g.nodes())
        .map(|(e, v)| e.map(|e| e / g.degree(v) as f64))
        .collect()
}

/// Mean of the defined entries, `None` if there are none.
pub fn mean_defined(values: &[Option<f64>]) -> Option<f64> {
    let (sum, count) = values
        .iter()
        .flatten()
        .fold((0.0, 0usize), |(s, c), &x| (s + x, c + 1));
    (count > 0).then(|| sum / count as f64)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::generators::{complete, erdos_renyi, star};
    use crate::metrics::clustering::{common_neighbors, triangles};

    fn redundancy_oracle(g: &TopologyGraph, v: u32) -> f64 {
        let nb = g.neighbors(v);
        let d = nb.len() as f64;
        nb.iter().map(|&u| common_neighbors(g, u, v) as f64 / d).sum()
    }

    #[test]
    fn star_and_clique() {
        let s = star(3);
        let tri = triangles(&s);
        let es = effective_size(&s, &tri);
        assert_eq!(es[0], Some(3.0));
        assert_eq!(es[1], Some(1.0));
        let c = constraint(&s);
        assert!((c[0].unwrap() - 1.0 / 3.0).abs() < 1e-12);
        assert!((c[1].unwrap() - 1.0).abs() < 1e-12);

        // In K4 every neighbour is redundant: esize = 3 − 2·3/3 = 1.
        let k = complete(4);
        let tri = triangles(&k);
        assert!(effective_size(&k, &tri).iter().all(|&e| (e.unwrap() - 1.0).abs() < 1e-12));
        assert!(burts_effective_size(&k, &tri).iter().all(|&e| (e.unwrap() - 1.0 / 3.0).abs() < 1e-12));
        // p = 1/3 direct, two indirect paths of 1/9 each: (1/3 + 2/9)² × 3.
        let expected = 3.0 * (1.0f64 / 3.0 + 2.0 / 9.0).powi(2);
        assert!(constraint(&k).iter().all(|&c| (c.unwrap() - expected).abs() < 1e-12));
    }

    #[test]
    fn effective_size_is_degree_minus_mean_redundancy() {
        for seed in 0..10 {
            let g = erdos_renyi(30, 0.2, seed);
            let tri = triangles(&g);
            for (v, e) in effective_size(&g, &tri).into_iter().enumerate() {
                if let Some(e) = e {
                    let expected = g.degree(v as u32) as f64 - redundancy_oracle(&g, v as u32);
                    assert!((e - expected).abs() < 1e-9);
                }
            }
        }
    }

    #[test]
    fn isolated_nodes_are_skipped() {
        let g = TopologyGraph::with_synthetic_ids(3, [(0, 1)]).unwrap();
        let c = constraint(&g);
        assert_eq!(c[2], None);
        assert_eq!(mean_defined(&c), Some(1.0));
        assert_eq!(mean_defined(&[None]), None);
    }
}
