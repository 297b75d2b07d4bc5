//! Undirected simple graphs over contiguous node indices.
//!
//! [`TopologyGraph`] stores adjacency in CSR form with sorted neighbor lists.
//! The 33-byte node ids live only in the id map; every algorithm works on
//! `u32` indices.

mod forestfire;
pub mod generators;

use std::collections::HashMap;
use std::io::{self, BufRead, Write};

use thiserror::Error;

use crate::gossip::NodeId;
use crate::snapshot::Snapshot;

pub use forestfire::{sample_forestfire, sample_forestfire_nodes, ForestFireConfig};

/// Distance reported for unreachable nodes.
pub const UNREACHABLE: u32 = u32::MAX;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GraphError {
    #[error("node index {0} not in graph")]
    NodeNotFound(u32),
    #[error("no component with at least {needed} nodes (largest has {largest})")]
    ComponentTooSmall { needed: usize, largest: usize },
    #[error("invalid graph input: {0}")]
    Invalid(String),
}

#[derive(Clone, PartialEq, Eq)]
pub struct TopologyGraph {
    offsets: Vec<usize>,
    targets: Vec<u32>,
    ids: Vec<NodeId>,
    index: HashMap<NodeId, u32>,
}

impl std::fmt::Debug for TopologyGraph {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("TopologyGraph")
            .field("nodes", &self.node_count())
            .field("edges", &self.edge_count())
            .finish()
    }
}

impl TopologyGraph {
    /// Builds a graph over `ids` (index `i` is `ids[i]`). Self-loops are
    /// dropped and parallel edges collapse.
    pub fn from_edges(
        ids: Vec<NodeId>,
        edges: impl IntoIterator<Item = (u32, u32)>,
    ) -> Result<Self, GraphError> {
        let n = ids.len();
        let mut index = HashMap::with_capacity(n);
        for (i, id) in ids.iter().enumerate() {
            if index.insert(*id, i as u32).is_some() {
                return Err(GraphError::Invalid(format!("duplicate node id {id}")));
            }
        }
        let mut adj: Vec<Vec<u32>> = vec![Vec::new(); n];
        for (u, v) in edges {
            for x in [u, v] {
                if x as usize >= n {
                    return Err(GraphError::NodeNotFound(x));
                }
            }
            if u != v {
                adj[u as usize].push(v);
                adj[v as usize].push(u);
            }
        }
        let mut offsets = Vec::with_capacity(n + 1);
        let mut targets = Vec::new();
        offsets.push(0);
        for mut list in adj {
            list.sort_unstable();
            list.dedup();
            targets.extend_from_slice(&list);
            offsets.push(targets.len());
        }
        Ok(TopologyGraph {
            offsets,
            targets,
            ids,
            index,
        })
    }

    /// Graph with [`NodeId::synthetic`] ids `0..n`.
    pub fn with_synthetic_ids(
        n: usize,
        edges: impl IntoIterator<Item = (u32, u32)>,
    ) -> Result<Self, GraphError> {
        Self::from_edges((0..n as u64).map(NodeId::synthetic).collect(), edges)
    }

    /// Collapses a snapshot to an undirected simple graph. Node indices follow
    /// the snapshot's node-id order.
    pub fn from_snapshot(snapshot: &Snapshot) -> Self {
        let ids: Vec<NodeId> = snapshot.nodes.keys().copied().collect();
        let pos: HashMap<NodeId, u32> = ids.iter().enumerate().map(|(i, id)| (*id, i as u32)).collect();
        let edges = snapshot
            .channels
            .values()
            .map(|ch| (pos[&ch.endpoint_a], pos[&ch.endpoint_b]));
        Self::from_edges(ids, edges).expect("snapshot endpoints are in its node set")
    }

    pub fn node_count(&self) -> usize {
        self.ids.len()
    }

    pub fn edge_count(&self) -> usize {
        self.targets.len() / 2
    }

    pub fn is_empty(&self) -> bool {
        self.ids.is_empty()
    }

    #[inline]
    pub fn neighbors(&self, v: u32) -> &[u32] {
        let v = v as usize;
        &self.targets[self.offsets[v]..self.offsets[v + 1]]
    }

    #[inline]
    pub fn degree(&self, v: u32) -> usize {
        let v = v as usize;
        self.offsets[v + 1] - self.offsets[v]
    }

    pub fn has_edge(&self, u: u32, v: u32) -> bool {
        self.neighbors(u).binary_search(&v).is_ok()
    }

    pub fn id(&self, v: u32) -> NodeId {
        self.ids[v as usize]
    }

    pub fn ids(&self) -> &[NodeId] {
        &self.ids
    }

    pub fn index_of(&self, id: &NodeId) -> Option<u32> {
        self.index.get(id).copied()
    }

    pub fn nodes(&self) -> std::ops::Range<u32> {
        0..self.node_count() as u32
    }

    /// Each undirected edge once, as `(u, v)` with `u < v`.
    pub fn edges(&self) -> impl Iterator<Item = (u32, u32)> + '_ {
        self.nodes().flat_map(move |u| {
            self.neighbors(u)
                .iter()
                .copied()
                .filter(move |&v| v > u)
                .map(move |v| (u, v))
        })
    }

    pub fn degrees(&self) -> Vec<u32> {
        self.nodes().map(|v| self.degree(v) as u32).collect()
    }

    /// Subgraph induced by `nodes`, re-indexed in ascending original index
    /// order.
    pub fn induced(&self, nodes: &[u32]) -> TopologyGraph {
        let mut keep: Vec<u32> = nodes.to_vec();
        keep.sort_unstable();
        keep.dedup();
        let mut map = vec![u32::MAX; self.node_count()];
        for (new, &old) in keep.iter().enumerate() {
            map[old as usize] = new as u32;
        }
        let ids = keep.iter().map(|&v| self.ids[v as usize]).collect();
        let edges: Vec<(u32, u32)> = keep
            .iter()
            .flat_map(|&u| {
                let map = &map;
                self.neighbors(u)
                    .iter()
                    .filter(move |&&v| v > u && map[v as usize] != u32::MAX)
                    .map(move |&v| (map[u as usize], map[v as usize]))
            })
            .collect();
        TopologyGraph::from_edges(ids, edges).expect("induced subgraph is valid")
    }

    /// Component label per node (labels numbered in order of smallest member)
    /// and the number of components.
    pub fn component_labels(&self) -> (Vec<u32>, usize) {
        let n = self.node_count();
        let mut label = vec![u32::MAX; n];
        let mut stack = Vec::new();
        let mut count = 0u32;
        for s in self.nodes() {
            if label[s as usize] != u32::MAX {
                continue;
            }
            label[s as usize] = count;
            stack.push(s);
            while let Some(u) = stack.pop() {
                for &w in self.neighbors(u) {
                    if label[w as usize] == u32::MAX {
                        label[w as usize] = count;
                        stack.push(w);
                    }
                }
            }
            count += 1;
        }
        (label, count as usize)
    }

    pub fn component_count(&self) -> usize {
        self.component_labels().1
    }

    pub fn is_connected(&self) -> bool {
        self.component_count() <= 1
    }

    /// Node indices of the largest component; ties go to the component with
    /// the smallest minimum index.
    pub fn largest_component_nodes(&self) -> Vec<u32> {
        let (label, count) = self.component_labels();
        let mut sizes = vec![0usize; count];
        for &l in &label {
            sizes[l as usize] += 1;
        }
        let Some(best) = (0..count).max_by_key(|&c| (sizes[c], std::cmp::Reverse(c))) else {
            return Vec::new();
        };
        self.nodes().filter(|&v| label[v as usize] == best as u32).collect()
    }

    /// Induced subgraph on the largest component.
    pub fn largest_component(&self) -> TopologyGraph {
        if self.is_connected() {
            return self.clone();
        }
        self.induced(&self.largest_component_nodes())
    }

    /// Hop distances from `source`; [`UNREACHABLE`] for other components.
    pub fn bfs_distances(&self, source: u32) -> Result<Vec<u32>, GraphError> {
        if source as usize >= self.node_count() {
            return Err(GraphError::NodeNotFound(source));
        }
        let mut dist = vec![UNREACHABLE; self.node_count()];
        let mut queue = Vec::with_capacity(self.node_count());
        self.bfs_into(source, &mut dist, &mut queue);
        Ok(dist)
    }

    /// BFS into caller-owned buffers. `dist` must be all [`UNREACHABLE`] on
    /// entry; on return `queue` holds the visited nodes in BFS order.
    pub fn bfs_into(&self, source: u32, dist: &mut [u32], queue: &mut Vec<u32>) {
        queue.clear();
        dist[source as usize] = 0;
        queue.push(source);
        let mut head = 0;
        while head < queue.len() {
            let u = queue[head];
            head += 1;
            let du = dist[u as usize] + 1;
            for &w in self.neighbors(u) {
                if dist[w as usize] == UNREACHABLE {
                    dist[w as usize] = du;
                    queue.push(w);
                }
            }
        }
    }

    /// Distance rows for every source, computed lazily.
    pub fn all_pairs_distances(&self) -> impl Iterator<Item = Vec<u32>> + '_ {
        self.nodes().map(move |s| self.bfs_distances(s).expect("source in range"))
    }

    /// Reads a `u v` edge list (0-based). The node count is one more than the
    /// largest index, or `min_nodes` if larger.
    pub fn read_edge_list<R: BufRead>(reader: R, min_nodes: usize) -> Result<Self, GraphError> {
        let mut edges = Vec::new();
        let mut n = min_nodes;
        for (i, line) in reader.lines().enumerate() {
            let line = line.map_err(|e| GraphError::Invalid(e.to_string()))?;
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let mut parts = line.split_whitespace();
            let mut next = || -> Result<u32, GraphError> {
                parts
                    .next()
                    .and_then(|p| p.parse().ok())
                    .ok_or_else(|| GraphError::Invalid(format!("line {}: expected `u v`", i + 1)))
            };
            let (u, v) = (next()?, next()?);
            n = n.max(u.max(v) as usize + 1);
            edges.push((u, v));
        }
        Self::with_synthetic_ids(n, edges)
    }

    pub fn write_edge_list<W: Write>(&self, mut w: W) -> io::Result<()> {
        for (u, v) in self.edges() {
            writeln!(w, "{u} {v}")?;
        }
        Ok(())
    }
}

/// Sorted multiset of node degrees.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DegreeDistribution {
    degrees: Vec<u32>,
}

impl DegreeDistribution {
    pub fn from_graph(g: &TopologyGraph) -> Self {
        Self::from_degrees(g.degrees())
    }

    pub fn from_degrees(mut degrees: Vec<u32>) -> Self {
        degrees.sort_unstable();
        DegreeDistribution { degrees }
    }

    pub fn degrees(&self) -> &[u32] {
        &self.degrees
    }

    pub fn len(&self) -> usize {
        self.degrees.len()
    }

    pub fn is_empty(&self) -> bool {
        self.degrees.is_empty()
    }

    pub fn sum(&self) -> u64 {
        self.degrees.iter().map(|&d| u64::from(d)).sum()
    }

    pub fn mean(&self) -> f64 {
        if self.degrees.is_empty() {
            0.0
        } else {
            self.sum() as f64 / self.degrees.len() as f64
        }
    }

    /// `(degree, count)` pairs in ascending degree order.
    pub fn frequencies(&self) -> Vec<(u32, usize)> {
        let mut out: Vec<(u32, usize)> = Vec::new();
        for &d in &self.degrees {
            match out.last_mut() {
                Some((k, c)) if *k == d => *c += 1,
                _ => out.push((d, 1)),
            }
        }
        out
    }

    pub fn as_f64(&self) -> Vec<f64> {
        self.degrees.iter().map(|&d| f64::from(d)).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::generators::*;
    use super::*;
    use crate::gossip::ShortChannelId;
    use crate::snapshot::Channel;
    use proptest::prelude::*;
    use std::collections::HashSet;

    fn chan(i: u32, a: u64, b: u64) -> Channel {
        Channel::new(
            ShortChannelId::new(1, i, 0).unwrap(),
            NodeId::synthetic(a),
            NodeId::synthetic(b),
            None,
            None,
        )
    }

    #[test]
    fn multi_channels_collapse() {
        let snap = Snapshot::from_channels(0, 0, vec![chan(1, 0, 1), chan(2, 1, 0), chan(3, 1, 2)]).unwrap();
        let g = TopologyGraph::from_snapshot(&snap);
        assert_eq!(g.node_count(), 3);
        assert_eq!(g.edge_count(), 2);
        let empty = TopologyGraph::from_snapshot(&Snapshot::empty(0, 0));
        assert!(empty.is_empty());
        assert_eq!(empty.edge_count(), 0);
    }

    #[test]
    fn five_channels_one_repeat() {
        let pairs = [(0, 1), (1, 2), (2, 3), (3, 0), (2, 1)];
        let chans = pairs.iter().enumerate().map(|(i, &(a, b))| chan(i as u32, a, b));
        let g = TopologyGraph::from_snapshot(&Snapshot::from_channels(0, 0, chans).unwrap());
        let oracle: HashSet<(u64, u64)> = pairs.iter().map(|&(a, b)| (a.min(b), a.max(b))).collect();
        assert_eq!(g.edge_count(), oracle.len());
        assert_eq!(g.edge_count(), 4);
    }

    #[test]
    fn components() {
        let g = TopologyGraph::with_synthetic_ids(5, [(0, 1), (1, 2), (3, 4)]).unwrap();
        assert_eq!(g.component_count(), 2);
        let lcc = g.largest_component();
        assert_eq!(lcc.node_count(), 3);
        assert_eq!(lcc.ids(), &[NodeId::synthetic(0), NodeId::synthetic(1), NodeId::synthetic(2)]);
        let c = cycle(6);
        assert_eq!(c.largest_component(), c);
        // Equal sizes: smallest minimum index wins.
        let g = TopologyGraph::with_synthetic_ids(4, [(2, 3), (0, 1)]).unwrap();
        assert_eq!(g.largest_component_nodes(), vec![0, 1]);
    }

    /// Union-find labeling used as an independent component oracle.
    fn union_find_largest(n: usize, edges: &[(u32, u32)]) -> Vec<u32> {
        let mut parent: Vec<usize> = (0..n).collect();
        fn find(p: &mut [usize], x: usize) -> usize {
            let mut r = x;
            while p[r] != r {
                r = p[r];
            }
            let mut y = x;
            while p[y] != r {
                let nxt = p[y];
                p[y] = r;
                y = nxt;
            }
            r
        }
        for &(u, v) in edges {
            let (a, b) = (find(&mut parent, u as usize), find(&mut parent, v as usize));
            if a != b {
                parent[a.max(b)] = a.min(b);
            }
        }
        let roots: Vec<usize> = (0..n).map(|x| find(&mut parent, x)).collect();
        let mut best: Option<(usize, usize)> = None; // (size, min index)
        for r in 0..n {
            let members: Vec<usize> = (0..n).filter(|&x| roots[x] == r).collect();
            if members.is_empty() {
                continue;
            }
            let cand = (members.len(), members[0]);
            if best.is_none_or(|b| cand.0 > b.0 || (cand.0 == b.0 && cand.1 < b.1)) {
                best = Some(cand);
            }
        }
        let (_, min) = best.unwrap();
        (0..n).filter(|&x| roots[x] == roots[min]).map(|x| x as u32).collect()
    }

    #[test]
    fn four_components_match_union_find() {
        let edges = [(0, 5), (5, 9), (1, 2), (3, 4), (4, 6), (6, 3), (7, 8), (10, 3)];
        let g = TopologyGraph::with_synthetic_ids(11, edges).unwrap();
        assert_eq!(g.component_count(), 4);
        assert_eq!(g.largest_component_nodes(), union_find_largest(11, &edges));
    }

    #[test]
    fn bfs_basics() {
        let p = path(3);
        assert_eq!(p.bfs_distances(0).unwrap(), vec![0, 1, 2]);
        let s = star(5);
        assert_eq!(s.bfs_distances(0).unwrap(), vec![0, 1, 1, 1, 1, 1]);
        assert_eq!(p.bfs_distances(3), Err(GraphError::NodeNotFound(3)));
        let g = TopologyGraph::with_synthetic_ids(3, [(0, 1)]).unwrap();
        assert_eq!(g.bfs_distances(0).unwrap()[2], UNREACHABLE);
    }

    fn floyd_warshall(g: &TopologyGraph) -> Vec<Vec<u64>> {
        let n = g.node_count();
        let inf = u64::MAX / 4;
        let mut d = vec![vec![inf; n]; n];
        for i in 0..n {
            d[i][i] = 0;
        }
        for (u, v) in g.edges() {
            d[u as usize][v as usize] = 1;
            d[v as usize][u as usize] = 1;
        }
        for k in 0..n {
            for i in 0..n {
                for j in 0..n {
                    if d[i][k] + d[k][j] < d[i][j] {
                        d[i][j] = d[i][k] + d[k][j];
                    }
                }
            }
        }
        d
    }

    #[test]
    fn bfs_matches_floyd_warshall() {
        for seed in 0..5 {
            let g = erdos_renyi(10, 0.25, seed);
            let fw = floyd_warshall(&g);
            for (s, row) in g.all_pairs_distances().enumerate() {
                for (t, &d) in row.iter().enumerate() {
                    let expect = fw[s][t];
                    if d == UNREACHABLE {
                        assert!(expect > 1000);
                    } else {
                        assert_eq!(u64::from(d), expect);
                    }
                }
            }
        }
    }

    #[test]
    fn edge_list_roundtrip() {
        let g = barabasi_albert(30, 2, 1);
        let mut buf = Vec::new();
        g.write_edge_list(&mut buf).unwrap();
        let back = TopologyGraph::read_edge_list(&buf[..], 30).unwrap();
        assert_eq!(back, g);
        assert!(TopologyGraph::read_edge_list(&b"1 x\n"[..], 0).is_err());
    }

    #[test]
    fn degree_distribution() {
        let dd = DegreeDistribution::from_graph(&star(3));
        assert_eq!(dd.degrees(), &[1, 1, 1, 3]);
        assert_eq!(dd.frequencies(), vec![(1, 3), (3, 1)]);
        assert_eq!(dd.sum(), 6);
    }

    proptest! {
        #[test]
        fn handshake_and_symmetry(n in 1usize..25, p in 0.0f64..0.6, seed in any::<u64>()) {
            let g = erdos_renyi(n, p, seed);
            let dd = DegreeDistribution::from_graph(&g);
            prop_assert_eq!(dd.sum(), 2 * g.edge_count() as u64);
            for u in g.nodes() {
                prop_assert!(!g.has_edge(u, u));
                for &v in g.neighbors(u) {
                    prop_assert!(g.has_edge(v, u));
                }
            }
        }

        #[test]
        fn triangle_inequality(n in 2usize..20, seed in any::<u64>(), picks in prop::collection::vec((0usize..20, 0usize..20, 0usize..20), 10)) {
            let g = erdos_renyi(n, 0.3, seed);
            let rows: Vec<Vec<u32>> = g.all_pairs_distances().collect();
            for (a, b, c) in picks {
                let (a, b, c) = (a % n, b % n, c % n);
                let (ab, bc, ac) = (rows[a][b], rows[b][c], rows[a][c]);
                if ab != UNREACHABLE && bc != UNREACHABLE {
                    prop_assert!(ac <= ab + bc);
                }
            }
        }

        #[test]
        fn largest_component_idempotent(n in 1usize..30, p in 0.0f64..0.3, seed in any::<u64>()) {
            let g = erdos_renyi(n, p, seed);
            let lcc = g.largest_component();
            prop_assert!(lcc.is_connected());
            prop_assert_eq!(lcc.largest_component(), lcc);
        }
    }
}
