use std::cmp::Ordering;
use std::collections::BinaryHeap;

use super::{edge_cost, CostModel, RoutingError};
use crate::gossip::{Direction, NodeId};
use crate::snapshot::Snapshot;

/// Directed graph of usable channel directions weighted by one cost model
/// at one payment amount. Node indices follow the snapshot's node-id order.
/// Parallel channels between the same ordered pair collapse to the cheapest.
#[derive(Debug, Clone)]
pub struct RoutingGraph {
    ids: Vec<NodeId>,
    offsets: Vec<usize>,
    targets: Vec<u32>,
    costs: Vec<f64>,
    amount_msat: u64,
}

impl RoutingGraph {
    pub fn new(snapshot: &Snapshot, model: &CostModel, amount_msat: u64) -> Self {
        let ids: Vec<NodeId> = snapshot.nodes.keys().copied().collect();
        let index = |id: &NodeId| ids.binary_search(id).expect("endpoint in node set") as u32;
        let mut arcs: Vec<(u32, u32, f64)> = Vec::new();
        for ch in snapshot.channels.values() {
            let (a, b) = (index(&ch.endpoint_a), index(&ch.endpoint_b));
            for (dir, from, to) in [(Direction::Forward, a, b), (Direction::Backward, b, a)] {
                if let Some(cost) = ch.policy(dir).and_then(|p| edge_cost(model, p, amount_msat).ok()) {
                    arcs.push((from, to, cost));
                }
            }
        }
        Self::from_arcs(ids, arcs, amount_msat)
    }

    /// Builds a graph from explicit weighted arcs; duplicates keep the
    /// smallest weight.
    pub fn from_arcs(ids: Vec<NodeId>, mut arcs: Vec<(u32, u32, f64)>, amount_msat: u64) -> Self {
        arcs.sort_by(|x, y| (x.0, x.1).cmp(&(y.0, y.1)).then(x.2.total_cmp(&y.2)));
        arcs.dedup_by(|later, earlier| later.0 == earlier.0 && later.1 == earlier.1);
        let n = ids.len();
        let mut offsets = vec![0usize; n + 1];
        for &(u, _, _) in &arcs {
            offsets[u as usize + 1] += 1;
        }
        for i in 0..n {
            offsets[i + 1] += offsets[i];
        }
        RoutingGraph {
            ids,
            offsets,
            targets: arcs.iter().map(|a| a.1).collect(),
            costs: arcs.iter().map(|a| a.2).collect(),
            amount_msat,
        }
    }

    pub fn node_count(&self) -> usize {
        self.ids.len()
    }

    pub fn arc_count(&self) -> usize {
        self.targets.len()
    }

    pub fn ids(&self) -> &[NodeId] {
        &self.ids
    }

    pub fn index_of(&self, id: &NodeId) -> Option<u32> {
        self.ids.binary_search(id).ok().map(|i| i as u32)
    }

    pub fn amount_msat(&self) -> u64 {
        self.amount_msat
    }

    /// Outgoing arcs of `u` as `(target, cost)`, targets ascending.
    pub fn arcs(&self, u: u32) -> impl Iterator<Item = (u32, f64)> + '_ {
        let r = self.offsets[u as usize]..self.offsets[u as usize + 1];
        self.targets[r.clone()].iter().copied().zip(self.costs[r].iter().copied())
    }

    /// Cheapest path from `source` to `target`. Ties in total cost go to the
    /// path with fewer hops, then to the lexicographically smallest sequence
    /// of node indices.
    pub fn route(&self, source: u32, target: u32) -> Result<RouteResult, RoutingError> {
        let n = self.node_count() as u32;
        for v in [source, target] {
            if v >= n {
                return Err(RoutingError::IndexNotFound(v));
            }
        }
        let mut search = Search::new(self.node_count());
        Ok(search.run(self, source, target))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RouteStatus {
    Found,
    NoRoute,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RouteResult {
    pub status: RouteStatus,
    /// Node indices from source to destination inclusive; empty when no
    /// route exists.
    pub path: Vec<u32>,
    pub total_cost: f64,
}

impl RouteResult {
    /// Forwarding nodes, excluding both endpoints.
    pub fn intermediate(&self) -> &[u32] {
        if self.path.len() < 2 {
            &[]
        } else {
            &self.path[1..self.path.len() - 1]
        }
    }

    pub fn hop_count(&self) -> usize {
        self.path.len().saturating_sub(1)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PaymentRequest {
    pub source: NodeId,
    pub destination: NodeId,
    pub amount_msat: u64,
}

/// Routes a single payment over `snapshot`. For many payments build one
/// [`RoutingGraph`] and call [`RoutingGraph::route`].
pub fn find_route(snapshot: &Snapshot, request: &PaymentRequest, model: &CostModel) -> Result<RouteResult, RoutingError> {
    let g = RoutingGraph::new(snapshot, model, request.amount_msat);
    let s = g.index_of(&request.source).ok_or(RoutingError::NodeNotFound(request.source))?;
    let t = g.index_of(&request.destination).ok_or(RoutingError::NodeNotFound(request.destination))?;
    g.route(s, t)
}

#[derive(Clone, Copy)]
struct Entry {
    cost: f64,
    hops: u32,
    node: u32,
}

impl PartialEq for Entry {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for Entry {}

impl PartialOrd for Entry {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Entry {
    /// Reversed so the max-heap pops the smallest key.
    fn cmp(&self, other: &Self) -> Ordering {
        other
            .cost
            .total_cmp(&self.cost)
            .then(other.hops.cmp(&self.hops))
            .then(other.node.cmp(&self.node))
    }
}

struct Search {
    cost: Vec<f64>,
    hops: Vec<u32>,
    pred: Vec<u32>,
    done: Vec<bool>,
    heap: BinaryHeap<Entry>,
}

const NONE: u32 = u32::MAX;

impl Search {
    fn new(n: usize) -> Self {
        Search {
            cost: vec![f64::INFINITY; n],
            hops: vec![u32::MAX; n],
            pred: vec![NONE; n],
            done: vec![false; n],
            heap: BinaryHeap::new(),
        }
    }

    fn path_to(&self, mut v: u32) -> Vec<u32> {
        let mut p = vec![v];
        while self.pred[v as usize] != NONE {
            v = self.pred[v as usize];
            p.push(v);
        }
        p.reverse();
        p
    }

    /// Whether reaching `v` via `u` gives a lexicographically smaller node
    /// sequence than the current predecessor chain (both have equal length).
    fn lex_better(&self, u: u32, v: u32) -> bool {
        let current = self.pred[v as usize];
        if current == NONE {
            return true;
        }
        self.path_to(u) < self.path_to(current)
    }

    fn run(&mut self, g: &RoutingGraph, source: u32, target: u32) -> RouteResult {
        self.cost[source as usize] = 0.0;
        self.hops[source as usize] = 0;
        self.heap.push(Entry { cost: 0.0, hops: 0, node: source });
        while let Some(Entry { cost, hops, node: u }) = self.heap.pop() {
            if self.done[u as usize] || cost != self.cost[u as usize] || hops != self.hops[u as usize] {
                continue;
            }
            self.done[u as usize] = true;
            if u == target {
                break;
            }
            for (v, w) in g.arcs(u) {
                if self.done[v as usize] {
                    continue;
                }
                let c = cost + w;
                let h = hops + 1;
                let (cv, hv) = (self.cost[v as usize], self.hops[v as usize]);
                let better = c < cv || (c == cv && (h < hv || (h == hv && self.lex_better(u, v))));
                if better {
                    self.cost[v as usize] = c;
                    self.hops[v as usize] = h;
                    self.pred[v as usize] = u;
                    self.heap.push(Entry { cost: c, hops: h, node: v });
                }
            }
        }
        if !self.done[target as usize] {
            return RouteResult { status: RouteStatus::NoRoute, path: Vec::new(), total_cost: f64::INFINITY };
        }
        RouteResult {
            status: RouteStatus::Found,
            path: self.path_to(target),
            total_cost: self.cost[target as usize],
        }
    }
}

#[cfg(test)]
mod tests {
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    use super::*;
    use crate::gossip::ShortChannelId;
    use crate::routing::ModelKind;
    use crate::snapshot::{Channel, ChannelPolicy, DEFAULT_LIVENESS_WINDOW};

    fn ids(n: usize) -> Vec<NodeId> {
        (0..n as u64).map(NodeId::synthetic).collect()
    }

    /// Undirected weighted graph: both directions share the weight.
    fn symmetric(n: usize, edges: &[(u32, u32, f64)]) -> RoutingGraph {
        let arcs = edges.iter().flat_map(|&(u, v, w)| [(u, v, w), (v, u, w)]).collect();
        RoutingGraph::from_arcs(ids(n), arcs, 1)
    }

    #[test]
    fn direct_channel_preferred() {
        let g = symmetric(3, &[(0, 1, 1.0), (0, 2, 1.0), (2, 1, 1.0)]);
        let r = g.route(0, 1).unwrap();
        assert_eq!(r.path, vec![0, 1]);
        assert!(r.intermediate().is_empty());
    }

    #[test]
    fn diamond_takes_cheaper_arm() {
        // 0–3 direct costs 10; 0–1–3 costs 3 + 4; 0–2–3 costs 5 + 5.
        let g = symmetric(4, &[(0, 3, 10.0), (0, 1, 3.0), (1, 3, 4.0), (0, 2, 5.0), (2, 3, 5.0)]);
        let r = g.route(0, 3).unwrap();
        assert_eq!(r.path, vec![0, 1, 3]);
        assert_eq!(r.total_cost, 7.0);
        assert_eq!(r.intermediate(), &[1]);
    }

    #[test]
    fn ties_prefer_fewer_hops_then_lexicographic() {
        // 0→3 at cost 2 either directly or via 1 or 2.
        let g = symmetric(4, &[(0, 3, 2.0), (0, 1, 1.0), (1, 3, 1.0), (0, 2, 1.0), (2, 3, 1.0)]);
        assert_eq!(g.route(0, 3).unwrap().path, vec![0, 3]);
        let g = symmetric(4, &[(0, 2, 1.0), (2, 3, 1.0), (0, 1, 1.0), (1, 3, 1.0)]);
        assert_eq!(g.route(0, 3).unwrap().path, vec![0, 1, 3]);
        assert_eq!(g.route(3, 0).unwrap().path, vec![3, 1, 0]);
    }

    #[test]
    fn unreachable_and_missing() {
        let g = symmetric(4, &[(0, 1, 1.0), (2, 3, 1.0)]);
        let r = g.route(0, 3).unwrap();
        assert_eq!(r.status, RouteStatus::NoRoute);
        assert!(r.path.is_empty());
        assert_eq!(g.route(0, 9), Err(RoutingError::IndexNotFound(9)));
    }

    fn policy(base: u32, disabled: bool) -> ChannelPolicy {
        ChannelPolicy {
            direction: Direction::Forward,
            fee_base_msat: base,
            fee_proportional_millionths: 0,
            cltv_expiry_delta: 0,
            htlc_minimum_msat: 0,
            htlc_maximum_msat: None,
            last_update: 0,
            disabled,
        }
    }

    #[test]
    fn snapshot_directions_respected() {
        let n = ids(3);
        let scid = |i| ShortChannelId::from_u64(i);
        // 0→1 usable only forward; 1–2 usable both ways.
        let channels = vec![
            Channel::new(scid(1), n[0], n[1], Some(policy(5, false)), Some(policy(5, true))),
            Channel::new(scid(2), n[1], n[2], Some(policy(5, false)), Some(policy(5, false))),
        ];
        let snap = Snapshot::from_channels(10, DEFAULT_LIVENESS_WINDOW, channels).unwrap();
        let model = CostModel::new(ModelKind::Lnd);
        let req = |s: usize, d: usize| PaymentRequest { source: n[s], destination: n[d], amount_msat: 1000 };
        let r = find_route(&snap, &req(0, 2), &model).unwrap();
        assert_eq!(r.path, vec![0, 1, 2]);
        assert_eq!(find_route(&snap, &req(2, 0), &model).unwrap().status, RouteStatus::NoRoute);
        let missing = PaymentRequest { source: NodeId::synthetic(77), destination: n[0], amount_msat: 1 };
        assert_eq!(find_route(&snap, &missing, &model), Err(RoutingError::NodeNotFound(missing.source)));
    }

    /// Bellman–Ford over the same arcs with the same float additions.
    fn bellman_ford(g: &RoutingGraph, s: u32) -> Vec<f64> {
        let n = g.node_count();
        let mut d = vec![f64::INFINITY; n];
        d[s as usize] = 0.0;
        for _ in 0..n {
            let mut changed = false;
            for u in 0..n as u32 {
                if d[u as usize].is_infinite() {
                    continue;
                }
                for (v, w) in g.arcs(u) {
                    let c = d[u as usize] + w;
                    if c < d[v as usize] {
                        d[v as usize] = c;
                        changed = true;
                    }
                }
            }
            if !changed {
                break;
            }
        }
        d
    }

    #[test]
    fn dijkstra_matches_bellman_ford() {
        let mut rng = ChaCha8Rng::seed_from_u64(42);
        for trial in 0..100 {
            let n = rng.gen_range(2..=50);
            let p = rng.gen_range(0.05..0.3);
            let mut arcs = Vec::new();
            for u in 0..n as u32 {
                for v in 0..n as u32 {
                    if u != v && rng.gen_bool(p) {
                        // Coarse weights make equal-cost ties common.
                        arcs.push((u, v, f64::from(rng.gen_range(1..6u32)) * 0.5 + 1e-6));
                    }
                }
            }
            let g = RoutingGraph::from_arcs(ids(n), arcs, 1);
            let s = rng.gen_range(0..n as u32);
            let oracle = bellman_ford(&g, s);
            for t in 0..n as u32 {
                let r = g.route(s, t).unwrap();
                if oracle[t as usize].is_infinite() {
                    assert_eq!(r.status, RouteStatus::NoRoute, "trial {trial}");
                } else {
                    assert_eq!(r.total_cost, oracle[t as usize], "trial {trial}");
                    let sum = r.path.windows(2).fold(0.0, |acc, w| {
                        acc + g.arcs(w[0]).find(|a| a.0 == w[1]).unwrap().1
                    });
                    assert_eq!(sum, r.total_cost);
                }
            }
        }
    }

    proptest! {
        #[test]
        fn path_is_lexicographically_least_among_optimal(seed in any::<u64>()) {
            // Unit weights: the optimum is the BFS distance and every
            // shortest path ties on cost and hops.
            let base = crate::graph::generators::erdos_renyi(9, 0.35, seed);
            let edges: Vec<(u32, u32, f64)> = base.edges().map(|(u, v)| (u, v, 1.0)).collect();
            let g = symmetric(9, &edges);
            let dist = base.bfs_distances(0).unwrap();
            for t in 1..9u32 {
                let r = g.route(0, t).unwrap();
                if dist[t as usize] == crate::graph::UNREACHABLE {
                    prop_assert_eq!(r.status, RouteStatus::NoRoute);
                    continue;
                }
                // Greedy smallest-index walk along the shortest-path DAG.
                let to_t = base.bfs_distances(t).unwrap();
                let mut expected = vec![0u32];
                let mut cur = 0u32;
                while cur != t {
                    cur = *base.neighbors(cur).iter().find(|&&w| to_t[w as usize] + 1 == to_t[cur as usize]).unwrap();
                    expected.push(cur);
                }
                prop_assert_eq!(r.path, expected);
            }
        }
    }
}
