//! Bridges, local node connectivity and maximum matching.

use std::collections::VecDeque;

use crate::graph::TopologyGraph;

/// Number of edges whose removal disconnects their endpoints (iterative
/// low-link DFS).
pub fn bridge_count(g: &TopologyGraph) -> usize {
    let n = g.node_count();
    let mut disc = vec![u32::MAX; n];
    let mut low = vec![0u32; n];
    let mut timer = 0u32;
    let mut bridges = 0;
    // (node, parent, next neighbor position)
    let mut stack: Vec<(u32, u32, usize)> = Vec::new();
    for root in g.nodes() {
        if disc[root as usize] != u32::MAX {
            continue;
        }
        disc[root as usize] = timer;
        low[root as usize] = timer;
        timer += 1;
        stack.push((root, u32::MAX, 0));
        while let Some(&mut (v, parent, ref mut pos)) = stack.last_mut() {
            let nb = g.neighbors(v);
            if *pos < nb.len() {
                let w = nb[*pos];
                *pos += 1;
                if w == parent {
                    continue;
                }
                if disc[w as usize] == u32::MAX {
                    disc[w as usize] = timer;
                    low[w as usize] = timer;
                    timer += 1;
                    stack.push((w, v, 0));
                } else {
                    low[v as usize] = low[v as usize].min(disc[w as usize]);
                }
            } else {
                stack.pop();
                if parent != u32::MAX {
                    low[parent as usize] = low[parent as usize].min(low[v as usize]);
                    if low[v as usize] > disc[parent as usize] {
                        bridges += 1;
                    }
                }
            }
        }
    }
    bridges
}

/// Unit-capacity flow network with every node split into `in → out`.
pub struct SplitFlowNetwork {
    head: Vec<usize>,
    to: Vec<u32>,
    next: Vec<usize>,
    cap: Vec<u8>,
    base_cap: Vec<u8>,
}

const NIL: usize = usize::MAX;

impl SplitFlowNetwork {
    pub fn new(g: &TopologyGraph) -> Self {
        let n = g.node_count();
        let mut net = SplitFlowNetwork {
            head: vec![NIL; 2 * n],
            to: Vec::new(),
            next: Vec::new(),
            cap: Vec::new(),
            base_cap: Vec::new(),
        };
        for v in 0..n as u32 {
            net.arc(2 * v, 2 * v + 1);
        }
        for (u, v) in g.edges() {
            net.arc(2 * u + 1, 2 * v);
            net.arc(2 * v + 1, 2 * u);
        }
        net.base_cap = net.cap.clone();
        net
    }

    fn push_arc(&mut self, from: u32, to: u32, cap: u8) {
        self.to.push(to);
        self.cap.push(cap);
        self.next.push(self.head[from as usize]);
        self.head[from as usize] = self.to.len() - 1;
    }

    fn arc(&mut self, from: u32, to: u32) {
        self.push_arc(from, to, 1);
        self.push_arc(to, from, 0);
    }

    /// Maximum number of internally node-disjoint `s`–`t` paths, stopping
    /// early at `limit`.
    pub fn local_connectivity(&mut self, s: u32, t: u32, limit: usize) -> usize {
        self.cap.clone_from(&self.base_cap);
        let source = 2 * s + 1;
        let sink = 2 * t;
        let mut flow = 0;
        let mut pred = vec![NIL; self.head.len()];
        let mut queue = VecDeque::new();
        while flow < limit {
            pred.iter_mut().for_each(|p| *p = NIL);
            queue.clear();
            queue.push_back(source);
            let mut found = false;
            'bfs: while let Some(x) = queue.pop_front() {
                let mut e = self.head[x as usize];
                while e != NIL {
                    let y = self.to[e];
                    if self.cap[e] > 0 && y != source && pred[y as usize] == NIL {
                        pred[y as usize] = e;
                        if y == sink {
                            found = true;
                            break 'bfs;
                        }
                        queue.push_back(y);
                    }
                    e = self.next[e];
                }
            }
            if !found {
                break;
            }
            let mut y = sink;
            while y != source {
                let e = pred[y as usize];
                self.cap[e] -= 1;
                self.cap[e ^ 1] += 1;
                y = self.to[e ^ 1];
            }
            flow += 1;
        }
        flow
    }
}

/// Maximum matching size via Edmonds' blossom algorithm, seeded with a
/// greedy matching.
pub fn maximum_matching(g: &TopologyGraph) -> usize {
    let n = g.node_count();
    let mut mate = vec![u32::MAX; n];
    for u in g.nodes() {
        if mate[u as usize] == u32::MAX {
            if let Some(&v) = g.neighbors(u).iter().find(|&&v| mate[v as usize] == u32::MAX) {
                mate[u as usize] = v;
                mate[v as usize] = u;
            }
        }
    }
    let mut blossom = Blossom::new(n);
    for root in g.nodes() {
        if mate[root as usize] == u32::MAX && g.degree(root) > 0 {
            if let Some(end) = blossom.find_path(g, &mate, root) {
                let mut v = end;
                while v != u32::MAX {
                    let pv = blossom.parent[v as usize];
                    let ppv = mate[pv as usize];
                    mate[v as usize] = pv;
                    mate[pv as usize] = v;
                    v = ppv;
                }
            }
        }
    }
    mate.iter().filter(|&&m| m != u32::MAX).count() / 2
}

struct Blossom {
    parent: Vec<u32>,
    base: Vec<u32>,
    used: Vec<bool>,
    in_blossom: Vec<bool>,
    lca_mark: Vec<bool>,
    queue: VecDeque<u32>,
}

impl Blossom {
    fn new(n: usize) -> Self {
        Blossom {
            parent: vec![u32::MAX; n],
            base: (0..n as u32).collect(),
            used: vec![false; n],
            in_blossom: vec![false; n],
            lca_mark: vec![false; n],
            queue: VecDeque::new(),
        }
    }

    fn lca(&mut self, mate: &[u32], mut a: u32, mut b: u32) -> u32 {
        self.lca_mark.iter_mut().for_each(|m| *m = false);
        loop {
            a = self.base[a as usize];
            self.lca_mark[a as usize] = true;
            if mate[a as usize] == u32::MAX {
                break;
            }
            a = self.parent[mate[a as usize] as usize];
        }
        loop {
            b = self.base[b as usize];
            if self.lca_mark[b as usize] {
                return b;
            }
            b = self.parent[mate[b as usize] as usize];
        }
    }

    fn mark_path(&mut self, mate: &[u32], mut v: u32, b: u32, mut child: u32) {
        while self.base[v as usize] != b {
            let mv = mate[v as usize];
            self.in_blossom[self.base[v as usize] as usize] = true;
            self.in_blossom[self.base[mv as usize] as usize] = true;
            self.parent[v as usize] = child;
            child = mv;
            v = self.parent[mv as usize];
        }
    }

    /// BFS for an augmenting path from `root`; returns its free endpoint with
    /// `parent` links describing the path.
    fn find_path(&mut self, g: &TopologyGraph, mate: &[u32], root: u32) -> Option<u32> {
        let n = g.node_count();
        self.used.iter_mut().for_each(|u| *u = false);
        self.parent.iter_mut().for_each(|p| *p = u32::MAX);
        for i in 0..n {
            self.base[i] = i as u32;
        }
        self.used[root as usize] = true;
        self.queue.clear();
        self.queue.push_back(root);
        while let Some(v) = self.queue.pop_front() {
            for &to in g.neighbors(v) {
                if self.base[v as usize] == self.base[to as usize] || mate[v as usize] == to {
                    continue;
                }
                if to == root
                    || (mate[to as usize] != u32::MAX
                        && self.parent[mate[to as usize] as usize] != u32::MAX)
                {
                    let cur = self.lca(mate, v, to);
                    self.in_blossom.iter_mut().for_each(|b| *b = false);
                    self.mark_path(mate, v, cur, to);
                    self.mark_path(mate, to, cur, v);
                    for i in 0..n {
                        if self.in_blossom[self.base[i] as usize] {
                            self.base[i] = cur;
                            if !self.used[i] {
                                self.used[i] = true;
                                self.queue.push_back(i as u32);
                            }
                        }
                    }
                } else if self.parent[to as usize] == u32::MAX {
                    self.parent[to as usize] = v;
                    if mate[to as usize] == u32::MAX {
                        return Some(to);
                    }
                    let m = mate[to as usize];
                    self.used[m as usize] = true;
                    self.queue.push_back(m);
                }
            }
        }
        None
    }
}
