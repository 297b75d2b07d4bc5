//! Brandes betweenness centrality on unweighted graphs.

use crate::graph::TopologyGraph;
use crate::par;

/// Betweenness from the given sources, normalised like the undirected
/// convention `b(v) / ((n−1)(n−2)/2)`.
///
/// When `sources` is a strict subset the accumulated dependencies are scaled
/// by `n / |sources|`, giving an unbiased estimate.
pub fn betweenness(g: &TopologyGraph, sources: &[u32]) -> Vec<f64> {
    let n = g.node_count();
    if n == 0 || sources.is_empty() {
        return vec![0.0; n];
    }
    let raw = par::map_reduce_chunks(
        sources.len(),
        || vec![0.0f64; n],
        |mut acc, range| {
            let mut ws = Workspace::new(n);
            for &s in &sources[range] {
                ws.accumulate(g, s, &mut acc);
            }
            acc
        },
        |mut a, b| {
            for (x, y) in a.iter_mut().zip(&b) {
                *x += *y;
            }
            a
        },
    );
    // Each unordered pair is counted from both endpoints.
    let mut scale = n as f64 / sources.len() as f64 / 2.0;
    if n > 2 {
        scale *= 2.0 / ((n - 1) as f64 * (n - 2) as f64);
    }
    raw.into_iter().map(|x| x * scale).collect()
}

struct Workspace {
    sigma: Vec<f64>,
    dist: Vec<i64>,
    delta: Vec<f64>,
    order: Vec<u32>,
}

impl Workspace {
    fn new(n: usize) -> Self {
        Workspace {
            sigma: vec![0.0; n],
            dist: vec![-1; n],
            delta: vec![0.0; n],
            order: Vec::with_capacity(n),
        }
    }

    fn accumulate(&mut self, g: &TopologyGraph, s: u32, acc: &mut [f64]) {
        self.order.clear();
        self.sigma[s as usize] = 1.0;
        self.dist[s as usize] = 0;
        self.order.push(s);
        let mut head = 0;
        while head < self.order.len() {
            let v = self.order[head];
            head += 1;
            let dv = self.dist[v as usize];
            for &w in g.neighbors(v) {
                if self.dist[w as usize] < 0 {
                    self.dist[w as usize] = dv + 1;
                    self.order.push(w);
                }
                if self.dist[w as usize] == dv + 1 {
                    self.sigma[w as usize] += self.sigma[v as usize];
                }
            }
        }
        for &w in self.order.iter().rev() {
            let dw = self.dist[w as usize];
            let coeff = (1.0 + self.delta[w as usize]) / self.sigma[w as usize];
            for &v in g.neighbors(w) {
                if self.dist[v as usize] == dw - 1 {
                    self.delta[v as usize] += self.sigma[v as usize] * coeff;
                }
            }
            if w != s {
                acc[w as usize] += self.delta[w as usize];
            }
        }
        for &v in &self.order {
            self.sigma[v as usize] = 0.0;
            self.dist[v as usize] = -1;
            self.delta[v as usize] = 0.0;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::generators::{path, star};

    #[test]
    fn star_and_path() {
        let b = betweenness(&star(4), &[0, 1, 2, 3, 4]);
        assert!((b[0] - 1.0).abs() < 1e-12);
        assert!(b[1..].iter().all(|&x| x == 0.0));
        // Path 0-1-2-3: node 1 lies on pairs (0,2), (0,3) → 2 / 3.
        let b = betweenness(&path(4), &[0, 1, 2, 3]);
        assert!((b[1] - 2.0 / 3.0).abs() < 1e-12);
        assert!((b[2] - 2.0 / 3.0).abs() < 1e-12);
    }
}
