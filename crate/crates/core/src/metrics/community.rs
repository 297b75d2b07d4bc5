//! Label-propagation community detection.

use std::collections::VecDeque;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::graph::TopologyGraph;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LabelPropagation {
    /// Queue-based fast label propagation.
    Fast,
    /// Randomly ordered sweeps until no label changes.
    Async,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Communities {
    pub labels: Vec<u32>,
    pub count: usize,
}

const MAX_SWEEPS: usize = 10_000;

/// Labels carried by the most neighbours of `v`, ascending.
fn majority_labels(g: &TopologyGraph, labels: &[u32], v: u32, counts: &mut [u32], best: &mut Vec<u32>) {
    best.clear();
    let mut top = 0;
    for &w in g.neighbors(v) {
        let l = labels[w as usize];
        counts[l as usize] += 1;
        top = top.max(counts[l as usize]);
    }
    for &w in g.neighbors(v) {
        let l = labels[w as usize];
        if counts[l as usize] == top {
            best.push(l);
            // Zero the count so each label is pushed once.
            counts[l as usize] = 0;
        }
    }
    for &w in g.neighbors(v) {
        counts[labels[w as usize] as usize] = 0;
    }
    best.sort_unstable();
}

/// Runs label propagation; deterministic for a given seed.
pub fn label_propagation(g: &TopologyGraph, variant: LabelPropagation, seed: u64) -> Communities {
    let n = g.node_count();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut labels: Vec<u32> = (0..n as u32).collect();
    let mut counts = vec![0u32; n];
    let mut best = Vec::new();
    match variant {
        LabelPropagation::Fast => {
            let mut order: Vec<u32> = g.nodes().collect();
            order.shuffle(&mut rng);
            let mut queued = vec![true; n];
            let mut queue: VecDeque<u32> = order.into();
            while let Some(v) = queue.pop_front() {
                queued[v as usize] = false;
                if g.degree(v) == 0 {
                    continue;
                }
                majority_labels(g, &labels, v, &mut counts, &mut best);
                let chosen = if best.len() == 1 { best[0] } else { *best.choose(&mut rng).unwrap() };
                if labels[v as usize] != chosen {
                    labels[v as usize] = chosen;
                    for &w in g.neighbors(v) {
                        if !queued[w as usize] && labels[w as usize] != chosen {
                            queued[w as usize] = true;
                            queue.push_back(w);
                        }
                    }
                }
            }
        }
        LabelPropagation::Async => {
            let mut order: Vec<u32> = g.nodes().collect();
            let mut changed = true;
            let mut sweeps = 0;
            // Guard against oscillation on adversarial tie patterns.
            while changed && sweeps < MAX_SWEEPS {
                sweeps += 1;
                changed = false;
                order.shuffle(&mut rng);
                for &v in &order {
                    if g.degree(v) == 0 {
                        continue;
                    }
                    majority_labels(g, &labels, v, &mut counts, &mut best);
                    if best.binary_search(&labels[v as usize]).is_err() {
                        labels[v as usize] = *best.choose(&mut rng).unwrap();
                        changed = true;
                    }
                }
            }
        }
    }
    let mut distinct = labels.clone();
    distinct.sort_unstable();
    distinct.dedup();
    Communities { count: distinct.len(), labels }
}
