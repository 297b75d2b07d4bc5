use std::io::{self, Write};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{CostModel, ModelKind, RouteStatus, RoutingError, RoutingGraph};
use crate::gossip::NodeId;
use crate::metrics::inequality::gini;
use crate::metrics::{fit_power_law_points, PowerLawFit};
use crate::par;
use crate::snapshot::Snapshot;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SimulationConfig {
    pub n_tx: usize,
    pub amount_msat: u64,
    pub seed: u64,
}

impl Default for SimulationConfig {
    fn default() -> Self {
        SimulationConfig { n_tx: 5000, amount_msat: 100_000, seed: 0 }
    }
}

/// Per-node forwarding counts from one simulation run. `counts[i]` belongs
/// to `ids[i]`; every snapshot node is present, including those that never
/// forwarded.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HopTally {
    pub model: ModelKind,
    pub ids: Vec<NodeId>,
    pub counts: Vec<u64>,
    pub n_requests: usize,
    pub n_routed: usize,
}

impl HopTally {
    pub fn total(&self) -> u64 {
        self.counts.iter().sum()
    }

    pub fn get(&self, id: &NodeId) -> Option<u64> {
        self.ids.binary_search(id).ok().map(|i| self.counts[i])
    }

    /// `node_id_hex,hops`, one row per node in id order.
    pub fn write_csv<W: Write>(&self, mut w: W) -> io::Result<()> {
        writeln!(w, "node_id_hex,hops")?;
        for (id, c) in self.ids.iter().zip(&self.counts) {
            writeln!(w, "{},{c}", id.to_hex())?;
        }
        Ok(())
    }
}

/// Uniformly drawn `(source, destination)` index pairs with distinct
/// endpoints.
pub fn payment_pairs(n: usize, count: usize, seed: u64) -> Vec<(u32, u32)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| {
            let s = rng.gen_range(0..n as u32);
            let mut d = rng.gen_range(0..n as u32 - 1);
            if d >= s {
                d += 1;
            }
            (s, d)
        })
        .collect()
}

/// Routes `cfg.n_tx` uniformly drawn payments and counts how often each node
/// appears as an intermediate hop. Failed payments are not retried.
pub fn simulate(snapshot: &Snapshot, model: &CostModel, cfg: &SimulationConfig) -> Result<HopTally, RoutingError> {
    let g = RoutingGraph::new(snapshot, model, cfg.amount_msat);
    simulate_on(&g, model.kind, &payment_pairs_checked(g.node_count(), cfg)?)
}

fn payment_pairs_checked(n: usize, cfg: &SimulationConfig) -> Result<Vec<(u32, u32)>, RoutingError> {
    if n < 2 {
        return Err(RoutingError::GraphTooSmall(n));
    }
    Ok(payment_pairs(n, cfg.n_tx, cfg.seed))
}

/// Routes an explicit workload of index pairs.
pub fn simulate_on(g: &RoutingGraph, model: ModelKind, pairs: &[(u32, u32)]) -> Result<HopTally, RoutingError> {
    let n = g.node_count();
    if n < 2 {
        return Err(RoutingError::GraphTooSmall(n));
    }
    let routes = par::map_collect(pairs.len(), |i| g.route(pairs[i].0, pairs[i].1));
    let mut counts = vec![0u64; n];
    let mut n_routed = 0;
    for r in routes {
        let r = r?;
        if r.status == RouteStatus::Found {
            n_routed += 1;
            for &v in r.intermediate() {
                counts[v as usize] += 1;
            }
        }
    }
    Ok(HopTally { model, ids: g.ids().to_vec(), counts, n_requests: pairs.len(), n_routed })
}

#[derive(Debug, Clone, PartialEq)]
pub struct HopStatistics {
    /// `(rank fraction, cumulative hop share)` with nodes in descending hop
    /// order, from `(0, 0)` to `(1, 1)`.
    pub curve: Vec<(f64, f64)>,
    /// Power-law fit of the positive hop-count frequencies, when at least
    /// three distinct counts exist.
    pub fit: Option<PowerLawFit>,
    /// Gini index over all nodes, including zero counts.
    pub gini: f64,
    pub n_routed: usize,
}

pub fn hop_statistics(tally: &HopTally) -> Result<HopStatistics, RoutingError> {
    let n = tally.counts.len();
    if n == 0 {
        return Err(RoutingError::EmptyTally);
    }
    let mut sorted = tally.counts.clone();
    sorted.sort_unstable_by(|a, b| b.cmp(a));
    let total = tally.total();
    let mut curve = Vec::with_capacity(n + 1);
    curve.push((0.0, 0.0));
    let mut acc = 0u64;
    for (i, &c) in sorted.iter().enumerate() {
        acc += c;
        let share = if total == 0 { (i + 1) as f64 / n as f64 } else { acc as f64 / total as f64 };
        curve.push(((i + 1) as f64 / n as f64, share));
    }
    let positive: Vec<u64> = sorted.iter().copied().filter(|&c| c > 0).collect();
    let mut points: Vec<(f64, f64)> = Vec::new();
    for &c in positive.iter().rev() {
        match points.last_mut() {
            Some(last) if last.0 == c as f64 => last.1 += 1.0,
            _ => points.push((c as f64, 1.0)),
        }
    }
    for p in &mut points {
        p.1 /= positive.len() as f64;
    }
    let values: Vec<f64> = tally.counts.iter().map(|&c| c as f64).collect();
    Ok(HopStatistics {
        curve,
        fit: fit_power_law_points(&points).ok(),
        gini: gini(&values).expect("counts are non-negative"),
        n_routed: tally.n_routed,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gossip::{Direction, ShortChannelId};
    use crate::graph::generators::{barabasi_albert, star};
    use crate::graph::TopologyGraph;
    use crate::snapshot::{Channel, ChannelPolicy, DEFAULT_LIVENESS_WINDOW};

    fn open_policy(base: u32, cltv: u16) -> ChannelPolicy {
        ChannelPolicy {
            direction: Direction::Forward,
            fee_base_msat: base,
            fee_proportional_millionths: 10,
            cltv_expiry_delta: cltv,
            htlc_minimum_msat: 1,
            htlc_maximum_msat: None,
            last_update: 0,
            disabled: false,
        }
    }

    fn snapshot(g: &TopologyGraph, fee: impl Fn(u32, u32) -> (u32, u16)) -> Snapshot {
        let channels = g.edges().enumerate().map(|(i, (u, v))| {
            let (b1, c1) = fee(u, v);
            let (b2, c2) = fee(v, u);
            Channel::new(
                ShortChannelId::from_u64(i as u64 + 1),
                g.id(u),
                g.id(v),
                Some(open_policy(b1, c1)),
                Some(open_policy(b2, c2)),
            )
        });
        Snapshot::from_channels(1, DEFAULT_LIVENESS_WINDOW, channels).unwrap()
    }

    #[test]
    fn star_hub_takes_all_hops() {
        let snap = snapshot(&star(6), |_, _| (1000, 40));
        for kind in ModelKind::ALL {
            let t = simulate(&snap, &CostModel::new(kind), &SimulationConfig { n_tx: 300, ..Default::default() }).unwrap();
            let hub = t.get(&NodeId::synthetic(0)).unwrap();
            assert_eq!(hub, t.total());
            assert!(hub > 0);
            assert_eq!(t.n_routed, 300);
        }
    }

    #[test]
    fn path_workload() {
        let g = TopologyGraph::with_synthetic_ids(3, [(0, 1), (1, 2)]).unwrap();
        let snap = snapshot(&g, |_, _| (1, 1));
        let rg = RoutingGraph::new(&snap, &CostModel::new(ModelKind::Lnd), 1000);
        let t = simulate_on(&rg, ModelKind::Lnd, &[(0, 2), (2, 0)]).unwrap();
        assert_eq!(t.counts, vec![0, 2, 0]);
    }

    #[test]
    fn deterministic_and_conserving() {
        let g = barabasi_albert(200, 2, 4);
        let snap = snapshot(&g, |u, v| ((u * 7 + v * 3) % 50, (u % 5) as u16 * 20 + 10));
        let model = CostModel::new(ModelKind::Cln);
        let cfg = SimulationConfig { n_tx: 400, amount_msat: 50_000, seed: 9 };
        let a = par::with_threads(1, || simulate(&snap, &model, &cfg).unwrap());
        let b = par::with_threads(4, || simulate(&snap, &model, &cfg).unwrap());
        assert_eq!(a, b);
        // Conservation: recompute every route and sum intermediate counts.
        let rg = RoutingGraph::new(&snap, &model, cfg.amount_msat);
        let pairs = payment_pairs(rg.node_count(), cfg.n_tx, cfg.seed);
        let mut expected = 0u64;
        for &(s, d) in &pairs {
            let r = rg.route(s, d).unwrap();
            assert!(!r.intermediate().contains(&s) && !r.intermediate().contains(&d));
            expected += r.hop_count().saturating_sub(1) as u64;
        }
        assert_eq!(a.total(), expected);
    }

    #[test]
    fn zero_fee_models_agree_on_lengths() {
        let g = barabasi_albert(120, 2, 1);
        let snap = snapshot(&g, |_, _| (0, 0));
        let mut snap = snap;
        for ch in snap.channels.values_mut() {
            for p in [&mut ch.policy_a, &mut ch.policy_b].into_iter().flatten() {
                p.fee_proportional_millionths = 0;
                p.cltv_expiry_delta = 40;
            }
        }
        let pairs = payment_pairs(snap.node_count(), 200, 3);
        let lengths: Vec<Vec<usize>> = ModelKind::ALL
            .iter()
            .map(|&k| {
                let rg = RoutingGraph::new(&snap, &CostModel::new(k), 10_000);
                pairs.iter().map(|&(s, d)| rg.route(s, d).unwrap().hop_count()).collect()
            })
            .collect();
        assert_eq!(lengths[0], lengths[1]);
        assert_eq!(lengths[1], lengths[2]);
    }

    #[test]
    fn too_small() {
        let g = TopologyGraph::with_synthetic_ids(2, [(0, 1)]).unwrap();
        let mut snap = snapshot(&g, |_, _| (0, 0));
        snap.channels.clear();
        snap.nodes.clear();
        let err = simulate(&snap, &CostModel::new(ModelKind::Lnd), &SimulationConfig::default());
        assert_eq!(err, Err(RoutingError::GraphTooSmall(0)));
    }

    fn tally(counts: Vec<u64>) -> HopTally {
        let ids = (0..counts.len() as u64).map(NodeId::synthetic).collect();
        HopTally { model: ModelKind::Lnd, ids, counts, n_requests: 0, n_routed: 0 }
    }

    #[test]
    fn statistics_examples() {
        let s = hop_statistics(&tally(vec![5, 5, 5, 5])).unwrap();
        assert_eq!(s.gini, 0.0);
        for &(x, y) in &s.curve {
            assert!((x - y).abs() < 1e-12);
        }
        let n = 8;
        let mut counts = vec![0; n];
        counts[3] = 40;
        let s = hop_statistics(&tally(counts)).unwrap();
        assert!((s.gini - (n as f64 - 1.0) / n as f64).abs() < 1e-12);
        assert_eq!(s.curve[1], (1.0 / n as f64, 1.0));
        let s = hop_statistics(&tally(vec![1, 2, 3, 4])).unwrap();
        assert!((s.gini - 0.25).abs() < 1e-12);
        assert_eq!(s.curve.len(), 5);
        assert_eq!(hop_statistics(&tally(vec![])), Err(RoutingError::EmptyTally));
    }

    #[test]
    fn fit_on_power_law_tally() {
        // Count c held by ⌊1000 / c²⌋ nodes.
        let mut counts = Vec::new();
        for c in 1..=10u64 {
            counts.extend(std::iter::repeat_n(c, (1000 / (c * c)) as usize));
        }
        let fit = hop_statistics(&tally(counts)).unwrap().fit.unwrap();
        assert!((fit.alpha - 2.0).abs() < 0.05);
    }
}
