//! Synthetic gossip streams for tests, benchmarks and demos.
//!
//! Channels open at uniform random times, attach preferentially to nodes that
//! already have channels, refresh both directions periodically while alive
//! and go silent when they close.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{
    order_records, ChannelAnnouncement, ChannelUpdate, Direction, GossipRecord, NodeAnnouncement,
    NodeId, PolicyFields, ShortChannelId, Timestamp,
};

#[derive(Debug, Clone, PartialEq)]
pub struct SynthConfig {
    pub nodes: usize,
    pub channels: usize,
    pub start: Timestamp,
    pub end: Timestamp,
    /// Seconds between policy refreshes of a live channel.
    pub refresh: u64,
    /// Mean channel lifetime in seconds (exponentially distributed).
    pub mean_lifetime: u64,
    /// Probability that a refresh marks its direction disabled.
    pub disabled_fraction: f64,
    /// Probability that the second direction never publishes a policy.
    pub one_sided_fraction: f64,
    /// Fraction of channels open from `start` (the rest open uniformly later).
    pub initial_fraction: f64,
    pub seed: u64,
}

impl Default for SynthConfig {
    fn default() -> Self {
        SynthConfig {
            nodes: 200,
            channels: 600,
            start: 1_546_300_800, // 2019-01-01
            end: 1_546_300_800 + 35 * 86_400,
            refresh: 86_400,
            mean_lifetime: 120 * 86_400,
            disabled_fraction: 0.05,
            one_sided_fraction: 0.05,
            initial_fraction: 0.7,
            seed: 7,
        }
    }
}

/// Generates an ordered record stream (see [`order_records`]).
pub fn synthesize(cfg: &SynthConfig) -> Vec<GossipRecord> {
    assert!(cfg.nodes >= 2, "need at least two nodes");
    assert!(cfg.end > cfg.start, "empty time range");
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let span = cfg.end - cfg.start;
    // Endpoint multiset for preferential attachment.
    let mut endpoints: Vec<u64> = Vec::with_capacity(2 * cfg.channels);
    let mut records = Vec::new();
    let mut announced = vec![false; cfg.nodes];

    for ch in 0..cfg.channels {
        let u = rng.gen_range(0..cfg.nodes as u64);
        let v = loop {
            let cand = if !endpoints.is_empty() && rng.gen_bool(0.8) {
                endpoints[rng.gen_range(0..endpoints.len())]
            } else {
                rng.gen_range(0..cfg.nodes as u64)
            };
            if cand != u {
                break cand;
            }
        };
        endpoints.push(u);
        endpoints.push(v);
        let (a, b) = (u.min(v), u.max(v));

        let open = if rng.gen_bool(cfg.initial_fraction) {
            cfg.start
        } else {
            cfg.start + rng.gen_range(0..span)
        };
        let lifetime = (-(1.0 - rng.gen::<f64>()).ln() * cfg.mean_lifetime as f64) as u64;
        let close = open.saturating_add(lifetime.max(1));
        let block = 550_000 + ((open - cfg.start) / 600) as u32;
        let scid = ShortChannelId::new(block, ch as u32, rng.gen_range(0..4)).unwrap();

        records.push(GossipRecord::channel_announcement(
            ChannelAnnouncement::new(scid, NodeId::synthetic(a), NodeId::synthetic(b)),
            open,
        ));
        for n in [a, b] {
            if !announced[n as usize] {
                announced[n as usize] = true;
                records.push(GossipRecord::node_announcement(NodeAnnouncement {
                    node_id: NodeId::synthetic(n),
                    timestamp: open.max(1) as u32,
                    features: Vec::new(),
                    rgb_color: [0; 3],
                    alias: format!("node{n}").into_bytes(),
                    addresses: Vec::new(),
                }));
            }
        }

        let one_sided = rng.gen_bool(cfg.one_sided_fraction);
        let directions: &[Direction] = if one_sided {
            &[Direction::Forward]
        } else {
            &[Direction::Forward, Direction::Backward]
        };
        for &direction in directions {
            let fee_base_msat = [0, 1000, rng.gen_range(0..5000)][rng.gen_range(0..3)];
            let fee_proportional_millionths = rng.gen_range(0..2000);
            let cltv_expiry_delta = [40, 80, 144][rng.gen_range(0..3)];
            let htlc_maximum_msat = rng.gen_bool(0.9).then_some(rng.gen_range(1..100) * 10_000_000);
            let mut t = open + rng.gen_range(0..cfg.refresh.max(1));
            while t < close.min(cfg.end) {
                records.push(GossipRecord::channel_update(ChannelUpdate::new(
                    scid,
                    t as u32,
                    PolicyFields {
                        direction,
                        disabled: rng.gen_bool(cfg.disabled_fraction),
                        cltv_expiry_delta,
                        htlc_minimum_msat: 1000,
                        fee_base_msat,
                        fee_proportional_millionths,
                        htlc_maximum_msat,
                    },
                )));
                let jitter = rng.gen_range(0..=cfg.refresh / 4);
                t += cfg.refresh - cfg.refresh / 8 + jitter;
            }
        }
    }
    order_records(records)
}
