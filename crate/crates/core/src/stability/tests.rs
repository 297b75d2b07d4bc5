use proptest::prelude::*;
use rand::seq::index;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::*;
use crate::gossip::{NodeId, ShortChannelId};
use crate::graph::generators::{cycle, erdos_renyi};
use crate::snapshot::{Channel, DEFAULT_LIVENESS_WINDOW};

fn ids(v: &[u64]) -> Vec<NodeId> {
    v.iter().map(|&i| NodeId::synthetic(i)).collect()
}

/// Graph over the given synthetic ids with edges given as id pairs.
fn graph(nodes: &[u64], edges: &[(u64, u64)]) -> TopologyGraph {
    let pos = |x: u64| nodes.iter().position(|&n| n == x).unwrap() as u32;
    TopologyGraph::from_edges(ids(nodes), edges.iter().map(|&(a, b)| (pos(a), pos(b)))).unwrap()
}

fn snapshot_of(g: &TopologyGraph, at: Timestamp) -> Snapshot {
    let channels = g.edges().map(|(u, v)| {
        let (a, b) = (g.id(u), g.id(v));
        // Derive a stable scid from the endpoint ids.
        let key = u64::from_be_bytes(a.0[25..33].try_into().unwrap()) * 100_000
            + u64::from_be_bytes(b.0[25..33].try_into().unwrap());
        Channel::new(ShortChannelId::from_u64(key), a, b, None, None)
    });
    Snapshot::from_channels(at, DEFAULT_LIVENESS_WINDOW, channels).unwrap()
}

#[test]
fn node_rate_examples() {
    let a = graph(&[1, 2, 3, 4], &[(1, 2), (3, 4)]);
    let b = graph(&[2, 3, 4, 5], &[(2, 3), (4, 5)]);
    assert_eq!(node_intersection_rate(&a, &a), Ok(1.0));
    assert_eq!(node_intersection_rate(&a, &b), Ok(0.75));
    let c = graph(&[7, 8], &[(7, 8)]);
    assert_eq!(node_intersection_rate(&a, &c), Ok(0.0));
    let empty = TopologyGraph::with_synthetic_ids(0, []).unwrap();
    assert_eq!(node_intersection_rate(&empty, &a), Err(StabilityError::EmptyBase));
}

#[test]
fn channel_rate_examples() {
    let a = graph(&[1, 2, 3], &[(1, 2)]);
    let b = graph(&[1, 2, 3], &[(1, 3), (3, 2)]);
    assert_eq!(channel_intersection_rate(&a, &b, 0), Ok(0.0));
    assert_eq!(channel_intersection_rate(&a, &b, 1), Ok(1.0));
    for slack in 0..3 {
        assert_eq!(channel_intersection_rate(&a, &a, slack), Ok(1.0));
    }
    // Four channels; (4,5) disappears along with node 5.
    let a = graph(&[1, 2, 3, 4, 5], &[(1, 2), (2, 3), (3, 4), (4, 5)]);
    let b = graph(&[1, 2, 3, 4], &[(1, 2), (2, 3), (3, 4)]);
    assert_eq!(channel_intersection_rate(&a, &b, 0), Ok(1.0));
    // With node 5 still present but unconnected to 4, the pair counts.
    let b = graph(&[1, 2, 3, 4, 5, 6], &[(1, 2), (2, 3), (3, 4), (5, 6)]);
    assert_eq!(channel_intersection_rate(&a, &b, 0), Ok(0.75));
    let disjoint = graph(&[8, 9], &[(8, 9)]);
    assert_eq!(channel_intersection_rate(&a, &disjoint, 0), Err(StabilityError::EmptyBase));
}

#[test]
fn identical_series() {
    let s = snapshot_of(&erdos_renyi(60, 0.1, 1).largest_component(), 100);
    let mut s2 = s.clone();
    s2.at = 200;
    let mut s3 = s.clone();
    s3.at = 300;
    let cfg = StabilityConfig {
        sampler: Some(ForestFireConfig { target_size: 20, count: 5, ..ForestFireConfig::default() }),
        ..StabilityConfig::default()
    };
    let series = stability_series(&[s, s2, s3], &cfg).unwrap();
    // 2 transitions × (full + 5 samples + mean) + long range.
    assert_eq!(series.rows.len(), 2 * 7 + 1);
    for r in &series.rows {
        assert_eq!(r.i_node, Some(1.0));
        assert_eq!(r.i_channel, Some(1.0));
        assert_eq!(r.ks.unwrap().statistic, 0.0);
        assert_eq!(r.wasserstein, Some(0.0));
    }
    assert_eq!(series.rows.last().unwrap().scope, Scope::LongRange);
    assert!(matches!(stability_series(&series_one(), &cfg), Err(StabilityError::TooFewSnapshots(1))));
}

fn series_one() -> Vec<Snapshot> {
    vec![snapshot_of(&cycle(5), 1)]
}

#[test]
fn deletion_fixture_has_exact_node_overlap() {
    let mut g = erdos_renyi(1000, 0.05, 7);
    let mut snaps = vec![snapshot_of(&g, 0)];
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for step in 1..4 {
        let n = g.node_count();
        let drop: Vec<usize> = index::sample(&mut rng, n, n / 10).into_vec();
        let keep: Vec<u32> = (0..n as u32).filter(|v| !drop.contains(&(*v as usize))).collect();
        g = g.induced(&keep);
        assert!(g.nodes().all(|v| g.degree(v) > 0));
        snaps.push(snapshot_of(&g, step));
    }
    let cfg = StabilityConfig { sampler: None, long_range: false, ..StabilityConfig::default() };
    let series = stability_series(&snaps, &cfg).unwrap();
    assert_eq!(series.rows.len(), 3);
    for r in &series.rows {
        assert_eq!(r.i_node, Some(0.9));
        // Induced deletion never removes a channel between survivors.
        assert_eq!(r.i_channel, Some(1.0));
    }
}

#[test]
fn series_rows_match_pairwise_calls() {
    let graphs: Vec<TopologyGraph> = (0..3).map(|s| erdos_renyi(80, 0.06, s)).collect();
    let snaps: Vec<Snapshot> = graphs.iter().enumerate().map(|(i, g)| snapshot_of(g, i as u64 * 10)).collect();
    let cfg = StabilityConfig { hop_slack: 1, sampler: None, long_range: true };
    let series = stability_series(&snaps, &cfg).unwrap();
    let full: Vec<_> = series.rows_with_scope(Scope::Full).collect();
    assert_eq!(full.len(), 2);
    for (i, r) in full.iter().enumerate() {
        let a = TopologyGraph::from_snapshot(&snaps[i]);
        let b = TopologyGraph::from_snapshot(&snaps[i + 1]);
        assert_eq!(r.t, snaps[i].at);
        assert_eq!(r.i_node, node_intersection_rate(&a, &b).ok());
        assert_eq!(r.i_channel, channel_intersection_rate(&a, &b, 1).ok());
        let ks = ks_degrees(&DegreeDistribution::from_graph(&a), &DegreeDistribution::from_graph(&b)).unwrap();
        assert_eq!(r.ks, Some(ks));
    }
    let lr = series.rows_with_scope(Scope::LongRange).next().unwrap();
    assert_eq!((lr.t, lr.t_next), (0, 20));
}

#[test]
fn whole_graph_samples_reproduce_full_rates() {
    let g = erdos_renyi(50, 0.15, 2).largest_component();
    let next = g.induced(&(0..g.node_count() as u32).filter(|v| v % 7 != 0).collect::<Vec<_>>());
    let snaps = [snapshot_of(&g, 1), snapshot_of(&next, 2)];
    let ff = ForestFireConfig { target_size: g.node_count(), count: 3, ..ForestFireConfig::default() };
    let cfg = StabilityConfig { hop_slack: 0, sampler: Some(ff), long_range: false };
    let series = stability_series(&snaps, &cfg).unwrap();
    let full = series.rows_with_scope(Scope::Full).next().unwrap();
    let mean = series.rows_with_scope(Scope::SampleMean).next().unwrap();
    assert!((full.i_node.unwrap() - mean.i_node.unwrap()).abs() < 1e-12);
    assert!((full.i_channel.unwrap() - mean.i_channel.unwrap()).abs() < 1e-12);
}

#[test]
fn small_graph_skips_samples() {
    let snaps = [snapshot_of(&cycle(10), 1), snapshot_of(&cycle(10), 2)];
    let series = stability_series(&snaps, &StabilityConfig::default()).unwrap();
    assert_eq!(series.skipped_samples.len(), 1);
    assert_eq!(series.rows.len(), 2);
}

#[test]
fn csv_layout() {
    let snaps = [snapshot_of(&cycle(6), 5), snapshot_of(&cycle(6), 9)];
    let cfg = StabilityConfig { sampler: None, long_range: false, ..StabilityConfig::default() };
    let mut out = Vec::new();
    stability_series(&snaps, &cfg).unwrap().write_csv(&mut out).unwrap();
    assert_eq!(
        String::from_utf8(out).unwrap(),
        format!("{CSV_HEADER}\n5,9,1,1,0,0,1,0,0,full\n")
    );
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn rates_bounded_and_monotone_in_slack(s1 in any::<u64>(), s2 in any::<u64>(), p in 0.05f64..0.4) {
        let a = erdos_renyi(25, p, s1);
        let b = erdos_renyi(25, p, s2);
        let i = node_intersection_rate(&a, &b).unwrap();
        prop_assert!((0.0..=1.0).contains(&i));
        if a.edge_count() > 0 {
            let mut prev = 0.0;
            for slack in 0..4 {
                let c = channel_intersection_rate(&a, &b, slack).unwrap();
                prop_assert!((0.0..=1.0).contains(&c));
                prop_assert!(c >= prev);
                prev = c;
            }
        }
    }
}
