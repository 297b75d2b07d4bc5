//! One worker versus the default rayon pool on the heavy kernels.
//!
//! `cargo bench -p ln-topo-core` runs both; with
//! `--no-default-features` every kernel is a plain loop and the two groups
//! measure the same code.

use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use ln_topo_core::graph::generators::barabasi_albert;
use ln_topo_core::metrics::betweenness::betweenness;
use ln_topo_core::metrics::{compute, MetricId, MetricParams};
use ln_topo_core::par;
use ln_topo_core::routing::{simulate, CostModel, ModelKind, SimulationConfig};
use ln_topo_core::gossip::synth::{synthesize, SynthConfig};
use ln_topo_core::snapshot::build_snapshot;

fn pools() -> [(&'static str, usize); 2] {
    [("1_thread", 1), ("default", par::current_threads())]
}

fn bench_distances(c: &mut Criterion) {
    let g = barabasi_albert(2000, 2, 1);
    let params = MetricParams::default();
    let mut group = c.benchmark_group("all_pairs_bfs");
    group.sample_size(10);
    for (name, threads) in pools() {
        group.bench_with_input(BenchmarkId::from_parameter(name), &threads, |b, &t| {
            b.iter(|| par::with_threads(t, || compute(black_box(&g), MetricId::WienerIndex, &params).unwrap()))
        });
    }
    group.finish();
}

fn bench_betweenness(c: &mut Criterion) {
    let g = barabasi_albert(2000, 2, 2);
    let sources: Vec<u32> = g.nodes().collect();
    let mut group = c.benchmark_group("betweenness");
    group.sample_size(10);
    for (name, threads) in pools() {
        group.bench_with_input(BenchmarkId::from_parameter(name), &threads, |b, &t| {
            b.iter(|| par::with_threads(t, || betweenness(black_box(&g), &sources)))
        });
    }
    group.finish();
}

fn bench_simulate(c: &mut Criterion) {
    let d = SynthConfig::default();
    let cfg = SynthConfig { nodes: 1000, channels: 4000, end: d.start + 21 * 86_400, seed: 3, ..d };
    let snap = build_snapshot(&synthesize(&cfg), cfg.end, 14 * 86_400).unwrap();
    let model = CostModel::new(ModelKind::Lnd);
    let sim = SimulationConfig { n_tx: 2000, amount_msat: 100_000, seed: 3 };
    let mut group = c.benchmark_group("simulate");
    group.sample_size(10);
    for (name, threads) in pools() {
        group.bench_with_input(BenchmarkId::from_parameter(name), &threads, |b, &t| {
            b.iter(|| par::with_threads(t, || simulate(black_box(&snap), &model, &sim).unwrap()))
        });
    }
    group.finish();
}

criterion_group!(benches, bench_distances, bench_betweenness, bench_simulate);
criterion_main!(benches);
