use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use dish_bench::coverage_instance;
use dish_core::coverage::{enumerate_orphanages, exact_cover_indices, greedy_cover_indices, DEFAULT_EXACT_LIMIT};
use dish_core::sim::{simulate, Network, SimConfig, Traffic};
use dish_core::{fixtures, plan, PsmMode, SolverKind};

fn orphanages(c: &mut Criterion) {
    let mut g = c.benchmark_group("orphanages");
    for disks in [4, 6, 8] {
        let (t, u) = coverage_instance(disks as u64, disks);
        g.bench_with_input(BenchmarkId::from_parameter(disks), &(t, u), |b, (t, u)| {
            b.iter(|| enumerate_orphanages(black_box(t), black_box(u)).unwrap())
        });
    }
    g.finish();
}

fn cover(c: &mut Criterion) {
    let (t, u) = coverage_instance(8, 8);
    let sets = enumerate_orphanages(&t, &u).unwrap().up_sets();
    let mut g = c.benchmark_group("cover");
    g.bench_function("greedy", |b| b.iter(|| greedy_cover_indices(u.len(), black_box(&sets)).unwrap()));
    if sets.len() <= DEFAULT_EXACT_LIMIT {
        g.bench_function("exact", |b| {
            b.iter(|| exact_cover_indices(u.len(), black_box(&sets), None, DEFAULT_EXACT_LIMIT).unwrap())
        });
    }
    g.finish();
}

fn simulation(c: &mut Criterion) {
    let t = fixtures::single_hop();
    let alt: Vec<_> =
        plan(&t, PsmMode::Psm, SolverKind::Exact).unwrap().placement.altruists.iter().map(|a| a.position).collect();
    let mut cfg =
        SimConfig::new(Network::from_topology(&t, &alt), PsmMode::Psm, Traffic::Poisson { rate_per_s: 100.0 });
    cfg.horizon_us = 1e6;
    let mut g = c.benchmark_group("simulate");
    g.sample_size(20);
    g.bench_function("single_hop_1s", |b| b.iter(|| simulate(black_box(&cfg)).unwrap()));
    g.finish();
}

criterion_group!(benches, orphanages, cover, simulation);
criterion_main!(benches);
