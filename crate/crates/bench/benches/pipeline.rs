//! Criterion benchmarks for the two hot paths: the widest-path search on a
//! fixed graph, and the full chronological replay at a couple of ledger
//! sizes. `cargo bench -p cycletrace-bench` for real numbers; under
//! `cargo test` each case runs once as a smoke check.

use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

use cycletrace_core::synth::{bench_config, generate, BenchTemplate};
use cycletrace_core::{max_min, run_wcd, widest_search, MultiGraph};

fn search_benches(c: &mut Criterion) {
    let template = BenchTemplate::default();
    let ledger = generate(&bench_config(&template, 1_000)).unwrap();
    let g = MultiGraph::from_transactions(&ledger.transactions).unwrap();

    // A far-apart pair that exists in every template-generated ledger.
    let vertices: Vec<_> = g.vertices().cloned().collect();
    let source = vertices.first().unwrap().clone();
    let goal = vertices.last().unwrap().clone();

    let mut group = c.benchmark_group("search");
    group.sample_size(10);
    group.bench_function("widest_search/1000-edges", |b| {
        b.iter(|| widest_search(black_box(&g), black_box(&source)))
    });
    group.bench_function("max_min/1000-edges", |b| {
        b.iter(|| max_min(black_box(&g), black_box(&goal), black_box(&source)))
    });
    group.finish();
}

fn replay_benches(c: &mut Criterion) {
    let template = BenchTemplate::default();
    let mut group = c.benchmark_group("replay");
    group.sample_size(10);
    for edges in [500usize, 1_000] {
        let ledger = generate(&bench_config(&template, edges)).unwrap();
        group.bench_with_input(
            BenchmarkId::new("run_wcd", edges),
            &ledger.transactions,
            |b, transactions| b.iter(|| run_wcd(black_box(transactions))),
        );
    }
    group.finish();
}

criterion_group!(benches, search_benches, replay_benches);
criterion_main!(benches);
