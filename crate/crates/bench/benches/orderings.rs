use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use reorder_bench::{graphs, matrices};
use reorder_core::cost::{elimination_game_fill, etree_column_counts};
use reorder_core::features::extract_features;
use reorder_core::ordering::order_graph;
use reorder_core::OrderingLabel;

fn orderings(c: &mut Criterion) {
    let mut group = c.benchmark_group("ordering");
    group.sample_size(20);
    for (name, g) in graphs() {
        for label in OrderingLabel::ALL {
            group.bench_with_input(BenchmarkId::new(label.as_str(), name), &g, |b, g| {
                b.iter(|| order_graph(black_box(g), label))
            });
        }
    }
    group.finish();
}

fn symbolic_cost(c: &mut Criterion) {
    let mut group = c.benchmark_group("symbolic_cost");
    group.sample_size(10);
    for (name, g) in graphs() {
        let p = order_graph(&g, OrderingLabel::Amd);
        group.bench_with_input(BenchmarkId::new("etree", name), &g, |b, g| {
            b.iter(|| etree_column_counts(black_box(g), &p).unwrap())
        });
        group.bench_with_input(BenchmarkId::new("elimination_game", name), &g, |b, g| {
            b.iter(|| elimination_game_fill(black_box(g), &p).unwrap())
        });
    }
    group.finish();
}

fn features(c: &mut Criterion) {
    let mut group = c.benchmark_group("features");
    for (name, m) in matrices() {
        group.bench_with_input(BenchmarkId::from_parameter(name), &m, |b, m| {
            b.iter(|| extract_features(black_box(m)).unwrap())
        });
    }
    group.finish();
}

criterion_group!(benches, orderings, symbolic_cost, features);
criterion_main!(benches);
