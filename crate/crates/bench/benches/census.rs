use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

use huffcensus_core::asymptotics::isolate_poles;
use huffcensus_core::counting::{count_trees_upto, enumerate_classes};
use huffcensus_core::genfun::{eval_d_certified, series_f};
use huffcensus_core::numerics::{rat, RationalInterval};
use huffcensus_core::ReprKind;

fn counting(c: &mut Criterion) {
    let mut group = c.benchmark_group("count_trees_upto");
    for n in [50usize, 200, 800] {
        group.bench_with_input(BenchmarkId::new("t=2", n), &n, |b, &n| b.iter(|| count_trees_upto(2, black_box(n))));
    }
    group.finish();
    c.bench_function("enumerate t=3 r=29", |b| {
        b.iter(|| enumerate_classes(3, black_box(29), ReprKind::Huffman).unwrap().count())
    });
}

fn series(c: &mut Criterion) {
    let mut group = c.benchmark_group("series_f");
    for n in [50usize, 200] {
        group.bench_with_input(BenchmarkId::new("t=3", n), &n, |b, &n| b.iter(|| series_f(3, black_box(n))));
    }
    group.finish();
}

fn poles(c: &mut Criterion) {
    let q = RationalInterval::point(rat(5, 9));
    c.bench_function("eval_d_certified t=2 30 digits", |b| b.iter(|| eval_d_certified(2, black_box(&q), 30)));
    let mut group = c.benchmark_group("isolate_poles");
    group.sample_size(10);
    group.bench_function("t=2 15 digits", |b| b.iter(|| isolate_poles(2, black_box(15))));
    group.finish();
}

criterion_group!(benches, counting, series, poles);
criterion_main!(benches);
