use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion, Throughput};

use lssgld::rng::{fill_normal, stream};
use lssgld::LaplacianOperator;

fn apply_inverse(c: &mut Criterion) {
    let mut group = c.benchmark_group("apply_inverse");
    for d in [2usize, 123, 1_000, 10_000, 100_000] {
        let op = LaplacianOperator::build(d, 1.0).unwrap();
        let mut v = vec![0.0; d];
        fill_normal(&mut stream(1, 0), &mut v);
        group.throughput(Throughput::Elements(d as u64));
        group.bench_with_input(BenchmarkId::new("inverse", d), &d, |b, _| {
            b.iter(|| op.apply_inverse(black_box(&v)).unwrap())
        });
        group.bench_with_input(BenchmarkId::new("inverse_sqrt", d), &d, |b, _| {
            b.iter(|| op.apply_inverse_sqrt(black_box(&v)).unwrap())
        });
    }
    group.finish();
}

fn build(c: &mut Criterion) {
    let mut group = c.benchmark_group("build");
    for d in [1_000usize, 100_000] {
        group.bench_with_input(BenchmarkId::from_parameter(d), &d, |b, &d| {
            b.iter(|| LaplacianOperator::build(black_box(d), 1.0).unwrap())
        });
    }
    group.finish();
}

criterion_group!(benches, apply_inverse, build);
criterion_main!(benches);
