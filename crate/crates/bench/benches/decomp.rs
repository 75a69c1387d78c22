use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use std::hint::black_box;

use wtd_bench::{channel, pair};
use wtd_core::{gmd, gsvd_diagonal, gsvd_triangular, gtd, qr, svd};

fn single(c: &mut Criterion) {
    let mut g = c.benchmark_group("single");
    for n in [4, 8] {
        let a = channel(1, n, n);
        let target = gmd(&a).unwrap().diagonal().iter().rev().copied().collect::<Vec<_>>();
        g.bench_with_input(BenchmarkId::new("qr", n), &a, |b, a| b.iter(|| qr(black_box(a))));
        g.bench_with_input(BenchmarkId::new("svd", n), &a, |b, a| b.iter(|| svd(black_box(a))));
        g.bench_with_input(BenchmarkId::new("gmd", n), &a, |b, a| b.iter(|| gmd(black_box(a))));
        g.bench_with_input(BenchmarkId::new("gtd", n), &a, |b, a| {
            b.iter(|| gtd(black_box(a), &target))
        });
    }
    g.finish();
}

fn joint(c: &mut Criterion) {
    let mut g = c.benchmark_group("joint");
    for n in [4, 8] {
        let (a1, a2) = pair(2, n);
        g.bench_function(BenchmarkId::new("gsvd_diagonal", n), |b| {
            b.iter(|| gsvd_diagonal(black_box(&a1), black_box(&a2)))
        });
        g.bench_function(BenchmarkId::new("gsvd_triangular", n), |b| {
            b.iter(|| gsvd_triangular(black_box(&a1), black_box(&a2)))
        });
    }
    g.finish();
}

criterion_group!(benches, single, joint);
criterion_main!(benches);
