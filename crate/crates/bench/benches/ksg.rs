use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use forecastability::ksg_mi;
use forecastability_bench::lag_pairs;

fn bench_ksg(c: &mut Criterion) {
    let mut group = c.benchmark_group("ksg_mi");
    for n in [500, 2000, 8000] {
        let (x, y) = lag_pairs(n, 0.8, 1);
        group.bench_with_input(BenchmarkId::from_parameter(n), &n, |b, _| {
            b.iter(|| ksg_mi(black_box(&x), black_box(&y), 8).unwrap())
        });
    }
    group.finish();
}

criterion_group!(benches, bench_ksg);
criterion_main!(benches);
