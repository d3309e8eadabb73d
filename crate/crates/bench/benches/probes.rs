use std::hint::black_box;

use criterion::{criterion_group, criterion_main, Criterion};
use forecastability::probes::{Ets, ProbeModel, SeasonalNaive};
use forecastability_bench::seasonal_history;

fn bench_probes(c: &mut Criterion) {
    let history = seasonal_history(240, 12, 3);
    c.bench_function("seasonal_naive/monthly_240", |b| {
        b.iter(|| SeasonalNaive.fit_and_forecast(black_box(&history), 12, 18).unwrap())
    });
    c.bench_function("ets/monthly_240", |b| {
        b.iter(|| Ets.fit_and_forecast(black_box(&history), 12, 18).unwrap())
    });
    let short = seasonal_history(40, 1, 4);
    c.bench_function("ets/yearly_40", |b| {
        b.iter(|| Ets.fit_and_forecast(black_box(&short), 1, 6).unwrap())
    });
}

criterion_group!(benches, bench_probes);
criterion_main!(benches);
