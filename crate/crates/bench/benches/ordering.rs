use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use std::hint::black_box;

use lossorder::{
    compare, compare_categorical, compare_kdes, simulate_outbreaks, tail_threshold, CompareOptions, Graph,
    MomentSequence, OutbreakConfig,
};
use lossorder_bench::{gamma_weibull_pair, gumbel_pair, nile_kdes, outbreak_pair, rating_pair};

fn comparisons(c: &mut Criterion) {
    let opts = CompareOptions::default();
    let mut g = c.benchmark_group("compare");
    for (name, (d1, d2)) in [
        ("gumbel", gumbel_pair()),
        ("gamma_weibull", gamma_weibull_pair()),
        ("outbreak_table", outbreak_pair()),
    ] {
        g.bench_function(name, |b| b.iter(|| compare(black_box(&d1), black_box(&d2), &opts).unwrap()));
    }
    let (r1, r2) = rating_pair();
    g.bench_function("ratings", |b| b.iter(|| compare_categorical(black_box(&r1), black_box(&r2)).unwrap()));
    let (k1, k2) = nile_kdes();
    g.bench_function("nile_kde", |b| b.iter(|| compare_kdes(black_box(&k1), black_box(&k2), &opts).unwrap()));
    g.finish();
}

fn moments(c: &mut Criterion) {
    let (d, _) = gamma_weibull_pair();
    let mut g = c.benchmark_group("moments");
    for k in [16, 64, 128] {
        g.bench_with_input(BenchmarkId::from_parameter(k), &k, |b, &k| {
            b.iter(|| MomentSequence::compute(black_box(&d), k).unwrap())
        });
    }
    g.finish();
}

fn thresholds(c: &mut Criterion) {
    let (d1, d2) = gumbel_pair();
    let v = compare(&d1, &d2, &CompareOptions::default()).unwrap();
    c.bench_function("tail_threshold/gumbel", |b| b.iter(|| tail_threshold(black_box(&d1), black_box(&d2), &v).unwrap()));
}

fn simulation(c: &mut Criterion) {
    let graph = Graph::complete(20).unwrap();
    let cfg = OutbreakConfig::new(0.15, 1000, 1).unwrap();
    c.bench_function("simulate/complete20_1000runs", |b| b.iter(|| simulate_outbreaks(black_box(&graph), &cfg).unwrap()));
}

criterion_group!(benches, comparisons, moments, thresholds, simulation);
criterion_main!(benches);
