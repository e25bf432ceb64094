use std::hint::black_box;

use backdoor_bench::{half_support_pair, toy_config};
use backdoor_core::adversary::{imposs_probe, toy_attack_report, ImpossibilityConfig};
use backdoor_core::detectors::{NeymanPearson, TypeTvDetector};
use backdoor_core::harness::{estimate_risk, Type2Access, Type3Access};
use criterion::{criterion_group, criterion_main, Criterion};

fn risk(c: &mut Criterion) {
    let mut group = c.benchmark_group("estimate_risk");
    group.sample_size(20);
    let pair = half_support_pair(8, 0.3);
    group.bench_function("np/k8_n50_1e4", |b| {
        b.iter(|| estimate_risk(&Type3Access(NeymanPearson), black_box(&pair), 50, 10_000, 3).unwrap())
    });
    let det = TypeTvDetector::new(pair.gamma, pair.beta).unwrap();
    group.bench_function("type2-tv/k8_n50_1e4", |b| {
        b.iter(|| estimate_risk(&Type2Access(det), black_box(&pair), 50, 10_000, 3).unwrap())
    });
    group.finish();
}

fn attacks(c: &mut Criterion) {
    let mut group = c.benchmark_group("attacks");
    group.sample_size(20);
    let cfg = toy_config(150);
    group.bench_function("toy_attack_report/n150", |b| {
        b.iter(|| toy_attack_report(black_box(&cfg), 5).unwrap())
    });
    let probe = ImpossibilityConfig::new(100_000, 0.01, 1.0, 20).unwrap();
    let det = TypeTvDetector::new(1.0, 0.01).unwrap();
    group.bench_function("imposs_probe/k1e5_1e3", |b| {
        b.iter(|| imposs_probe(&det, black_box(&probe), 1000, 5).unwrap())
    });
    group.finish();
}

criterion_group!(benches, risk, attacks);
criterion_main!(benches);
