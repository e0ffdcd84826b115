use std::hint::black_box;

use criterion::{criterion_group, criterion_main, Criterion};
use curesim::config::{preset, ModelChoice};
use curesim::design::estimate_power;
use curesim::stats::logrank_test;
use curesim::trial::{cut_at_event_count, simulate_indexed_trial};

fn benches(c: &mut Criterion) {
    let file = preset("mirros").unwrap();
    let scenario = file.scenario(ModelChoice::SampleSize).unwrap().clone();
    let mechanistic = file.scenario(ModelChoice::Mechanistic).unwrap().clone();

    c.bench_function("simulate_trial/cure_mixture", |b| {
        let mut i = 0;
        b.iter(|| {
            i += 1;
            simulate_indexed_trial(black_box(&scenario), 7, i).unwrap()
        })
    });
    c.bench_function("simulate_trial/mechanistic", |b| {
        let mut i = 0;
        b.iter(|| {
            i += 1;
            simulate_indexed_trial(black_box(&mechanistic), 7, i).unwrap()
        })
    });

    let trial = simulate_indexed_trial(&scenario, 7, 0).unwrap();
    let data = cut_at_event_count(&trial, 275, scenario.horizon);
    c.bench_function("logrank/440_patients", |b| {
        b.iter(|| logrank_test(black_box(&data), 0.05).unwrap())
    });

    let mut group = c.benchmark_group("power");
    group.sample_size(10);
    group.bench_function("estimate_power/1000_trials", |b| {
        b.iter(|| estimate_power(black_box(&scenario), 275, 1000, 11).unwrap())
    });
    group.finish();
}

criterion_group!(simulation, benches);
criterion_main!(simulation);
