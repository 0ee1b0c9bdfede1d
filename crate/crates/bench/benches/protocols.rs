use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use std::hint::black_box;

use qb_bench::uniform_chain;
use qb_core::{
    ergotropy, max_power_time, scan_n, time_series, Charger, ChargerTemplate, Grid, ScanParams,
    TauRule, WLineParams, WMode,
};

fn bench_time_series(c: &mut Criterion) {
    let mut group = c.benchmark_group("time_series_single");
    for n in [10usize, 50] {
        let config = uniform_chain(n).unwrap();
        let grid = Grid::new(40.0, 0.01).unwrap();
        group.bench_with_input(BenchmarkId::from_parameter(n), &config, |b, cfg| {
            b.iter(|| {
                time_series(black_box(cfg), &Charger::SinglePhoton, &grid, WMode::Exact).unwrap()
            })
        });
    }
    group.finish();
}

fn bench_w_series(c: &mut Criterion) {
    let config = uniform_chain(8).unwrap();
    let charger = Charger::WLine(WLineParams::w_state(8).unwrap());
    let grid = Grid::new(20.0, 0.01).unwrap();
    c.bench_function("time_series_w_n8", |b| {
        b.iter(|| {
            let series =
                time_series(black_box(&config), &charger, &grid, WMode::Unsymmetrized).unwrap();
            black_box(series.erg()[series.len() - 1]);
        })
    });
}

fn bench_max_power(c: &mut Criterion) {
    let config = uniform_chain(20).unwrap();
    c.bench_function("max_power_time_n20", |b| {
        b.iter(|| {
            max_power_time(
                black_box(&config),
                &Charger::SinglePhoton,
                TauRule::GlobalMax,
                80.0,
                WMode::Exact,
            )
            .unwrap()
        })
    });
}

fn bench_scan(c: &mut Criterion) {
    let mut group = c.benchmark_group("scan_single_uniform");
    group.sample_size(10);
    let params = ScanParams {
        charger: ChargerTemplate::SinglePhoton,
        ..ScanParams::baseline()
    };
    group.bench_function("n_3_to_20", |b| {
        b.iter(|| scan_n(black_box(&params), 3..=20).unwrap())
    });
    group.finish();
}

fn bench_ergotropy(c: &mut Criterion) {
    let config = uniform_chain(12).unwrap();
    let u = qb_core::analytic_propagator(&config, 5.5).unwrap();
    let state = qb_core::battery_state_single_photon(&u, 1.0).unwrap();
    c.bench_function("ergotropy_two_level", |b| {
        b.iter(|| ergotropy(black_box(&state)).unwrap())
    });
}

criterion_group!(
    benches,
    bench_time_series,
    bench_w_series,
    bench_max_power,
    bench_scan,
    bench_ergotropy
);
criterion_main!(benches);
