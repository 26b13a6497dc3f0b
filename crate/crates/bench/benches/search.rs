use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use islab_bench::{budget, empty_context, overlapping_players, targets};
use islab_core::complexity::Lz78Estimator;
use islab_core::measures::exchange_report;
use islab_core::{levin_complexity, plain_complexity, run, BitString, Program};

fn machine(c: &mut Criterion) {
    // a counting loop: flip, then spin until the budget runs out
    let spin = Program::from_symbols("~[~~]").expect("program");
    let aux = BitString::empty();
    c.bench_function("run_10k_steps", |b| b.iter(|| run(&spin, &aux, 10_000)));
}

fn searches(c: &mut Criterion) {
    let mut group = c.benchmark_group("plain");
    for (name, x) in targets() {
        group.bench_with_input(BenchmarkId::from_parameter(name), &x, |b, x| {
            b.iter(|| plain_complexity(x, &empty_context(), &budget(12)))
        });
    }
    group.finish();
    let mut group = c.benchmark_group("levin");
    for (name, x) in targets() {
        group.bench_with_input(BenchmarkId::from_parameter(name), &x, |b, x| {
            b.iter(|| levin_complexity(x, &empty_context(), &budget(12)))
        });
    }
    group.finish();
}

fn measures(c: &mut Criterion) {
    let (a, b, x) = overlapping_players();
    c.bench_function("exchange_report_lz", |bench| {
        bench.iter(|| exchange_report(&a, &b, &x, &Lz78Estimator))
    });
}

criterion_group!(benches, machine, searches, measures);
criterion_main!(benches);
