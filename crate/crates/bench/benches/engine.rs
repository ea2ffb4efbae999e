//! Criterion micro-benchmarks for the core engine paths.
//!
//! The CLI `bench` subcommand is the full-log harness; these benches track
//! the per-operation costs on a ~200k-event log across worker counts.

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

use colmine::discovery::{efg, frequency_dfg, performance_dfg};
use colmine::ingest::{read_binary, write_binary};
use colmine::variants::get_variants;
use colmine::{build_cases_table, format_log};
use colmine_bench::{prepared, sample_table};

const CASES: usize = 20_000;

fn bench_format(c: &mut Criterion) {
    let table = sample_table(CASES);
    c.bench_function("format_log/200k", |b| {
        b.iter_batched(
            || table.clone(),
            format_log,
            criterion::BatchSize::LargeInput,
        )
    });
}

fn bench_dfg(c: &mut Criterion) {
    let (log, cases) = prepared(CASES, 2);
    let mut group = c.benchmark_group("dfg/200k");
    for workers in [1usize, 2, 4] {
        group.bench_with_input(BenchmarkId::new("frequency", workers), &workers, |b, &k| {
            b.iter(|| frequency_dfg(&log, &cases, k))
        });
        group.bench_with_input(
            BenchmarkId::new("performance", workers),
            &workers,
            |b, &k| b.iter(|| performance_dfg(&log, &cases, k)),
        );
    }
    group.finish();
}

fn bench_efg(c: &mut Criterion) {
    let (log, cases) = prepared(CASES, 2);
    let mut group = c.benchmark_group("efg/200k");
    group.sample_size(20);
    for workers in [1usize, 2] {
        group.bench_with_input(BenchmarkId::from_parameter(workers), &workers, |b, &k| {
            b.iter(|| efg(&log, &cases, k))
        });
    }
    group.finish();
}

fn bench_variants(c: &mut Criterion) {
    let (log, _) = prepared(CASES, 2);
    c.bench_function("variants/200k", |b| {
        b.iter(|| {
            let cases = build_cases_table(&log, 2);
            get_variants(&log, &cases)
        })
    });
}

fn bench_binary_io(c: &mut Criterion) {
    let table = sample_table(CASES);
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bench.elt");
    write_binary(&table, &path).unwrap();
    let mut group = c.benchmark_group("binary_io/200k");
    group.sample_size(20);
    group.bench_function("write", |b| b.iter(|| write_binary(&table, &path).unwrap()));
    group.bench_function("read", |b| b.iter(|| read_binary(&path).unwrap()));
    group.finish();
}

criterion_group!(
    engine,
    bench_format,
    bench_dfg,
    bench_efg,
    bench_variants,
    bench_binary_io
);
criterion_main!(engine);
