use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

use cpbpv_bench::verify;

fn binary_search(c: &mut Criterion) {
    let mut g = c.benchmark_group("binary_search");
    for n in [4, 8, 16] {
        g.bench_with_input(BenchmarkId::from_parameter(n), &n, |b, &n| b.iter(|| verify("binary_search", n, 8, 1)));
    }
    g.finish();
}

fn small_programs(c: &mut Criterion) {
    c.bench_function("binary_search_bug/8", |b| b.iter(|| verify("binary_search_bug", 8, 8, 1)));
    c.bench_function("bubble_sort/8", |b| b.iter(|| verify("bubble_sort", 8, 8, 1)));
    c.bench_function("sum_of_squares/5", |b| b.iter(|| verify("sum_of_squares", 5, 16, 1)));
}

fn tritype(c: &mut Criterion) {
    let mut g = c.benchmark_group("tritype");
    g.sample_size(10);
    for jobs in [1, 4] {
        g.bench_with_input(BenchmarkId::new("jobs", jobs), &jobs, |b, &jobs| b.iter(|| verify("tritype", 0, 8, jobs)));
    }
    g.finish();
}

criterion_group!(benches, binary_search, small_programs, tritype);
criterion_main!(benches);
