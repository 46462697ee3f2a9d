use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use projclass_bench::{banded, doubled_prefix, triangular_window};
use projclass_core::cohom::{euler_class, family_bundles, sdr_count};
use projclass_core::endo::{self, SimConfig};
use projclass_core::family::ProjectionFamily;
use projclass_core::hall::{max_matching, max_surplus, BipartiteIncidence};
use projclass_core::{classify, compute_n};

fn matching(c: &mut Criterion) {
    let mut group = c.benchmark_group("max_matching");
    for n in [100usize, 1_000, 5_000] {
        let fam = banded(n, n as u64, 4);
        let g = BipartiteIncidence::from_family(&fam);
        group.bench_with_input(BenchmarkId::from_parameter(n), &g, |b, g| b.iter(|| max_matching(black_box(g))));
    }
    group.finish();
}

fn surplus(c: &mut Criterion) {
    let mut group = c.benchmark_group("max_surplus_triangular");
    for t in [50usize, 200] {
        let fam = triangular_window(t);
        group.bench_with_input(BenchmarkId::from_parameter(t), &fam, |b, f| b.iter(|| max_surplus(black_box(f), 6)));
    }
    group.finish();
}

fn symbolic(c: &mut Criterion) {
    let tri = ProjectionFamily::triangular();
    c.bench_function("compute_n_triangular_m8", |b| b.iter(|| compute_n(black_box(&tri), 8)));
    c.bench_function("classify_triangular", |b| b.iter(|| classify(black_box(&tri), 6)));
}

fn algebra(c: &mut Criterion) {
    let fam = banded(8, 10, 4);
    let bundles = family_bundles(&fam);
    c.bench_function("euler_class_8x10", |b| b.iter(|| euler_class(black_box(&bundles))));
    c.bench_function("sdr_count_8x10", |b| b.iter(|| sdr_count(black_box(&fam))));
}

fn dynamics(c: &mut Criterion) {
    let fam = doubled_prefix();
    let cfg = SimConfig { depth: 3, window: 2, prefix_len: 6, ..Default::default() };
    c.bench_function("endo_simulate_d3_w2_t6", |b| b.iter(|| endo::simulate(black_box(&fam), &cfg)));
}

criterion_group!(benches, matching, surplus, symbolic, algebra, dynamics);
criterion_main!(benches);
