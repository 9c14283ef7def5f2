use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use std::hint::black_box;

use poisson_core::catalog::build_default;
use poisson_core::regularity::theorem31_check_with;
use poisson_core::structures::{
    check_fundamental_identity_with, check_jacobi_with, generic_rank_with, random_arguments,
};
use poisson_core::Execution;

const MODES: [(&str, Execution); 2] = [
    ("sequential", Execution::Sequential),
    ("parallel", Execution::Parallel),
];

fn jacobi(c: &mut Criterion) {
    let mut group = c.benchmark_group("jacobi");
    for name in ["q5", "dell"] {
        let inst = build_default(name).unwrap();
        let ps = inst.poisson().unwrap();
        for (mode, exec) in MODES {
            group.bench_with_input(BenchmarkId::new(mode, name), ps, |b, ps| {
                b.iter(|| black_box(check_jacobi_with(ps, exec)))
            });
        }
    }
    group.finish();
}

fn theorem31(c: &mut Criterion) {
    let mut group = c.benchmark_group("theorem31");
    group.sample_size(20);
    for name in ["q5", "dell"] {
        let inst = build_default(name).unwrap();
        let ps = inst.poisson().unwrap();
        let qs = inst.casimir_polys();
        for (mode, exec) in MODES {
            group.bench_with_input(BenchmarkId::new(mode, name), &qs, |b, qs| {
                b.iter(|| black_box(theorem31_check_with(ps, qs, exec).unwrap()))
            });
        }
    }
    group.finish();
}

fn rank(c: &mut Criterion) {
    let mut group = c.benchmark_group("generic_rank");
    let inst = build_default("q5").unwrap();
    let ps = inst.poisson().unwrap();
    for (mode, exec) in MODES {
        group.bench_function(BenchmarkId::new(mode, "q5"), |b| {
            b.iter(|| black_box(generic_rank_with(ps, 16, 1, exec).unwrap()))
        });
    }
    group.finish();
}

fn fundamental_identity(c: &mut Criterion) {
    let mut group = c.benchmark_group("fundamental_identity");
    group.sample_size(20);
    let inst = build_default("fairlie").unwrap();
    let ns = inst.nambu().unwrap();
    let args = random_arguments(ns.vars(), 2 * ns.arity() - 1, 1);
    for (mode, exec) in MODES {
        group.bench_function(BenchmarkId::new(mode, "fairlie"), |b| {
            b.iter(|| black_box(check_fundamental_identity_with(ns, &args, exec).unwrap()))
        });
    }
    group.finish();
}

criterion_group!(benches, jacobi, theorem31, rank, fundamental_identity);
criterion_main!(benches);
