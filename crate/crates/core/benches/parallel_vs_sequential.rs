//! Sequential vs rayon execution for the data-parallel kernels.
//!
//! Build with `--no-default-features` to see the fallback: both arms then run
//! sequentially.

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use std::hint::black_box;

use fdfe_core::analysis::{convergence_study, MeshFamily};
use fdfe_core::geometry2d::DiagonalCase;
use fdfe_core::pipeline::{inverse_identity_check_with, Problem};
use fdfe_core::{Execution, GreenMatrix, Mesh1D};

const POLICIES: [(&str, Execution); 2] =
    [("sequential", Execution::Sequential), ("parallel", Execution::Parallel)];

fn green_matrix(c: &mut Criterion) {
    let mut group = c.benchmark_group("green_matrix");
    for n in [256usize, 1024] {
        let mesh = Mesh1D::perturbed(n, 0.45, 7).unwrap();
        for (name, exec) in POLICIES {
            group.bench_with_input(BenchmarkId::new(name, n), &mesh, |b, mesh| {
                b.iter(|| GreenMatrix::with_execution(black_box(mesh), exec))
            });
        }
    }
    group.finish();
}

fn inverse_identity(c: &mut Criterion) {
    let mut group = c.benchmark_group("inverse_identity");
    let mesh = Mesh1D::graded(512, 2.0).unwrap();
    for (name, exec) in POLICIES {
        group.bench_function(name, |b| b.iter(|| inverse_identity_check_with(black_box(&mesh), exec)));
    }
    group.finish();
}

fn convergence(c: &mut Criterion) {
    let mut group = c.benchmark_group("convergence_study");
    group.sample_size(20);
    let sine = Problem::builtin("sine").unwrap();
    let family = MeshFamily::Perturbed { rho: 0.45, seed: 7 };
    for (name, exec) in POLICIES {
        group.bench_function(name, |b| {
            b.iter(|| convergence_study(&sine, &family, 3..=14, 10, exec).unwrap())
        });
    }
    group.finish();
}

fn diagonal_identity(c: &mut Criterion) {
    let mut group = c.benchmark_group("diagonal_green_identity");
    group.sample_size(10);
    for (name, exec) in POLICIES {
        group.bench_function(name, |b| b.iter(|| DiagonalCase::SinSin.run(10, 6, exec).unwrap()));
    }
    group.finish();
}

criterion_group!(benches, green_matrix, inverse_identity, convergence, diagonal_identity);
criterion_main!(benches);
