use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use gridhfk::complex::Coefficients;
use gridhfk::fixtures;
use gridhfk::pipeline::{hat_homology, minus_homology, Options};
use gridhfk::poset::{build_posets, PosetMode};
use gridhfk::signs::solve_signs_for_size;
use gridhfk::{Execution, Limits};

const MODES: [(&str, Execution); 2] = [("sequential", Execution::Sequential), ("parallel", Execution::Parallel)];

fn hat(c: &mut Criterion) {
    let mut group = c.benchmark_group("hat_homology");
    group.sample_size(10);
    for (knot, g) in [("trefoil", fixtures::trefoil()), ("5_2", fixtures::knot_5_2()), ("torus-3-4", fixtures::torus_3_4())] {
        for (mode, exec) in MODES {
            let opts = Options::default().with_execution(exec);
            group.bench_with_input(BenchmarkId::new(mode, knot), &g, |b, g| b.iter(|| hat_homology(black_box(g), &opts).unwrap()));
        }
    }
    group.finish();
}

fn integer(c: &mut Criterion) {
    let mut group = c.benchmark_group("hat_homology_z");
    group.sample_size(10);
    let g = fixtures::figure_eight();
    for (mode, exec) in MODES {
        let opts = Options::new(Coefficients::Z).with_execution(exec);
        hat_homology(&g, &opts).unwrap();
        group.bench_function(BenchmarkId::new(mode, "figure-eight"), |b| b.iter(|| hat_homology(black_box(&g), &opts).unwrap()));
    }
    group.finish();
}

fn minus(c: &mut Criterion) {
    let mut group = c.benchmark_group("minus_homology_d2");
    group.sample_size(10);
    let g = fixtures::trefoil();
    for (mode, exec) in MODES {
        let opts = Options::default().with_execution(exec);
        group.bench_function(BenchmarkId::new(mode, "trefoil"), |b| b.iter(|| minus_homology(black_box(&g), 2, &opts).unwrap()));
    }
    group.finish();
}

fn signs(c: &mut Criterion) {
    let mut group = c.benchmark_group("sign_solver");
    group.sample_size(10);
    for (mode, exec) in MODES {
        group.bench_function(BenchmarkId::new(mode, 6), |b| b.iter(|| solve_signs_for_size(black_box(6), exec).unwrap()));
    }
    group.finish();
}

fn posets(c: &mut Criterion) {
    let mut group = c.benchmark_group("hat_posets");
    group.sample_size(10);
    let g = fixtures::figure_eight();
    for (mode, exec) in MODES {
        group.bench_function(BenchmarkId::new(mode, "figure-eight"), |b| {
            b.iter(|| build_posets(black_box(&g), PosetMode::Hat, Coefficients::F2, &Limits::default(), exec).unwrap())
        });
    }
    group.finish();
}

criterion_group!(benches, hat, integer, minus, signs, posets);
criterion_main!(benches);
