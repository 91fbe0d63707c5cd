//! Batch-solve benchmarks: data-parallel map (default `parallel` feature)
//! against the always-available sequential baseline.

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

use bimat::bimatrix::Bimatrix;
use bimat::mat;
use bimat::par;
use bimat::solve;

type Instance = (Bimatrix, Bimatrix, Bimatrix);

fn sylvester_instances(count: usize, n: usize) -> Vec<Instance> {
    (0..count)
        .map(|i| {
            let mut rng = mat::randomize_tests_rng(0xbe7c4 + i as u64);
            let a = Bimatrix::new(mat::random_c(&mut rng, n, n), mat::random_c(&mut rng, n, n))
                .unwrap();
            let f = Bimatrix::new(mat::random_c(&mut rng, n, n), mat::random_c(&mut rng, n, n))
                .unwrap();
            let c = Bimatrix::new(mat::random_c(&mut rng, n, n), mat::random_c(&mut rng, n, n))
                .unwrap();
            (a, f, c)
        })
        .collect()
}

fn solve_one((a, f, c): &Instance) -> f64 {
    match solve::solve_sylvester(a, f, c) {
        Ok(x) => solve::sylvester_residual(a, f, c, &x),
        Err(_) => 0.0,
    }
}

fn bench_batch_sylvester(c: &mut Criterion) {
    let mut group = c.benchmark_group("batch_sylvester");
    for &(count, n) in &[(64usize, 4usize), (256, 3)] {
        let instances = sylvester_instances(count, n);
        group.bench_with_input(
            BenchmarkId::new("parallel", format!("{count}x{n}")),
            &instances,
            |b, inst| {
                b.iter(|| {
                    let worst = par::map_collect(inst.clone(), |i| solve_one(&i))
                        .into_iter()
                        .fold(0.0f64, f64::max);
                    std::hint::black_box(worst)
                })
            },
        );
        group.bench_with_input(
            BenchmarkId::new("sequential", format!("{count}x{n}")),
            &instances,
            |b, inst| {
                b.iter(|| {
                    let worst = par::map_collect_seq(inst.clone(), |i| solve_one(&i))
                        .into_iter()
                        .fold(0.0f64, f64::max);
                    std::hint::black_box(worst)
                })
            },
        );
    }
    group.finish();
}

fn bench_batch_assignment(c: &mut Criterion) {
    use bimat::assign::{self, rendezvous, ZChoice};
    let mut group = c.benchmark_group("batch_assignment");
    let sys = rendezvous::system(1.0).unwrap();
    let target = rendezvous::reference_target(1.0, 0.5).unwrap();
    let seeds: Vec<u64> = (0..16).collect();
    group.bench_function("parallel", |b| {
        b.iter(|| {
            let defects = par::map_collect(seeds.clone(), |s| {
                assign::assign_poles(&sys, &target, ZChoice::Seed(s))
                    .map(|d| d.report.spectrum_defect)
                    .unwrap_or(f64::INFINITY)
            });
            std::hint::black_box(defects)
        })
    });
    group.bench_function("sequential", |b| {
        b.iter(|| {
            let defects = par::map_collect_seq(seeds.clone(), |s| {
                assign::assign_poles(&sys, &target, ZChoice::Seed(s))
                    .map(|d| d.report.spectrum_defect)
                    .unwrap_or(f64::INFINITY)
            });
            std::hint::black_box(defects)
        })
    });
    group.finish();
}

criterion_group!(benches, bench_batch_sylvester, bench_batch_assignment);
criterion_main!(benches);
