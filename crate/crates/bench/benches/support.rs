use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use otis_bench::{dd_model, tprd_model};
use otis_core::models::{dd_support, tprd_theta_support, DisparityMatrix};
use otis_core::{comonotone_integral, discretize_gaussian, sample_sphere, GaussianSpec};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use std::hint::black_box;

fn dd_support_by_classes(c: &mut Criterion) {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let mut group = c.benchmark_group("dd_support");
    for j in [4usize, 16, 64] {
        let m = dd_model(&mut rng, j, 25);
        let e = DisparityMatrix::canonical(j);
        let dirs = sample_sphere(j - 1, 16, j as u64);
        group.bench_with_input(BenchmarkId::from_parameter(j), &(m, e, dirs), |b, (m, e, dirs)| {
            let mut k = 0;
            b.iter(|| {
                k = (k + 1) % dirs.len();
                black_box(dd_support(m, e, &dirs[k]).unwrap())
            });
        });
    }
    group.finish();
}

fn tprd_support_by_classes(c: &mut Criterion) {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let mut group = c.benchmark_group("tprd_theta_support");
    for j in [2usize, 6, 20] {
        let m = tprd_model(&mut rng, j, 25);
        let dirs = sample_sphere(2 * j, 16, j as u64);
        group.bench_with_input(BenchmarkId::from_parameter(j), &(m, dirs), |b, (m, dirs)| {
            let mut k = 0;
            b.iter(|| {
                k = (k + 1) % dirs.len();
                black_box(tprd_theta_support(m, &dirs[k]).unwrap())
            });
        });
    }
    group.finish();
}

fn quantile_sweep(c: &mut Criterion) {
    let v = discretize_gaussian(GaussianSpec { mean: 0.0, sd: 1.0 }, 400).unwrap();
    let w = discretize_gaussian(GaussianSpec { mean: 1.0, sd: 2.0 }, 400).unwrap();
    c.bench_function("comonotone_integral_400_atoms", |b| {
        b.iter(|| black_box(comonotone_integral(&v, &w)))
    });
}

criterion_group!(benches, dd_support_by_classes, tprd_support_by_classes, quantile_sweep);
criterion_main!(benches);
