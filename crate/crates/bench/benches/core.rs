use criterion::{black_box, criterion_group, criterion_main, BenchmarkId, Criterion};

use tandem_core::oracle::quadrant_count;
use tandem_core::sampler::{rng_from_seed, sample_excursion_p1_with, sample_excursion_windowed_with, HalfplaneSampler};
use tandem_core::series::q0b_x0;
use tandem_core::stochastics::StepDistribution;
use tandem_core::{phi, phi_inverse, WeightSpec};

fn bijection(c: &mut Criterion) {
    let d = StepDistribution::single_level(2).unwrap().to_f64();
    let sampler = HalfplaneSampler::new(&d).unwrap();
    let mut group = c.benchmark_group("kmsw");
    for n in [100, 1_000, 10_000] {
        let w = sampler.sample_quadrant(n, &mut rng_from_seed(1));
        let o = phi(&w);
        group.bench_with_input(BenchmarkId::new("phi", n), &w, |b, w| b.iter(|| phi(black_box(w))));
        group.bench_with_input(BenchmarkId::new("phi_inverse", n), &o, |b, o| {
            b.iter(|| phi_inverse(black_box(o)).unwrap())
        });
    }
    group.finish();
}

fn counting(c: &mut Criterion) {
    let spec = WeightSpec::all_ones(2);
    let mut group = c.benchmark_group("counting");
    group.sample_size(10);
    for n in [20, 40] {
        group.bench_with_input(BenchmarkId::new("quadrant_count", n), &n, |b, &n| {
            b.iter(|| quadrant_count(&spec, (0, 0), (0, 0), n))
        });
    }
    for order in [10, 20] {
        group.bench_with_input(BenchmarkId::new("q0b_x0", order), &order, |b, &order| {
            b.iter(|| q0b_x0(&spec, 1, order).unwrap())
        });
    }
    group.finish();
}

fn sampling(c: &mut Criterion) {
    let d = StepDistribution::single_level(2).unwrap().to_f64();
    let sampler = HalfplaneSampler::new(&d).unwrap();
    let mut group = c.benchmark_group("sampling");
    for n in [1_000, 10_000] {
        let mut rng = rng_from_seed(2);
        group.bench_function(BenchmarkId::new("halfplane", n), |b| b.iter(|| sampler.sample(n, &mut rng)));
        let mut rng = rng_from_seed(3);
        group.bench_function(BenchmarkId::new("quadrant", n), |b| b.iter(|| sampler.sample_quadrant(n, &mut rng)));
        let mut rng = rng_from_seed(4);
        group.bench_function(BenchmarkId::new("excursion_p1", n), |b| {
            b.iter(|| sample_excursion_p1_with(3 * (n / 3), &mut rng).unwrap())
        });
    }
    for n in [50, 200] {
        let mut rng = rng_from_seed(5);
        group.bench_function(BenchmarkId::new("excursion_windowed", n), |b| {
            b.iter(|| sample_excursion_windowed_with(&d, n, &mut rng).unwrap())
        });
    }
    group.finish();
}

criterion_group!(benches, bijection, counting, sampling);
criterion_main!(benches);
