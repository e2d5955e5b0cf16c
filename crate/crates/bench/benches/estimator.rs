use criterion::{black_box, criterion_group, criterion_main, BenchmarkId, Criterion};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use mmkde::estimator::fit;
use mmkde::meijer::{kernel_density, MeijerKernel};
use mmkde::selector::{i_hat, plugin_eta};
use mmkde::{KernelShape, Sample, SelectorConfig};

fn lognormal_sample(n: usize, seed: u64) -> Vec<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n)
        .map(|_| {
            // Box-Muller pair, first component only
            let u1: f64 = rng.gen::<f64>().max(1e-300);
            let u2: f64 = rng.gen();
            let z = (-2.0 * u1.ln()).sqrt() * (2.0 * std::f64::consts::PI * u2).cos();
            z.exp()
        })
        .collect()
}

fn bench_kernel_density(c: &mut Criterion) {
    let shape = KernelShape::new(1.0, std::f64::consts::FRAC_PI_4).unwrap();
    let k = MeijerKernel::new(1.0, 0.3, shape).unwrap();
    c.bench_function("kernel_density", |b| {
        b.iter(|| kernel_density(&k, black_box(1.7)).unwrap())
    });
}

fn bench_curvature(c: &mut Criterion) {
    let mut group = c.benchmark_group("i_hat");
    for n in [50usize, 200] {
        let s = Sample::new(lognormal_sample(n, 1)).unwrap();
        group.bench_with_input(BenchmarkId::from_parameter(n), &s, |b, s| {
            b.iter(|| i_hat(black_box(s), 1.5, 5.0).unwrap())
        });
    }
    group.finish();
}

fn bench_fit_and_grid(c: &mut Criterion) {
    let shape = KernelShape::new(1.0, std::f64::consts::FRAC_PI_4).unwrap();
    let data = lognormal_sample(100, 2);
    let xs: Vec<f64> = (1..=500).map(|i| 0.02 * i as f64).collect();
    c.bench_function("plugin_fit_grid_n100", |b| {
        b.iter(|| {
            let s = Sample::new(data.clone()).unwrap();
            let eta = plugin_eta(&s, &SelectorConfig::default()).unwrap();
            let est = fit(s, shape, eta).unwrap();
            est.evaluate_grid(black_box(&xs)).unwrap()
        })
    });
}

criterion_group!(benches, bench_kernel_density, bench_curvature, bench_fit_and_grid);
criterion_main!(benches);
