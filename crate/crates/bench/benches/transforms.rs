use criterion::{criterion_group, criterion_main, BatchSize, Criterion};
use freespec::*;
use num_complex::Complex64;
use std::hint::black_box;

fn bench_sampling_and_eigensolve(c: &mut Criterion) {
    let mut group = c.benchmark_group("ensemble");
    group.sample_size(20);
    group.bench_function("lue_sample_200x600", |b| {
        let mut seed = 0u64;
        b.iter(|| {
            seed += 1;
            black_box(sample_lue(200, 600, seed).unwrap())
        })
    });
    group.bench_function("eigenvalues_200", |b| {
        let m = sample_lue(200, 600, 1).unwrap();
        b.iter_batched(
            || m.clone(),
            |m| black_box(eigenvalues(&m).unwrap()),
            BatchSize::SmallInput,
        )
    });
    group.finish();
}

fn bench_transforms(c: &mut Criterion) {
    let m = sample_lue(400, 1200, 3).unwrap();
    let s = eigenvalues(&m).unwrap();
    let g = GSource::Empirical(s);
    let contour = ContourSpec::default();

    let mut group = c.benchmark_group("xform");
    group.bench_function("r_contour_empirical_400", |b| {
        b.iter(|| black_box(r_contour(&g, &contour, "bench").unwrap()))
    });
    group.bench_function("inverse_g_empirical_400", |b| {
        let w = Complex64::new(-0.3, -0.05);
        b.iter(|| black_box(inverse_g(&g, w, None).unwrap()))
    });
    group.bench_function("kolmogorov_distance_400", |b| {
        let law = LawSpec::mp(1.0 / 3.0).unwrap();
        let s = eigenvalues(&m).unwrap();
        b.iter(|| black_box(kolmogorov_distance(&s, &law)))
    });
    group.bench_function("free_cumulants_k16", |b| {
        let ms = moments(&eigenvalues(&m).unwrap(), 16);
        b.iter(|| black_box(free_cumulants(&ms)))
    });
    group.finish();
}

fn bench_convolution(c: &mut Criterion) {
    let sources: Vec<GSource> = (0..5)
        .map(|i| GSource::Empirical(eigenvalues(&sample_lue(100, 100, i).unwrap()).unwrap()))
        .collect();
    let (lo, hi) = wishart_sum_support(5, 1.0).unwrap();
    let width = hi - lo;
    let grid: Vec<f64> = (0..=200)
        .map(|i| lo - 0.05 * width + 1.1 * width * i as f64 / 200.0)
        .collect();

    let mut group = c.benchmark_group("freeconv");
    group.sample_size(10);
    group.bench_function("convolve_5_wisharts_n100", |b| {
        b.iter(|| {
            black_box(
                free_convolve_many(&sources, &ContourSpec::default(), &grid, 0.01 * width)
                    .unwrap(),
            )
        })
    });
    group.finish();
}

fn bench_decomposition(c: &mut Criterion) {
    let xa = simulate_scene(&SceneConfig::scene_a(1)).unwrap();
    let xb = simulate_scene(&SceneConfig::scene_b(2)).unwrap();
    let xc = simulate_scene(&SceneConfig::scene_c(3)).unwrap();
    let cov = covariance(&xc, true).unwrap();
    let spec = eigenvalues(&cov).unwrap();
    let contour = spike_band_contour(&spec, spec.ratio().unwrap()).unwrap();
    let sig_a = signature(&xa, &contour, "A").unwrap();
    let sig_b = signature(&xb, &contour, "B").unwrap();
    let sig_c = signature(&xc, &contour, "C").unwrap();
    let library = vec![sig_a, sig_b];

    let mut group = c.benchmark_group("events");
    group.sample_size(10);
    group.bench_function("decompose_pair_k2", |b| {
        b.iter(|| black_box(decompose(&sig_c, &library, 2).unwrap()))
    });
    group.finish();
}

criterion_group!(
    benches,
    bench_sampling_and_eigensolve,
    bench_transforms,
    bench_convolution,
    bench_decomposition
);
criterion_main!(benches);
