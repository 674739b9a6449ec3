use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use dkmr_core::denoise::dft2;
use dkmr_core::synth::{generate_scenario, ScenarioParams};
use dkmr_core::{
    build_enhanced_matrix, localize, refine, DenoiseConfig, Formula, KillMatrix, MaskKind, Matrix,
    Variant,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn kill_matrix(rows: usize, cols: usize, seed: u64) -> KillMatrix<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    KillMatrix {
        rows: (0..rows).map(|i| format!("m{i}")).collect(),
        cols: (0..cols).map(|j| format!("t{j}")).collect(),
        fail_vector: (0..cols).map(|_| rng.random_bool(0.1)).collect(),
        cells: Matrix::from_fn(rows, cols, |_, _| rng.random_range(0..3) as f64),
    }
}

fn bench_refine(c: &mut Criterion) {
    let mut group = c.benchmark_group("refine");
    for (rows, cols) in [(300, 50), (1000, 1000)] {
        let m = kill_matrix(rows, cols, 1);
        for mask in [MaskKind::Ideal, MaskKind::Gaussian] {
            let config = DenoiseConfig::new(0.3, mask).unwrap();
            group.bench_with_input(
                BenchmarkId::new(mask.to_string(), format!("{rows}x{cols}")),
                &m,
                |b, m| b.iter(|| refine(black_box(m), &config).unwrap()),
            );
        }
    }
    group.finish();
}

fn bench_dft(c: &mut Criterion) {
    let mut group = c.benchmark_group("dft2");
    for n in [64, 256, 1000] {
        let m = kill_matrix(n, n, 2).cells;
        group.bench_with_input(BenchmarkId::from_parameter(n), &m, |b, m| {
            b.iter(|| dft2(black_box(m)).unwrap())
        });
    }
    group.finish();
}

fn bench_localize(c: &mut Criterion) {
    let scenario = generate_scenario(&ScenarioParams::default(), 0).unwrap();
    let config = DenoiseConfig::default();
    let mut group = c.benchmark_group("localize");
    group.bench_function("build_enhanced", |b| {
        b.iter(|| build_enhanced_matrix(black_box(&scenario.dataset)))
    });
    for variant in Variant::ALL {
        group.bench_function(variant.to_string(), |b| {
            b.iter(|| {
                localize(
                    black_box(&scenario.dataset),
                    variant,
                    Formula::Ochiai,
                    &config,
                )
                .unwrap()
            })
        });
    }
    group.finish();
}

criterion_group!(benches, bench_refine, bench_dft, bench_localize);
criterion_main!(benches);
