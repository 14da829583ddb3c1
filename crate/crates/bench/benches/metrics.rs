use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use std::hint::black_box;

use cosbias_bench::{random_pairs, random_set};
use cosbias_core::weat::weat_p_value;
use cosbias_core::{bias_direction_pca, mac_score, same_set_binary, same_set_multi, weat_effect_size};

const DIM: usize = 300;

fn weat(c: &mut Criterion) {
    let (a, b) = (random_set(8, DIM, 1), random_set(8, DIM, 2));
    let mut group = c.benchmark_group("weat");
    for m in [8, 32] {
        let (x, y) = (random_set(m, DIM, 3), random_set(m, DIM, 4));
        group.bench_with_input(BenchmarkId::new("effect_size", m), &m, |bench, _| {
            bench.iter(|| weat_effect_size(black_box(&x), black_box(&y), &a, &b).unwrap())
        });
    }
    let (x, y) = (random_set(8, DIM, 3), random_set(8, DIM, 4));
    group.bench_function("p_value_exhaustive_8", |bench| {
        bench.iter(|| weat_p_value(&x, &y, &a, &b, 100_000, 0).unwrap())
    });
    let (x, y) = (random_set(32, DIM, 3), random_set(32, DIM, 4));
    group.bench_function("p_value_sampled_32x10000", |bench| {
        bench.iter(|| weat_p_value(&x, &y, &a, &b, 10_000, 0).unwrap())
    });
    group.finish();
}

fn same_and_mac(c: &mut Criterion) {
    let words = random_set(500, DIM, 5);
    let sets: Vec<Vec<_>> = (0..4).map(|k| random_set(8, DIM, 10 + k)).collect();
    let refs: Vec<&[_]> = sets.iter().map(Vec::as_slice).collect();
    c.bench_function("same_binary_500", |b| b.iter(|| same_set_binary(black_box(&words), refs[0], refs[1]).unwrap()));
    c.bench_function("same_multi_500x4", |b| b.iter(|| same_set_multi(black_box(&words), &refs).unwrap()));
    c.bench_function("mac_500x4", |b| b.iter(|| mac_score(black_box(&words), &refs).unwrap()));
}

fn direction(c: &mut Criterion) {
    let defining = random_pairs(10, DIM, 6);
    c.bench_function("pca_direction_10_pairs", |b| b.iter(|| bias_direction_pca(black_box(&defining), 3).unwrap()));
}

criterion_group!(benches, weat, same_and_mac, direction);
criterion_main!(benches);
