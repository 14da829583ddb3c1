use criterion::{criterion_group, criterion_main, Criterion};

use cosbias_core::synth::grid::PreparedModel;
use cosbias_core::synth::{generate, SynthConfig};

fn harness(c: &mut Criterion) {
    let config = SynthConfig { noise: 0.05, seed: 1, ..SynthConfig::default() };
    c.bench_function("generate_258_words", |b| b.iter(|| generate(&config).unwrap()));
    let model = PreparedModel::new(&generate(&config).unwrap()).unwrap();
    c.bench_function("evaluate_model", |b| b.iter(|| model.evaluate().unwrap()));
    let mut group = c.benchmark_group("robustness");
    group.sample_size(10);
    group.bench_function("subset_robustness_100", |b| b.iter(|| model.subset_robustness(100, 1).unwrap()));
    group.finish();
}

criterion_group!(benches, harness);
criterion_main!(benches);
