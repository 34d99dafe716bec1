//! Parallel versus sequential throughput of the data-parallel paths.
//!
//! The sequential side runs the same code inside a one-thread rayon pool,
//! which is what the `parallel`-less build degenerates to. Build with
//! `--no-default-features` to time the plain-iterator fallback instead.

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use fae_core::data::{make_windows, synth_generate, SynthSpec};
use fae_core::detector::score_online;
use fae_core::model::{FaeHyperparams, FaeModel};
use fae_core::tensor::Tensor2;
use fae_core::trainer::batch_gradient;
use rayon::ThreadPoolBuilder;

fn setup() -> (FaeModel, Vec<Tensor2>, fae_core::data::SeriesRecord) {
    let hyper = FaeHyperparams::new(64, 8, 16, 2);
    let mut model = FaeModel::build(hyper, 1).unwrap();
    let series = synth_generate(
        &SynthSpec {
            id: "bench".into(),
            period: 32,
            noise_std: 0.1,
            ..SynthSpec::default()
        },
        512,
        2,
    )
    .unwrap();
    model.normalizer = fae_core::data::fit_normalizer(std::slice::from_ref(&series)).unwrap();
    let windows = make_windows(&series, 64, 1)
        .unwrap()
        .samples
        .into_iter()
        .take(32)
        .map(|w| Tensor2::row(&w.window).unwrap())
        .collect();
    (model, windows, series)
}

fn bench(c: &mut Criterion) {
    let (model, windows, series) = setup();
    let refs: Vec<&Tensor2> = windows.iter().collect();
    let eps = vec![vec![0.1; model.latent_dim()]; refs.len()];
    let single = ThreadPoolBuilder::new().num_threads(1).build().unwrap();
    let full = ThreadPoolBuilder::new().build().unwrap();

    let mut group = c.benchmark_group("batch_gradient_32");
    group.sample_size(20);
    for (name, pool) in [("sequential", &single), ("parallel", &full)] {
        group.bench_function(BenchmarkId::from_parameter(name), |b| {
            b.iter(|| pool.install(|| batch_gradient(&model, &refs, &eps).unwrap()))
        });
    }
    group.finish();

    let mut group = c.benchmark_group("score_online_512");
    group.sample_size(20);
    for (name, pool) in [("sequential", &single), ("parallel", &full)] {
        group.bench_function(BenchmarkId::from_parameter(name), |b| {
            b.iter(|| pool.install(|| score_online(&model, &series, 3.0).unwrap()))
        });
    }
    group.finish();
}

criterion_group!(benches, bench);
criterion_main!(benches);
