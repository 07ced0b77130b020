use confboost_bench::study_store;
use confboost_core::analysis::{analyze, AnalysisConfig};
use confboost_core::binning::kmeans_1d;
use confboost_core::miner::beta_squared;
use confboost_core::{generate_rules, mine_frequent, MinerConfig};
use criterion::{black_box, criterion_group, criterion_main, BenchmarkId, Criterion};

fn mining(c: &mut Criterion) {
    let store = study_store(7);
    let gamma = beta_squared(&store, store.positive_target().unwrap());
    let mut g = c.benchmark_group("mine_study_store");
    g.sample_size(10);
    for min in [40usize, 20, 10] {
        let cfg = MinerConfig::for_store(&store, min, gamma).unwrap();
        g.bench_with_input(BenchmarkId::new("min_support", min), &cfg, |b, cfg| {
            b.iter(|| mine_frequent(black_box(&store), cfg).unwrap())
        });
    }
    let cfg = MinerConfig::for_store(&store, 20, gamma).unwrap();
    let uncached = MinerConfig { use_cache: false, ..cfg.clone() };
    g.bench_function("min_support_20_without_cache", |b| {
        b.iter(|| mine_frequent(black_box(&store), &uncached).unwrap())
    });
    g.finish();
}

fn kmeans(c: &mut Criterion) {
    let values: Vec<f64> = (0..1673).map(|i| ((i * 7919) % 1000) as f64 / 37.0).collect();
    c.bench_function("kmeans_1d_k5_n1673", |b| b.iter(|| kmeans_1d(black_box(&values), 5, 11).unwrap()));
}

fn analysis(c: &mut Criterion) {
    let store = study_store(7);
    let gamma = beta_squared(&store, store.positive_target().unwrap());
    let cfg = MinerConfig::for_store(&store, 10, gamma).unwrap();
    let rules = generate_rules(&mine_frequent(&store, &cfg).unwrap(), &cfg, true);
    let acfg = AnalysisConfig::default();
    let mut g = c.benchmark_group("analyze_study_rules");
    g.sample_size(10);
    g.bench_function("min_support_10", |b| {
        b.iter(|| analyze(black_box(&rules), &acfg, |i| !cfg.excluded.contains(&i) && i != cfg.target).unwrap())
    });
    g.finish();
}

criterion_group!(benches, mining, kmeans, analysis);
criterion_main!(benches);
