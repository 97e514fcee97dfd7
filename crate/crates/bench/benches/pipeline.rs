use std::hint::black_box;

use criterion::{criterion_group, criterion_main, Criterion};

use camp_bench::{assignments_for, examples_for, synthetic_matches};
use camp_core::lnc::{lnc_rate_match, ResourceTable};
use camp_core::projection::{KnnModel, KnnParams, ProjectionModel, TrainingExample};
use camp_core::scoring::{camp_rate_match, InningsModels, ScoringParams};
use camp_core::synth::{generate, GeneratorConfig};

fn bench_generate(c: &mut Criterion) {
    let cfg = GeneratorConfig { n_matches: 10, ..GeneratorConfig::default() };
    c.bench_function("generate_10_matches", |b| {
        b.iter(|| black_box(generate(&cfg).unwrap()))
    });
}

fn bench_rate_match(c: &mut Criterion) {
    let matches = synthetic_matches(21, 15);
    let assignments = assignments_for(&matches);
    let examples = examples_for(&matches, &assignments);
    let split = |innings: u8| -> Vec<TrainingExample> {
        examples.iter().filter(|e| e.innings == innings).cloned().collect()
    };
    let models = InningsModels {
        first: ProjectionModel::Knn(KnnModel::fit(split(1), 1, KnnParams::default()).unwrap()),
        second: ProjectionModel::Knn(KnnModel::fit(split(2), 2, KnnParams::default()).unwrap()),
    };
    let params = ScoringParams::default();
    c.bench_function("camp_rate_one_match_knn", |b| {
        b.iter(|| {
            black_box(camp_rate_match(&matches[0], &assignments, &models, &params, 50).unwrap())
        })
    });

    let table = ResourceTable::paper_default();
    c.bench_function("lnc_rate_one_match", |b| {
        b.iter(|| black_box(lnc_rate_match(&matches[0], &table, &params, 50, 235.0).unwrap()))
    });
}

criterion_group!(benches, bench_generate, bench_rate_match);
criterion_main!(benches);
