use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use biomap_core::{anova_oneway, describe, f_survival, fog_variance};

fn random_groups(rng: &mut ChaCha8Rng, groups: usize, n: usize) -> Vec<Vec<f64>> {
    (0..groups)
        .map(|_| (0..n).map(|_| rng.gen_range(-10.0..10.0)).collect())
        .collect()
}

fn bench_anova(c: &mut Criterion) {
    let mut rng = ChaCha8Rng::seed_from_u64(0);
    let mut group = c.benchmark_group("anova_oneway");
    for (k, n) in [(2, 50), (4, 100), (8, 1000)] {
        let data = random_groups(&mut rng, k, n);
        group.bench_with_input(BenchmarkId::new("groups", format!("{k}x{n}")), &data, |b, d| {
            b.iter(|| anova_oneway(d).unwrap())
        });
    }
    group.finish();
}

fn bench_f_survival(c: &mut Criterion) {
    c.bench_function("f_survival", |b| b.iter(|| f_survival(1.5, 5, 120).unwrap()));
}

fn bench_descriptive(c: &mut Criterion) {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let values: Vec<f64> = (0..10_000).map(|_| rng.gen_range(-100.0..100.0)).collect();
    c.bench_function("describe_10k", |b| b.iter(|| describe(&values).unwrap()));
    c.bench_function("fog_variance_10k", |b| b.iter(|| fog_variance(&values)));
}

criterion_group!(benches, bench_anova, bench_f_survival, bench_descriptive);
criterion_main!(benches);
