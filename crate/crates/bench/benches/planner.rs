use criterion::{criterion_group, criterion_main, BatchSize, Criterion};

use biomap_core::planner::execute_policy;
use biomap_core::{
    cliff_unit_vectors, run_biomap, ArbiterParams, BiomapBudget, CliffWalkEnv, MaskConfig,
    MaskDirection,
};

fn budget() -> BiomapBudget {
    BiomapBudget {
        max_episodes: 60,
        max_steps: 50,
    }
}

fn bench_run_biomap(c: &mut Criterion) {
    let mut group = c.benchmark_group("run_biomap");
    let configs = [
        ("unmasked", MaskConfig::unmasked()),
        (
            "column_masked",
            MaskConfig {
                direction: MaskDirection::Column,
                count: 2,
                continuity: false,
                layers: 5,
            },
        ),
        (
            "row_masked",
            MaskConfig {
                direction: MaskDirection::Row,
                count: 12,
                continuity: true,
                layers: 1,
            },
        ),
    ];
    for (name, mask) in configs {
        group.bench_function(name, |b| {
            b.iter_batched(
                || CliffWalkEnv::from_config(&mask).unwrap(),
                |mut env| {
                    run_biomap(
                        &mut env,
                        cliff_unit_vectors(),
                        &budget(),
                        &ArbiterParams::default(),
                    )
                    .unwrap()
                },
                BatchSize::SmallInput,
            )
        });
    }
    group.finish();
}

fn bench_execute_policy(c: &mut Criterion) {
    let mask = MaskConfig::unmasked();
    let mut env = CliffWalkEnv::from_config(&mask).unwrap();
    let outcome = run_biomap(
        &mut env,
        cliff_unit_vectors(),
        &budget(),
        &ArbiterParams::default(),
    )
    .unwrap();
    let units = cliff_unit_vectors();
    c.bench_function("execute_policy", |b| {
        b.iter(|| execute_policy(&mut env, &outcome.policy, &units, 50).unwrap())
    });
}

fn bench_sweep_point(c: &mut Criterion) {
    use biomap_cli::{run_point, Algorithm, Budgets, Setting};
    let setting = Setting {
        id: "bench".into(),
        mask: MaskConfig::unmasked(),
    };
    let mut group = c.benchmark_group("sweep_point");
    for algorithm in [Algorithm::Biomap, Algorithm::Qmdp] {
        group.bench_function(algorithm.name(), |b| {
            b.iter(|| run_point(&setting, algorithm, &Budgets::default(), 1, 0))
        });
    }
    group.finish();
}

criterion_group!(benches, bench_run_biomap, bench_execute_policy, bench_sweep_point);
criterion_main!(benches);
