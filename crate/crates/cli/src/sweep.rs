//! Sweep execution: run each (setting, algorithm) point, collect
//! per-episode rewards, and summarize.

use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use biomap_core::planner::execute_policy;
use biomap_core::{
    build_grouping, cliff_unit_vectors, evaluate_policy, run_biomap, value_iteration,
    ArbiterParams, BiomapBudget, CliffWalkEnv, MaskConfig, QmdpPolicy,
};

use crate::config::{Algorithm, Budgets, Setting, SweepConfig};

/// Result of one sweep point. Wall time lives next to, not inside, the
/// reproducible payload so that result files are byte-stable.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentRecord {
    pub setting_id: String,
    pub mask: MaskConfig,
    pub algorithm: Algorithm,
    pub seed: u64,
    /// Cumulative reward of every evaluation episode.
    pub rewards: Vec<f64>,
    pub mean: f64,
    pub max: f64,
    pub min: f64,
    pub variance: f64,
    /// Certification verdict; QMDP does not certify and reports `None`.
    pub deterministic: Option<bool>,
    /// Failure message when the run errored; rewards are empty then.
    pub error: Option<String>,
}

/// Wall-clock time of one sweep point, kept out of the result records.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TimingRecord {
    pub setting_id: String,
    pub algorithm: Algorithm,
    pub wall_ms: f64,
}

fn summarize(rewards: &[f64]) -> (f64, f64, f64, f64) {
    match biomap_core::describe(rewards) {
        Ok(d) => (d.mean, d.max, d.min, d.variance),
        Err(_) => (f64::NAN, f64::NAN, f64::NAN, f64::NAN),
    }
}

fn failed(setting: &Setting, algorithm: Algorithm, seed: u64, message: String) -> ExperimentRecord {
    ExperimentRecord {
        setting_id: setting.id.clone(),
        mask: setting.mask,
        algorithm,
        seed,
        rewards: Vec::new(),
        mean: f64::NAN,
        max: f64::NAN,
        min: f64::NAN,
        variance: f64::NAN,
        deterministic: None,
        error: Some(message),
    }
}

/// Run one sweep point. Each point owns a fresh environment.
pub fn run_point(
    setting: &Setting,
    algorithm: Algorithm,
    budgets: &Budgets,
    eval_episodes: usize,
    seed: u64,
) -> ExperimentRecord {
    let grouping = match build_grouping(&setting.mask) {
        Ok(g) => g,
        Err(e) => return failed(setting, algorithm, seed, e.to_string()),
    };
    let mut env = CliffWalkEnv::new(grouping.clone());
    let mut rewards = Vec::with_capacity(eval_episodes);
    let mut deterministic = None;
    match algorithm {
        Algorithm::Biomap => {
            let budget = BiomapBudget {
                max_episodes: budgets.episodes,
                max_steps: budgets.steps,
            };
            let params = match ArbiterParams::new(budgets.delta) {
                Ok(p) => p,
                Err(e) => return failed(setting, algorithm, seed, e.to_string()),
            };
            let outcome = match run_biomap(&mut env, cliff_unit_vectors(), &budget, &params) {
                Ok(o) => o,
                Err(e) => return failed(setting, algorithm, seed, e.to_string()),
            };
            deterministic = Some(outcome.verdict.deterministic);
            for _ in 0..eval_episodes {
                match execute_policy(&mut env, &outcome.policy, &cliff_unit_vectors(), budgets.steps)
                {
                    Ok(t) => rewards.push(t.cumulative_reward()),
                    Err(e) => return failed(setting, algorithm, seed, e.to_string()),
                }
            }
        }
        Algorithm::Qmdp => {
            let q = match value_iteration(1e-9, 1_000) {
                Ok(q) => q,
                Err(e) => return failed(setting, algorithm, seed, e.to_string()),
            };
            let mut policy = QmdpPolicy::new(q, grouping);
            for _ in 0..eval_episodes {
                match evaluate_policy(&mut env, &mut policy, budgets.steps) {
                    Ok(t) => rewards.push(t.cumulative_reward()),
                    Err(e) => return failed(setting, algorithm, seed, e.to_string()),
                }
            }
        }
    }
    let (mean, max, min, variance) = summarize(&rewards);
    ExperimentRecord {
        setting_id: setting.id.clone(),
        mask: setting.mask,
        algorithm,
        seed,
        rewards,
        mean,
        max,
        min,
        variance,
        deterministic,
        error: None,
    }
}

/// Run the whole sweep across a worker pool. Records come back sorted
/// by (setting id, algorithm) regardless of scheduling, and a failing
/// point becomes an error record instead of aborting the sweep.
pub fn run_sweep(cfg: &SweepConfig, workers: usize) -> (Vec<ExperimentRecord>, Vec<TimingRecord>) {
    let points: Vec<(&Setting, Algorithm)> = cfg
        .settings
        .iter()
        .flat_map(|s| cfg.algorithms.iter().map(move |&a| (s, a)))
        .collect();
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers.max(1))
        .build()
        .expect("worker pool");
    let mut results: Vec<(ExperimentRecord, TimingRecord)> = pool.install(|| {
        points
            .par_iter()
            .map(|&(setting, algorithm)| {
                let start = Instant::now();
                let record =
                    run_point(setting, algorithm, &cfg.budgets, cfg.eval_episodes, cfg.seed);
                let timing = TimingRecord {
                    setting_id: record.setting_id.clone(),
                    algorithm,
                    wall_ms: start.elapsed().as_secs_f64() * 1e3,
                };
                (record, timing)
            })
            .collect()
    });
    results.sort_by(|a, b| {
        (&a.0.setting_id, a.0.algorithm).cmp(&(&b.0.setting_id, b.0.algorithm))
    });
    results.into_iter().unzip()
}
