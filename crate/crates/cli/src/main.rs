use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};

use biomap_cli::{
    anova_by_factor, default_sweep, read_records_json, run_sweep, summarize_by_algorithm,
    Algorithm, Budgets, Factor, SweepConfig,
};
use biomap_core::planner::execute_policy;
use biomap_core::{
    cliff_unit_vectors, run_biomap, to_dot, ArbiterParams, BiomapBudget, CanonicalGraph,
    CliffWalkEnv, MaskConfig, MaskDirection, CLIFF_ACTION_NAMES,
};

#[derive(Parser)]
#[command(name = "biomap", about = "Model-free planning for deterministic POMDPs", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a masking sweep and write results, summary, and timings.
    Sweep(SweepArgs),
    /// Run the planner once on a single masking setting.
    Run(RunArgs),
    /// Summarize sweep results, optionally with a one-way ANOVA.
    Stats(StatsArgs),
    /// Export the vector graph of a saved run as Graphviz DOT.
    ExportDot(ExportDotArgs),
}

#[derive(Args)]
struct SweepArgs {
    /// TOML sweep configuration; defaults to the built-in 84-run sweep.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Comma-separated algorithms, overriding the config.
    #[arg(long, value_delimiter = ',')]
    algos: Vec<Algorithm>,
    /// Output directory (created if missing).
    #[arg(long)]
    out: PathBuf,
    /// Worker threads.
    #[arg(long, default_value_t = 1)]
    workers: usize,
}

#[derive(Args)]
struct RunArgs {
    #[arg(long)]
    direction: String,
    #[arg(long)]
    count: u8,
    #[arg(long, action = clap::ArgAction::Set)]
    continuity: bool,
    #[arg(long)]
    layers: u8,
    /// Exploration episode budget N.
    #[arg(long, default_value_t = Budgets::default().episodes)]
    episodes: usize,
    /// Per-episode step budget M.
    #[arg(long, default_value_t = Budgets::default().steps)]
    steps: usize,
    /// Boundary-arbiter tolerance delta.
    #[arg(long, default_value_t = Budgets::default().delta)]
    delta: u32,
    /// Write the full run record as JSON here.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct StatsArgs {
    /// Directory holding results.json from a sweep.
    #[arg(long = "in")]
    input: PathBuf,
    /// Factor to slice a one-way ANOVA along.
    #[arg(long)]
    anova: Option<Factor>,
}

#[derive(Args)]
struct ExportDotArgs {
    /// A run record written by `biomap run --out`.
    #[arg(long = "in")]
    input: PathBuf,
    /// DOT file to write.
    #[arg(long)]
    out: PathBuf,
}

/// `BIOMAP_SEED` overrides the configured base seed for reproduction.
fn seed_override() -> Result<Option<u64>> {
    match std::env::var("BIOMAP_SEED") {
        Ok(text) => Ok(Some(
            text.parse::<u64>()
                .with_context(|| format!("BIOMAP_SEED must be a u64, got '{text}'"))?,
        )),
        Err(std::env::VarError::NotPresent) => Ok(None),
        Err(e) => Err(e).context("reading BIOMAP_SEED"),
    }
}

fn cmd_sweep(args: SweepArgs) -> Result<()> {
    let mut cfg = match &args.config {
        Some(path) => {
            let text = std::fs::read_to_string(path)
                .with_context(|| format!("reading {}", path.display()))?;
            SweepConfig::from_toml_str(&text)?
        }
        None => default_sweep(),
    };
    if !args.algos.is_empty() {
        cfg.algorithms = args.algos.clone();
        cfg.algorithms.sort();
        cfg.algorithms.dedup();
    }
    if let Some(seed) = seed_override()? {
        cfg.seed = seed;
    }
    cfg.validate()?;

    std::fs::create_dir_all(&args.out)
        .with_context(|| format!("creating {}", args.out.display()))?;
    let (records, timings) = run_sweep(&cfg, args.workers);

    std::fs::write(args.out.join("config.toml"), cfg.to_toml_string()?)?;
    biomap_cli::report::write_records_json(&args.out.join("results.json"), &records)?;
    biomap_cli::report::write_timings_json(&args.out.join("timings.json"), &timings)?;
    let summary = summarize_by_algorithm(&records)?;
    biomap_cli::report::write_summary_csv(&args.out.join("results.csv"), &summary)?;

    let failures = records.iter().filter(|r| r.error.is_some()).count();
    println!(
        "sweep: {} records ({} settings x {} algorithms), {} failed",
        records.len(),
        cfg.settings.len(),
        cfg.algorithms.len(),
        failures
    );
    for s in &summary {
        println!(
            "  {:<8} mean {:+.3}  max {:+.3}  min {:+.3}  var {:.3}  ({} runs)",
            s.algorithm.name(),
            s.mean,
            s.max,
            s.min,
            s.variance,
            s.runs
        );
    }
    println!("wrote {}", args.out.display());
    Ok(())
}

fn parse_direction(text: &str) -> Result<MaskDirection> {
    match text.trim().to_ascii_lowercase().as_str() {
        "row" => Ok(MaskDirection::Row),
        "column" | "col" => Ok(MaskDirection::Column),
        other => bail!("unknown direction '{other}' (expected row or column)"),
    }
}

fn cmd_run(args: RunArgs) -> Result<()> {
    let mask = MaskConfig {
        direction: parse_direction(&args.direction)?,
        count: args.count,
        continuity: args.continuity,
        layers: args.layers,
    };
    let mut env = CliffWalkEnv::from_config(&mask)?;
    let budget = BiomapBudget {
        max_episodes: args.episodes,
        max_steps: args.steps,
    };
    let params = ArbiterParams::new(args.delta)?;
    let outcome = run_biomap(&mut env, cliff_unit_vectors(), &budget, &params)?;
    let trajectory = execute_policy(&mut env, &outcome.policy, &cliff_unit_vectors(), args.steps)?;

    let names: Vec<String> = CLIFF_ACTION_NAMES.iter().map(|s| s.to_string()).collect();
    println!(
        "deterministic: {}  episodes: {}  env steps: {} (bound {})",
        outcome.verdict.deterministic,
        outcome.metrics.episodes,
        outcome.metrics.env_steps,
        outcome.metrics.step_budget_bound
    );
    println!(
        "policy reward: {:+}  in {} steps",
        trajectory.cumulative_reward(),
        trajectory.len()
    );
    println!("wall time: {:.3} ms", outcome.metrics.wall_time_ms);

    if let Some(path) = &args.out {
        // Wall time goes to stdout only so the record itself is
        // byte-stable across repeated runs.
        let record = serde_json::json!({
            "mask": mask,
            "budgets": { "episodes": args.episodes, "steps": args.steps, "delta": args.delta },
            "action_names": names,
            "graph": outcome.graph.canonical(),
            "automaton": outcome.automaton.to_json(),
            "verdict": outcome.verdict,
            "policy": outcome.policy.to_json(&names),
            "recovered": outcome.recovered.to_json(),
            "trajectory": {
                "observations": trajectory.observations(),
                "actions": trajectory.actions(),
                "rewards": trajectory.rewards(),
                "cumulative_reward": trajectory.cumulative_reward(),
            },
            "metrics": {
                "episodes": outcome.metrics.episodes,
                "env_steps": outcome.metrics.env_steps,
                "step_budget_bound": outcome.metrics.step_budget_bound,
                "complexity_budget": outcome.metrics.complexity_budget,
            },
        });
        std::fs::write(path, serde_json::to_string_pretty(&record)?)
            .with_context(|| format!("writing {}", path.display()))?;
        println!("wrote {}", path.display());
    }
    Ok(())
}

fn cmd_stats(args: StatsArgs) -> Result<()> {
    let records = read_records_json(&args.input.join("results.json"))?;
    let summary = summarize_by_algorithm(&records)?;
    println!("{:<10} {:>6} {:>9} {:>9} {:>9} {:>9}", "algorithm", "n", "mean", "max", "min", "var");
    for s in &summary {
        println!(
            "{:<10} {:>6} {:>9.3} {:>9.3} {:>9.3} {:>9.3}",
            s.algorithm.name(),
            s.episodes,
            s.mean,
            s.max,
            s.min,
            s.variance
        );
    }
    if let Some(factor) = args.anova {
        let a = anova_by_factor(&records, factor)?;
        println!("anova over {:?}: {} levels", a.factor, a.levels.len());
        for (level, n) in &a.levels {
            println!("  level {level}: {n} records");
        }
        match (&a.result, &a.degenerate) {
            (Some(r), _) => println!(
                "  F({}, {}) = {:.6}, p = {:.6} (SSB {:.6}, SSW {:.6})",
                r.df_between, r.df_within, r.f, r.p, r.ss_between, r.ss_within
            ),
            (None, Some(reason)) => println!("  not computable: {reason}"),
            (None, None) => unreachable!("factor anova without result or reason"),
        }
    }
    Ok(())
}

fn cmd_export_dot(args: ExportDotArgs) -> Result<()> {
    let text = std::fs::read_to_string(&args.input)
        .with_context(|| format!("reading {}", args.input.display()))?;
    let record: serde_json::Value = serde_json::from_str(&text)?;
    let graph_value = record
        .get("graph")
        .with_context(|| format!("{} has no 'graph' field", args.input.display()))?;
    let canonical: CanonicalGraph = serde_json::from_value(graph_value.clone())?;
    let graph = canonical.to_graph()?;
    let names: Option<Vec<String>> = record
        .get("action_names")
        .and_then(|v| serde_json::from_value(v.clone()).ok());
    let dot = to_dot(&graph, names.as_deref());
    std::fs::write(&args.out, dot).with_context(|| format!("writing {}", args.out.display()))?;
    println!("wrote {}", args.out.display());
    Ok(())
}

fn write_path_check(path: &Path) -> Result<()> {
    if let Some(parent) = path.parent() {
        if !parent.as_os_str().is_empty() && !parent.exists() {
            bail!("directory {} does not exist", parent.display());
        }
    }
    Ok(())
}

fn main() -> Result<()> {
    let cli = Cli::parse();
    match cli.command {
        Command::Sweep(args) => cmd_sweep(args),
        Command::Run(args) => {
            if let Some(path) = &args.out {
                write_path_check(path)?;
            }
            cmd_run(args)
        }
        Command::Stats(args) => cmd_stats(args),
        Command::ExportDot(args) => {
            write_path_check(&args.out)?;
            cmd_export_dot(args)
        }
    }
}
