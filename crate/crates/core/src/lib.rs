//! Model-free planning for deterministic POMDPs.
//!
//! The pipeline explores an interactive environment by dead reckoning
//! into a compact vector graph, certifies through the graph's dual
//! Markov automaton that the dynamics are deterministic, and extracts a
//! shortest-path policy that runs on pure path integration. The crate
//! also ships the masking cliff-walking benchmark, a QMDP baseline with
//! a value-iteration oracle, and the statistics used to compare them.

pub mod analysis;
pub mod automaton;
pub mod dot;
pub mod env;
pub mod envs;
pub mod planner;
pub mod stats;
pub mod vecgraph;

pub use analysis::{
    evaluate_policy, fog_variance, group_fog_variance, value_iteration, ActionSelector,
    AnalysisError, GreedySelector, QTable, QmdpPolicy,
};
pub use automaton::{AutomatonError, DeterminismVerdict, MarkovAutomaton, Witness};
pub use dot::to_dot;
pub use env::{
    ActionId, CheckpointToken, EnvError, Environment, ObservationId, Reward, StepOutcome,
    Trajectory,
};
pub use envs::{
    build_grouping, cliff_unit_vectors, observe, CliffWalkEnv, GridPos, MaskConfig, MaskDirection,
    MaskGrouping, CLIFF_ACTION_NAMES,
};
pub use planner::{
    boundary_arbiter, execute_policy, explore, has_negative_cycle, recover_mdp, run_biomap,
    solve_policy, transform_weights, ArbiterParams, BiomapBudget, BiomapMetrics, BiomapOutcome,
    ExploreOutcome, PlannerError, Policy, RecoveredMdp,
};
pub use stats::{anova_oneway, betainc, describe, f_survival, ln_gamma, AnovaResult, Descriptive,
    StatsError,
};
pub use vecgraph::{
    ActionVector, CanonicalEdge, CanonicalGraph, CompactVectorGraph, EdgeInsert, GraphEdge,
    GraphError, VertexKind,
};
