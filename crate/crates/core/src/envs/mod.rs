//! Benchmark and synthetic DET-POMDP environments.

pub mod grid;
pub mod synthetic;

pub use grid::{
    build_grouping, cliff_transition, cliff_unit_vectors, observe, CliffWalkEnv, EnvsError,
    GridPos, MaskConfig, MaskDirection, MaskGrouping, Transition, ACTION_DOWN, ACTION_LEFT,
    ACTION_RIGHT, ACTION_UP, CLIFF_ACTION_NAMES, GOAL, GRID_COUNT, START,
};
pub use synthetic::{
    two_action_unit_vectors, AliasedOscillatorEnv, NoisyRewardEnv, SingleStateEnv,
};
