//! Masking Cliff Walking: a 4x12 grid DET-POMDP.
//!
//! Grids 0..=35 are normal cells (row = index / 12, col = index % 12),
//! grid 36 is the start, grids 37..=46 are cliffs, grid 47 is the goal.
//! Stepping on a normal grid costs -1, a cliff costs -100 and terminates,
//! the goal pays +10 and terminates. Off-board moves leave the position
//! unchanged at cost -1.
//!
//! The masking mechanism groups normal grids into shared-observation
//! layers anchored at grid 35; start, cliffs, and goal are never masked.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::env::{
    ActionId, CheckpointToken, EnvError, Environment, ObservationId, Reward, StepOutcome,
};
use crate::vecgraph::ActionVector;

pub const GRID_COUNT: usize = 48;
pub const START: u8 = 36;
pub const GOAL: u8 = 47;
pub const CLIFF_RANGE: std::ops::RangeInclusive<u8> = 37..=46;

pub const ACTION_UP: ActionId = ActionId(0);
pub const ACTION_RIGHT: ActionId = ActionId(1);
pub const ACTION_DOWN: ActionId = ActionId(2);
pub const ACTION_LEFT: ActionId = ActionId(3);

pub const CLIFF_ACTION_NAMES: [&str; 4] = ["up", "right", "down", "left"];

/// Unit displacement for each cliff-walking action: up, right, down, left.
pub fn cliff_unit_vectors() -> Vec<ActionVector> {
    vec![
        ActionVector::new(vec![0, 1]),
        ActionVector::new(vec![1, 0]),
        ActionVector::new(vec![0, -1]),
        ActionVector::new(vec![-1, 0]),
    ]
}

/// Cell index on the 4x12 board.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct GridPos(u8);

impl GridPos {
    pub fn new(index: u8) -> Result<Self, EnvsError> {
        if (index as usize) < GRID_COUNT {
            Ok(GridPos(index))
        } else {
            Err(EnvsError::BadGrid(index))
        }
    }

    pub fn index(self) -> u8 {
        self.0
    }

    pub fn row(self) -> u8 {
        self.0 / 12
    }

    pub fn col(self) -> u8 {
        self.0 % 12
    }

    pub fn is_cliff(self) -> bool {
        CLIFF_RANGE.contains(&self.0)
    }

    pub fn is_goal(self) -> bool {
        self.0 == GOAL
    }

    pub fn is_terminal(self) -> bool {
        self.is_cliff() || self.is_goal()
    }

    /// Normal grids 0..=35, the only cells the masking may cover.
    pub fn is_normal(self) -> bool {
        self.0 <= 35
    }
}

#[derive(Debug, Error)]
pub enum EnvsError {
    #[error("grid index {0} out of range")]
    BadGrid(u8),
    #[error("invalid mask config: {0}")]
    InvalidConfig(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MaskDirection {
    Row,
    Column,
}

/// Declarative masking setting: one of the four experimental dimensions
/// each. `layers = 0` means fully observable.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct MaskConfig {
    pub direction: MaskDirection,
    pub count: u8,
    pub continuity: bool,
    pub layers: u8,
}

impl MaskConfig {
    pub fn unmasked() -> Self {
        MaskConfig {
            direction: MaskDirection::Column,
            count: 2,
            continuity: false,
            layers: 0,
        }
    }
}

/// Disjoint groups of normal grids sharing one observation label.
/// The label of a group is its minimum grid index.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MaskGrouping {
    groups: Vec<BTreeSet<u8>>,
    lookup: [u32; GRID_COUNT],
}

impl MaskGrouping {
    pub fn identity() -> Self {
        let mut lookup = [0u32; GRID_COUNT];
        for (i, slot) in lookup.iter_mut().enumerate() {
            *slot = i as u32;
        }
        MaskGrouping {
            groups: Vec::new(),
            lookup,
        }
    }

    pub fn groups(&self) -> &[BTreeSet<u8>] {
        &self.groups
    }

    pub fn label(&self, group: &BTreeSet<u8>) -> ObservationId {
        ObservationId(*group.iter().next().expect("non-empty group") as u32)
    }

    /// JSON export as `{label: [grids]}`.
    pub fn to_json(&self) -> serde_json::Value {
        let mut map = serde_json::Map::new();
        for g in &self.groups {
            let label = self.label(g).0.to_string();
            let grids: Vec<u8> = g.iter().copied().collect();
            map.insert(label, serde_json::json!(grids));
        }
        serde_json::Value::Object(map)
    }
}

/// Deterministic grouping constructor.
///
/// Layer k occupies the k-th line walking away from grid 35's line
/// (leftward for columns, upward for rows). Within a layer, `count` grids
/// are taken along the line starting from the grid-35-side end (bottom-up
/// for columns, right-to-left for rows), adjacent when `continuity` is
/// true and skipping one grid between picks when false.
pub fn build_grouping(cfg: &MaskConfig) -> Result<MaskGrouping, EnvsError> {
    let mut grouping = MaskGrouping::identity();
    if cfg.layers == 0 {
        return Ok(grouping);
    }
    if cfg.count == 0 {
        return Err(EnvsError::InvalidConfig("count must be positive".into()));
    }
    let stride: i32 = if cfg.continuity { 1 } else { 2 };
    for layer in 0..cfg.layers {
        let mut group = BTreeSet::new();
        for pick in 0..cfg.count {
            let (row, col) = match cfg.direction {
                MaskDirection::Column => {
                    (2 - i32::from(pick) * stride, 11 - i32::from(layer))
                }
                MaskDirection::Row => {
                    (2 - i32::from(layer), 11 - i32::from(pick) * stride)
                }
            };
            if !(0..=2).contains(&row) || !(0..=11).contains(&col) {
                return Err(EnvsError::InvalidConfig(format!(
                    "layer {layer} pick {pick} falls outside the normal grids"
                )));
            }
            group.insert((row * 12 + col) as u8);
        }
        let label = *group.iter().next().expect("count >= 1");
        for &cell in &group {
            grouping.lookup[cell as usize] = u32::from(label);
        }
        grouping.groups.push(group);
    }
    Ok(grouping)
}

/// The observation function: group label for masked grids, identity
/// elsewhere. Total and many-to-one.
pub fn observe(pos: GridPos, grouping: &MaskGrouping) -> ObservationId {
    ObservationId(grouping.lookup[pos.index() as usize])
}

/// Outcome of the true dynamics for one (position, action) pair.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Transition {
    pub pos: GridPos,
    pub reward: f64,
    pub terminal: bool,
    pub failure: bool,
}

/// Pure ground-truth dynamics of the cliff board.
pub fn cliff_transition(pos: GridPos, action: ActionId) -> Transition {
    debug_assert!(!pos.is_terminal(), "transition from terminal cell");
    let (dr, dc): (i32, i32) = match action {
        ACTION_UP => (-1, 0),
        ACTION_RIGHT => (0, 1),
        ACTION_DOWN => (1, 0),
        ACTION_LEFT => (0, -1),
        _ => panic!("unknown cliff action {action:?}"),
    };
    let row = i32::from(pos.row()) + dr;
    let col = i32::from(pos.col()) + dc;
    // Row 3 is walkable only at the start cell; cliffs and goal terminate
    // on entry, so walking "along" row 3 never happens.
    let next = if (0..=3).contains(&row) && (0..=11).contains(&col) {
        GridPos((row * 12 + col) as u8)
    } else {
        pos
    };
    if next.is_cliff() {
        Transition {
            pos: next,
            reward: -100.0,
            terminal: true,
            failure: true,
        }
    } else if next.is_goal() {
        Transition {
            pos: next,
            reward: 10.0,
            terminal: true,
            failure: false,
        }
    } else {
        Transition {
            pos: next,
            reward: -1.0,
            terminal: false,
            failure: false,
        }
    }
}

/// Interactive episode over the masked cliff board.
pub struct CliffWalkEnv {
    grouping: MaskGrouping,
    pos: GridPos,
    terminal: bool,
    failure: bool,
    episode: u64,
    saved: Vec<(GridPos, bool, bool)>,
}

impl CliffWalkEnv {
    pub fn new(grouping: MaskGrouping) -> Self {
        CliffWalkEnv {
            grouping,
            pos: GridPos(START),
            terminal: false,
            failure: false,
            episode: 0,
            saved: Vec::new(),
        }
    }

    pub fn from_config(cfg: &MaskConfig) -> Result<Self, EnvsError> {
        Ok(Self::new(build_grouping(cfg)?))
    }

    pub fn grouping(&self) -> &MaskGrouping {
        &self.grouping
    }
}

impl Environment for CliffWalkEnv {
    fn action_count(&self) -> usize {
        4
    }

    fn reset(&mut self) -> ObservationId {
        self.pos = GridPos(START);
        self.terminal = false;
        self.failure = false;
        self.episode += 1;
        self.saved.clear();
        observe(self.pos, &self.grouping)
    }

    fn step(&mut self, action: ActionId) -> Result<StepOutcome, EnvError> {
        if self.terminal {
            return Err(EnvError::StepAfterTerminal);
        }
        if action.0 >= 4 {
            return Err(EnvError::UnknownAction {
                action: action.0,
                count: 4,
            });
        }
        let t = cliff_transition(self.pos, action);
        self.pos = t.pos;
        self.terminal = t.terminal;
        self.failure = t.failure;
        Ok(StepOutcome {
            observation: observe(t.pos, &self.grouping),
            reward: Reward::new(t.reward)?,
            terminal: t.terminal,
            failure: t.failure,
        })
    }

    fn checkpointable(&self) -> bool {
        true
    }

    fn checkpoint(&mut self) -> Result<CheckpointToken, EnvError> {
        self.saved.push((self.pos, self.terminal, self.failure));
        Ok(CheckpointToken {
            episode: self.episode,
            slot: self.saved.len() - 1,
        })
    }

    fn restore(&mut self, token: CheckpointToken) -> Result<(), EnvError> {
        if token.episode != self.episode {
            return Err(EnvError::StaleToken);
        }
        let (pos, terminal, failure) = self.saved[token.slot];
        self.pos = pos;
        self.terminal = terminal;
        self.failure = failure;
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn g(i: u8) -> GridPos {
        GridPos::new(i).unwrap()
    }

    #[test]
    fn start_left_hits_wall() {
        let t = cliff_transition(g(36), ACTION_LEFT);
        assert_eq!(t.pos, g(36));
        assert_eq!(t.reward, -1.0);
        assert!(!t.terminal);
    }

    #[test]
    fn start_right_falls_into_cliff() {
        let t = cliff_transition(g(36), ACTION_RIGHT);
        assert_eq!(t.pos, g(37));
        assert_eq!(t.reward, -100.0);
        assert!(t.terminal);
        assert!(t.failure);
    }

    #[test]
    fn last_column_down_reaches_goal() {
        let t = cliff_transition(g(35), ACTION_DOWN);
        assert_eq!(t.pos, g(47));
        assert_eq!(t.reward, 10.0);
        assert!(t.terminal);
        assert!(!t.failure);
    }

    #[test]
    fn optimal_path_sums_to_minus_two() {
        // up, right x 11, down from the start visits (36,24,...,35,47).
        let mut pos = g(36);
        let mut total = 0.0;
        let mut visited = vec![pos.index()];
        let mut actions = vec![ACTION_UP];
        actions.extend(std::iter::repeat(ACTION_RIGHT).take(11));
        actions.push(ACTION_DOWN);
        for a in actions {
            let t = cliff_transition(pos, a);
            total += t.reward;
            pos = t.pos;
            visited.push(pos.index());
        }
        assert_eq!(total, -2.0);
        assert_eq!(
            visited,
            vec![36, 24, 25, 26, 27, 28, 29, 30, 31, 32, 33, 34, 35, 47]
        );
    }

    #[test]
    fn hybrid_grouping_matches_worked_example() {
        // column, count=2, discrete, 5 layers: {7,31},{8,32},{9,33},{10,34},{11,35}
        let cfg = MaskConfig {
            direction: MaskDirection::Column,
            count: 2,
            continuity: false,
            layers: 5,
        };
        let grouping = build_grouping(&cfg).unwrap();
        let sets: Vec<Vec<u8>> = grouping
            .groups()
            .iter()
            .map(|s| s.iter().copied().collect())
            .collect();
        assert_eq!(
            sets,
            vec![
                vec![11, 35],
                vec![10, 34],
                vec![9, 33],
                vec![8, 32],
                vec![7, 31]
            ]
        );
        assert_eq!(observe(g(31), &grouping), ObservationId(7));
        assert_eq!(observe(g(7), &grouping), ObservationId(7));
        assert_eq!(observe(g(36), &grouping), ObservationId(36));
    }

    #[test]
    fn continuous_single_layer_column() {
        let cfg = MaskConfig {
            direction: MaskDirection::Column,
            count: 2,
            continuity: true,
            layers: 1,
        };
        let grouping = build_grouping(&cfg).unwrap();
        let group: Vec<u8> = grouping.groups()[0].iter().copied().collect();
        assert_eq!(group, vec![23, 35]);
        assert_eq!(observe(g(35), &grouping), ObservationId(23));
    }

    #[test]
    fn zero_layers_is_identity() {
        let grouping = build_grouping(&MaskConfig::unmasked()).unwrap();
        assert!(grouping.groups().is_empty());
        for i in 0..GRID_COUNT as u8 {
            assert_eq!(observe(g(i), &grouping), ObservationId(u32::from(i)));
        }
    }

    #[test]
    fn spilling_config_rejected() {
        // Discrete column masking with 3 picks needs rows 2, 0, -2.
        let cfg = MaskConfig {
            direction: MaskDirection::Column,
            count: 3,
            continuity: false,
            layers: 1,
        };
        assert!(build_grouping(&cfg).is_err());
        // Four row layers exceed the three normal rows.
        let cfg = MaskConfig {
            direction: MaskDirection::Row,
            count: 2,
            continuity: true,
            layers: 4,
        };
        assert!(build_grouping(&cfg).is_err());
    }

    #[test]
    fn masked_groups_share_observation() {
        let cfg = MaskConfig {
            direction: MaskDirection::Row,
            count: 6,
            continuity: true,
            layers: 3,
        };
        let grouping = build_grouping(&cfg).unwrap();
        for group in grouping.groups() {
            let label = grouping.label(group);
            for &cell in group {
                assert!(g(cell).is_normal());
                assert_eq!(observe(g(cell), &grouping), label);
            }
        }
    }

    #[test]
    fn checkpoint_restore_replays_identically() {
        let mut env = CliffWalkEnv::from_config(&MaskConfig::unmasked()).unwrap();
        env.reset();
        let token = env.checkpoint().unwrap();
        let first = env.step(ACTION_UP).unwrap();
        env.restore(token).unwrap();
        let second = env.step(ACTION_UP).unwrap();
        assert_eq!(first, second);
        assert_eq!(first.observation, ObservationId(24));
    }

    #[test]
    fn stale_token_rejected() {
        let mut env = CliffWalkEnv::from_config(&MaskConfig::unmasked()).unwrap();
        env.reset();
        let token = env.checkpoint().unwrap();
        env.reset();
        assert!(matches!(env.restore(token), Err(EnvError::StaleToken)));
    }

    #[test]
    fn step_after_terminal_is_an_error() {
        let mut env = CliffWalkEnv::from_config(&MaskConfig::unmasked()).unwrap();
        env.reset();
        let out = env.step(ACTION_RIGHT).unwrap();
        assert!(out.terminal && out.failure);
        assert!(matches!(
            env.step(ACTION_UP),
            Err(EnvError::StepAfterTerminal)
        ));
    }
}
