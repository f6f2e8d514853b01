//! A deterministic gridworld with walls and a fixed start.

use std::collections::BTreeSet;

use crate::envs::{Action, ActionSpec, Env, LearnerStep};
use crate::error::{OopsError, Result};
use crate::trajectory::StateVector;

pub const NUM_ACTIONS: usize = 4;

/// Actions: 0 up, 1 down, 2 left, 3 right (row-major grid, row 0 on top).
pub const ACTION_DELTAS: [(i64, i64); NUM_ACTIONS] = [(-1, 0), (1, 0), (0, -1), (0, 1)];

/// N x N grid. Moves into walls or borders are no-ops. Every step pays -1
/// until the goal is entered, which pays 0 and terminates.
///
/// States are exposed as (row/(N-1), col/(N-1)) real vectors so transport
/// metrics operate in a normalized space regardless of grid size.
#[derive(Debug, Clone)]
pub struct GridWorldEnv {
    pub size: usize,
    pub start: (usize, usize),
    pub goal: (usize, usize),
    pub walls: BTreeSet<(usize, usize)>,
    pub horizon: usize,
    agent: (usize, usize),
    steps: usize,
    done: bool,
    terminated: bool,
    last_reward: f64,
    true_return: f64,
}

impl Default for GridWorldEnv {
    fn default() -> Self {
        GridWorldEnv::new(8, (0, 0), (7, 7), BTreeSet::new(), 64).unwrap()
    }
}

impl GridWorldEnv {
    pub fn new(
        size: usize,
        start: (usize, usize),
        goal: (usize, usize),
        walls: BTreeSet<(usize, usize)>,
        horizon: usize,
    ) -> Result<Self> {
        if size < 2 {
            return Err(OopsError::InvalidInput("grid needs size >= 2".into()));
        }
        for cell in [start, goal] {
            if cell.0 >= size || cell.1 >= size {
                return Err(OopsError::InvalidInput(format!(
                    "cell {cell:?} outside {size}x{size} grid"
                )));
            }
            if walls.contains(&cell) {
                return Err(OopsError::InvalidInput(format!(
                    "start/goal cell {cell:?} is a wall"
                )));
            }
        }
        Ok(GridWorldEnv {
            size,
            start,
            goal,
            walls,
            horizon,
            agent: start,
            steps: 0,
            done: false,
            terminated: false,
            last_reward: 0.0,
            true_return: 0.0,
        })
    }

    pub fn embed(&self, cell: (usize, usize)) -> StateVector {
        let denom = (self.size - 1) as f64;
        vec![cell.0 as f64 / denom, cell.1 as f64 / denom]
    }

    /// Inverse of `embed`, for table lookups.
    pub fn cell_of_state(&self, state: &[f64]) -> (usize, usize) {
        let denom = (self.size - 1) as f64;
        let r = (state[0] * denom).round() as usize;
        let c = (state[1] * denom).round() as usize;
        (r.min(self.size - 1), c.min(self.size - 1))
    }

    pub fn state_index(&self, state: &[f64]) -> usize {
        let (r, c) = self.cell_of_state(state);
        r * self.size + c
    }

    pub fn num_states(&self) -> usize {
        self.size * self.size
    }

    pub fn agent_cell(&self) -> (usize, usize) {
        self.agent
    }

    fn is_free(&self, cell: (i64, i64)) -> bool {
        cell.0 >= 0
            && cell.1 >= 0
            && (cell.0 as usize) < self.size
            && (cell.1 as usize) < self.size
            && !self.walls.contains(&(cell.0 as usize, cell.1 as usize))
    }
}

impl Env for GridWorldEnv {
    fn env_id(&self) -> &'static str {
        "gridworld"
    }

    fn state_dim(&self) -> usize {
        2
    }

    fn action_spec(&self) -> ActionSpec {
        ActionSpec::Discrete { n: NUM_ACTIONS }
    }

    fn horizon(&self) -> usize {
        self.horizon
    }

    fn reset(&mut self, _seed: u64) -> StateVector {
        self.agent = self.start;
        self.steps = 0;
        self.done = false;
        self.terminated = false;
        self.last_reward = 0.0;
        self.true_return = 0.0;
        self.embed(self.agent)
    }

    fn step(&mut self, action: &Action) -> Result<LearnerStep> {
        if self.done {
            return Err(OopsError::EpisodeFinished);
        }
        let idx = match action {
            Action::Discrete(i) if *i < NUM_ACTIONS => *i,
            Action::Discrete(i) => {
                return Err(OopsError::InvalidInput(format!("action index {i} out of range")))
            }
            Action::Continuous(_) => {
                return Err(OopsError::InvalidInput("gridworld expects a discrete action".into()))
            }
        };
        let (dr, dc) = ACTION_DELTAS[idx];
        let target = (self.agent.0 as i64 + dr, self.agent.1 as i64 + dc);
        if self.is_free(target) {
            self.agent = (target.0 as usize, target.1 as usize);
        }
        self.steps += 1;
        self.terminated = self.agent == self.goal;
        self.last_reward = if self.terminated { 0.0 } else { -1.0 };
        self.true_return += self.last_reward;
        self.done = self.terminated || self.steps >= self.horizon;
        Ok(LearnerStep {
            next_state: self.embed(self.agent),
            done: self.done,
        })
    }

    fn last_true_reward(&self) -> f64 {
        self.last_reward
    }

    fn episode_true_return(&self) -> f64 {
        self.true_return
    }

    fn terminated(&self) -> bool {
        self.terminated
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reset_returns_fixed_start() {
        let mut env = GridWorldEnv::default();
        assert_eq!(env.reset(123), env.embed((0, 0)));
        assert_eq!(env.reset(456), env.embed((0, 0)));
    }

    #[test]
    fn moving_right_from_origin() {
        let mut env = GridWorldEnv::default();
        env.reset(0);
        let step = env.step(&Action::Discrete(3)).unwrap();
        assert_eq!(env.agent_cell(), (0, 1));
        assert_eq!(env.last_true_reward(), -1.0);
        assert!(!step.done);
    }

    #[test]
    fn wall_moves_are_no_ops() {
        let mut walls = BTreeSet::new();
        walls.insert((0, 1));
        let mut env = GridWorldEnv::new(8, (0, 0), (7, 7), walls, 64).unwrap();
        env.reset(0);
        env.step(&Action::Discrete(3)).unwrap();
        assert_eq!(env.agent_cell(), (0, 0));
        assert_eq!(env.last_true_reward(), -1.0);
        // Border move likewise.
        env.step(&Action::Discrete(0)).unwrap();
        assert_eq!(env.agent_cell(), (0, 0));
    }

    #[test]
    fn goal_entry_pays_zero_and_terminates() {
        let mut env = GridWorldEnv::new(8, (7, 6), (7, 7), BTreeSet::new(), 64).unwrap();
        env.reset(0);
        let step = env.step(&Action::Discrete(3)).unwrap();
        assert!(step.done);
        assert!(env.terminated());
        assert_eq!(env.last_true_reward(), 0.0);
    }

    #[test]
    fn embedding_round_trips() {
        let env = GridWorldEnv::default();
        for r in 0..8 {
            for c in 0..8 {
                let s = env.embed((r, c));
                assert_eq!(env.cell_of_state(&s), (r, c));
            }
        }
    }

    #[test]
    fn horizon_truncation_is_not_terminal() {
        let mut env = GridWorldEnv::new(8, (0, 0), (7, 7), BTreeSet::new(), 3).unwrap();
        env.reset(0);
        let mut done = false;
        for _ in 0..3 {
            done = env.step(&Action::Discrete(2)).unwrap().done;
        }
        assert!(done);
        assert!(!env.terminated());
    }
}
