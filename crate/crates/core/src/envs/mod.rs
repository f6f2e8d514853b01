//! Small deterministic environments with hidden task rewards.
//!
//! The learner-facing step result carries no reward: training code sees only
//! states and termination. True rewards are accumulated internally and read
//! through the evaluation-only accessors.

pub mod expert;
pub mod grid_world;
pub mod point_mass;

pub use expert::{expert_rollout, ExpertKind, ExpertPolicySpec};
pub use grid_world::GridWorldEnv;
pub use point_mass::PointMassEnv;

use serde::{Deserialize, Serialize};

use crate::error::{OopsError, Result};
use crate::trajectory::StateVector;

/// An action, discrete or continuous depending on the environment.
#[derive(Debug, Clone, PartialEq)]
pub enum Action {
    Discrete(usize),
    Continuous(Vec<f64>),
}

impl Action {
    /// Flattens the action to the vector form stored in trajectories.
    pub fn to_vec(&self) -> Vec<f64> {
        match self {
            Action::Discrete(i) => vec![*i as f64],
            Action::Continuous(v) => v.clone(),
        }
    }
}

/// Shape of an environment's action space.
#[derive(Debug, Clone, PartialEq)]
pub enum ActionSpec {
    Discrete { n: usize },
    Continuous { dim: usize, low: f64, high: f64 },
}

/// What the learner sees after a step. Deliberately reward-free.
#[derive(Debug, Clone)]
pub struct LearnerStep {
    pub next_state: StateVector,
    pub done: bool,
}

pub trait Env {
    fn env_id(&self) -> &'static str;
    fn state_dim(&self) -> usize;
    fn action_spec(&self) -> ActionSpec;
    fn horizon(&self) -> usize;

    /// Starts a new episode; deterministic in the seed.
    fn reset(&mut self, seed: u64) -> StateVector;

    /// Advances one step. Out-of-bounds actions are clipped. Stepping a
    /// finished episode is an error.
    fn step(&mut self, action: &Action) -> Result<LearnerStep>;

    /// True reward of the most recent step. Evaluation-only.
    fn last_true_reward(&self) -> f64;

    /// Sum of true rewards in the current episode. Evaluation-only.
    fn episode_true_return(&self) -> f64;

    /// Whether the episode ended in a terminal state rather than by hitting
    /// the horizon.
    fn terminated(&self) -> bool;
}

/// Environments available to the harness and CLI.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum EnvId {
    Pointmass,
    Gridworld,
}

impl std::fmt::Display for EnvId {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            EnvId::Pointmass => f.write_str("pointmass"),
            EnvId::Gridworld => f.write_str("gridworld"),
        }
    }
}

impl std::str::FromStr for EnvId {
    type Err = OopsError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "pointmass" => Ok(EnvId::Pointmass),
            "gridworld" => Ok(EnvId::Gridworld),
            other => Err(OopsError::Config(format!("unknown env id '{other}'"))),
        }
    }
}

/// A concrete environment instance.
pub enum EnvInstance {
    PointMass(PointMassEnv),
    GridWorld(GridWorldEnv),
}

impl EnvInstance {
    pub fn new(id: EnvId) -> Self {
        match id {
            EnvId::Pointmass => EnvInstance::PointMass(PointMassEnv::default()),
            EnvId::Gridworld => EnvInstance::GridWorld(GridWorldEnv::default()),
        }
    }

    pub fn id(&self) -> EnvId {
        match self {
            EnvInstance::PointMass(_) => EnvId::Pointmass,
            EnvInstance::GridWorld(_) => EnvId::Gridworld,
        }
    }

    fn inner(&self) -> &dyn Env {
        match self {
            EnvInstance::PointMass(e) => e,
            EnvInstance::GridWorld(e) => e,
        }
    }

    fn inner_mut(&mut self) -> &mut dyn Env {
        match self {
            EnvInstance::PointMass(e) => e,
            EnvInstance::GridWorld(e) => e,
        }
    }
}

impl Env for EnvInstance {
    fn env_id(&self) -> &'static str {
        self.inner().env_id()
    }
    fn state_dim(&self) -> usize {
        self.inner().state_dim()
    }
    fn action_spec(&self) -> ActionSpec {
        self.inner().action_spec()
    }
    fn horizon(&self) -> usize {
        self.inner().horizon()
    }
    fn reset(&mut self, seed: u64) -> StateVector {
        self.inner_mut().reset(seed)
    }
    fn step(&mut self, action: &Action) -> Result<LearnerStep> {
        self.inner_mut().step(action)
    }
    fn last_true_reward(&self) -> f64 {
        self.inner().last_true_reward()
    }
    fn episode_true_return(&self) -> f64 {
        self.inner().episode_true_return()
    }
    fn terminated(&self) -> bool {
        self.inner().terminated()
    }
}
