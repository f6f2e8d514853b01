//! A 2D point mass with velocity, driven by bounded accelerations.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::envs::{Action, ActionSpec, Env, LearnerStep};
use crate::error::{OopsError, Result};
use crate::trajectory::StateVector;

pub const ARENA_HALF_WIDTH: f64 = 5.0;
pub const MAX_SPEED: f64 = 2.0;
pub const GOAL_RADIUS: f64 = 0.1;

/// State is (x, y, vx, vy). Positions are clipped to the arena, velocities to
/// [-MAX_SPEED, MAX_SPEED], accelerations to [-1, 1] per component. Each step
/// pays the distance to the goal; reaching the goal radius ends the episode.
#[derive(Debug, Clone)]
pub struct PointMassEnv {
    pub goal: [f64; 2],
    pub dt: f64,
    pub horizon: usize,
    state: [f64; 4],
    steps: usize,
    done: bool,
    terminated: bool,
    last_reward: f64,
    true_return: f64,
}

impl Default for PointMassEnv {
    fn default() -> Self {
        PointMassEnv::new([2.0, 2.0], 0.1, 50)
    }
}

impl PointMassEnv {
    pub fn new(goal: [f64; 2], dt: f64, horizon: usize) -> Self {
        PointMassEnv {
            goal,
            dt,
            horizon,
            state: [0.0; 4],
            steps: 0,
            done: false,
            terminated: false,
            last_reward: 0.0,
            true_return: 0.0,
        }
    }

    fn distance_to_goal(&self) -> f64 {
        let dx = self.state[0] - self.goal[0];
        let dy = self.state[1] - self.goal[1];
        (dx * dx + dy * dy).sqrt()
    }

    pub fn velocity(&self) -> [f64; 2] {
        [self.state[2], self.state[3]]
    }

    pub fn position(&self) -> [f64; 2] {
        [self.state[0], self.state[1]]
    }
}

fn clip(v: f64, lo: f64, hi: f64) -> f64 {
    v.max(lo).min(hi)
}

impl Env for PointMassEnv {
    fn env_id(&self) -> &'static str {
        "pointmass"
    }

    fn state_dim(&self) -> usize {
        4
    }

    fn action_spec(&self) -> ActionSpec {
        ActionSpec::Continuous {
            dim: 2,
            low: -1.0,
            high: 1.0,
        }
    }

    fn horizon(&self) -> usize {
        self.horizon
    }

    fn reset(&mut self, seed: u64) -> StateVector {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        // Start region: (-4, -4) +- 0.5 per component, at rest.
        let x = rng.gen_range(-4.5..-3.5);
        let y = rng.gen_range(-4.5..-3.5);
        self.state = [x, y, 0.0, 0.0];
        self.steps = 0;
        self.done = false;
        self.terminated = false;
        self.last_reward = 0.0;
        self.true_return = 0.0;
        self.state.to_vec()
    }

    fn step(&mut self, action: &Action) -> Result<LearnerStep> {
        if self.done {
            return Err(OopsError::EpisodeFinished);
        }
        let a = match action {
            Action::Continuous(v) if v.len() == 2 => [clip(v[0], -1.0, 1.0), clip(v[1], -1.0, 1.0)],
            _ => {
                return Err(OopsError::InvalidInput(
                    "point mass expects a 2D continuous action".into(),
                ))
            }
        };
        for k in 0..2 {
            self.state[2 + k] = clip(self.state[2 + k] + a[k] * self.dt, -MAX_SPEED, MAX_SPEED);
            self.state[k] = clip(
                self.state[k] + self.state[2 + k] * self.dt,
                -ARENA_HALF_WIDTH,
                ARENA_HALF_WIDTH,
            );
        }
        self.steps += 1;
        let dist = self.distance_to_goal();
        self.last_reward = -dist;
        self.true_return += self.last_reward;
        self.terminated = dist < GOAL_RADIUS;
        self.done = self.terminated || self.steps >= self.horizon;
        Ok(LearnerStep {
            next_state: self.state.to_vec(),
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
