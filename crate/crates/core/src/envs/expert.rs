//! Scripted expert policies and noisy rollouts.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use crate::envs::{Action, Env, EnvInstance, GridWorldEnv, NUM_ACTIONS};
use crate::error::{OopsError, Result};
use crate::seeding::derive_seed;
use crate::trajectory::Trajectory;

const PD_GAIN_P: f64 = 1.0;
const PD_GAIN_D: f64 = 0.8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ExpertKind {
    /// Proportional-derivative controller toward the goal (point mass).
    PdController,
    /// Breadth-first shortest-path policy (gridworld).
    ShortestPath,
}

/// Scripted policy plus the standard deviation of the corruption noise.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ExpertPolicySpec {
    pub kind: ExpertKind,
    #[serde(default)]
    pub noise_std: f64,
}

impl ExpertPolicySpec {
    pub fn for_env(env: &EnvInstance, noise_std: f64) -> Self {
        let kind = match env {
            EnvInstance::PointMass(_) => ExpertKind::PdController,
            EnvInstance::GridWorld(_) => ExpertKind::ShortestPath,
        };
        ExpertPolicySpec { kind, noise_std }
    }

    pub fn validate(&self) -> Result<()> {
        if self.noise_std < 0.0 || !self.noise_std.is_finite() {
            return Err(OopsError::InvalidInput(format!(
                "noise_std must be finite and nonnegative, got {}",
                self.noise_std
            )));
        }
        Ok(())
    }
}

/// BFS distance-to-goal over free cells; usize::MAX marks unreachable cells.
fn bfs_distances(env: &GridWorldEnv) -> Vec<usize> {
    let n = env.size;
    let mut dist = vec![usize::MAX; n * n];
    let mut queue = std::collections::VecDeque::new();
    dist[env.goal.0 * n + env.goal.1] = 0;
    queue.push_back(env.goal);
    while let Some((r, c)) = queue.pop_front() {
        let d = dist[r * n + c];
        for (dr, dc) in crate::envs::ACTION_DELTAS {
            let nr = r as i64 + dr;
            let nc = c as i64 + dc;
            if nr < 0 || nc < 0 || nr as usize >= n || nc as usize >= n {
                continue;
            }
            let cell = (nr as usize, nc as usize);
            if env.walls.contains(&cell) {
                continue;
            }
            let idx = cell.0 * n + cell.1;
            if dist[idx] == usize::MAX {
                dist[idx] = d + 1;
                queue.push_back(cell);
            }
        }
    }
    dist
}

/// First action of a shortest path from `cell`; lowest action index among
/// equally short options.
fn shortest_path_action(env: &GridWorldEnv, dist: &[usize], cell: (usize, usize)) -> usize {
    let n = env.size;
    let mut best_action = 0;
    let mut best_dist = usize::MAX;
    for (a, (dr, dc)) in crate::envs::ACTION_DELTAS.iter().enumerate() {
        let nr = cell.0 as i64 + dr;
        let nc = cell.1 as i64 + dc;
        if nr < 0 || nc < 0 || nr as usize >= n || nc as usize >= n {
            continue;
        }
        let next = (nr as usize, nc as usize);
        if env.walls.contains(&next) {
            continue;
        }
        let d = dist[next.0 * n + next.1];
        if d < best_dist {
            best_dist = d;
            best_action = a;
        }
    }
    best_action
}

/// Rolls out the scripted expert for one episode, recording states, actions,
/// and the true return. Deterministic in (env, spec, seed).
pub fn expert_rollout(
    env: &mut EnvInstance,
    spec: &ExpertPolicySpec,
    seed: u64,
    id: i64,
) -> Result<Trajectory> {
    spec.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(seed, &[0x65]));
    let mut state = env.reset(seed);
    let mut states = vec![state.clone()];
    let mut actions: Vec<Vec<f64>> = Vec::new();

    match (spec.kind, &mut *env) {
        (ExpertKind::PdController, EnvInstance::PointMass(pm)) => {
            let noise = Normal::new(0.0, spec.noise_std.max(f64::MIN_POSITIVE)).map_err(|e| {
                OopsError::InvalidInput(format!("bad noise distribution: {e}"))
            })?;
            loop {
                let goal = pm.goal;
                let mut a = [0.0; 2];
                for k in 0..2 {
                    let eps = if spec.noise_std > 0.0 {
                        noise.sample(&mut rng)
                    } else {
                        0.0
                    };
                    let raw = PD_GAIN_P * (goal[k] - state[k]) - PD_GAIN_D * state[2 + k] + eps;
                    a[k] = raw.max(-1.0).min(1.0);
                }
                let action = Action::Continuous(a.to_vec());
                let step = pm.step(&action)?;
                actions.push(action.to_vec());
                state = step.next_state;
                states.push(state.clone());
                if step.done {
                    break;
                }
            }
        }
        (ExpertKind::ShortestPath, EnvInstance::GridWorld(gw)) => {
            let dist = bfs_distances(gw);
            let flip_prob = spec.noise_std.min(1.0);
            loop {
                let planned = shortest_path_action(gw, &dist, gw.agent_cell());
                let chosen = if flip_prob > 0.0 && rng.gen::<f64>() < flip_prob {
                    rng.gen_range(0..NUM_ACTIONS)
                } else {
                    planned
                };
                let action = Action::Discrete(chosen);
                let step = gw.step(&action)?;
                actions.push(action.to_vec());
                state = step.next_state;
                states.push(state.clone());
                if step.done {
                    break;
                }
            }
        }
        (kind, env) => {
            return Err(OopsError::Config(format!(
                "expert kind {kind:?} does not match env '{}'",
                env.env_id()
            )));
        }
    }

    let true_return = env.episode_true_return();
    Trajectory::new(id, states, Some(actions), Some(true_return))
}
