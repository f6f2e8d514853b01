//! Per-timestep proxy rewards derived from transport couplings.
//!
//! An episode's rewards are the negated, mass-weighted row costs of the
//! coupling between the learner trajectory and an expert trajectory, so the
//! reward sum over the episode equals the negative transported cost.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{OopsError, Result};
use crate::ot::{
    atomize, cost_matrix, solve_coupling, transport_cost, Atomization, Coupling,
    DistanceMetricSpec, SinkhornConfig, SolverChoice,
};
use crate::trajectory::{read_jsonl, Trajectory};

/// State-only demonstration trajectories plus source metadata. Actions, when
/// present, are only used for state-action-space evaluation.
#[derive(Debug, Clone)]
pub struct ExpertDataset {
    pub trajectories: Vec<Trajectory>,
    pub env_id: String,
    pub expert_tag: String,
}

impl ExpertDataset {
    pub fn new(trajectories: Vec<Trajectory>, env_id: &str, expert_tag: &str) -> Result<Self> {
        if trajectories.is_empty() {
            return Err(OopsError::EmptyDataset);
        }
        let dim = trajectories[0].state_dim();
        for t in &trajectories {
            t.validate()?;
            if t.state_dim() != dim {
                return Err(OopsError::Dimension(format!(
                    "trajectory {} has state dim {} (dataset dim {})",
                    t.id,
                    t.state_dim(),
                    dim
                )));
            }
        }
        Ok(ExpertDataset {
            trajectories,
            env_id: env_id.to_string(),
            expert_tag: expert_tag.to_string(),
        })
    }

    pub fn from_jsonl(path: &Path, env_id: &str) -> Result<Self> {
        let trajectories = read_jsonl(path)?;
        Self::new(trajectories, env_id, "file")
    }

    /// Keeps the first `k` trajectories in file order.
    pub fn take_first(mut self, k: usize) -> Result<Self> {
        if k == 0 || k > self.trajectories.len() {
            return Err(OopsError::InvalidInput(format!(
                "cannot take {} of {} expert trajectories",
                k,
                self.trajectories.len()
            )));
        }
        self.trajectories.truncate(k);
        Ok(self)
    }

    pub fn len(&self) -> usize {
        self.trajectories.len()
    }

    pub fn is_empty(&self) -> bool {
        self.trajectories.is_empty()
    }

    pub fn state_dim(&self) -> usize {
        self.trajectories[0].state_dim()
    }

    /// Mean recorded true return, if every trajectory carries one.
    pub fn mean_true_return(&self) -> Option<f64> {
        let mut total = 0.0;
        for t in &self.trajectories {
            total += t.true_return?;
        }
        Some(total / self.trajectories.len() as f64)
    }
}

/// How to reduce a multi-trajectory expert dataset to one reward table.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ExpertSelection {
    /// Use the expert trajectory with the smallest transport distance.
    Closest,
    /// Average the reward tables computed against every expert trajectory.
    Average,
}

/// Solver family used for reward couplings. The regularized solver is the
/// default; the alternatives exist for the solver ablation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SolverKind {
    Sinkhorn,
    Greedy,
    Exact,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RewardConfig {
    #[serde(default = "default_mode")]
    pub mode: Atomization,
    #[serde(default)]
    pub metric: DistanceMetricSpec,
    #[serde(default = "default_solver")]
    pub solver: SolverKind,
    #[serde(default)]
    pub sinkhorn: SinkhornConfig,
    #[serde(default = "default_selection")]
    pub expert_selection: ExpertSelection,
    #[serde(default = "default_reward_scale")]
    pub reward_scale: f64,
}

fn default_mode() -> Atomization {
    Atomization::StateTransition
}

fn default_solver() -> SolverKind {
    SolverKind::Sinkhorn
}

fn default_selection() -> ExpertSelection {
    ExpertSelection::Closest
}

fn default_reward_scale() -> f64 {
    1.0
}

impl Default for RewardConfig {
    fn default() -> Self {
        RewardConfig {
            mode: default_mode(),
            metric: DistanceMetricSpec::default(),
            solver: default_solver(),
            sinkhorn: SinkhornConfig::default(),
            expert_selection: default_selection(),
            reward_scale: default_reward_scale(),
        }
    }
}

impl RewardConfig {
    pub fn validate(&self) -> Result<()> {
        self.metric.validate()?;
        self.sinkhorn.validate()?;
        if !(self.reward_scale > 0.0) || !self.reward_scale.is_finite() {
            return Err(OopsError::InvalidInput(format!(
                "reward_scale must be positive, got {}",
                self.reward_scale
            )));
        }
        Ok(())
    }

    pub fn solver_choice(&self) -> SolverChoice {
        match self.solver {
            SolverKind::Sinkhorn => SolverChoice::Sinkhorn(self.sinkhorn),
            SolverKind::Greedy => SolverChoice::Greedy,
            SolverKind::Exact => SolverChoice::Exact,
        }
    }
}

/// Per-timestep proxy rewards for one learner episode.
#[derive(Debug, Clone)]
pub struct RewardTable {
    /// One reward per learner atom; all nonpositive.
    pub rewards: Vec<f64>,
    /// Id of the matched expert trajectory, or -1 when averaging.
    pub matched_expert_id: i64,
    /// Scaled transported cost; the negative of the reward sum.
    pub distance_value: f64,
    /// Feasibility residual of the coupling(s) behind the rewards.
    pub coupling_residual: f64,
}

impl RewardTable {
    /// Reward sum; equals -distance_value up to accumulation order.
    pub fn proxy_return(&self) -> f64 {
        self.rewards.iter().sum()
    }

    /// Max violation of the sum identity, for auditing.
    pub fn identity_gap(&self) -> f64 {
        (self.proxy_return() + self.distance_value).abs()
    }

    /// Rewards re-keyed to `n_transitions` buffer slots. Transition-keyed
    /// occupancies already line up; the state occupancy has one extra atom,
    /// whose reward is folded into the final transition so the episode sum
    /// is preserved.
    pub fn per_transition_rewards(&self, n_transitions: usize) -> Result<Vec<f64>> {
        if self.rewards.len() == n_transitions {
            return Ok(self.rewards.clone());
        }
        if self.rewards.len() == n_transitions + 1 && n_transitions > 0 {
            let mut out = self.rewards[..n_transitions].to_vec();
            out[n_transitions - 1] += self.rewards[n_transitions];
            return Ok(out);
        }
        Err(OopsError::Dimension(format!(
            "{} rewards cannot map onto {} transitions",
            self.rewards.len(),
            n_transitions
        )))
    }
}

struct SingleExpertRewards {
    rewards: Vec<f64>,
    distance_value: f64,
    residual: f64,
    coupling: Coupling,
    /// Distance in the value convention (order-p root applied).
    reported_distance: f64,
}

fn rewards_against(
    tau_pi: &Trajectory,
    expert: &Trajectory,
    cfg: &RewardConfig,
) -> Result<SingleExpertRewards> {
    let mu = atomize(tau_pi, cfg.mode)?;
    let nu = atomize(expert, cfg.mode)?;
    let cost = cost_matrix(&mu, &nu, &cfg.metric)?;
    let coupling = solve_coupling(&cost, &mu.weights, &nu.weights, &cfg.solver_choice())?;
    let rewards: Vec<f64> = (0..mu.len())
        .map(|t| {
            let row_cost: f64 = cost
                .row(t)
                .iter()
                .zip(coupling.matrix.row(t))
                .map(|(c, p)| c * p)
                .sum();
            -cfg.reward_scale * row_cost
        })
        .collect();
    let objective = transport_cost(&cost, &coupling)?;
    let reported_distance = if cfg.metric.order == 2 {
        objective.sqrt()
    } else {
        objective
    };
    Ok(SingleExpertRewards {
        rewards,
        distance_value: cfg.reward_scale * objective,
        residual: coupling.feasibility_residual,
        coupling,
        reported_distance,
    })
}

/// Computes the proxy reward table for one learner episode against the
/// expert dataset.
pub fn episode_rewards(
    tau_pi: &Trajectory,
    experts: &ExpertDataset,
    cfg: &RewardConfig,
) -> Result<RewardTable> {
    cfg.validate()?;
    if experts.is_empty() {
        return Err(OopsError::EmptyDataset);
    }
    match cfg.expert_selection {
        ExpertSelection::Closest => {
            let mut best: Option<(usize, SingleExpertRewards)> = None;
            for (idx, expert) in experts.trajectories.iter().enumerate() {
                let candidate = rewards_against(tau_pi, expert, cfg)?;
                let better = match &best {
                    Some((_, cur)) => candidate.distance_value < cur.distance_value,
                    None => true,
                };
                if better {
                    best = Some((idx, candidate));
                }
            }
            let (idx, chosen) = best.expect("dataset checked non-empty");
            Ok(RewardTable {
                rewards: chosen.rewards,
                matched_expert_id: experts.trajectories[idx].id,
                distance_value: chosen.distance_value,
                coupling_residual: chosen.residual,
            })
        }
        ExpertSelection::Average => {
            let mut tables = Vec::with_capacity(experts.len());
            for expert in &experts.trajectories {
                tables.push(rewards_against(tau_pi, expert, cfg)?);
            }
            let n = tables.len() as f64;
            let len = tables[0].rewards.len();
            if tables.iter().any(|t| t.rewards.len() != len) {
                return Err(OopsError::Dimension(
                    "expert trajectories produce differing reward lengths".into(),
                ));
            }
            let mut rewards = vec![0.0; len];
            for t in &tables {
                for (acc, r) in rewards.iter_mut().zip(&t.rewards) {
                    *acc += r;
                }
            }
            for r in &mut rewards {
                *r /= n;
            }
            let distance_value = tables.iter().map(|t| t.distance_value).sum::<f64>() / n;
            let residual = tables.iter().map(|t| t.residual).fold(0.0, f64::max);
            Ok(RewardTable {
                rewards,
                matched_expert_id: -1,
                distance_value,
                coupling_residual: residual,
            })
        }
    }
}

/// Index and distance of the expert trajectory closest to the episode under
/// the configured solver; ties go to the lowest index.
pub fn select_expert(
    tau_pi: &Trajectory,
    experts: &ExpertDataset,
    cfg: &RewardConfig,
) -> Result<(usize, f64)> {
    cfg.validate()?;
    if experts.is_empty() {
        return Err(OopsError::EmptyDataset);
    }
    let mut best: Option<(usize, f64)> = None;
    for (idx, expert) in experts.trajectories.iter().enumerate() {
        let candidate = rewards_against(tau_pi, expert, cfg)?;
        let better = match best {
            Some((_, d)) => candidate.reported_distance < d,
            None => true,
        };
        if better {
            best = Some((idx, candidate.reported_distance));
        }
    }
    Ok(best.expect("dataset checked non-empty"))
}

/// Outcome of evaluating a stale coupling against a fresh trajectory.
#[derive(Debug, Clone, Copy)]
pub struct StaleBoundReport {
    /// Optimal transported cost for the fresh trajectory.
    pub lhs: f64,
    /// Cost of the fresh trajectory's cost matrix under the stale coupling.
    pub rhs: f64,
    pub holds: bool,
}

/// Checks that the optimal transport cost of a new trajectory is bounded
/// above by the cost under any previously computed feasible coupling of the
/// same shape.
pub fn stale_bound_check(
    tau_new: &Trajectory,
    stale_coupling: &Coupling,
    expert: &Trajectory,
    cfg: &RewardConfig,
) -> Result<StaleBoundReport> {
    cfg.validate()?;
    let mu = atomize(tau_new, cfg.mode)?;
    let nu = atomize(expert, cfg.mode)?;
    let cost = cost_matrix(&mu, &nu, &cfg.metric)?;
    if stale_coupling.matrix.rows() != cost.rows() || stale_coupling.matrix.cols() != cost.cols() {
        return Err(OopsError::Dimension(format!(
            "stale coupling {}x{} vs cost {}x{}",
            stale_coupling.matrix.rows(),
            stale_coupling.matrix.cols(),
            cost.rows(),
            cost.cols()
        )));
    }
    let rhs = transport_cost(&cost, stale_coupling)?;
    let lhs = match crate::ot::exact_w1(&cost, &mu.weights, &nu.weights) {
        Ok((_, value)) => value,
        Err(OopsError::Unsupported(_)) => {
            let coupling =
                crate::ot::sinkhorn(&cost, &mu.weights, &nu.weights, &SinkhornConfig::tight())?;
            transport_cost(&cost, &coupling)?
        }
        Err(e) => return Err(e),
    };
    Ok(StaleBoundReport {
        lhs,
        rhs,
        holds: lhs <= rhs + 1e-9,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn chain(id: i64, states: &[f64]) -> Trajectory {
        Trajectory::new(id, states.iter().map(|&s| vec![s]).collect(), None, None).unwrap()
    }

    fn exact_cfg() -> RewardConfig {
        RewardConfig {
            solver: SolverKind::Exact,
            metric: DistanceMetricSpec::w1_euclidean(),
            ..RewardConfig::default()
        }
    }

    fn dataset(trajs: Vec<Trajectory>) -> ExpertDataset {
        ExpertDataset::new(trajs, "test", "scripted").unwrap()
    }

    #[test]
    fn identical_trajectories_zero_rewards() {
        let t = chain(0, &[0.0, 1.0, 2.0]);
        let experts = dataset(vec![t.clone()]);
        let table = episode_rewards(&t, &experts, &exact_cfg()).unwrap();
        assert!(table.rewards.iter().all(|r| *r == 0.0));
        assert_eq!(table.distance_value, 0.0);
    }

    #[test]
    fn transition_space_reward_example() {
        let learner = chain(10, &[0.0, 1.0, 2.0]);
        let experts = dataset(vec![chain(0, &[0.0, 1.0, 3.0])]);
        let table = episode_rewards(&learner, &experts, &exact_cfg()).unwrap();
        assert_eq!(table.rewards.len(), 2);
        assert!((table.rewards[0] - 0.0).abs() <= 1e-15);
        assert!((table.rewards[1] + 0.5).abs() <= 1e-15);
        assert!((table.distance_value - 0.5).abs() <= 1e-15);
        assert_eq!(table.matched_expert_id, 0);
    }

    #[test]
    fn reward_sum_matches_distance() {
        let learner = chain(10, &[0.0, 0.4, 1.1, 2.4]);
        let experts = dataset(vec![chain(0, &[0.0, 1.0, 2.0, 3.0])]);
        for solver in [SolverKind::Sinkhorn, SolverKind::Greedy, SolverKind::Exact] {
            let cfg = RewardConfig {
                solver,
                ..RewardConfig::default()
            };
            let table = episode_rewards(&learner, &experts, &cfg).unwrap();
            assert!(table.identity_gap() <= 1e-9, "solver {solver:?}");
            assert!(table.rewards.iter().all(|r| *r <= 0.0));
        }
    }

    #[test]
    fn closest_selection_takes_argmin_and_ties_go_low() {
        let learner = chain(10, &[0.0, 1.0]);
        let near = chain(0, &[0.0, 1.5]);
        let far = chain(1, &[4.0, 6.0]);
        let experts = dataset(vec![far.clone(), near.clone()]);
        let (idx, _) = select_expert(&learner, &experts, &exact_cfg()).unwrap();
        assert_eq!(idx, 1);

        let tied = dataset(vec![near.clone(), near.clone()]);
        let (idx, d) = select_expert(&learner, &tied, &exact_cfg()).unwrap();
        assert_eq!(idx, 0);
        assert!(d > 0.0);
    }

    #[test]
    fn single_expert_dataset_selects_index_zero() {
        let learner = chain(10, &[0.0, 1.0]);
        let experts = dataset(vec![chain(5, &[0.5, 1.5])]);
        let (idx, _) = select_expert(&learner, &experts, &exact_cfg()).unwrap();
        assert_eq!(idx, 0);
    }

    #[test]
    fn single_expert_closest_equals_average() {
        let learner = chain(10, &[0.0, 0.5, 1.7]);
        let experts = dataset(vec![chain(0, &[0.0, 1.0, 2.0])]);
        let closest = episode_rewards(&learner, &experts, &exact_cfg()).unwrap();
        let avg_cfg = RewardConfig {
            expert_selection: ExpertSelection::Average,
            ..exact_cfg()
        };
        let averaged = episode_rewards(&learner, &experts, &avg_cfg).unwrap();
        assert_eq!(closest.rewards, averaged.rewards);
        assert_eq!(closest.distance_value, averaged.distance_value);
    }

    #[test]
    fn reward_scale_is_equivariant() {
        let learner = chain(10, &[0.0, 0.5, 1.7]);
        let experts = dataset(vec![chain(0, &[0.0, 1.0, 2.0]), chain(1, &[5.0, 6.0, 7.0])]);
        let base = episode_rewards(&learner, &experts, &exact_cfg()).unwrap();
        let scaled_cfg = RewardConfig {
            reward_scale: 3.0,
            ..exact_cfg()
        };
        let scaled = episode_rewards(&learner, &experts, &scaled_cfg).unwrap();
        assert_eq!(base.matched_expert_id, scaled.matched_expert_id);
        for (b, s) in base.rewards.iter().zip(&scaled.rewards) {
            assert!((s - 3.0 * b).abs() <= 1e-12);
        }
    }

    #[test]
    fn empty_dataset_rejected() {
        assert!(matches!(
            ExpertDataset::new(vec![], "test", "scripted"),
            Err(OopsError::EmptyDataset)
        ));
    }

    #[test]
    fn per_transition_rewards_fold_state_mode() {
        let table = RewardTable {
            rewards: vec![-0.1, -0.2, -0.3],
            matched_expert_id: 0,
            distance_value: 0.6,
            coupling_residual: 0.0,
        };
        // Transition-keyed lengths pass through.
        assert_eq!(table.per_transition_rewards(3).unwrap(), table.rewards);
        // One extra atom folds into the final slot.
        let folded = table.per_transition_rewards(2).unwrap();
        assert_eq!(folded, vec![-0.1, -0.5]);
        assert!(table.per_transition_rewards(5).is_err());
    }

    #[test]
    fn stale_coupling_upper_bounds_fresh_optimum() {
        let expert = chain(0, &[0.0, 1.0, 2.0, 3.0]);
        let old = chain(10, &[0.0, 0.6, 1.9, 3.1]);
        let cfg = exact_cfg();
        let mu = atomize(&old, cfg.mode).unwrap();
        let nu = atomize(&expert, cfg.mode).unwrap();
        let cost = cost_matrix(&mu, &nu, &cfg.metric).unwrap();
        let stale = solve_coupling(&cost, &mu.weights, &nu.weights, &cfg.solver_choice()).unwrap();

        // The trajectory the coupling was optimized for.
        let report = stale_bound_check(&old, &stale, &expert, &cfg).unwrap();
        assert!(report.holds);
        assert!((report.lhs - report.rhs).abs() <= 1e-12);

        // A perturbed trajectory with the same shape.
        let new = chain(11, &[0.2, 0.9, 1.5, 3.4]);
        let report = stale_bound_check(&new, &stale, &expert, &cfg).unwrap();
        assert!(report.holds, "lhs {} rhs {}", report.lhs, report.rhs);

        // Identical trajectories and an identity coupling: both sides zero.
        let report = stale_bound_check(&expert, &stale, &expert, &cfg).unwrap();
        assert!(report.lhs.abs() <= 1e-12);
    }

    #[test]
    fn stale_check_rejects_shape_mismatch() {
        let expert = chain(0, &[0.0, 1.0, 2.0, 3.0]);
        let cfg = exact_cfg();
        let mu = atomize(&expert, cfg.mode).unwrap();
        let nu = atomize(&expert, cfg.mode).unwrap();
        let cost = cost_matrix(&mu, &nu, &cfg.metric).unwrap();
        let stale = solve_coupling(&cost, &mu.weights, &nu.weights, &cfg.solver_choice()).unwrap();
        let short = chain(12, &[0.0, 1.0]);
        assert!(matches!(
            stale_bound_check(&short, &stale, &expert, &cfg),
            Err(OopsError::Dimension(_))
        ));
    }
}
