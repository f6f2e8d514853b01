//! Discrete optimal transport between trajectory measures.
//!
//! All operations here are pure functions of their inputs; values are
//! immutable once built and safe to share across threads.

pub mod coupling;
pub mod exact;
pub mod greedy;
pub mod matrix;
pub mod measure;
pub mod metric;
pub mod sinkhorn;

pub use coupling::{transport_cost, Coupling, SolverTag};
pub use exact::{brute_force_w1, exact_w1};
pub use greedy::greedy_coupling;
pub use matrix::Matrix;
pub use measure::{atomize, Atomization, DiscreteMeasure};
pub use metric::{cost_matrix, pairwise_distance, BaseMetric, CostMatrix, DistanceMetricSpec};
pub use sinkhorn::{sinkhorn, SinkhornConfig};

use serde::{Deserialize, Serialize};

use crate::error::{OopsError, Result};
use crate::trajectory::Trajectory;

/// Which solver computes the coupling.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum SolverChoice {
    Sinkhorn(SinkhornConfig),
    Greedy,
    /// Assignment-based exact transport. Unequal-size instances silently
    /// fall back to tight Sinkhorn, which is the only supported route there.
    Exact,
}

impl SolverChoice {
    pub fn tag(&self) -> SolverTag {
        match self {
            SolverChoice::Sinkhorn(_) => SolverTag::Sinkhorn,
            SolverChoice::Greedy => SolverTag::Greedy,
            SolverChoice::Exact => SolverTag::Exact,
        }
    }
}

/// Solves for a coupling between two measures given a prebuilt cost matrix.
pub fn solve_coupling(
    cost: &CostMatrix,
    a: &[f64],
    b: &[f64],
    solver: &SolverChoice,
) -> Result<Coupling> {
    match solver {
        SolverChoice::Sinkhorn(cfg) => sinkhorn(cost, a, b, cfg),
        SolverChoice::Greedy => greedy_coupling(cost, a, b),
        SolverChoice::Exact => match exact_w1(cost, a, b) {
            Ok((coupling, _)) => Ok(coupling),
            Err(OopsError::Unsupported(_)) => sinkhorn(cost, a, b, &SinkhornConfig::tight()),
            Err(e) => Err(e),
        },
    }
}

/// Distance between two trajectories: atomize both sides, build the cost
/// matrix, solve for a coupling, and report the transported cost together
/// with the plan. For order 2 the value is the square root of the cost
/// objective.
pub fn trajectory_distance(
    tau_pi: &Trajectory,
    tau_e: &Trajectory,
    mode: Atomization,
    spec: &DistanceMetricSpec,
    solver: &SolverChoice,
) -> Result<(f64, Coupling)> {
    let mu = atomize(tau_pi, mode)?;
    let nu = atomize(tau_e, mode)?;
    let cost = cost_matrix(&mu, &nu, spec)?;
    let coupling = solve_coupling(&cost, &mu.weights, &nu.weights, solver)?;
    let objective = transport_cost(&cost, &coupling)?;
    let value = if spec.order == 2 {
        objective.sqrt()
    } else {
        objective
    };
    Ok((value, coupling))
}
