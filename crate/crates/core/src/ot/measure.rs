//! Discrete measures over trajectory atoms.

use serde::{Deserialize, Serialize};

use crate::error::{OopsError, Result};
use crate::trajectory::Trajectory;

/// Which occupancy space a trajectory is flattened into.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Atomization {
    /// Individual states s; a trajectory of T transitions yields T+1 atoms.
    #[serde(rename = "state")]
    State,
    /// State transitions (s, s'); yields T atoms of twice the state dimension.
    #[serde(rename = "state-transition")]
    StateTransition,
    /// State-action pairs (s, a); requires recorded actions.
    #[serde(rename = "state-action")]
    StateAction,
}

impl std::fmt::Display for Atomization {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            Atomization::State => "state",
            Atomization::StateTransition => "state-transition",
            Atomization::StateAction => "state-action",
        };
        f.write_str(s)
    }
}

/// A weighted finite collection of atoms; weights sum to one.
#[derive(Debug, Clone, PartialEq)]
pub struct DiscreteMeasure {
    pub atoms: Vec<Vec<f64>>,
    pub weights: Vec<f64>,
}

impl DiscreteMeasure {
    /// Uniform weights 1/n over the given atoms.
    pub fn uniform(atoms: Vec<Vec<f64>>) -> Result<Self> {
        if atoms.is_empty() {
            return Err(OopsError::InvalidInput("measure needs at least one atom".into()));
        }
        let w = 1.0 / atoms.len() as f64;
        let weights = vec![w; atoms.len()];
        let m = DiscreteMeasure { atoms, weights };
        m.validate()?;
        Ok(m)
    }

    pub fn validate(&self) -> Result<()> {
        if self.atoms.len() != self.weights.len() {
            return Err(OopsError::Dimension(format!(
                "{} atoms vs {} weights",
                self.atoms.len(),
                self.weights.len()
            )));
        }
        if self.atoms.is_empty() {
            return Err(OopsError::InvalidInput("empty measure".into()));
        }
        let dim = self.atoms[0].len();
        for a in &self.atoms {
            if a.len() != dim {
                return Err(OopsError::Dimension("ragged atoms".into()));
            }
            if a.iter().any(|v| !v.is_finite()) {
                return Err(OopsError::InvalidInput("non-finite atom".into()));
            }
        }
        if self.weights.iter().any(|w| *w < 0.0 || !w.is_finite()) {
            return Err(OopsError::InvalidInput("negative or non-finite weight".into()));
        }
        let sum: f64 = self.weights.iter().sum();
        if (sum - 1.0).abs() > 1e-12 {
            return Err(OopsError::InvalidInput(format!(
                "weights sum to {sum}, expected 1"
            )));
        }
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.atoms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.atoms.is_empty()
    }

    pub fn atom_dim(&self) -> usize {
        self.atoms[0].len()
    }
}

/// Flattens a trajectory into a uniformly weighted measure in the chosen
/// occupancy space.
pub fn atomize(trajectory: &Trajectory, mode: Atomization) -> Result<DiscreteMeasure> {
    trajectory.validate()?;
    let atoms: Vec<Vec<f64>> = match mode {
        Atomization::State => trajectory.states.clone(),
        Atomization::StateTransition => {
            if trajectory.states.len() < 2 {
                return Err(OopsError::InvalidInput(format!(
                    "trajectory {} has no transitions",
                    trajectory.id
                )));
            }
            trajectory
                .states
                .windows(2)
                .map(|w| {
                    let mut atom = w[0].clone();
                    atom.extend_from_slice(&w[1]);
                    atom
                })
                .collect()
        }
        Atomization::StateAction => {
            let actions = trajectory.actions.as_ref().ok_or_else(|| {
                OopsError::MissingActions(format!(
                    "trajectory {} lacks actions for state-action atoms",
                    trajectory.id
                ))
            })?;
            trajectory
                .states
                .iter()
                .zip(actions.iter())
                .map(|(s, a)| {
                    let mut atom = s.clone();
                    atom.extend_from_slice(a);
                    atom
                })
                .collect()
        }
    };
    DiscreteMeasure::uniform(atoms)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn chain(states: &[f64]) -> Trajectory {
        Trajectory::new(0, states.iter().map(|&s| vec![s]).collect(), None, None).unwrap()
    }

    #[test]
    fn transition_atoms() {
        let m = atomize(&chain(&[0.0, 1.0, 2.0]), Atomization::StateTransition).unwrap();
        assert_eq!(m.atoms, vec![vec![0.0, 1.0], vec![1.0, 2.0]]);
        assert_eq!(m.weights, vec![0.5, 0.5]);
    }

    #[test]
    fn state_atoms_uniform() {
        let m = atomize(&chain(&[0.0, 1.0, 2.0]), Atomization::State).unwrap();
        assert_eq!(m.len(), 3);
        for w in &m.weights {
            assert!((w - 1.0 / 3.0).abs() < 1e-15);
        }
    }

    #[test]
    fn single_transition_normalizes() {
        let m = atomize(&chain(&[0.0, 1.0]), Atomization::StateTransition).unwrap();
        assert_eq!(m.atoms, vec![vec![0.0, 1.0]]);
        assert_eq!(m.weights, vec![1.0]);
    }

    #[test]
    fn state_action_requires_actions() {
        let err = atomize(&chain(&[0.0, 1.0]), Atomization::StateAction);
        assert!(matches!(err, Err(OopsError::MissingActions(_))));
    }

    #[test]
    fn state_action_atoms() {
        let t = Trajectory::new(
            0,
            vec![vec![0.0], vec![1.0]],
            Some(vec![vec![0.25]]),
            None,
        )
        .unwrap();
        let m = atomize(&t, Atomization::StateAction).unwrap();
        assert_eq!(m.atoms, vec![vec![0.0, 0.25]]);
    }
}
