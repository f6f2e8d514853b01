//! Episode trajectories and their newline-delimited JSON serialization.

use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{OopsError, Result};

/// A single environment state: a fixed-length vector of finite reals.
pub type StateVector = Vec<f64>;

/// An ordered sequence of states from one episode, optionally with the
/// actions taken between them.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Trajectory {
    pub id: i64,
    pub states: Vec<StateVector>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub actions: Option<Vec<Vec<f64>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub true_return: Option<f64>,
}

impl Trajectory {
    /// Builds a validated trajectory. States must be non-empty, share one
    /// dimension, and contain only finite entries; when actions are present
    /// there must be exactly one per transition.
    pub fn new(
        id: i64,
        states: Vec<StateVector>,
        actions: Option<Vec<Vec<f64>>>,
        true_return: Option<f64>,
    ) -> Result<Self> {
        let t = Trajectory {
            id,
            states,
            actions,
            true_return,
        };
        t.validate()?;
        Ok(t)
    }

    pub fn validate(&self) -> Result<()> {
        if self.states.is_empty() {
            return Err(OopsError::InvalidInput(format!(
                "trajectory {} has no states",
                self.id
            )));
        }
        let dim = self.states[0].len();
        if dim == 0 {
            return Err(OopsError::InvalidInput(format!(
                "trajectory {} has zero-dimensional states",
                self.id
            )));
        }
        for (i, s) in self.states.iter().enumerate() {
            if s.len() != dim {
                return Err(OopsError::Dimension(format!(
                    "trajectory {}: state {} has dim {} (expected {})",
                    self.id,
                    i,
                    s.len(),
                    dim
                )));
            }
            if s.iter().any(|v| !v.is_finite()) {
                return Err(OopsError::InvalidInput(format!(
                    "trajectory {}: state {} has non-finite entries",
                    self.id, i
                )));
            }
        }
        if let Some(actions) = &self.actions {
            if actions.len() + 1 != self.states.len() {
                return Err(OopsError::Dimension(format!(
                    "trajectory {}: {} actions for {} states",
                    self.id,
                    actions.len(),
                    self.states.len()
                )));
            }
            if actions
                .iter()
                .any(|a| a.iter().any(|v| !v.is_finite()))
            {
                return Err(OopsError::InvalidInput(format!(
                    "trajectory {}: non-finite action entries",
                    self.id
                )));
            }
        }
        Ok(())
    }

    /// Number of transitions (states minus one).
    pub fn num_transitions(&self) -> usize {
        self.states.len() - 1
    }

    pub fn state_dim(&self) -> usize {
        self.states[0].len()
    }

    pub fn has_actions(&self) -> bool {
        self.actions.is_some()
    }
}

/// Writes trajectories as one JSON object per line.
pub fn write_jsonl(path: &Path, trajectories: &[Trajectory]) -> Result<()> {
    let file = File::create(path)?;
    let mut w = BufWriter::new(file);
    for t in trajectories {
        serde_json::to_writer(&mut w, t)?;
        w.write_all(b"\n")?;
    }
    w.flush()?;
    Ok(())
}

/// Reads and validates trajectories from a newline-delimited JSON file.
pub fn read_jsonl(path: &Path) -> Result<Vec<Trajectory>> {
    let file = File::open(path)?;
    let reader = BufReader::new(file);
    let mut out = Vec::new();
    for (lineno, line) in reader.lines().enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let t: Trajectory = serde_json::from_str(&line).map_err(|e| {
            OopsError::InvalidInput(format!("{}:{}: {}", path.display(), lineno + 1, e))
        })?;
        t.validate()?;
        out.push(t);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn traj() -> Trajectory {
        Trajectory::new(
            3,
            vec![vec![0.0, 1.0], vec![1.0, 1.5]],
            Some(vec![vec![0.5]]),
            Some(-2.0),
        )
        .unwrap()
    }

    #[test]
    fn rejects_action_count_mismatch() {
        let err = Trajectory::new(
            0,
            vec![vec![0.0], vec![1.0], vec![2.0]],
            Some(vec![vec![1.0]]),
            None,
        );
        assert!(matches!(err, Err(OopsError::Dimension(_))));
    }

    #[test]
    fn rejects_non_finite_state() {
        let err = Trajectory::new(0, vec![vec![f64::NAN]], None, None);
        assert!(matches!(err, Err(OopsError::InvalidInput(_))));
    }

    #[test]
    fn rejects_ragged_states() {
        let err = Trajectory::new(0, vec![vec![0.0], vec![0.0, 1.0]], None, None);
        assert!(matches!(err, Err(OopsError::Dimension(_))));
    }

    #[test]
    fn jsonl_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("trajs.jsonl");
        let ts = vec![traj(), Trajectory::new(4, vec![vec![0.0, 0.0]], None, None).unwrap()];
        write_jsonl(&path, &ts).unwrap();
        let back = read_jsonl(&path).unwrap();
        assert_eq!(ts, back);
    }

    #[test]
    fn jsonl_write_is_deterministic() {
        let dir = tempfile::tempdir().unwrap();
        let a = dir.path().join("a.jsonl");
        let b = dir.path().join("b.jsonl");
        let ts = vec![traj()];
        write_jsonl(&a, &ts).unwrap();
        write_jsonl(&b, &ts).unwrap();
        assert_eq!(std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());
    }
}
