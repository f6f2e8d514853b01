//! Imitation from state-only demonstrations via optimal-transport rewards.
//!
//! The crate couples learner and expert trajectories as discrete measures,
//! derives per-timestep rewards from the transport plan, and trains
//! off-policy learners on small deterministic environments using only those
//! proxy rewards. An experiment harness reproduces the calibration, solver
//! comparison, and ablation analyses at desk scale, and the `oops` binary
//! exposes everything as subcommands.

pub mod error;
pub mod ot;
pub mod seeding;
pub mod trajectory;

pub use error::{OopsError, Result};
