//! Transport plans and their cost.

use serde::{Deserialize, Serialize};

use crate::error::{OopsError, Result};
use crate::ot::matrix::Matrix;

/// Which solver produced a coupling.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum SolverTag {
    #[serde(rename = "sinkhorn")]
    Sinkhorn,
    #[serde(rename = "greedy")]
    Greedy,
    #[serde(rename = "exact")]
    Exact,
    #[serde(rename = "oracle")]
    Oracle,
}

/// A nonnegative transport plan with prescribed marginals.
#[derive(Debug, Clone)]
pub struct Coupling {
    pub matrix: Matrix,
    pub row_marginal: Vec<f64>,
    pub col_marginal: Vec<f64>,
    pub solver: SolverTag,
    /// Max absolute marginal violation of `matrix`, measured after any
    /// post-processing.
    pub feasibility_residual: f64,
}

impl Coupling {
    pub fn new(
        matrix: Matrix,
        row_marginal: Vec<f64>,
        col_marginal: Vec<f64>,
        solver: SolverTag,
    ) -> Self {
        let mut c = Coupling {
            matrix,
            row_marginal,
            col_marginal,
            solver,
            feasibility_residual: 0.0,
        };
        c.feasibility_residual = c.marginal_violation();
        c
    }

    /// Recomputes the max absolute row/column marginal violation.
    pub fn marginal_violation(&self) -> f64 {
        let rows = self.matrix.row_sums();
        let cols = self.matrix.col_sums();
        let mut worst: f64 = 0.0;
        for (r, a) in rows.iter().zip(&self.row_marginal) {
            worst = worst.max((r - a).abs());
        }
        for (c, b) in cols.iter().zip(&self.col_marginal) {
            worst = worst.max((c - b).abs());
        }
        worst
    }
}

/// Validates that `a` and `b` are probability vectors matching the cost shape.
pub fn check_transport_inputs(cost: &Matrix, a: &[f64], b: &[f64]) -> Result<()> {
    if !cost.all_finite() {
        return Err(OopsError::InvalidInput("cost matrix has non-finite entries".into()));
    }
    if cost.iter().any(|v| v < 0.0) {
        return Err(OopsError::InvalidInput("cost matrix has negative entries".into()));
    }
    if a.len() != cost.rows() || b.len() != cost.cols() {
        return Err(OopsError::Dimension(format!(
            "weights ({}, {}) vs cost {}x{}",
            a.len(),
            b.len(),
            cost.rows(),
            cost.cols()
        )));
    }
    for w in [a, b] {
        if w.iter().any(|v| *v < 0.0 || !v.is_finite()) {
            return Err(OopsError::InvalidInput("weights must be finite and nonnegative".into()));
        }
        let sum: f64 = w.iter().sum();
        if (sum - 1.0).abs() > 1e-12 {
            return Err(OopsError::InvalidInput(format!(
                "weights sum to {sum}, expected 1"
            )));
        }
    }
    Ok(())
}

/// Total transported cost: the sum over all cells of cost times plan mass.
pub fn transport_cost(cost: &Matrix, coupling: &Coupling) -> Result<f64> {
    let p = &coupling.matrix;
    if cost.rows() != p.rows() || cost.cols() != p.cols() {
        return Err(OopsError::Dimension(format!(
            "cost {}x{} vs coupling {}x{}",
            cost.rows(),
            cost.cols(),
            p.rows(),
            p.cols()
        )));
    }
    let mut total = 0.0;
    for i in 0..cost.rows() {
        for (c, m) in cost.row(i).iter().zip(p.row(i)) {
            total += c * m;
        }
    }
    Ok(total)
}
