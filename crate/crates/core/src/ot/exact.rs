//! Exact transport for the equal-horizon case, plus a brute-force oracle.
//!
//! With equal atom counts and uniform weights on both sides, an optimal
//! vertex of the transportation polytope is a scaled permutation, so the
//! problem reduces to minimum-cost perfect assignment.

use crate::error::{OopsError, Result};
use crate::ot::coupling::{check_transport_inputs, Coupling, SolverTag};
use crate::ot::matrix::Matrix;

const UNIFORM_TOLERANCE: f64 = 1e-12;

fn require_uniform(w: &[f64]) -> bool {
    let u = 1.0 / w.len() as f64;
    w.iter().all(|v| (v - u).abs() <= UNIFORM_TOLERANCE)
}

/// Optimal coupling and value for equal-size uniform instances.
///
/// Returns an unsupported-instance error for unequal sizes or non-uniform
/// weights; callers fall back to the regularized solver with a small lambda.
pub fn exact_w1(cost: &Matrix, a: &[f64], b: &[f64]) -> Result<(Coupling, f64)> {
    check_transport_inputs(cost, a, b)?;
    let n = cost.rows();
    if n != cost.cols() {
        return Err(OopsError::Unsupported(format!(
            "exact solver needs equal atom counts, got {}x{}",
            n,
            cost.cols()
        )));
    }
    if !require_uniform(a) || !require_uniform(b) {
        return Err(OopsError::Unsupported(
            "exact solver needs uniform weights on both sides".into(),
        ));
    }
    let assignment = min_cost_assignment(cost);
    let value = permutation_cost(cost, &assignment);
    let mut plan = Matrix::zeros(n, n);
    for (i, &j) in assignment.iter().enumerate() {
        plan.set(i, j, a[i]);
    }
    Ok((Coupling::new(plan, a.to_vec(), b.to_vec(), SolverTag::Exact), value))
}

/// Mean matched cost of a permutation, summed in row order.
fn permutation_cost(cost: &Matrix, perm: &[usize]) -> f64 {
    let total: f64 = perm
        .iter()
        .enumerate()
        .map(|(i, &j)| cost.get(i, j))
        .sum();
    total / perm.len() as f64
}

/// Minimum over all permutations of the mean matched cost. Only intended as
/// an oracle for small instances.
pub fn brute_force_w1(cost: &Matrix) -> Result<f64> {
    let n = cost.rows();
    if n != cost.cols() {
        return Err(OopsError::Unsupported(format!(
            "brute force needs a square cost, got {}x{}",
            n,
            cost.cols()
        )));
    }
    if n > 8 {
        return Err(OopsError::TooLarge(format!(
            "brute force enumerates n! permutations; n={n} > 8"
        )));
    }
    if !cost.all_finite() {
        return Err(OopsError::InvalidInput("cost matrix has non-finite entries".into()));
    }
    let mut perm: Vec<usize> = (0..n).collect();
    let mut best = permutation_cost(cost, &perm);
    // Heap's algorithm.
    let mut c = vec![0usize; n];
    let mut i = 0;
    while i < n {
        if c[i] < i {
            if i % 2 == 0 {
                perm.swap(0, i);
            } else {
                perm.swap(c[i], i);
            }
            let value = permutation_cost(cost, &perm);
            if value < best {
                best = value;
            }
            c[i] += 1;
            i = 0;
        } else {
            c[i] = 0;
            i += 1;
        }
    }
    Ok(best)
}

/// Minimum-cost perfect assignment via shortest augmenting paths with dual
/// potentials; O(n^3). Returns the column matched to each row.
fn min_cost_assignment(cost: &Matrix) -> Vec<usize> {
    let n = cost.rows();
    // 1-indexed with a virtual column 0.
    let mut u = vec![0.0_f64; n + 1];
    let mut v = vec![0.0_f64; n + 1];
    let mut matched_row = vec![0usize; n + 1];
    let mut parent = vec![0usize; n + 1];

    for i in 1..=n {
        matched_row[0] = i;
        let mut j0 = 0usize;
        let mut min_slack = vec![f64::INFINITY; n + 1];
        let mut used = vec![false; n + 1];
        loop {
            used[j0] = true;
            let i0 = matched_row[j0];
            let mut delta = f64::INFINITY;
            let mut j1 = 0usize;
            for j in 1..=n {
                if used[j] {
                    continue;
                }
                let slack = cost.get(i0 - 1, j - 1) - u[i0] - v[j];
                if slack < min_slack[j] {
                    min_slack[j] = slack;
                    parent[j] = j0;
                }
                if min_slack[j] < delta {
                    delta = min_slack[j];
                    j1 = j;
                }
            }
            for j in 0..=n {
                if used[j] {
                    u[matched_row[j]] += delta;
                    v[j] -= delta;
                } else {
                    min_slack[j] -= delta;
                }
            }
            j0 = j1;
            if matched_row[j0] == 0 {
                break;
            }
        }
        // Flip the augmenting path back to the virtual column.
        loop {
            let j1 = parent[j0];
            matched_row[j0] = matched_row[j1];
            j0 = j1;
            if j0 == 0 {
                break;
            }
        }
    }

    let mut assignment = vec![0usize; n];
    for j in 1..=n {
        assignment[matched_row[j] - 1] = j - 1;
    }
    assignment
}
