//! Greedy nearest-available matching in timestep order.

use crate::error::Result;
use crate::ot::coupling::{check_transport_inputs, Coupling, SolverTag};
use crate::ot::matrix::Matrix;

/// Builds a feasible coupling by processing source atoms in index order and
/// pouring each atom's mass into the cheapest target atoms that still have
/// capacity, splitting across targets when one fills up. Equal-cost targets
/// are taken lowest index first.
pub fn greedy_coupling(cost: &Matrix, a: &[f64], b: &[f64]) -> Result<Coupling> {
    check_transport_inputs(cost, a, b)?;
    let n = cost.rows();
    let m = cost.cols();
    let mut remaining = b.to_vec();
    let mut plan = Matrix::zeros(n, m);

    for i in 0..n {
        let mut mass = a[i];
        while mass > 0.0 {
            let mut best: Option<(usize, f64)> = None;
            for j in 0..m {
                if remaining[j] <= 0.0 {
                    continue;
                }
                let c = cost.get(i, j);
                match best {
                    Some((_, bc)) if bc <= c => {}
                    _ => best = Some((j, c)),
                }
            }
            let Some((j, _)) = best else {
                // Capacity exhausted by rounding residue; drop the remainder.
                break;
            };
            let amount = mass.min(remaining[j]);
            plan.set(i, j, plan.get(i, j) + amount);
            remaining[j] -= amount;
            mass -= amount;
        }
    }

    Ok(Coupling::new(plan, a.to_vec(), b.to_vec(), SolverTag::Greedy))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ot::coupling::transport_cost;

    fn uniform(n: usize) -> Vec<f64> {
        vec![1.0 / n as f64; n]
    }

    #[test]
    fn identical_atoms_match_themselves() {
        let cost = Matrix::from_rows(&[vec![0.0, 2.0], vec![2.0, 0.0]]);
        let c = greedy_coupling(&cost, &uniform(2), &uniform(2)).unwrap();
        assert_eq!(transport_cost(&cost, &c).unwrap(), 0.0);
    }

    #[test]
    fn myopic_matching_overpays() {
        // Source atoms {1, 2}, target atoms {0, 1.5}: greedy sends 1 -> 1.5
        // and is left matching 2 -> 0, while the optimum crosses.
        let cost = Matrix::from_rows(&[vec![1.0, 0.5], vec![2.0, 0.5]]);
        let c = greedy_coupling(&cost, &uniform(2), &uniform(2)).unwrap();
        let value = transport_cost(&cost, &c).unwrap();
        assert!((value - 1.25).abs() < 1e-15, "value {value}");
        assert_eq!(c.matrix.get(0, 1), 0.5);
        assert_eq!(c.matrix.get(1, 0), 0.5);
    }

    #[test]
    fn mass_conserved_by_construction() {
        let cost = Matrix::from_rows(&[
            vec![0.3, 1.0, 0.2],
            vec![0.7, 0.4, 2.0],
            vec![0.1, 0.9, 0.6],
        ]);
        let a = uniform(3);
        let b = uniform(3);
        let c = greedy_coupling(&cost, &a, &b).unwrap();
        for (i, ai) in a.iter().enumerate() {
            let row: f64 = c.matrix.row(i).iter().sum();
            assert!((row - ai).abs() <= 1e-12);
        }
        assert!(c.feasibility_residual <= 1e-12);
    }

    #[test]
    fn splits_across_targets_with_uneven_weights() {
        let cost = Matrix::from_rows(&[vec![0.0, 1.0], vec![1.0, 0.0]]);
        let a = vec![0.75, 0.25];
        let b = vec![0.5, 0.5];
        let c = greedy_coupling(&cost, &a, &b).unwrap();
        // First source fills target 0 (cap 0.5) then spills into target 1.
        assert_eq!(c.matrix.get(0, 0), 0.5);
        assert_eq!(c.matrix.get(0, 1), 0.25);
        assert_eq!(c.matrix.get(1, 1), 0.25);
        assert!(c.feasibility_residual <= 1e-12);
    }

    #[test]
    fn ties_take_lowest_index() {
        let cost = Matrix::from_rows(&[vec![1.0, 1.0], vec![1.0, 1.0]]);
        let c = greedy_coupling(&cost, &uniform(2), &uniform(2)).unwrap();
        assert_eq!(c.matrix.get(0, 0), 0.5);
        assert_eq!(c.matrix.get(0, 1), 0.0);
    }
}
