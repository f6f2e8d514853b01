//! Ground metrics and cost matrices.

use serde::{Deserialize, Serialize};

use crate::error::{OopsError, Result};
use crate::ot::matrix::Matrix;
use crate::ot::measure::DiscreteMeasure;

/// Base point-to-point distance.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum BaseMetric {
    #[serde(rename = "euclidean")]
    Euclidean,
    #[serde(rename = "sqrt-euclidean")]
    SqrtEuclidean,
    #[serde(rename = "cosine")]
    Cosine,
}

/// Ground metric plus transport order p.
///
/// Supported combinations: any base with p=1, and euclidean with p=2.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DistanceMetricSpec {
    pub base: BaseMetric,
    pub order: u8,
}

impl DistanceMetricSpec {
    pub fn new(base: BaseMetric, order: u8) -> Result<Self> {
        let spec = DistanceMetricSpec { base, order };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        if self.order != 1 && self.order != 2 {
            return Err(OopsError::InvalidInput(format!(
                "transport order must be 1 or 2, got {}",
                self.order
            )));
        }
        if self.order == 2 && self.base != BaseMetric::Euclidean {
            return Err(OopsError::InvalidInput(
                "order 2 is only supported with the euclidean base metric".into(),
            ));
        }
        Ok(())
    }

    /// Default configuration: order 1 with the square-rooted euclidean
    /// distance, which de-emphasizes large magnitude differences.
    pub fn w1_sqrt_euclidean() -> Self {
        DistanceMetricSpec {
            base: BaseMetric::SqrtEuclidean,
            order: 1,
        }
    }

    pub fn w1_euclidean() -> Self {
        DistanceMetricSpec {
            base: BaseMetric::Euclidean,
            order: 1,
        }
    }

    pub fn w2_euclidean() -> Self {
        DistanceMetricSpec {
            base: BaseMetric::Euclidean,
            order: 2,
        }
    }

    pub fn w1_cosine() -> Self {
        DistanceMetricSpec {
            base: BaseMetric::Cosine,
            order: 1,
        }
    }
}

impl Default for DistanceMetricSpec {
    fn default() -> Self {
        Self::w1_sqrt_euclidean()
    }
}

const ZERO_NORM: f64 = 1e-12;

/// Distance between two equal-length vectors under the chosen base metric.
///
/// Identical inputs return exactly zero for every metric. For the cosine
/// distance, if either vector has norm below 1e-12 the result is 0 when both
/// are near zero and 1 otherwise.
pub fn pairwise_distance(x: &[f64], y: &[f64], spec: &DistanceMetricSpec) -> Result<f64> {
    if x.len() != y.len() {
        return Err(OopsError::Dimension(format!(
            "vector lengths {} vs {}",
            x.len(),
            y.len()
        )));
    }
    spec.validate()?;
    if x == y {
        return Ok(0.0);
    }
    let d = match spec.base {
        BaseMetric::Euclidean => l2(x, y),
        BaseMetric::SqrtEuclidean => l2(x, y).sqrt(),
        BaseMetric::Cosine => {
            let nx = norm(x);
            let ny = norm(y);
            if nx <= ZERO_NORM || ny <= ZERO_NORM {
                if nx <= ZERO_NORM && ny <= ZERO_NORM {
                    0.0
                } else {
                    1.0
                }
            } else {
                let dot: f64 = x.iter().zip(y).map(|(a, b)| a * b).sum();
                (1.0 - dot / (nx * ny)).max(0.0)
            }
        }
    };
    Ok(d)
}

fn l2(x: &[f64], y: &[f64]) -> f64 {
    x.iter()
        .zip(y)
        .map(|(a, b)| (a - b) * (a - b))
        .sum::<f64>()
        .sqrt()
}

fn norm(x: &[f64]) -> f64 {
    x.iter().map(|v| v * v).sum::<f64>().sqrt()
}

/// Pairwise cost matrix with entries d(mu_i, nu_j)^p.
pub type CostMatrix = Matrix;

pub fn cost_matrix(
    mu: &DiscreteMeasure,
    nu: &DiscreteMeasure,
    spec: &DistanceMetricSpec,
) -> Result<CostMatrix> {
    if mu.atom_dim() != nu.atom_dim() {
        return Err(OopsError::Dimension(format!(
            "atom dims {} vs {}",
            mu.atom_dim(),
            nu.atom_dim()
        )));
    }
    spec.validate()?;
    let mut m = Matrix::zeros(mu.len(), nu.len());
    for i in 0..mu.len() {
        for j in 0..nu.len() {
            let d = pairwise_distance(&mu.atoms[i], &nu.atoms[j], spec)?;
            let c = if spec.order == 2 { d * d } else { d };
            m.set(i, j, c);
        }
    }
    Ok(m)
}
