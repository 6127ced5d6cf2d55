use serde::{Deserialize, Serialize};

use crate::cmp_value;

/// `m(Y) = offset + sum_{j in Y} weights[j]`.
///
/// Extreme points, subgradients and both supergradients are returned in this
/// form so they can be evaluated at any `Y` without touching the function.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ModularFunction {
    pub offset: f64,
    pub weights: Vec<f64>,
}

impl ModularFunction {
    pub fn new(offset: f64, weights: Vec<f64>) -> Self {
        ModularFunction { offset, weights }
    }

    pub fn zero(n: usize) -> Self {
        ModularFunction {
            offset: 0.0,
            weights: vec![0.0; n],
        }
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    pub fn value(&self, set: &[usize]) -> f64 {
        self.offset + set.iter().map(|&j| self.weights[j]).sum::<f64>()
    }

    /// `<weights, x>`, ignoring the offset.
    pub fn dot(&self, x: &[f64]) -> f64 {
        self.weights.iter().zip(x).map(|(w, v)| w * v).sum()
    }

    /// Elements with strictly negative weight: the unconstrained minimizer.
    pub fn negative_support(&self) -> Vec<usize> {
        (0..self.len()).filter(|&j| self.weights[j] < 0.0).collect()
    }

    /// Elements with strictly positive weight: the unconstrained maximizer.
    pub fn positive_support(&self) -> Vec<usize> {
        (0..self.len()).filter(|&j| self.weights[j] > 0.0).collect()
    }

    /// Up to `k` largest positive weights, ties by ascending id.
    pub fn top_k(&self, k: usize) -> Vec<usize> {
        let mut ids = self.positive_support();
        ids.sort_by(|&a, &b| cmp_value(self.weights[b], self.weights[a]).then(a.cmp(&b)));
        ids.truncate(k);
        ids.sort_unstable();
        ids
    }

    pub fn scaled(&self, c: f64) -> Self {
        ModularFunction {
            offset: self.offset * c,
            weights: self.weights.iter().map(|w| w * c).collect(),
        }
    }
}
