use std::sync::Arc;

use crate::function::{ClassTraits, MemoFunction};
use crate::ground::Subset;

/// `f(X) = sum_{j in X} w_j` with arbitrary real weights; the statistic is
/// the running sum.
#[derive(Clone)]
pub struct Modular {
    weights: Arc<Vec<f64>>,
    sum: f64,
}

impl Modular {
    pub fn new(weights: Vec<f64>) -> Self {
        Modular {
            weights: Arc::new(weights),
            sum: 0.0,
        }
    }
}

impl MemoFunction for Modular {
    fn name(&self) -> &'static str {
        "modular"
    }

    fn n(&self) -> usize {
        self.weights.len()
    }

    fn traits(&self) -> ClassTraits {
        ClassTraits {
            monotone: self.weights.iter().all(|&w| w >= 0.0),
            submodular: true,
        }
    }

    fn evaluate(&self, set: &[usize]) -> f64 {
        set.iter().map(|&j| self.weights[j]).sum()
    }

    fn eval_cost(&self, len: usize) -> u64 {
        len.max(1) as u64
    }

    fn gain_empty(&self, j: usize) -> f64 {
        self.weights[j]
    }

    fn gain_add(&self, j: usize, _set: &Subset) -> f64 {
        self.weights[j]
    }

    fn gain_remove(&self, j: usize, _set: &Subset) -> f64 {
        self.weights[j]
    }

    fn gain_cost(&self, _j: usize) -> u64 {
        1
    }

    fn value(&self, set: &Subset) -> f64 {
        if set.is_empty() {
            0.0
        } else {
            self.sum
        }
    }

    fn update(&mut self, j: usize, _set: &Subset) {
        self.sum += self.weights[j];
    }

    fn downdate(&mut self, j: usize, set: &Subset) {
        self.sum = if set.is_empty() {
            0.0
        } else {
            self.sum - self.weights[j]
        };
    }

    fn rebuild(&mut self, set: &Subset) {
        self.sum = self.evaluate(set.members());
    }

    fn statistic(&self) -> Vec<f64> {
        vec![self.sum]
    }

    fn box_clone(&self) -> Box<dyn MemoFunction> {
        Box::new(self.clone())
    }
}
