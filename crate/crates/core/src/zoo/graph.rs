use std::sync::Arc;

use super::Matrix;
use crate::error::{invalid, Result};
use crate::function::{ClassTraits, MemoFunction};
use crate::ground::Subset;

struct Data {
    s: Matrix,
    lambda: f64,
    col_sums: Vec<f64>,
}

/// `f(X) = lambda * sum_{i in V} sum_{j in X} s_ij - sum_{i, j in X} s_ij`.
///
/// Statistic `p[i] = sum_{j in X} s_ij`; with the (immutable) column sums a
/// gain is `lambda * c_k - 2 p[k] -/+ s_kk`.
#[derive(Clone)]
pub struct GraphCut {
    data: Arc<Data>,
    mass: Vec<f64>,
}

impl GraphCut {
    pub fn new(s: Matrix, lambda: f64) -> Result<Self> {
        if !(lambda.is_finite() && lambda >= 0.0) {
            return invalid(format!("graph cut lambda must be finite and >= 0, got {}", lambda));
        }
        let n = s.rows();
        let col_sums = (0..n).map(|k| s.row(k).iter().sum()).collect();
        Ok(GraphCut {
            data: Arc::new(Data { s, lambda, col_sums }),
            mass: vec![0.0; n],
        })
    }
}

impl MemoFunction for GraphCut {
    fn name(&self) -> &'static str {
        "graph_cut"
    }

    fn n(&self) -> usize {
        self.mass.len()
    }

    fn traits(&self) -> ClassTraits {
        ClassTraits {
            monotone: self.data.lambda >= 2.0,
            submodular: true,
        }
    }

    fn evaluate(&self, set: &[usize]) -> f64 {
        let s = &self.data.s;
        let cover: f64 = set.iter().map(|&j| s.row(j).iter().sum::<f64>()).sum();
        let internal: f64 = set
            .iter()
            .map(|&i| {
                let row = s.row(i);
                set.iter().map(|&j| row[j]).sum::<f64>()
            })
            .sum();
        self.data.lambda * cover - internal
    }

    fn eval_cost(&self, len: usize) -> u64 {
        (self.n() * len + len * len) as u64
    }

    fn gain_empty(&self, j: usize) -> f64 {
        self.data.lambda * self.data.col_sums[j] - self.data.s.get(j, j)
    }

    fn gain_add(&self, k: usize, _set: &Subset) -> f64 {
        let d = &self.data;
        d.lambda * d.col_sums[k] - 2.0 * self.mass[k] - d.s.get(k, k)
    }

    fn gain_remove(&self, k: usize, _set: &Subset) -> f64 {
        let d = &self.data;
        d.lambda * d.col_sums[k] - 2.0 * self.mass[k] + d.s.get(k, k)
    }

    fn gain_cost(&self, _j: usize) -> u64 {
        1
    }

    fn update_cost(&self, _j: usize) -> u64 {
        self.n() as u64
    }

    fn value(&self, set: &Subset) -> f64 {
        let d = &self.data;
        set.members()
            .iter()
            .map(|&j| d.lambda * d.col_sums[j] - self.mass[j])
            .sum()
    }

    fn update(&mut self, k: usize, _set: &Subset) {
        for (m, &s) in self.mass.iter_mut().zip(self.data.s.row(k)) {
            *m += s;
        }
    }

    fn downdate(&mut self, k: usize, set: &Subset) {
        if set.is_empty() {
            self.mass.iter_mut().for_each(|m| *m = 0.0);
            return;
        }
        for (m, &s) in self.mass.iter_mut().zip(self.data.s.row(k)) {
            *m -= s;
        }
    }

    fn rebuild(&mut self, set: &Subset) {
        self.mass.iter_mut().for_each(|m| *m = 0.0);
        for &j in set.members() {
            for (m, &s) in self.mass.iter_mut().zip(self.data.s.row(j)) {
                *m += s;
            }
        }
    }

    fn statistic(&self) -> Vec<f64> {
        self.mass.clone()
    }

    fn box_clone(&self) -> Box<dyn MemoFunction> {
        Box::new(self.clone())
    }
}
