use std::sync::Arc;

use super::{positive_part_sum, Matrix, NONE};
use crate::function::{ClassTraits, MemoFunction};
use crate::ground::Subset;

/// `f(X) = sum_i max_{j in X} s_ij`.
///
/// Statistic: for every row `i` the largest and second largest `s_ij` over
/// `X` together with their holders. Removing a holder promotes the runner-up
/// and rescans the remaining set for the new runner-up.
#[derive(Clone)]
pub struct FacilityLocation {
    /// Column-major similarities: `cols.row(k)[i] = s_ik`.
    cols: Arc<Matrix>,
    /// `f({k}) = sum_i s_ik`.
    singles: Arc<Vec<f64>>,
    best: Vec<f64>,
    best_at: Vec<u32>,
    second: Vec<f64>,
    second_at: Vec<u32>,
}

impl FacilityLocation {
    pub fn new(similarity: Arc<Matrix>) -> Self {
        let n = similarity.rows();
        let cols = similarity.transpose();
        let singles = (0..n).map(|k| cols.row(k).iter().sum()).collect();
        FacilityLocation {
            cols: Arc::new(cols),
            singles: Arc::new(singles),
            best: vec![0.0; n],
            best_at: vec![NONE; n],
            second: vec![0.0; n],
            second_at: vec![NONE; n],
        }
    }

    fn reset(&mut self) {
        self.best.iter_mut().for_each(|v| *v = 0.0);
        self.second.iter_mut().for_each(|v| *v = 0.0);
        self.best_at.iter_mut().for_each(|v| *v = NONE);
        self.second_at.iter_mut().for_each(|v| *v = NONE);
    }

    #[inline]
    fn push(&mut self, i: usize, v: f64, k: u32) {
        if v > self.best[i] || self.best_at[i] == NONE {
            self.second[i] = self.best[i];
            self.second_at[i] = self.best_at[i];
            self.best[i] = v;
            self.best_at[i] = k;
        } else if v > self.second[i] || self.second_at[i] == NONE {
            self.second[i] = v;
            self.second_at[i] = k;
        }
    }

    fn rescan_row(&mut self, i: usize, set: &Subset) {
        self.best[i] = 0.0;
        self.second[i] = 0.0;
        self.best_at[i] = NONE;
        self.second_at[i] = NONE;
        for &j in set.members() {
            let v = self.cols.get(j, i);
            self.push(i, v, j as u32);
        }
    }

    /// Current `(best, second)` of row `i`.
    pub fn row_top2(&self, i: usize) -> (f64, f64) {
        (self.best[i], self.second[i])
    }
}

impl MemoFunction for FacilityLocation {
    fn name(&self) -> &'static str {
        "facility_location"
    }

    fn n(&self) -> usize {
        self.cols.rows()
    }

    fn traits(&self) -> ClassTraits {
        ClassTraits {
            monotone: true,
            submodular: true,
        }
    }

    fn evaluate(&self, set: &[usize]) -> f64 {
        let mut best = vec![0.0f64; self.n()];
        for &j in set {
            for (b, &s) in best.iter_mut().zip(self.cols.row(j)) {
                if s > *b {
                    *b = s;
                }
            }
        }
        best.iter().sum()
    }

    fn eval_cost(&self, len: usize) -> u64 {
        (self.n() * len.max(1)) as u64
    }

    fn gain_empty(&self, j: usize) -> f64 {
        self.singles[j]
    }

    fn gain_add(&self, k: usize, set: &Subset) -> f64 {
        if set.is_empty() {
            return self.singles[k];
        }
        positive_part_sum(self.cols.row(k), &self.best)
    }

    fn gain_remove(&self, k: usize, _set: &Subset) -> f64 {
        let k = k as u32;
        (0..self.n())
            .filter(|&i| self.best_at[i] == k)
            .map(|i| self.best[i] - self.second[i])
            .sum()
    }

    fn gain_cost(&self, _j: usize) -> u64 {
        self.n() as u64
    }

    fn value(&self, _set: &Subset) -> f64 {
        self.best.iter().sum()
    }

    fn update(&mut self, k: usize, _set: &Subset) {
        let cols = Arc::clone(&self.cols);
        for (i, &v) in cols.row(k).iter().enumerate() {
            self.push(i, v, k as u32);
        }
    }

    fn downdate(&mut self, k: usize, set: &Subset) {
        let k = k as u32;
        for i in 0..self.n() {
            if self.best_at[i] == k || self.second_at[i] == k {
                self.rescan_row(i, set);
            }
        }
    }

    fn rebuild(&mut self, set: &Subset) {
        self.reset();
        let cols = Arc::clone(&self.cols);
        for &j in set.members() {
            for (i, &v) in cols.row(j).iter().enumerate() {
                self.push(i, v, j as u32);
            }
        }
    }

    fn statistic(&self) -> Vec<f64> {
        let mut v = self.best.clone();
        v.extend_from_slice(&self.second);
        v
    }

    fn box_clone(&self) -> Box<dyn MemoFunction> {
        Box::new(self.clone())
    }
}
