use std::sync::Arc;

use super::Matrix;
use crate::error::{invalid, Result};
use crate::function::{ClassTraits, MemoFunction};
use crate::ground::Subset;

struct Data {
    /// `cols.row(k)[i] = s_ik`.
    cols: Matrix,
    alpha: Vec<f64>,
}

/// `f(X) = sum_i min(sum_{j in X} s_ij, alpha_i)` with statistic `p[i] = sum_{j in X} s_ij`.
#[derive(Clone)]
pub struct SaturatedCoverage {
    data: Arc<Data>,
    mass: Vec<f64>,
}

impl SaturatedCoverage {
    /// `alpha` overrides the default `alpha_i = fraction * sum_j s_ij`.
    pub fn new(similarity: Matrix, alpha: Option<Vec<f64>>, fraction: f64) -> Result<Self> {
        let n = similarity.rows();
        let alpha = match alpha {
            Some(a) => {
                if a.len() != n {
                    return invalid(format!("alpha has {} entries, expected {}", a.len(), n));
                }
                a
            }
            None => {
                if !(fraction.is_finite() && fraction >= 0.0) {
                    return invalid(format!("saturation fraction must be non-negative, got {}", fraction));
                }
                (0..n)
                    .map(|i| fraction * similarity.row(i).iter().sum::<f64>())
                    .collect()
            }
        };
        super::check_weights(&alpha, "alpha")?;
        Ok(SaturatedCoverage {
            data: Arc::new(Data {
                cols: similarity.transpose(),
                alpha,
            }),
            mass: vec![0.0; n],
        })
    }

    pub fn alpha(&self) -> &[f64] {
        &self.data.alpha
    }
}

impl MemoFunction for SaturatedCoverage {
    fn name(&self) -> &'static str {
        "saturated_coverage"
    }

    fn n(&self) -> usize {
        self.mass.len()
    }

    fn traits(&self) -> ClassTraits {
        ClassTraits {
            monotone: true,
            submodular: true,
        }
    }

    fn evaluate(&self, set: &[usize]) -> f64 {
        let mut mass = vec![0.0f64; self.n()];
        for &j in set {
            for (m, &s) in mass.iter_mut().zip(self.data.cols.row(j)) {
                *m += s;
            }
        }
        mass.iter().zip(&self.data.alpha).map(|(&m, &a)| m.min(a)).sum()
    }

    fn eval_cost(&self, len: usize) -> u64 {
        (self.n() * len.max(1)) as u64
    }

    fn gain_empty(&self, j: usize) -> f64 {
        self.data
            .cols
            .row(j)
            .iter()
            .zip(&self.data.alpha)
            .map(|(&s, &a)| s.min(a))
            .sum()
    }

    fn gain_add(&self, k: usize, _set: &Subset) -> f64 {
        let d = &self.data;
        d.cols
            .row(k)
            .iter()
            .zip(&self.mass)
            .zip(&d.alpha)
            .map(|((&s, &m), &a)| (m + s).min(a) - m.min(a))
            .sum()
    }

    fn gain_remove(&self, k: usize, _set: &Subset) -> f64 {
        let d = &self.data;
        d.cols
            .row(k)
            .iter()
            .zip(&self.mass)
            .zip(&d.alpha)
            .map(|((&s, &m), &a)| m.min(a) - (m - s).max(0.0).min(a))
            .sum()
    }

    fn gain_cost(&self, _j: usize) -> u64 {
        self.n() as u64
    }

    fn value(&self, _set: &Subset) -> f64 {
        self.mass.iter().zip(&self.data.alpha).map(|(&m, &a)| m.min(a)).sum()
    }

    fn update(&mut self, k: usize, _set: &Subset) {
        for (m, &s) in self.mass.iter_mut().zip(self.data.cols.row(k)) {
            *m += s;
        }
    }

    fn downdate(&mut self, k: usize, set: &Subset) {
        if set.is_empty() {
            self.mass.iter_mut().for_each(|m| *m = 0.0);
            return;
        }
        for (m, &s) in self.mass.iter_mut().zip(self.data.cols.row(k)) {
            *m = (*m - s).max(0.0);
        }
    }

    fn rebuild(&mut self, set: &Subset) {
        self.mass.iter_mut().for_each(|m| *m = 0.0);
        for &j in set.members() {
            for (m, &s) in self.mass.iter_mut().zip(self.data.cols.row(j)) {
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

#[cfg(test)]
mod tests {
    use crate::zoo::FunctionSpec;

    #[test]
    fn update_adds_column() {
        let s = vec![vec![1.0, 2.0], vec![3.0, 4.0]];
        let mut f = FunctionSpec::SaturatedCoverage {
            similarity: s,
            alpha: Some(vec![10.0, 5.0]),
            fraction: None,
        }
        .build()
        .unwrap();
        f.update(1).unwrap();
        // p[i] = s_i1
        assert_eq!(f.verify_statistic().max_deviation, 0.0);
        assert_eq!(f.value(), 2.0 + 4.0);
        // row 1 saturates at 5: min(3 + 4, 5) - 4 = 1, row 0: 1
        assert_eq!(f.gain_add(0).unwrap(), 2.0);
    }

    #[test]
    fn default_alpha_is_quarter_row_sum() {
        let f = FunctionSpec::SaturatedCoverage {
            similarity: vec![vec![4.0, 4.0], vec![0.0, 8.0]],
            alpha: None,
            fraction: None,
        }
        .build()
        .unwrap();
        assert_eq!(f.evaluate(&[0, 1]).unwrap(), 2.0 + 2.0);
    }
}
