use std::sync::Arc;

use nalgebra::DMatrix;

use super::{Matrix, DEFAULT_RIDGE};
use crate::error::{invalid, Result};
use crate::function::{ClassTraits, MemoFunction};
use crate::ground::Subset;

/// `f(X) = log det (S + eps I)_X`.
///
/// Statistic: the lower-triangular Cholesky factor `L` of the principal
/// submatrix in memo order. Adding an element appends one row by forward
/// substitution; removing one deletes its row and restores triangular form
/// with Givens rotations on the trailing block. Both are `O(|X|^2)`.
#[derive(Clone)]
pub struct LogDet {
    kernel: Arc<Matrix>,
    order: Vec<usize>,
    /// Row `r` holds `r + 1` entries.
    factor: Vec<Vec<f64>>,
}

impl LogDet {
    /// With `ridge = None` the kernel is used as is if positive definite and
    /// with [`DEFAULT_RIDGE`] otherwise.
    pub fn new(s: Matrix, ridge: Option<f64>) -> Result<Self> {
        let n = s.rows();
        let candidates: Vec<f64> = match ridge {
            Some(r) if !(r.is_finite() && r >= 0.0) => return invalid(format!("ridge must be >= 0, got {}", r)),
            Some(r) => vec![r],
            None => vec![0.0, DEFAULT_RIDGE],
        };
        for eps in candidates {
            let mut k = s.clone().to_rows();
            for (i, row) in k.iter_mut().enumerate() {
                row[i] += eps;
            }
            let dense = DMatrix::from_fn(n, n, |i, j| k[i][j]);
            if dense.cholesky().is_some() {
                let kernel = Matrix::from_rows(&k, "kernel")?;
                return Ok(LogDet {
                    kernel: Arc::new(kernel),
                    order: Vec::new(),
                    factor: Vec::new(),
                });
            }
        }
        invalid("log-det kernel is not positive definite after ridge")
    }

    /// Solves `L y = K[order, j]` over the first `m` rows of the factor.
    fn project(&self, j: usize) -> Vec<f64> {
        let m = self.order.len();
        let mut y = vec![0.0; m];
        for r in 0..m {
            let row = &self.factor[r];
            let mut acc = self.kernel.get(self.order[r], j);
            for c in 0..r {
                acc -= row[c] * y[c];
            }
            y[r] = acc / row[r];
        }
        y
    }

    fn schur(&self, j: usize) -> (Vec<f64>, f64) {
        let y = self.project(j);
        let d2 = self.kernel.get(j, j) - y.iter().map(|v| v * v).sum::<f64>();
        (y, d2)
    }

    fn append(&mut self, j: usize) {
        let (mut y, d2) = self.schur(j);
        y.push(d2.max(f64::MIN_POSITIVE).sqrt());
        self.factor.push(y);
        self.order.push(j);
    }

    /// Log of the Schur complement of `K_X` in `K_{X+j}`.
    pub fn schur_log(&self, j: usize) -> f64 {
        let (_, d2) = self.schur(j);
        if d2 > 0.0 {
            d2.ln()
        } else {
            f64::NEG_INFINITY
        }
    }

    pub fn factor(&self) -> &[Vec<f64>] {
        &self.factor
    }
}

/// Cholesky log-determinant of `K_set`, `-inf` when not positive definite.
fn log_det_of(kernel: &Matrix, set: &[usize]) -> f64 {
    let m = set.len();
    let mut l = vec![0.0f64; m * m];
    let mut total = 0.0;
    for i in 0..m {
        for j in 0..=i {
            let mut acc = kernel.get(set[i], set[j]);
            for k in 0..j {
                acc -= l[i * m + k] * l[j * m + k];
            }
            if i == j {
                if acc <= 0.0 {
                    return f64::NEG_INFINITY;
                }
                l[i * m + i] = acc.sqrt();
                total += acc.ln();
            } else {
                l[i * m + j] = acc / l[j * m + j];
            }
        }
    }
    total
}

impl MemoFunction for LogDet {
    fn name(&self) -> &'static str {
        "log_det"
    }

    fn n(&self) -> usize {
        self.kernel.rows()
    }

    fn traits(&self) -> ClassTraits {
        ClassTraits {
            monotone: false,
            submodular: true,
        }
    }

    fn evaluate(&self, set: &[usize]) -> f64 {
        log_det_of(&self.kernel, set)
    }

    fn eval_cost(&self, len: usize) -> u64 {
        (len * len * len / 3).max(1) as u64
    }

    fn gain_empty(&self, j: usize) -> f64 {
        self.kernel.get(j, j).ln()
    }

    fn gain_add(&self, j: usize, _set: &Subset) -> f64 {
        self.schur_log(j)
    }

    fn gain_remove(&self, j: usize, _set: &Subset) -> f64 {
        // f(X) - f(X \ j) = -log (K_X^{-1})_{jj} = -log |L^{-1} e_p|^2
        let p = self.order.iter().position(|&o| o == j).expect("element in memo set");
        let m = self.order.len();
        let mut z = vec![0.0; m];
        z[p] = 1.0 / self.factor[p][p];
        for r in (p + 1)..m {
            let row = &self.factor[r];
            let mut acc = 0.0;
            for c in p..r {
                acc -= row[c] * z[c];
            }
            z[r] = acc / row[r];
        }
        -z.iter().map(|v| v * v).sum::<f64>().ln()
    }

    fn gain_cost(&self, _j: usize) -> u64 {
        let m = self.order.len() as u64;
        (m * m / 2).max(1)
    }

    fn value(&self, _set: &Subset) -> f64 {
        self.factor.iter().enumerate().map(|(r, row)| 2.0 * row[r].ln()).sum()
    }

    fn update(&mut self, j: usize, _set: &Subset) {
        self.append(j);
    }

    fn downdate(&mut self, j: usize, _set: &Subset) {
        let p = self.order.iter().position(|&o| o == j).expect("element in memo set");
        self.order.remove(p);
        self.factor.remove(p);
        let m = self.order.len();
        // rows p.. now carry one extra column; rotate columns (k, k+1) to zero it
        for k in p..m {
            let (a, b) = (self.factor[k][k], self.factor[k][k + 1]);
            let rho = a.hypot(b);
            let (c, s) = if rho == 0.0 { (1.0, 0.0) } else { (a / rho, b / rho) };
            for r in k..m {
                let row = &mut self.factor[r];
                let (x, y) = (row[k], row[k + 1]);
                row[k] = c * x + s * y;
                row[k + 1] = -s * x + c * y;
            }
            self.factor[k].truncate(k + 1);
            if self.factor[k][k] < 0.0 {
                for r in k..m {
                    self.factor[r][k] = -self.factor[r][k];
                }
            }
        }
    }

    fn rebuild(&mut self, set: &Subset) {
        self.order.clear();
        self.factor.clear();
        for &j in set.members() {
            self.append(j);
        }
    }

    fn statistic(&self) -> Vec<f64> {
        self.factor.iter().flatten().copied().collect()
    }

    fn statistic_tolerance(&self) -> f64 {
        1e-7
    }

    fn box_clone(&self) -> Box<dyn MemoFunction> {
        Box::new(self.clone())
    }
}
