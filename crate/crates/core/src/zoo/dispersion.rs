use std::sync::Arc;

use serde::{Deserialize, Serialize};

use super::Matrix;
use crate::function::{ClassTraits, MemoFunction};
use crate::ground::Subset;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DispersionKind {
    /// `min_{k != l in X} d_kl`.
    Min,
    /// `sum_{k, l in X} d_kl` over ordered pairs.
    Sum,
    /// `sum_{k in X} min_{l in X, l != k} d_kl`.
    MinSum,
}

/// Distance-based diversity functions; all are `0` when `|X| < 2`.
///
/// Statistic per kind: the scalar in-set minimum (`Min`, recomputed in
/// `O(|X|^2)` on removal since a minimum cannot be downdated), the row sums
/// `r[k] = sum_{l in X} d_kl` for every `k` (`Sum`), or the nearest in-set
/// distance `nn[k] = min_{l in X \ k} d_kl` for every `k` (`MinSum`).
#[derive(Clone)]
pub struct Dispersion {
    d: Arc<Matrix>,
    kind: DispersionKind,
    min: f64,
    per: Vec<f64>,
}

impl Dispersion {
    pub fn new(d: Matrix, kind: DispersionKind) -> Self {
        let n = d.rows();
        let per = match kind {
            DispersionKind::Min => Vec::new(),
            DispersionKind::Sum => vec![0.0; n],
            DispersionKind::MinSum => vec![f64::INFINITY; n],
        };
        Dispersion {
            d: Arc::new(d),
            kind,
            min: f64::INFINITY,
            per,
        }
    }

    pub fn kind(&self) -> DispersionKind {
        self.kind
    }

    fn pair_min(&self, members: &[usize], skip: Option<usize>) -> f64 {
        let mut m = f64::INFINITY;
        for (a, &k) in members.iter().enumerate() {
            if Some(k) == skip {
                continue;
            }
            let row = self.d.row(k);
            for &l in &members[a + 1..] {
                if Some(l) != skip {
                    m = m.min(row[l]);
                }
            }
        }
        m
    }

    fn nearest(&self, k: usize, members: &[usize], skip: usize) -> f64 {
        let row = self.d.row(k);
        members
            .iter()
            .filter(|&&l| l != k && l != skip)
            .fold(f64::INFINITY, |m, &l| m.min(row[l]))
    }

    fn min_sum_value(&self, set: &Subset) -> f64 {
        if set.len() < 2 {
            return 0.0;
        }
        set.members().iter().map(|&k| self.per[k]).sum()
    }
}

fn finite_or_zero(v: f64) -> f64 {
    if v.is_finite() {
        v
    } else {
        0.0
    }
}

impl MemoFunction for Dispersion {
    fn name(&self) -> &'static str {
        match self.kind {
            DispersionKind::Min => "dispersion_min",
            DispersionKind::Sum => "dispersion_sum",
            DispersionKind::MinSum => "dispersion_min_sum",
        }
    }

    fn n(&self) -> usize {
        self.d.rows()
    }

    fn traits(&self) -> ClassTraits {
        ClassTraits {
            monotone: self.kind == DispersionKind::Sum,
            submodular: false,
        }
    }

    fn evaluate(&self, set: &[usize]) -> f64 {
        if set.len() < 2 {
            return 0.0;
        }
        match self.kind {
            DispersionKind::Min => self.pair_min(set, None),
            DispersionKind::Sum => set
                .iter()
                .map(|&k| {
                    let row = self.d.row(k);
                    set.iter().map(|&l| row[l]).sum::<f64>()
                })
                .sum(),
            DispersionKind::MinSum => set.iter().map(|&k| self.nearest(k, set, k)).sum(),
        }
    }

    fn eval_cost(&self, len: usize) -> u64 {
        (len * len).max(1) as u64
    }

    fn gain_empty(&self, _j: usize) -> f64 {
        0.0
    }

    fn gain_add(&self, j: usize, set: &Subset) -> f64 {
        let members = set.members();
        match self.kind {
            DispersionKind::Min => {
                let row = self.d.row(j);
                let to_set = members.iter().fold(f64::INFINITY, |m, &l| m.min(row[l]));
                match members.len() {
                    0 => 0.0,
                    1 => to_set,
                    _ => to_set.min(self.min) - self.min,
                }
            }
            DispersionKind::Sum => 2.0 * self.per[j],
            DispersionKind::MinSum => match members.len() {
                0 => 0.0,
                1 => 2.0 * self.d.get(j, members[0]),
                _ => {
                    let row = self.d.row(j);
                    let shrink: f64 = members.iter().map(|&k| row[k].min(self.per[k]) - self.per[k]).sum();
                    shrink + self.per[j]
                }
            },
        }
    }

    fn gain_remove(&self, j: usize, set: &Subset) -> f64 {
        let members = set.members();
        match self.kind {
            DispersionKind::Min => match members.len() {
                0 | 1 => 0.0,
                2 => self.min,
                _ => self.min - self.pair_min(members, Some(j)),
            },
            DispersionKind::Sum => 2.0 * self.per[j],
            DispersionKind::MinSum => match members.len() {
                0 | 1 => 0.0,
                2 => self.min_sum_value(set),
                _ => {
                    let row = self.d.row(j);
                    let mut lost = self.per[j];
                    for &k in members {
                        if k != j && row[k] <= self.per[k] {
                            lost += self.per[k] - self.nearest(k, members, j);
                        }
                    }
                    lost
                }
            },
        }
    }

    fn gain_cost(&self, _j: usize) -> u64 {
        1
    }

    fn update_cost(&self, _j: usize) -> u64 {
        self.n() as u64
    }

    fn value(&self, set: &Subset) -> f64 {
        if set.len() < 2 {
            return 0.0;
        }
        match self.kind {
            DispersionKind::Min => self.min,
            DispersionKind::Sum => set.members().iter().map(|&k| self.per[k]).sum(),
            DispersionKind::MinSum => self.min_sum_value(set),
        }
    }

    fn update(&mut self, j: usize, set: &Subset) {
        let d = Arc::clone(&self.d);
        let row = d.row(j);
        match self.kind {
            DispersionKind::Min => {
                for &l in set.members() {
                    if l != j {
                        self.min = self.min.min(row[l]);
                    }
                }
            }
            DispersionKind::Sum => {
                for (r, &v) in self.per.iter_mut().zip(row) {
                    *r += v;
                }
            }
            DispersionKind::MinSum => {
                for (k, (nn, &v)) in self.per.iter_mut().zip(row).enumerate() {
                    if k != j {
                        *nn = nn.min(v);
                    }
                }
            }
        }
    }

    fn downdate(&mut self, j: usize, set: &Subset) {
        let d = Arc::clone(&self.d);
        match self.kind {
            DispersionKind::Min => self.min = self.pair_min(set.members(), None),
            DispersionKind::Sum => {
                if set.is_empty() {
                    self.per.iter_mut().for_each(|r| *r = 0.0);
                    return;
                }
                for (r, &v) in self.per.iter_mut().zip(d.row(j)) {
                    *r -= v;
                }
            }
            DispersionKind::MinSum => {
                let row = d.row(j);
                for k in 0..self.per.len() {
                    if k != j && row[k] <= self.per[k] {
                        self.per[k] = self.nearest(k, set.members(), usize::MAX);
                    }
                }
            }
        }
    }

    fn rebuild(&mut self, set: &Subset) {
        let members = set.members();
        match self.kind {
            DispersionKind::Min => self.min = self.pair_min(members, None),
            DispersionKind::Sum => {
                for (k, r) in self.per.iter_mut().enumerate() {
                    let row = self.d.row(k);
                    *r = members.iter().map(|&l| row[l]).sum();
                }
            }
            DispersionKind::MinSum => {
                for k in 0..self.per.len() {
                    self.per[k] = self.nearest(k, members, usize::MAX);
                }
            }
        }
    }

    fn statistic(&self) -> Vec<f64> {
        match self.kind {
            DispersionKind::Min => vec![finite_or_zero(self.min)],
            DispersionKind::Sum => self.per.clone(),
            DispersionKind::MinSum => self.per.iter().map(|&v| finite_or_zero(v)).collect(),
        }
    }

    fn box_clone(&self) -> Box<dyn MemoFunction> {
        Box::new(self.clone())
    }
}
