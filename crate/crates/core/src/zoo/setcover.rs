use std::sync::Arc;

use super::check_weights;
use crate::error::{invalid, Result};
use crate::function::{ClassTraits, MemoFunction};
use crate::ground::Subset;

fn normalize_sets(universe: usize, sets: &[Vec<usize>]) -> Result<Vec<Vec<u32>>> {
    let mut out = Vec::with_capacity(sets.len());
    for (j, s) in sets.iter().enumerate() {
        let mut v: Vec<u32> = Vec::with_capacity(s.len());
        for &u in s {
            if u >= universe {
                return invalid(format!(
                    "set {} references item {} outside universe of {}",
                    j, u, universe
                ));
            }
            v.push(u as u32);
        }
        v.sort_unstable();
        v.dedup();
        out.push(v);
    }
    Ok(out)
}

fn check_universe(universe: usize, weights: &[f64]) -> Result<()> {
    if weights.len() != universe {
        return invalid(format!("{} item weights for a universe of {}", weights.len(), universe));
    }
    check_weights(weights, "weights")
}

struct CoverData {
    sets: Vec<Vec<u32>>,
    /// Effective per-item weight (clustered cover multiplies by cluster multiplicity).
    weights: Vec<f64>,
}

impl CoverData {
    fn evaluate(&self, set: &[usize]) -> f64 {
        let mut seen = vec![false; self.weights.len()];
        let mut total = 0.0;
        for &j in set {
            for &u in &self.sets[j] {
                let u = u as usize;
                if !seen[u] {
                    seen[u] = true;
                    total += self.weights[u];
                }
            }
        }
        total
    }
}

/// `f(X) = w(union_{j in X} S_j)` with per-item coverage counts as statistic.
#[derive(Clone)]
pub struct SetCover {
    data: Arc<CoverData>,
    counts: Vec<u32>,
    covered: f64,
}

impl SetCover {
    pub fn new(universe: usize, weights: &[f64], sets: &[Vec<usize>]) -> Result<Self> {
        check_universe(universe, weights)?;
        let sets = normalize_sets(universe, sets)?;
        Ok(SetCover {
            data: Arc::new(CoverData {
                sets,
                weights: weights.to_vec(),
            }),
            counts: vec![0; universe],
            covered: 0.0,
        })
    }

    /// Coverage count of item `u`.
    pub fn count(&self, u: usize) -> u32 {
        self.counts[u]
    }
}

impl MemoFunction for SetCover {
    fn name(&self) -> &'static str {
        "set_cover"
    }

    fn n(&self) -> usize {
        self.data.sets.len()
    }

    fn traits(&self) -> ClassTraits {
        ClassTraits {
            monotone: true,
            submodular: true,
        }
    }

    fn evaluate(&self, set: &[usize]) -> f64 {
        self.data.evaluate(set)
    }

    fn eval_cost(&self, len: usize) -> u64 {
        (self.counts.len() + len) as u64
    }

    fn gain_empty(&self, j: usize) -> f64 {
        self.data.sets[j].iter().map(|&u| self.data.weights[u as usize]).sum()
    }

    fn gain_add(&self, j: usize, _set: &Subset) -> f64 {
        self.data.sets[j]
            .iter()
            .filter(|&&u| self.counts[u as usize] == 0)
            .map(|&u| self.data.weights[u as usize])
            .sum()
    }

    fn gain_remove(&self, j: usize, _set: &Subset) -> f64 {
        self.data.sets[j]
            .iter()
            .filter(|&&u| self.counts[u as usize] == 1)
            .map(|&u| self.data.weights[u as usize])
            .sum()
    }

    fn gain_cost(&self, j: usize) -> u64 {
        self.data.sets[j].len().max(1) as u64
    }

    fn value(&self, _set: &Subset) -> f64 {
        self.covered
    }

    fn update(&mut self, j: usize, _set: &Subset) {
        for &u in &self.data.sets[j] {
            let u = u as usize;
            if self.counts[u] == 0 {
                self.covered += self.data.weights[u];
            }
            self.counts[u] += 1;
        }
    }

    fn downdate(&mut self, j: usize, set: &Subset) {
        for &u in &self.data.sets[j] {
            let u = u as usize;
            self.counts[u] -= 1;
            if self.counts[u] == 0 {
                self.covered -= self.data.weights[u];
            }
        }
        if set.is_empty() {
            self.covered = 0.0;
        }
    }

    fn rebuild(&mut self, set: &Subset) {
        self.counts.iter_mut().for_each(|c| *c = 0);
        self.covered = 0.0;
        for &j in set.members() {
            self.update(j, set);
        }
    }

    fn statistic(&self) -> Vec<f64> {
        let mut v: Vec<f64> = self.counts.iter().map(|&c| c as f64).collect();
        v.push(self.covered);
        v
    }

    fn box_clone(&self) -> Box<dyn MemoFunction> {
        Box::new(self.clone())
    }
}

struct ClusterData {
    cover: CoverData,
    /// Clusters containing each item.
    item_clusters: Vec<Vec<u32>>,
    /// Raw item weights (before multiplicity).
    item_weights: Vec<f64>,
    num_clusters: usize,
}

/// `f(X) = sum_c w(Gamma(X) ∩ C_c)` over item clusters `C_c`.
///
/// Statistic: per-item coverage counts plus the covered weight of each cluster.
#[derive(Clone)]
pub struct ClusteredSetCover {
    data: Arc<ClusterData>,
    counts: Vec<u32>,
    cluster_covered: Vec<f64>,
}

impl ClusteredSetCover {
    pub fn new(universe: usize, weights: &[f64], sets: &[Vec<usize>], clusters: &[Vec<usize>]) -> Result<Self> {
        check_universe(universe, weights)?;
        let sets = normalize_sets(universe, sets)?;
        let mut item_clusters: Vec<Vec<u32>> = vec![Vec::new(); universe];
        for (c, members) in clusters.iter().enumerate() {
            for &u in members {
                if u >= universe {
                    return invalid(format!(
                        "cluster {} references item {} outside universe of {}",
                        c, u, universe
                    ));
                }
                if !item_clusters[u].contains(&(c as u32)) {
                    item_clusters[u].push(c as u32);
                }
            }
        }
        let effective = (0..universe)
            .map(|u| weights[u] * item_clusters[u].len() as f64)
            .collect();
        Ok(ClusteredSetCover {
            data: Arc::new(ClusterData {
                cover: CoverData {
                    sets,
                    weights: effective,
                },
                item_clusters,
                item_weights: weights.to_vec(),
                num_clusters: clusters.len(),
            }),
            counts: vec![0; universe],
            cluster_covered: vec![0.0; clusters.len()],
        })
    }

    /// Covered weight of cluster `c`.
    pub fn cluster_weight(&self, c: usize) -> f64 {
        self.cluster_covered[c]
    }

    fn mark(&mut self, u: usize, sign: f64) {
        let w = self.data.item_weights[u] * sign;
        let data = Arc::clone(&self.data);
        for &c in &data.item_clusters[u] {
            self.cluster_covered[c as usize] += w;
        }
    }
}

impl MemoFunction for ClusteredSetCover {
    fn name(&self) -> &'static str {
        "clustered_set_cover"
    }

    fn n(&self) -> usize {
        self.data.cover.sets.len()
    }

    fn traits(&self) -> ClassTraits {
        ClassTraits {
            monotone: true,
            submodular: true,
        }
    }

    fn evaluate(&self, set: &[usize]) -> f64 {
        self.data.cover.evaluate(set)
    }

    fn eval_cost(&self, len: usize) -> u64 {
        (self.counts.len() + len) as u64
    }

    fn gain_empty(&self, j: usize) -> f64 {
        let c = &self.data.cover;
        c.sets[j].iter().map(|&u| c.weights[u as usize]).sum()
    }

    fn gain_add(&self, j: usize, _set: &Subset) -> f64 {
        let c = &self.data.cover;
        c.sets[j]
            .iter()
            .filter(|&&u| self.counts[u as usize] == 0)
            .map(|&u| c.weights[u as usize])
            .sum()
    }

    fn gain_remove(&self, j: usize, _set: &Subset) -> f64 {
        let c = &self.data.cover;
        c.sets[j]
            .iter()
            .filter(|&&u| self.counts[u as usize] == 1)
            .map(|&u| c.weights[u as usize])
            .sum()
    }

    fn gain_cost(&self, j: usize) -> u64 {
        self.data.cover.sets[j].len().max(1) as u64
    }

    fn value(&self, _set: &Subset) -> f64 {
        self.cluster_covered.iter().sum()
    }

    fn update(&mut self, j: usize, _set: &Subset) {
        let data = Arc::clone(&self.data);
        for &u in &data.cover.sets[j] {
            let u = u as usize;
            if self.counts[u] == 0 {
                self.mark(u, 1.0);
            }
            self.counts[u] += 1;
        }
    }

    fn downdate(&mut self, j: usize, set: &Subset) {
        let data = Arc::clone(&self.data);
        for &u in &data.cover.sets[j] {
            let u = u as usize;
            self.counts[u] -= 1;
            if self.counts[u] == 0 {
                self.mark(u, -1.0);
            }
        }
        if set.is_empty() {
            self.cluster_covered.iter_mut().for_each(|c| *c = 0.0);
        }
    }

    fn rebuild(&mut self, set: &Subset) {
        self.counts.iter_mut().for_each(|c| *c = 0);
        self.cluster_covered = vec![0.0; self.data.num_clusters];
        for &j in set.members() {
            self.update(j, set);
        }
    }

    fn statistic(&self) -> Vec<f64> {
        let mut v: Vec<f64> = self.counts.iter().map(|&c| c as f64).collect();
        v.extend_from_slice(&self.cluster_covered);
        v
    }

    fn box_clone(&self) -> Box<dyn MemoFunction> {
        Box::new(self.clone())
    }
}

struct ProbData {
    weights: Vec<f64>,
    /// Per element: `(item, p_uj)` with `p_uj > 0`.
    by_element: Vec<Vec<(u32, f64)>>,
    /// Dense `p[u * n + j]` for entry rebuilds.
    dense: Vec<f64>,
    n: usize,
}

/// `f(X) = sum_u w_u (1 - prod_{j in X} (1 - p_uj))` with the products as statistic.
///
/// A product that reaches exactly zero (certain cover, or underflow) is not
/// divided back out on removal; that entry is recomputed from the remaining set.
#[derive(Clone)]
pub struct ProbabilisticSetCover {
    data: Arc<ProbData>,
    miss: Vec<f64>,
}

impl ProbabilisticSetCover {
    pub fn new(universe: usize, weights: &[f64], probs: &[Vec<f64>]) -> Result<Self> {
        check_universe(universe, weights)?;
        if probs.len() != universe {
            return invalid(format!(
                "probability matrix has {} rows, expected {}",
                probs.len(),
                universe
            ));
        }
        let n = probs.first().map_or(0, |r| r.len());
        let mut dense = Vec::with_capacity(universe * n);
        let mut by_element: Vec<Vec<(u32, f64)>> = vec![Vec::new(); n];
        for (u, row) in probs.iter().enumerate() {
            if row.len() != n {
                return invalid(format!(
                    "probability row {} has {} entries, expected {}",
                    u,
                    row.len(),
                    n
                ));
            }
            for (j, &p) in row.iter().enumerate() {
                if !(0.0..=1.0).contains(&p) {
                    return invalid(format!("probability p[{}][{}] = {} outside [0, 1]", u, j, p));
                }
                if p > 0.0 {
                    by_element[j].push((u as u32, p));
                }
            }
            dense.extend_from_slice(row);
        }
        Ok(ProbabilisticSetCover {
            data: Arc::new(ProbData {
                weights: weights.to_vec(),
                by_element,
                dense,
                n,
            }),
            miss: vec![1.0; universe],
        })
    }

    fn product_without(&self, u: usize, skip: usize, set: &Subset) -> f64 {
        let d = &self.data;
        set.members()
            .iter()
            .filter(|&&i| i != skip)
            .map(|&i| 1.0 - d.dense[u * d.n + i])
            .product()
    }
}

impl MemoFunction for ProbabilisticSetCover {
    fn name(&self) -> &'static str {
        "probabilistic_set_cover"
    }

    fn n(&self) -> usize {
        self.data.n
    }

    fn traits(&self) -> ClassTraits {
        ClassTraits {
            monotone: true,
            submodular: true,
        }
    }

    fn evaluate(&self, set: &[usize]) -> f64 {
        let d = &self.data;
        let mut miss = vec![1.0f64; d.weights.len()];
        for &j in set {
            for &(u, p) in &d.by_element[j] {
                miss[u as usize] *= 1.0 - p;
            }
        }
        miss.iter().zip(&d.weights).map(|(&q, &w)| w * (1.0 - q)).sum()
    }

    fn eval_cost(&self, len: usize) -> u64 {
        (self.miss.len() * len.max(1)) as u64
    }

    fn gain_empty(&self, j: usize) -> f64 {
        let d = &self.data;
        d.by_element[j].iter().map(|&(u, p)| d.weights[u as usize] * p).sum()
    }

    fn gain_add(&self, j: usize, _set: &Subset) -> f64 {
        let d = &self.data;
        d.by_element[j]
            .iter()
            .map(|&(u, p)| d.weights[u as usize] * self.miss[u as usize] * p)
            .sum()
    }

    fn gain_remove(&self, j: usize, set: &Subset) -> f64 {
        let d = &self.data;
        d.by_element[j]
            .iter()
            .map(|&(u, p)| {
                let u = u as usize;
                let q = self.miss[u];
                let without = if q == 0.0 || p == 1.0 {
                    self.product_without(u, j, set)
                } else {
                    q / (1.0 - p)
                };
                d.weights[u] * (without - q)
            })
            .sum()
    }

    fn gain_cost(&self, j: usize) -> u64 {
        self.data.by_element[j].len().max(1) as u64
    }

    fn value(&self, _set: &Subset) -> f64 {
        self.miss
            .iter()
            .zip(&self.data.weights)
            .map(|(&q, &w)| w * (1.0 - q))
            .sum()
    }

    fn update(&mut self, j: usize, _set: &Subset) {
        let data = Arc::clone(&self.data);
        for &(u, p) in &data.by_element[j] {
            self.miss[u as usize] *= 1.0 - p;
        }
    }

    fn downdate(&mut self, j: usize, set: &Subset) {
        let data = Arc::clone(&self.data);
        for &(u, p) in &data.by_element[j] {
            let u = u as usize;
            let q = self.miss[u];
            self.miss[u] = if q == 0.0 || p == 1.0 {
                self.product_without(u, j, set)
            } else {
                (q / (1.0 - p)).min(1.0)
            };
        }
    }

    fn rebuild(&mut self, set: &Subset) {
        self.miss.iter_mut().for_each(|q| *q = 1.0);
        for &j in set.members() {
            self.update(j, set);
        }
    }

    fn statistic(&self) -> Vec<f64> {
        self.miss.clone()
    }

    fn box_clone(&self) -> Box<dyn MemoFunction> {
        Box::new(self.clone())
    }
}
