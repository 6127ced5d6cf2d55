use std::sync::Arc;

use super::Concave;
use crate::error::{invalid, Result};
use crate::function::{ClassTraits, MemoFunction};
use crate::ground::Subset;

struct Data {
    name: &'static str,
    /// Per element: `(coordinate, non-negative score)`.
    entries: Vec<Vec<(u32, f64)>>,
    dims: usize,
    concave: Concave,
}

/// Sum of concave over modular: `f(X) = sum_e psi(m_e(X))`.
///
/// Serves both the feature-based class (coordinates are features) and the
/// clustered concave-over-modular class (coordinates are clusters of `V`).
/// The statistic is the modular mass `m_e(X)` of every coordinate, so gains
/// and updates only touch the coordinates an element participates in.
///
/// Each coordinate also counts its contributors in `X`, so a coordinate that
/// loses its last contributor is exactly zero rather than a rounding residue
/// (which `sqrt` or `x^p` would blow up to ~1e-8).
#[derive(Clone)]
pub struct SparseConcave {
    data: Arc<Data>,
    mass: Vec<f64>,
    count: Vec<u32>,
}

fn check_entry(score: f64, what: &str) -> Result<()> {
    if !(score.is_finite() && score >= 0.0) {
        return invalid(format!("{} must be finite and non-negative, got {}", what, score));
    }
    Ok(())
}

impl SparseConcave {
    pub fn feature_based(num_features: usize, features: &[Vec<(usize, f64)>], concave: Concave) -> Result<Self> {
        let mut entries = Vec::with_capacity(features.len());
        for (j, feats) in features.iter().enumerate() {
            let mut row: Vec<(u32, f64)> = Vec::with_capacity(feats.len());
            for &(e, m) in feats {
                if e >= num_features {
                    return invalid(format!("element {} references feature {} of {}", j, e, num_features));
                }
                check_entry(m, "feature score")?;
                if m > 0.0 {
                    row.push((e as u32, m));
                }
            }
            row.sort_by_key(|&(e, _)| e);
            for w in row.windows(2) {
                if w[0].0 == w[1].0 {
                    return invalid(format!("element {} lists feature {} twice", j, w[0].0));
                }
            }
            entries.push(row);
        }
        Ok(Self::from_entries("feature_based", entries, num_features, concave))
    }

    pub fn clustered(n: usize, clusters: &[Vec<usize>], weights: &[Vec<f64>], concave: Concave) -> Result<Self> {
        if clusters.len() != weights.len() {
            return invalid(format!(
                "{} clusters but {} weight vectors",
                clusters.len(),
                weights.len()
            ));
        }
        let mut entries: Vec<Vec<(u32, f64)>> = vec![Vec::new(); n];
        for (c, (members, w)) in clusters.iter().zip(weights).enumerate() {
            if members.len() != w.len() {
                return invalid(format!(
                    "cluster {} has {} members but {} weights",
                    c,
                    members.len(),
                    w.len()
                ));
            }
            for (&j, &m) in members.iter().zip(w) {
                if j >= n {
                    return invalid(format!(
                        "cluster {} references element {} outside ground set of {}",
                        c, j, n
                    ));
                }
                check_entry(m, "cluster weight")?;
                if entries[j].last().is_some_and(|&(last, _)| last as usize == c) {
                    return invalid(format!("element {} listed twice in cluster {}", j, c));
                }
                if m > 0.0 {
                    entries[j].push((c as u32, m));
                }
            }
        }
        Ok(Self::from_entries(
            "clustered_concave",
            entries,
            clusters.len(),
            concave,
        ))
    }

    fn from_entries(name: &'static str, entries: Vec<Vec<(u32, f64)>>, dims: usize, concave: Concave) -> Self {
        SparseConcave {
            data: Arc::new(Data {
                name,
                entries,
                dims,
                concave,
            }),
            mass: vec![0.0; dims],
            count: vec![0; dims],
        }
    }

    /// Mass of coordinate `e` after removing a contribution of `m`.
    #[inline]
    fn without(&self, e: usize, m: f64) -> f64 {
        if self.count[e] <= 1 {
            0.0
        } else {
            (self.mass[e] - m).max(0.0)
        }
    }

    pub fn coordinates(&self) -> usize {
        self.data.dims
    }
}

impl MemoFunction for SparseConcave {
    fn name(&self) -> &'static str {
        self.data.name
    }

    fn n(&self) -> usize {
        self.data.entries.len()
    }

    fn traits(&self) -> ClassTraits {
        ClassTraits {
            monotone: true,
            submodular: true,
        }
    }

    fn evaluate(&self, set: &[usize]) -> f64 {
        let d = &self.data;
        let mut mass = vec![0.0f64; d.dims];
        for &j in set {
            for &(e, m) in &d.entries[j] {
                mass[e as usize] += m;
            }
        }
        mass.iter().map(|&m| d.concave.apply(m)).sum()
    }

    fn eval_cost(&self, len: usize) -> u64 {
        let avg = self.data.entries.iter().map(|e| e.len()).sum::<usize>() / self.n().max(1);
        (self.data.dims + len * avg.max(1)) as u64
    }

    fn gain_empty(&self, j: usize) -> f64 {
        let d = &self.data;
        d.entries[j].iter().map(|&(_, m)| d.concave.apply(m)).sum()
    }

    fn gain_add(&self, j: usize, _set: &Subset) -> f64 {
        let d = &self.data;
        d.entries[j]
            .iter()
            .map(|&(e, m)| {
                let p = self.mass[e as usize];
                d.concave.apply(p + m) - d.concave.apply(p)
            })
            .sum()
    }

    fn gain_remove(&self, j: usize, _set: &Subset) -> f64 {
        let d = &self.data;
        d.entries[j]
            .iter()
            .map(|&(e, m)| {
                let p = self.mass[e as usize];
                d.concave.apply(p) - d.concave.apply(self.without(e as usize, m))
            })
            .sum()
    }

    fn gain_cost(&self, j: usize) -> u64 {
        self.data.entries[j].len().max(1) as u64
    }

    fn value(&self, _set: &Subset) -> f64 {
        let c = self.data.concave;
        self.mass.iter().map(|&m| c.apply(m)).sum()
    }

    fn update(&mut self, j: usize, _set: &Subset) {
        for &(e, m) in &self.data.entries[j] {
            self.mass[e as usize] += m;
            self.count[e as usize] += 1;
        }
    }

    fn downdate(&mut self, j: usize, _set: &Subset) {
        let data = Arc::clone(&self.data);
        for &(e, m) in &data.entries[j] {
            let e = e as usize;
            self.mass[e] = self.without(e, m);
            self.count[e] -= 1;
        }
    }

    fn rebuild(&mut self, set: &Subset) {
        self.mass.iter_mut().for_each(|m| *m = 0.0);
        self.count.iter_mut().for_each(|c| *c = 0);
        for &j in set.members() {
            for &(e, m) in &self.data.entries[j] {
                self.mass[e as usize] += m;
                self.count[e as usize] += 1;
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
    use crate::zoo::{Concave, FunctionSpec};

    #[test]
    fn sqrt_of_sums() {
        let f = FunctionSpec::FeatureBased {
            num_features: 1,
            features: vec![vec![(0, 4.0)], vec![(0, 5.0)]],
            concave: Concave::Sqrt,
        }
        .build()
        .unwrap();
        assert_eq!(f.evaluate(&[0]).unwrap(), 2.0);
        assert_eq!(f.evaluate(&[0, 1]).unwrap(), 3.0);
    }

    #[test]
    fn clustered_only_touches_own_clusters() {
        let mut f = FunctionSpec::ClusteredConcave {
            n: 3,
            clusters: vec![vec![0, 1], vec![2]],
            weights: vec![vec![1.0, 3.0], vec![9.0]],
            concave: Concave::Sqrt,
        }
        .build()
        .unwrap();
        f.update(2).unwrap();
        assert_eq!(f.value(), 3.0);
        assert_eq!(f.gain_add(1).unwrap(), 3f64.sqrt());
        f.update(1).unwrap();
        assert_eq!(f.gain_add(0).unwrap(), 2.0 - 3f64.sqrt());
    }

    #[test]
    fn power_exponent_validated() {
        let bad = FunctionSpec::FeatureBased {
            num_features: 1,
            features: vec![vec![(0, 1.0)]],
            concave: Concave::Power(1.5),
        };
        assert!(bad.build().is_err());
    }
}
