use std::sync::Arc;

use super::{check_weights, Concave};
use crate::error::{invalid, Result};
use crate::function::{ClassTraits, MemoFunction};
use crate::ground::Subset;

struct Data {
    /// Per element: `(feature, score)`.
    features: Vec<Vec<(u32, f64)>>,
    /// Per feature `i2`: `(i1, mixing[i1][i2])` for non-zero mixing weights.
    fanout: Vec<Vec<(u32, f64)>>,
    layer_weights: Vec<f64>,
    inner: Concave,
    outer: Concave,
}

/// Two-layer deep submodular function
/// `f(X) = sum_{i1} w1[i1] * outer( sum_{i2} W[i1][i2] * inner(m_{i2}(X)) )`.
///
/// Statistic: the feature masses `m_{i2}(X)` plus the cached layer-one
/// arguments, so a gain only walks the features of the element and the
/// layer-one units they feed. Features count their contributors in `X` and
/// units count their non-empty features, so emptied entries are exactly
/// zero instead of a rounding residue that `sqrt` would amplify.
#[derive(Clone)]
pub struct DeepSubmodular {
    data: Arc<Data>,
    mass: Vec<f64>,
    hidden: Vec<f64>,
    feature_count: Vec<u32>,
    unit_count: Vec<u32>,
}

/// Change to one layer-one unit: argument delta and change in the number of
/// non-empty features feeding it.
type UnitDelta = (u32, f64, i32);

impl DeepSubmodular {
    pub fn new(
        num_features: usize,
        features: &[Vec<(usize, f64)>],
        mixing: &[Vec<f64>],
        layer_weights: &[f64],
        inner: Concave,
        outer: Concave,
    ) -> Result<Self> {
        check_weights(layer_weights, "layer_weights")?;
        if mixing.len() != layer_weights.len() {
            return invalid(format!(
                "mixing has {} rows but there are {} layer weights",
                mixing.len(),
                layer_weights.len()
            ));
        }
        let mut fanout: Vec<Vec<(u32, f64)>> = vec![Vec::new(); num_features];
        for (i1, row) in mixing.iter().enumerate() {
            if row.len() != num_features {
                return invalid(format!(
                    "mixing row {} has {} entries, expected {}",
                    i1,
                    row.len(),
                    num_features
                ));
            }
            check_weights(row, "mixing")?;
            for (i2, &w) in row.iter().enumerate() {
                if w > 0.0 {
                    fanout[i2].push((i1 as u32, w));
                }
            }
        }
        let mut feats = Vec::with_capacity(features.len());
        for (j, fs) in features.iter().enumerate() {
            let mut row = Vec::with_capacity(fs.len());
            for &(e, m) in fs {
                if e >= num_features {
                    return invalid(format!("element {} references feature {} of {}", j, e, num_features));
                }
                if !(m.is_finite() && m >= 0.0) {
                    return invalid(format!("feature score must be finite and non-negative, got {}", m));
                }
                if m > 0.0 {
                    row.push((e as u32, m));
                }
            }
            row.sort_by_key(|&(e, _)| e);
            let mut merged: Vec<(u32, f64)> = Vec::with_capacity(row.len());
            for (e, m) in row {
                match merged.last_mut() {
                    Some(last) if last.0 == e => last.1 += m,
                    _ => merged.push((e, m)),
                }
            }
            feats.push(merged);
        }
        let hidden = vec![0.0; layer_weights.len()];
        Ok(DeepSubmodular {
            data: Arc::new(Data {
                features: feats,
                fanout,
                layer_weights: layer_weights.to_vec(),
                inner,
                outer,
            }),
            mass: vec![0.0; num_features],
            feature_count: vec![0; num_features],
            unit_count: vec![0; layer_weights.len()],
            hidden,
        })
    }

    /// Changes to the layer-one arguments caused by shifting feature masses,
    /// merged per unit.
    /// New mass of feature `e` after adding (`adding`) or removing `m`.
    #[inline]
    fn shifted_mass(&self, e: usize, m: f64, adding: bool) -> f64 {
        if adding {
            self.mass[e] + m
        } else if self.feature_count[e] <= 1 {
            0.0
        } else {
            (self.mass[e] - m).max(0.0)
        }
    }

    fn hidden_deltas(&self, j: usize, adding: bool) -> Vec<UnitDelta> {
        let d = &self.data;
        let mut deltas: Vec<UnitDelta> = Vec::new();
        for &(e, m) in &d.features[j] {
            let e = e as usize;
            let p = self.mass[e];
            let step = d.inner.apply(self.shifted_mass(e, m, adding)) - d.inner.apply(p);
            let flip = match (adding, self.feature_count[e]) {
                (true, 0) => 1,
                (false, 1) => -1,
                _ => 0,
            };
            for &(i1, w) in &d.fanout[e] {
                deltas.push((i1, w * step, flip));
            }
        }
        deltas.sort_by_key(|&(i1, _, _)| i1);
        let mut merged: Vec<UnitDelta> = Vec::with_capacity(deltas.len());
        for (i1, v, c) in deltas {
            match merged.last_mut() {
                Some(last) if last.0 == i1 => {
                    last.1 += v;
                    last.2 += c;
                }
                _ => merged.push((i1, v, c)),
            }
        }
        merged
    }

    #[inline]
    fn shifted_hidden(&self, i1: usize, dv: f64, dc: i32) -> f64 {
        if self.unit_count[i1] as i64 + dc as i64 <= 0 {
            0.0
        } else {
            (self.hidden[i1] + dv).max(0.0)
        }
    }

    fn outer_change(&self, deltas: &[UnitDelta]) -> f64 {
        let d = &self.data;
        deltas
            .iter()
            .map(|&(i1, dv, dc)| {
                let i1 = i1 as usize;
                let a = self.hidden[i1];
                d.layer_weights[i1] * (d.outer.apply(self.shifted_hidden(i1, dv, dc)) - d.outer.apply(a))
            })
            .sum()
    }

    fn shift(&mut self, j: usize, adding: bool) {
        for (i1, dv, dc) in self.hidden_deltas(j, adding) {
            let i1 = i1 as usize;
            self.hidden[i1] = self.shifted_hidden(i1, dv, dc);
            self.unit_count[i1] = (self.unit_count[i1] as i64 + dc as i64) as u32;
        }
        let data = Arc::clone(&self.data);
        for &(e, m) in &data.features[j] {
            let e = e as usize;
            self.mass[e] = self.shifted_mass(e, m, adding);
            if adding {
                self.feature_count[e] += 1;
            } else {
                self.feature_count[e] -= 1;
            }
        }
    }

    fn value_from(&self, mass: &[f64]) -> f64 {
        let d = &self.data;
        let mut hidden = vec![0.0f64; d.layer_weights.len()];
        for (e, &p) in mass.iter().enumerate() {
            let v = d.inner.apply(p);
            for &(i1, w) in &d.fanout[e] {
                hidden[i1 as usize] += w * v;
            }
        }
        hidden
            .iter()
            .zip(&d.layer_weights)
            .map(|(&a, &w)| w * d.outer.apply(a))
            .sum()
    }
}

impl MemoFunction for DeepSubmodular {
    fn name(&self) -> &'static str {
        "deep_submodular"
    }

    fn n(&self) -> usize {
        self.data.features.len()
    }

    fn traits(&self) -> ClassTraits {
        ClassTraits {
            monotone: true,
            submodular: true,
        }
    }

    fn evaluate(&self, set: &[usize]) -> f64 {
        let mut mass = vec![0.0f64; self.mass.len()];
        for &j in set {
            for &(e, m) in &self.data.features[j] {
                mass[e as usize] += m;
            }
        }
        self.value_from(&mass)
    }

    fn eval_cost(&self, len: usize) -> u64 {
        let links: usize = self.data.fanout.iter().map(|f| f.len()).sum();
        (links + len * 4) as u64
    }

    fn gain_add(&self, j: usize, _set: &Subset) -> f64 {
        self.outer_change(&self.hidden_deltas(j, true))
    }

    fn gain_remove(&self, j: usize, _set: &Subset) -> f64 {
        -self.outer_change(&self.hidden_deltas(j, false))
    }

    fn gain_cost(&self, j: usize) -> u64 {
        let d = &self.data;
        d.features[j]
            .iter()
            .map(|&(e, _)| d.fanout[e as usize].len() + 1)
            .sum::<usize>()
            .max(1) as u64
    }

    fn value(&self, _set: &Subset) -> f64 {
        let d = &self.data;
        self.hidden
            .iter()
            .zip(&d.layer_weights)
            .map(|(&a, &w)| w * d.outer.apply(a))
            .sum()
    }

    fn update(&mut self, j: usize, _set: &Subset) {
        self.shift(j, true);
    }

    fn downdate(&mut self, j: usize, _set: &Subset) {
        self.shift(j, false);
    }

    fn rebuild(&mut self, set: &Subset) {
        self.mass.iter_mut().for_each(|m| *m = 0.0);
        self.feature_count.iter_mut().for_each(|c| *c = 0);
        for &j in set.members() {
            for &(e, m) in &self.data.features[j] {
                self.mass[e as usize] += m;
                self.feature_count[e as usize] += 1;
            }
        }
        let d = Arc::clone(&self.data);
        self.hidden.iter_mut().for_each(|h| *h = 0.0);
        self.unit_count.iter_mut().for_each(|c| *c = 0);
        for (e, &p) in self.mass.iter().enumerate() {
            if self.feature_count[e] == 0 {
                continue;
            }
            let v = d.inner.apply(p);
            for &(i1, w) in &d.fanout[e] {
                self.hidden[i1 as usize] += w * v;
                self.unit_count[i1 as usize] += 1;
            }
        }
    }

    fn statistic(&self) -> Vec<f64> {
        let mut v = self.mass.clone();
        v.extend_from_slice(&self.hidden);
        v
    }

    fn box_clone(&self) -> Box<dyn MemoFunction> {
        Box::new(self.clone())
    }
}

#[cfg(test)]
mod tests {
    use crate::zoo::{Concave, FunctionSpec};

    #[test]
    fn two_layer_value() {
        let f = FunctionSpec::DeepSubmodular {
            num_features: 2,
            features: vec![vec![(0, 4.0)], vec![(1, 9.0)], vec![(0, 5.0), (1, 7.0)]],
            mixing: vec![vec![1.0, 1.0], vec![0.0, 2.0]],
            layer_weights: vec![1.0, 0.5],
            inner: Concave::Sqrt,
            outer: Concave::Sqrt,
        }
        .build()
        .unwrap();
        // X = {0, 1}: inner = (2, 3); hidden = (5, 6); f = sqrt 5 + 0.5 sqrt 6
        let want = 5f64.sqrt() + 0.5 * 6f64.sqrt();
        assert!((f.evaluate(&[0, 1]).unwrap() - want).abs() < 1e-12);
    }
}
