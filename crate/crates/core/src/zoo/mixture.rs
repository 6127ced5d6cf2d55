use crate::error::{invalid, Result};
use crate::function::{ClassTraits, FunctionInstance, MemoFunction, OracleMode};
use crate::ground::Subset;
use crate::modular::ModularFunction;

use super::Modular;

/// `f(X) = sum_i w_i f_i(X)` with `w_i >= 0`.
///
/// Statistic: the concatenated component statistics; gains, updates and
/// downdates fan out to every component.
pub struct Mixture {
    parts: Vec<(f64, Box<dyn MemoFunction>)>,
}

impl Clone for Mixture {
    fn clone(&self) -> Self {
        Mixture {
            parts: self.parts.iter().map(|(w, f)| (*w, f.box_clone())).collect(),
        }
    }
}

impl Mixture {
    pub fn new(parts: Vec<(f64, Box<dyn MemoFunction>)>) -> Result<Self> {
        let Some(n) = parts.first().map(|(_, f)| f.n()) else {
            return invalid("mixture needs at least one component");
        };
        for (w, f) in &parts {
            if !(w.is_finite() && *w >= 0.0) {
                return invalid(format!("mixture weight must be finite and non-negative, got {}", w));
            }
            if f.n() != n {
                return invalid(format!("mixture components disagree on n: {} vs {}", f.n(), n));
            }
        }
        Ok(Mixture { parts })
    }

    fn sum(&self, g: impl Fn(&dyn MemoFunction) -> f64) -> f64 {
        self.parts.iter().map(|(w, f)| w * g(f.as_ref())).sum()
    }
}

/// Builds `sum_i w_i f_i` from existing instances, with an empty memo set.
/// The result is a value oracle when any input is one.
pub fn mixture_of(parts: Vec<(f64, &FunctionInstance)>) -> Result<FunctionInstance> {
    let oracle = parts.iter().any(|(_, f)| f.mode() == OracleMode::ValueOracle);
    let boxed = parts
        .into_iter()
        .map(|(w, f)| {
            let mut func = f.box_function();
            func.rebuild(&Subset::empty(func.n()));
            (w, func)
        })
        .collect();
    let mix = FunctionInstance::new(Box::new(Mixture::new(boxed)?));
    Ok(if oracle { mix.to_value_oracle() } else { mix })
}

/// `f + m` for a modular `m`; the offset of `m` is dropped so the result
/// stays normalized.
pub fn plus_modular(f: &FunctionInstance, m: &ModularFunction) -> Result<FunctionInstance> {
    if m.len() != f.n() {
        return invalid(format!(
            "modular term has {} weights, function has n = {}",
            m.len(),
            f.n()
        ));
    }
    let modular = FunctionInstance::new(Box::new(Modular::new(m.weights.clone())));
    mixture_of(vec![(1.0, f), (1.0, &modular)])
}

impl MemoFunction for Mixture {
    fn name(&self) -> &'static str {
        "mixture"
    }

    fn n(&self) -> usize {
        self.parts[0].1.n()
    }

    fn traits(&self) -> ClassTraits {
        let mut t = ClassTraits {
            monotone: true,
            submodular: true,
        };
        for (w, f) in &self.parts {
            if *w > 0.0 {
                let ft = f.traits();
                t.monotone &= ft.monotone;
                t.submodular &= ft.submodular;
            }
        }
        t
    }

    fn evaluate(&self, set: &[usize]) -> f64 {
        self.sum(|f| f.evaluate(set))
    }

    fn eval_cost(&self, len: usize) -> u64 {
        self.parts.iter().map(|(_, f)| f.eval_cost(len)).sum()
    }

    fn gain_empty(&self, j: usize) -> f64 {
        self.sum(|f| f.gain_empty(j))
    }

    fn gain_add(&self, j: usize, set: &Subset) -> f64 {
        self.sum(|f| f.gain_add(j, set))
    }

    fn gain_remove(&self, j: usize, set: &Subset) -> f64 {
        self.sum(|f| f.gain_remove(j, set))
    }

    fn gain_cost(&self, j: usize) -> u64 {
        self.parts.iter().map(|(_, f)| f.gain_cost(j)).sum()
    }

    fn update_cost(&self, j: usize) -> u64 {
        self.parts.iter().map(|(_, f)| f.update_cost(j)).sum()
    }

    fn value(&self, set: &Subset) -> f64 {
        self.sum(|f| f.value(set))
    }

    fn update(&mut self, j: usize, set: &Subset) {
        self.parts.iter_mut().for_each(|(_, f)| f.update(j, set));
    }

    fn downdate(&mut self, j: usize, set: &Subset) {
        self.parts.iter_mut().for_each(|(_, f)| f.downdate(j, set));
    }

    fn rebuild(&mut self, set: &Subset) {
        self.parts.iter_mut().for_each(|(_, f)| f.rebuild(set));
    }

    fn statistic(&self) -> Vec<f64> {
        self.parts.iter().flat_map(|(_, f)| f.statistic()).collect()
    }

    fn statistic_tolerance(&self) -> f64 {
        self.parts
            .iter()
            .map(|(_, f)| f.statistic_tolerance())
            .fold(0.0, f64::max)
    }

    fn box_clone(&self) -> Box<dyn MemoFunction> {
        Box::new(self.clone())
    }
}
