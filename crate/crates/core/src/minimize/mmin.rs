use super::MinimizationResult;
use crate::bounds::{supergradient_grow, supergradient_shrink};
use crate::cmp_value;
use crate::error::{invalid, Result};
use crate::function::FunctionInstance;
use crate::ground::Subset;
use crate::modular::ModularFunction;
use crate::tol_for;

/// Feasible sets for constrained minimization.
#[derive(Clone, Debug, PartialEq)]
pub enum MinFamily {
    Unconstrained,
    /// `|X| >= k`.
    CardinalityAtLeast(usize),
    /// An explicit list of feasible sets.
    Explicit(Vec<Vec<usize>>),
}

impl MinFamily {
    fn validate(&self, n: usize) -> Result<()> {
        match self {
            MinFamily::Unconstrained => Ok(()),
            MinFamily::CardinalityAtLeast(k) if *k > n => {
                invalid(format!("cardinality floor {} exceeds ground set size {}", k, n))
            }
            MinFamily::CardinalityAtLeast(_) => Ok(()),
            MinFamily::Explicit(sets) => {
                if sets.is_empty() {
                    return invalid("explicit family has no feasible set");
                }
                for s in sets {
                    Subset::from_ids(n, s)?;
                }
                Ok(())
            }
        }
    }
}

const MAX_ITERATIONS: usize = 50;

/// Exact minimizer of a modular function over the family (ids ascending).
pub fn minimize_modular(m: &ModularFunction, family: &MinFamily) -> Vec<usize> {
    match family {
        MinFamily::Unconstrained => m.negative_support(),
        MinFamily::CardinalityAtLeast(k) => {
            let mut ids: Vec<usize> = (0..m.len()).collect();
            ids.sort_by(|&a, &b| cmp_value(m.weights[a], m.weights[b]).then(a.cmp(&b)));
            let negatives = ids.iter().take_while(|&&j| m.weights[j] < 0.0).count();
            ids.truncate(negatives.max(*k));
            ids.sort_unstable();
            ids
        }
        MinFamily::Explicit(sets) => {
            let mut best = &sets[0];
            let mut best_v = m.value(best);
            for s in &sets[1..] {
                let v = m.value(s);
                if v < best_v {
                    best = s;
                    best_v = v;
                }
            }
            let mut out = best.clone();
            out.sort_unstable();
            out
        }
    }
}

/// Majorize-minimize from `X = ∅`: minimize both modular upper bounds tight
/// at `X` over the family, move to the better minimizer while it strictly
/// improves `f`, stop otherwise (or after 50 iterations).
pub fn mmin_constrained(f: &mut FunctionInstance, family: &MinFamily) -> Result<MinimizationResult> {
    let n = f.n();
    family.validate(n)?;
    let before = f.counters();
    let mut x = Subset::empty(n);
    let mut current: Option<f64> = None;
    let mut values = Vec::new();
    let mut iterations = 0;
    while iterations < MAX_ITERATIONS {
        iterations += 1;
        let grow = supergradient_grow(f, &x)?;
        let shrink = supergradient_shrink(f, &x)?;
        let mut best: Option<(Vec<usize>, f64)> = None;
        for m in [grow, shrink] {
            let y = minimize_modular(&m, family);
            f.set_memo(&y)?;
            let v = f.value();
            if best.as_ref().is_none_or(|(_, b)| v < *b) {
                best = Some((y, v));
            }
        }
        let (y, v) = best.expect("two candidates");
        let improves = match current {
            None => true,
            Some(c) => v < c - tol_for(c),
        };
        if !improves {
            break;
        }
        x = Subset::from_ids(n, &y)?;
        current = Some(v);
        values.push(v);
    }
    let selected = x.sorted();
    f.install(x);
    Ok(MinimizationResult {
        minimizer_min: selected.clone(),
        minimizer_max: selected,
        value: current.unwrap_or(0.0),
        iterations,
        counters: f.counters() - before,
        gap: 0.0,
        point: Vec::new(),
        values,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::zoo::FunctionSpec;

    #[test]
    fn modular_solved_in_one_step() {
        let mut f = FunctionSpec::Modular {
            weights: vec![3.0, -1.0, 2.0, 0.5],
        }
        .build()
        .unwrap();
        let r = mmin_constrained(&mut f, &MinFamily::CardinalityAtLeast(2)).unwrap();
        assert_eq!(r.minimizer_min, vec![1, 3]);
        assert_eq!(r.value, -0.5);
        assert_eq!(r.values, vec![-0.5]);
    }

    #[test]
    fn explicit_family_picks_cheapest() {
        let m = ModularFunction::new(0.0, vec![1.0, 2.0, -4.0]);
        let fam = MinFamily::Explicit(vec![vec![0, 1], vec![2, 1], vec![0]]);
        assert_eq!(minimize_modular(&m, &fam), vec![1, 2]);
    }

    #[test]
    fn infeasible_family_rejected() {
        let mut f = FunctionSpec::Modular { weights: vec![1.0] }.build().unwrap();
        assert!(mmin_constrained(&mut f, &MinFamily::CardinalityAtLeast(2)).is_err());
        assert!(mmin_constrained(&mut f, &MinFamily::Explicit(vec![])).is_err());
    }
}
