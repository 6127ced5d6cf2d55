use rand::seq::SliceRandom;

use super::{rng, Constraint, MaximizationResult};
use crate::bounds::extreme_point;
use crate::cmp_value;
use crate::error::Result;
use crate::function::FunctionInstance;
use crate::ground::{Permutation, Subset};
use crate::modular::ModularFunction;
use crate::tol_for;

/// How the chain through the current set is ordered.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SigmaRule {
    /// Current set first, both blocks shuffled.
    Random(u64),
    /// Current set first in insertion order, the rest by descending gain
    /// with respect to the current set (costs `n - |X|` extra gains).
    GreedyOrder,
}

const MAX_ITERATIONS: usize = 100;
/// Largest ground set for which knapsack steps are solved by enumeration.
const EXACT_KNAPSACK_MAX_N: usize = 16;

/// Minorize-maximize: at the current set `X` take the modular lower bound
/// tight at `X` (one memo sweep along a chain starting with `X`), maximize
/// it under the constraint, and move when that strictly improves `f`.
pub fn minorize_maximize(
    f: &mut FunctionInstance,
    constraint: &Constraint,
    rule: SigmaRule,
) -> Result<MaximizationResult> {
    let n = f.n();
    constraint.validate(n)?;
    let before = f.counters();
    let mut rng = match rule {
        SigmaRule::Random(seed) => Some(rng(seed)),
        SigmaRule::GreedyOrder => None,
    };
    let mut order: Vec<usize> = Vec::new();
    let mut current = 0.0;
    let mut values = vec![0.0];
    for _ in 0..MAX_ITERATIONS {
        let x = Subset::from_ids(n, &order)?;
        let sigma = match rng.as_mut() {
            Some(r) => {
                let mut head = order.clone();
                let mut tail = x.complement();
                head.shuffle(r);
                tail.shuffle(r);
                head.extend(tail);
                Permutation::new(head)?
            }
            None => {
                f.install(x.clone());
                let mut tail: Vec<(usize, f64)> = x
                    .complement()
                    .into_iter()
                    .map(|j| (j, f.gain_add_unchecked(j)))
                    .collect();
                tail.sort_by(|a, b| cmp_value(b.1, a.1).then(a.0.cmp(&b.0)));
                let mut head = order.clone();
                head.extend(tail.into_iter().map(|(j, _)| j));
                Permutation::new(head)?
            }
        };
        let h = extreme_point(f, &sigma)?;
        let y = maximize_modular(&h, constraint);
        f.set_memo(&y)?;
        let fy = f.value();
        if fy > current + tol_for(current) {
            order.retain(|j| y.contains(j));
            let mut fresh: Vec<usize> = y.iter().copied().filter(|j| !x.contains(*j)).collect();
            fresh.sort_by(|&a, &b| cmp_value(h.weights[b], h.weights[a]).then(a.cmp(&b)));
            order.extend(fresh);
            current = fy;
            values.push(fy);
        } else {
            break;
        }
    }
    f.set_memo(&order)?;
    let mut res = MaximizationResult::new(f, before);
    res.values = values;
    if let SigmaRule::Random(seed) = rule {
        res.seed = Some(seed);
    }
    Ok(res)
}

/// Exact maximizer of a modular function under the constraint (top `k`
/// positive weights; knapsack by enumeration on small ground sets, else
/// the better of ratio greedy and the best single element).
pub(crate) fn maximize_modular(h: &ModularFunction, constraint: &Constraint) -> Vec<usize> {
    match constraint {
        Constraint::Cardinality(k) => h.top_k(*k),
        Constraint::Knapsack { costs, budget } => {
            let n = h.len();
            let positive = h.positive_support();
            if n <= EXACT_KNAPSACK_MAX_N {
                let mut best = (0.0, 0usize);
                for mask in 1usize..(1 << positive.len()) {
                    let (mut w, mut c) = (0.0, 0.0);
                    for (b, &j) in positive.iter().enumerate() {
                        if mask >> b & 1 == 1 {
                            w += h.weights[j];
                            c += costs[j];
                        }
                    }
                    if c <= *budget && w > best.0 {
                        best = (w, mask);
                    }
                }
                return positive
                    .iter()
                    .enumerate()
                    .filter(|(b, _)| best.1 >> b & 1 == 1)
                    .map(|(_, &j)| j)
                    .collect();
            }
            let mut ranked = positive.clone();
            ranked.sort_by(|&a, &b| cmp_value(h.weights[b] / costs[b], h.weights[a] / costs[a]).then(a.cmp(&b)));
            let mut chosen = Vec::new();
            let (mut spent, mut total) = (0.0, 0.0);
            for j in ranked {
                if spent + costs[j] <= *budget {
                    spent += costs[j];
                    total += h.weights[j];
                    chosen.push(j);
                }
            }
            let single = positive
                .iter()
                .copied()
                .filter(|&j| costs[j] <= *budget)
                .max_by(|&a, &b| cmp_value(h.weights[a], h.weights[b]).then(b.cmp(&a)));
            match single {
                Some(j) if h.weights[j] > total => vec![j],
                _ => {
                    chosen.sort_unstable();
                    chosen
                }
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::zoo::FunctionSpec;

    #[test]
    fn modular_converges_in_one_step() {
        let mut f = FunctionSpec::Modular {
            weights: vec![1.0, -2.0, 0.5, 4.0],
        }
        .build()
        .unwrap();
        for rule in [SigmaRule::Random(3), SigmaRule::GreedyOrder] {
            let r = minorize_maximize(&mut f, &Constraint::Cardinality(2), rule).unwrap();
            assert_eq!(r.selected, vec![0, 3]);
            assert_eq!(r.values, vec![0.0, 5.0]);
        }
    }

    #[test]
    fn knapsack_enumeration_is_exact() {
        let h = ModularFunction::new(0.0, vec![6.0, 5.0, 5.0, -1.0]);
        let c = Constraint::Knapsack {
            costs: vec![3.0, 2.0, 2.0, 1.0],
            budget: 4.0,
        };
        assert_eq!(maximize_modular(&h, &c), vec![1, 2]);
    }
}
