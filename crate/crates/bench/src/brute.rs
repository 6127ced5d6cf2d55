//! Exhaustive optima by enumerating all `2^n` subsets with from-scratch
//! evaluations. Ties go to the lexicographically smallest (sorted) set.

use submemo::maximize::Constraint;
use submemo::{tol_for, FunctionInstance};

use crate::{input_error, BenchError};

/// Largest ground set the enumerators accept.
pub const MAX_N: usize = 20;

fn members(mask: u32, n: usize) -> Vec<usize> {
    (0..n).filter(|&j| mask >> j & 1 == 1).collect()
}

fn check(f: &FunctionInstance) -> Result<usize, BenchError> {
    let n = f.n();
    if n > MAX_N {
        return input_error(format!("exhaustive search is capped at n = {}, got {}", MAX_N, n));
    }
    Ok(n)
}

/// Replaces the incumbent on a strict improvement, or on a tie with a
/// lexicographically smaller set.
fn better(v: f64, set: &[usize], best: &(Vec<usize>, f64), maximize: bool) -> bool {
    let tol = tol_for(best.1);
    let (gain, tie) = if maximize {
        (v > best.1 + tol, (v - best.1).abs() <= tol)
    } else {
        (v < best.1 - tol, (v - best.1).abs() <= tol)
    };
    gain || (tie && set < best.0.as_slice())
}

fn search(
    f: &FunctionInstance,
    feasible: impl Fn(&[usize]) -> bool,
    maximize: bool,
) -> Result<(Vec<usize>, f64), BenchError> {
    let n = check(f)?;
    let mut best = (Vec::new(), 0.0);
    for mask in 1u32..(1u32 << n) {
        let set = members(mask, n);
        if !feasible(&set) {
            continue;
        }
        let v = f.evaluate(&set)?;
        if better(v, &set, &best, maximize) {
            best = (set, v);
        }
    }
    Ok(best)
}

/// `max f(X)` over sets feasible for `c` (`∅` included, with value 0).
pub fn brute_force_max(f: &FunctionInstance, c: &Constraint) -> Result<(Vec<usize>, f64), BenchError> {
    c.validate(f.n())?;
    search(
        f,
        |s| match c {
            Constraint::Cardinality(k) => s.len() <= *k,
            Constraint::Knapsack { budget, .. } => c.cost(s) <= *budget + tol_for(*budget),
        },
        true,
    )
}

/// `min f(X)` over all subsets.
pub fn brute_force_min(f: &FunctionInstance) -> Result<(Vec<usize>, f64), BenchError> {
    search(f, |_| true, false)
}

/// `min f(X)` subject to `g(X) >= c`, or `None` when no set qualifies.
pub fn brute_force_cover(
    f: &FunctionInstance,
    g: &FunctionInstance,
    c: f64,
) -> Result<Option<(Vec<usize>, f64)>, BenchError> {
    let n = check(f)?;
    let mut best: Option<(Vec<usize>, f64)> = None;
    for mask in 0u32..(1u32 << n) {
        let set = members(mask, n);
        if g.evaluate(&set)? < c - tol_for(c) {
            continue;
        }
        let v = f.evaluate(&set)?;
        if best.as_ref().is_none_or(|b| better(v, &set, b, false)) {
            best = Some((set, v));
        }
    }
    Ok(best)
}

/// `max g(X)` subject to `f(X) <= b`.
pub fn brute_force_knapsack(
    f: &FunctionInstance,
    g: &FunctionInstance,
    b: f64,
) -> Result<(Vec<usize>, f64), BenchError> {
    check(f)?;
    search(g, |s| f.evaluate(s).is_ok_and(|v| v <= b + tol_for(b)), true)
}

#[cfg(test)]
mod tests {
    use super::*;
    use submemo::FunctionSpec;

    fn modular(w: Vec<f64>) -> FunctionInstance {
        FunctionSpec::Modular { weights: w }.build().unwrap()
    }

    #[test]
    fn modular_top_k_and_negative_support() {
        let f = modular(vec![0.5, 3.0, -1.0, 2.0]);
        assert_eq!(
            brute_force_max(&f, &Constraint::Cardinality(2)).unwrap(),
            (vec![1, 3], 5.0)
        );
        assert_eq!(brute_force_min(&modular(vec![-1.0, 2.0])).unwrap(), (vec![0], -1.0));
    }

    #[test]
    fn two_node_cut() {
        let f = FunctionSpec::GraphCut {
            similarity: vec![vec![0.0, 1.0], vec![1.0, 0.0]],
            lambda: 1.0,
        }
        .build()
        .unwrap();
        assert_eq!(
            brute_force_max(&f, &Constraint::Cardinality(2)).unwrap(),
            (vec![0], 1.0)
        );
    }

    #[test]
    fn ties_prefer_lexicographically_smallest() {
        let f = modular(vec![1.0, 1.0, 1.0]);
        assert_eq!(brute_force_max(&f, &Constraint::Cardinality(1)).unwrap().0, vec![0]);
        let z = modular(vec![0.0, 0.0]);
        assert_eq!(brute_force_min(&z).unwrap().0, Vec::<usize>::new());
    }

    #[test]
    fn over_cap_rejected() {
        let f = modular(vec![1.0; MAX_N + 1]);
        assert!(brute_force_min(&f).is_err());
    }
}
