//! Modular lower and upper bounds and the Lovász extension.
//!
//! Every routine drives the instance's memo set (sweeps, `set_memo`), so the
//! memo set afterwards is whatever the last sweep left: `V` after an extreme
//! point, `X` after `supergradient_grow`, `V` after `supergradient_shrink`.

use crate::error::{invalid, Result};
use crate::function::FunctionInstance;
use crate::ground::{Permutation, Subset};
use crate::modular::ModularFunction;

/// Extreme point of the submodular polyhedron for the chain given by `sigma`,
/// along with the chain values `f(S_1), ..., f(S_n)`.
pub fn extreme_point_chain(f: &mut FunctionInstance, sigma: &Permutation) -> Result<(ModularFunction, Vec<f64>)> {
    let n = f.n();
    if sigma.len() != n {
        return invalid(format!("permutation has {} entries, ground set has {}", sigma.len(), n));
    }
    f.clear_memo();
    let mut weights = vec![0.0; n];
    let mut chain = Vec::with_capacity(n);
    let mut acc = 0.0;
    for &j in sigma.order() {
        let g = f.gain_add_unchecked(j);
        weights[j] = g;
        acc += g;
        chain.push(acc);
        f.update(j)?;
    }
    Ok((ModularFunction::new(0.0, weights), chain))
}

/// `h[sigma(i)] = f(sigma(i) | S_{i-1})`: one sweep of `n` gains and updates.
pub fn extreme_point(f: &mut FunctionInstance, sigma: &Permutation) -> Result<ModularFunction> {
    extreme_point_chain(f, sigma).map(|(h, _)| h)
}

/// Modular lower bound tight at `y`: the extreme point of a chain through `y`
/// (`y` first, both blocks ordered by `tie_order`).
pub fn subgradient_at(f: &mut FunctionInstance, y: &Subset, tie_order: &Permutation) -> Result<ModularFunction> {
    check_subset(f, y)?;
    if tie_order.len() != f.n() {
        return invalid(format!(
            "permutation has {} entries, ground set has {}",
            tie_order.len(),
            f.n()
        ));
    }
    extreme_point(f, &Permutation::with_prefix(y, tie_order))
}

/// Upper bound tight at `x` that charges `f(j | X \ j)` for dropping `j in X`
/// and `f(j | ∅)` for adding `j outside X`. One rebuild plus `n` gains.
pub fn supergradient_grow(f: &mut FunctionInstance, x: &Subset) -> Result<ModularFunction> {
    check_subset(f, x)?;
    let n = f.n();
    f.install(x.clone());
    let fx = f.value();
    let mut weights = vec![0.0; n];
    let mut offset = fx;
    for (j, w) in weights.iter_mut().enumerate() {
        if x.contains(j) {
            *w = f.gain_remove_unchecked(j);
            offset -= *w;
        } else {
            *w = f.gain_empty(j)?;
        }
    }
    Ok(ModularFunction::new(offset, weights))
}

/// Upper bound tight at `x` that charges `f(j | V \ j)` for dropping `j in X`
/// and `f(j | X)` for adding `j outside X`. Two rebuilds plus `n` gains.
pub fn supergradient_shrink(f: &mut FunctionInstance, x: &Subset) -> Result<ModularFunction> {
    check_subset(f, x)?;
    let n = f.n();
    f.install(x.clone());
    let fx = f.value();
    let mut weights = vec![0.0; n];
    for (j, w) in weights.iter_mut().enumerate() {
        if !x.contains(j) {
            *w = f.gain_add_unchecked(j);
        }
    }
    let mut offset = fx;
    if !x.is_empty() {
        f.install(Subset::full(n));
        for &j in x.members() {
            weights[j] = f.gain_remove_unchecked(j);
            offset -= weights[j];
        }
    }
    Ok(ModularFunction::new(offset, weights))
}

/// Subgradient of the Lovász extension at `x`: the extreme point for `x`
/// sorted descending, ties by ascending id.
pub fn lovasz_subgradient(f: &mut FunctionInstance, x: &[f64]) -> Result<ModularFunction> {
    check_point(f, x)?;
    extreme_point(f, &Permutation::descending(x))
}

/// Lovász extension `<h_sigma_x, x>`.
pub fn lovasz_value(f: &mut FunctionInstance, x: &[f64]) -> Result<f64> {
    let h = lovasz_subgradient(f, x)?;
    Ok(h.dot(x))
}

fn check_subset(f: &FunctionInstance, s: &Subset) -> Result<()> {
    if s.universe() != f.n() {
        return invalid(format!(
            "subset over {} elements, ground set has {}",
            s.universe(),
            f.n()
        ));
    }
    Ok(())
}

fn check_point(f: &FunctionInstance, x: &[f64]) -> Result<()> {
    if x.len() != f.n() {
        return invalid(format!("point has {} coordinates, ground set has {}", x.len(), f.n()));
    }
    if x.iter().any(|v| !v.is_finite()) {
        return invalid("point has non-finite coordinates");
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::zoo::FunctionSpec;

    fn facility3() -> FunctionInstance {
        FunctionSpec::FacilityLocation {
            similarity: vec![vec![1.0, 0.5, 0.2], vec![0.5, 1.0, 0.3], vec![0.2, 0.3, 1.0]],
        }
        .build()
        .unwrap()
    }

    #[test]
    fn telescoping_extreme_point() {
        let mut f = facility3();
        let h = extreme_point(&mut f, &Permutation::identity(3)).unwrap();
        let want = [1.7, 0.6, 0.7];
        for (a, b) in h.weights.iter().zip(want) {
            assert!((a - b).abs() < 1e-12, "{:?}", h.weights);
        }
        let c = f.counters();
        assert_eq!((c.gain_evals, c.memo_updates, c.oracle_evals), (3, 3, 0));
    }

    #[test]
    fn supergradients_tight_at_x() {
        let mut f = facility3();
        let x = Subset::from_ids(3, &[0, 2]).unwrap();
        let fx = f.evaluate(&[0, 2]).unwrap();
        for m in [
            supergradient_grow(&mut f, &x).unwrap(),
            supergradient_shrink(&mut f, &x).unwrap(),
        ] {
            assert!((m.value(&[0, 2]) - fx).abs() < 1e-12);
        }
    }

    #[test]
    fn shrink_at_empty_uses_singletons() {
        let mut f = facility3();
        let m = supergradient_shrink(&mut f, &Subset::empty(3)).unwrap();
        for j in 0..3 {
            assert!((m.weights[j] - f.evaluate(&[j]).unwrap()).abs() < 1e-12);
        }
        assert_eq!(m.offset, 0.0);
    }

    #[test]
    fn lovasz_two_element() {
        let mut f = FunctionSpec::FacilityLocation {
            similarity: vec![vec![1.0, 0.5], vec![0.5, 1.0]],
        }
        .build()
        .unwrap();
        assert!((lovasz_value(&mut f, &[0.5, 1.0]).unwrap() - 1.75).abs() < 1e-12);
        assert!((lovasz_value(&mut f, &[1.0, 1.0]).unwrap() - 2.0).abs() < 1e-12);
    }

    #[test]
    fn wrong_permutation_length_rejected() {
        let mut f = facility3();
        assert!(extreme_point(&mut f, &Permutation::identity(2)).is_err());
    }
}
