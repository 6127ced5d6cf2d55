//! Submodular minimization: the minimum-norm-point algorithm, projected
//! subgradient descent on the Lovász extension, and majorize-minimize over
//! constraint families that admit exact modular minimization.

mod mmin;
mod wolfe;

use serde::Serialize;

pub use mmin::{minimize_modular, mmin_constrained, MinFamily};
pub use wolfe::{min_norm_point, MnpOptions};

use crate::bounds::extreme_point_chain;
use crate::counters::EvalCounters;
use crate::error::{invalid, Result};
use crate::function::FunctionInstance;
use crate::ground::Permutation;
use crate::modular::ModularFunction;

/// Direction of a linear optimization over the base polytope.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Sense {
    /// `argmax <h, x>`: sweep by descending `x`.
    Maximize,
    /// `argmin <h, x>`: sweep by ascending `x`.
    Minimize,
}

#[derive(Clone, Debug, Serialize)]
pub struct MinimizationResult {
    /// Smallest minimizer found (ids ascending).
    pub minimizer_min: Vec<usize>,
    /// Largest minimizer found; contains `minimizer_min`.
    pub minimizer_max: Vec<usize>,
    pub value: f64,
    pub iterations: usize,
    pub counters: EvalCounters,
    /// Final Wolfe gap `|x|^2 - <x, q>` (0 where not applicable).
    pub gap: f64,
    /// Final point (min-norm point or Lovász iterate); empty for MMin.
    pub point: Vec<f64>,
    /// Objective after each iteration.
    pub values: Vec<f64>,
}

/// The extreme point of the base polytope optimizing `<h, x>` in the given
/// sense: one memo sweep, `n` gains.
pub fn linear_oracle(f: &mut FunctionInstance, x: &[f64], sense: Sense) -> Result<ModularFunction> {
    linear_oracle_chain(f, x, sense).map(|(h, _, _)| h)
}

/// [`linear_oracle`] plus the sweep order and its prefix values.
pub(crate) fn linear_oracle_chain(
    f: &mut FunctionInstance,
    x: &[f64],
    sense: Sense,
) -> Result<(ModularFunction, Permutation, Vec<f64>)> {
    if x.len() != f.n() || x.iter().any(|v| !v.is_finite()) {
        return invalid(format!("direction must be {} finite values", f.n()));
    }
    let sigma = match sense {
        Sense::Maximize => Permutation::descending(x),
        Sense::Minimize => Permutation::ascending(x),
    };
    let (h, chain) = extreme_point_chain(f, &sigma)?;
    Ok((h, sigma, chain))
}

/// Best prefix of a sweep: `(length, value)`, the empty prefix included;
/// ties keep the shorter prefix.
pub(crate) fn best_prefix(chain: &[f64]) -> (usize, f64) {
    let mut best = (0, 0.0);
    for (i, &v) in chain.iter().enumerate() {
        if v < best.1 {
            best = (i + 1, v);
        }
    }
    best
}

/// Default iteration count `ceil(1 / eps^2)` for [`lovasz_subgradient_min`].
pub fn lovasz_default_iterations(eps: f64) -> usize {
    (1.0 / (eps * eps)).ceil() as usize
}

/// Projected subgradient descent on the Lovász extension over `[0, 1]^n`,
/// starting at `x = 1/2`, with step `step_scale * sqrt(n) / (|g| sqrt(t))`.
/// Every sweep also scores the level sets of the current iterate; the best
/// one seen is returned.
pub fn lovasz_subgradient_min(
    f: &mut FunctionInstance,
    iterations: usize,
    step_scale: f64,
) -> Result<MinimizationResult> {
    if !(step_scale > 0.0 && step_scale.is_finite()) {
        return invalid(format!("step scale must be positive, got {}", step_scale));
    }
    let n = f.n();
    let before = f.counters();
    let mut x = vec![0.5; n];
    let mut best: (Vec<usize>, f64) = (Vec::new(), 0.0);
    let mut values = Vec::with_capacity(iterations);
    for t in 1..=iterations.max(1) {
        let (g, sigma, chain) = linear_oracle_chain(f, &x, Sense::Maximize)?;
        let (len, v) = best_prefix(&chain);
        if v < best.1 {
            best = (sigma.order()[..len].to_vec(), v);
        }
        values.push(best.1);
        let norm = g.weights.iter().map(|w| w * w).sum::<f64>().sqrt();
        if norm == 0.0 {
            break;
        }
        let step = step_scale * (n as f64).sqrt() / (norm * (t as f64).sqrt());
        for (xi, gi) in x.iter_mut().zip(&g.weights) {
            *xi = (*xi - step * gi).clamp(0.0, 1.0);
        }
    }
    best.0.sort_unstable();
    Ok(MinimizationResult {
        minimizer_min: best.0.clone(),
        minimizer_max: best.0,
        value: best.1,
        iterations: values.len(),
        counters: f.counters() - before,
        gap: 0.0,
        point: x,
        values,
    })
}
