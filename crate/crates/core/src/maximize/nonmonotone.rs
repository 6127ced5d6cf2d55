use rand::Rng;

use super::{rng, Constraint, MaximizationResult, TraceStep};
use crate::cmp_value;
use crate::error::{invalid, Result};
use crate::function::FunctionInstance;
use crate::ground::{Permutation, Subset};

pub const DEFAULT_LOCAL_SEARCH_EPS: f64 = 1e-3;

/// Safety net on accepted moves; the improvement threshold keeps real runs
/// far below it.
const MAX_MOVES: usize = 1_000_000;

/// Local search for unconstrained maximization.
///
/// Alternates add passes (add `j` when `f(j | X)` exceeds the threshold) and
/// remove passes (drop `j` when `f(X \ j) - f(X)` exceeds it) until neither
/// changes `X`; the threshold is `(eps / n^2) |f(X)|`. Returns the better of
/// the local optimum and its complement, the complement being scored on a
/// separate copy by a statistic rebuild.
pub fn local_search_usm(f: &mut FunctionInstance, eps: f64) -> Result<MaximizationResult> {
    if !(eps > 0.0 && eps.is_finite()) {
        return invalid(format!("local search epsilon must be positive, got {}", eps));
    }
    let n = f.n();
    let before = f.counters();
    f.clear_memo();
    let scale = eps / (n * n) as f64;
    let (mut trace, mut values) = (Vec::new(), Vec::new());
    let mut moves = 0usize;
    loop {
        let mut changed = false;
        for j in 0..n {
            if f.memo_set().contains(j) {
                continue;
            }
            let g = f.gain_add_unchecked(j);
            if g > scale * f.value().abs() && g > 0.0 {
                f.update(j)?;
                trace.push(TraceStep {
                    element: j,
                    gain: g,
                    added: true,
                });
                values.push(f.value());
                changed = true;
                moves += 1;
            }
        }
        for j in f.memo_set().sorted() {
            let g = -f.gain_remove_unchecked(j);
            if g > scale * f.value().abs() && g > 0.0 {
                f.downdate(j)?;
                trace.push(TraceStep {
                    element: j,
                    gain: g,
                    added: false,
                });
                values.push(f.value());
                changed = true;
                moves += 1;
            }
        }
        if !changed || moves >= MAX_MOVES {
            break;
        }
    }
    let mut other = f.clone_detached();
    other.install(Subset::from_ids(n, &f.memo_set().complement())?);
    let extra = other.counters();
    if other.value() > f.value() {
        f.install(other.memo_set().clone());
    }
    let mut res = MaximizationResult::new(f, before);
    res.counters += extra;
    res.trace = trace;
    res.values = values;
    Ok(res)
}

/// Deterministic bidirectional greedy: grows `A` from `∅` and shrinks `B`
/// from `V` along `order`, keeping each element in both when its add gain to
/// `A` is at least its remove gain from `B`, and dropping it from both
/// otherwise. `f` carries `A`; `B` lives on a separate copy.
pub fn bidirectional_greedy(f: &mut FunctionInstance, order: &Permutation) -> Result<MaximizationResult> {
    let n = f.n();
    if order.len() != n {
        return invalid(format!("permutation has {} entries, ground set has {}", order.len(), n));
    }
    let before = f.counters();
    f.clear_memo();
    let mut b = f.clone_detached();
    b.install(Subset::full(n));
    let (mut trace, mut values) = (Vec::new(), Vec::new());
    for &j in order.order() {
        let a_gain = f.gain_add_unchecked(j);
        let b_gain = -b.gain_remove_unchecked(j);
        if a_gain >= b_gain {
            f.update(j)?;
            trace.push(TraceStep {
                element: j,
                gain: a_gain,
                added: true,
            });
        } else {
            b.downdate(j)?;
            trace.push(TraceStep {
                element: j,
                gain: b_gain,
                added: false,
            });
        }
        values.push(f.value());
    }
    let mut res = MaximizationResult::new(f, before);
    res.counters += b.counters();
    res.trace = trace;
    res.values = values;
    Ok(res)
}

/// Randomized greedy for at most `k` elements: each of `k` rounds scores
/// every remaining element, ranks them together with zero-gain dummies
/// (real elements first on ties, then by id) and adds a uniformly drawn
/// member of the top `k`; drawing a dummy leaves the set unchanged.
pub fn randomized_greedy(f: &mut FunctionInstance, k: usize, seed: u64) -> Result<MaximizationResult> {
    Constraint::Cardinality(k).validate(f.n())?;
    let before = f.counters();
    f.clear_memo();
    let mut rng = rng(seed);
    let (mut trace, mut values) = (Vec::new(), Vec::new());
    for _ in 0..k {
        let mut scored: Vec<(usize, f64)> = f
            .memo_set()
            .complement()
            .into_iter()
            .map(|j| (j, f.gain_add_unchecked(j)))
            .filter(|&(_, g)| g >= 0.0)
            .collect();
        scored.sort_by(|a, b| cmp_value(b.1, a.1).then(a.0.cmp(&b.0)));
        scored.truncate(k);
        let pick = rng.gen_range(0..k);
        if let Some(&(j, g)) = scored.get(pick) {
            f.update(j)?;
            trace.push(TraceStep {
                element: j,
                gain: g,
                added: true,
            });
        }
        values.push(f.value());
    }
    let mut res = MaximizationResult::new(f, before);
    res.trace = trace;
    res.values = values;
    res.seed = Some(seed);
    Ok(res)
}
