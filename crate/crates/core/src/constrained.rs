//! Cover and knapsack problems with submodular costs, and minimization of
//! differences of submodular functions, solved by iterating modular bounds.

use std::collections::{BinaryHeap, HashSet};

use serde::{Deserialize, Serialize};

use crate::bounds::{subgradient_at, supergradient_grow, supergradient_shrink};
use crate::counters::EvalCounters;
use crate::error::{invalid, Result};
use crate::function::FunctionInstance;
use crate::ground::{Permutation, Subset};
use crate::maximize::{greedy_lazy, local_search_usm, Constraint, Entry, DEFAULT_LOCAL_SEARCH_EPS};
use crate::minimize::{min_norm_point, MnpOptions};
use crate::modular::ModularFunction;
use crate::tol_for;
use crate::zoo::plus_modular;

pub const DEFAULT_MAX_ITERATIONS: usize = 50;

/// Floor applied to modular costs so ratio and knapsack steps stay defined.
/// Raising a cost only tightens the budget, so feasibility is preserved.
const MIN_COST: f64 = 1e-12;

#[derive(Clone, Debug, Serialize)]
pub struct CoverResult {
    pub selected: Vec<usize>,
    /// `sum_{j in X} cost_j` with the unclamped costs.
    pub cost: f64,
    /// `g(X)`.
    pub coverage: f64,
    pub counters: EvalCounters,
}

/// Cost-ratio greedy for `min cost(X)` subject to `g(X) >= c`: lazily add
/// the element with the largest `g(j | X) / cost_j` among positive gains
/// until the target is met.
pub fn submodular_set_cover(g: &mut FunctionInstance, cost: &ModularFunction, c: f64) -> Result<CoverResult> {
    let n = g.n();
    if cost.len() != n {
        return invalid(format!("{} costs for a ground set of {}", cost.len(), n));
    }
    if !c.is_finite() {
        return invalid("cover target must be finite");
    }
    let before = g.counters();
    g.install(Subset::full(n));
    let total = g.value();
    if c > total + tol_for(total) {
        return invalid(format!("cover target {} exceeds g(V) = {}", c, total));
    }
    g.clear_memo();
    let unit = |j: usize| cost.weights[j].max(MIN_COST);
    let target = c - tol_for(c);
    let mut heap = BinaryHeap::new();
    if g.value() < target {
        for j in 0..n {
            let gain = g.gain_add_unchecked(j);
            if gain > 0.0 {
                heap.push(Entry {
                    key: gain / unit(j),
                    gain,
                    id: j,
                    round: 0,
                });
            }
        }
    }
    let mut round = 0;
    while g.value() < target {
        let accepted = loop {
            let Some(top) = heap.pop() else { break None };
            if top.round == round {
                break Some(top);
            }
            let gain = g.gain_add_unchecked(top.id);
            if gain <= 0.0 {
                continue;
            }
            let fresh = Entry {
                key: gain / unit(top.id),
                gain,
                id: top.id,
                round,
            };
            match heap.peek() {
                Some(next) if *next > fresh => heap.push(fresh),
                _ => break Some(fresh),
            }
        };
        let Some(e) = accepted else { break };
        g.update(e.id)?;
        round += 1;
    }
    let selected = g.memo_set().sorted();
    Ok(CoverResult {
        cost: selected.iter().map(|&j| cost.weights[j]).sum(),
        coverage: g.value(),
        selected,
        counters: g.counters() - before,
    })
}

/// One candidate visited by an iterative solver.
#[derive(Clone, Debug, Serialize)]
pub struct Iterate {
    pub selected: Vec<usize>,
    pub f_value: f64,
    pub g_value: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct ScResult {
    pub selected: Vec<usize>,
    pub f_value: f64,
    pub g_value: f64,
    pub iterations: usize,
    /// Stopped on a repeated set rather than the iteration cap.
    pub converged: bool,
    /// Best objective after each iteration.
    pub values: Vec<f64>,
    /// Every candidate solved for, in order.
    pub iterates: Vec<Iterate>,
    pub counters: EvalCounters,
}

fn values_at(f: &mut FunctionInstance, g: &mut FunctionInstance, y: &[usize]) -> Result<(f64, f64)> {
    f.set_memo(y)?;
    g.set_memo(y)?;
    Ok((f.value(), g.value()))
}

fn check_pair(f: &FunctionInstance, g: &FunctionInstance) -> Result<()> {
    if f.n() != g.n() {
        return invalid(format!("f and g disagree on the ground set: {} vs {}", f.n(), g.n()));
    }
    Ok(())
}

/// `min f(X)` subject to `g(X) >= c`: replace `f` by each of its modular
/// upper bounds at the current set, solve the resulting set cover, move to
/// the cheaper cover; stop when a set repeats.
pub fn scsc_solve(
    f: &mut FunctionInstance,
    g: &mut FunctionInstance,
    c: f64,
    max_iterations: usize,
) -> Result<ScResult> {
    check_pair(f, g)?;
    let n = f.n();
    let (fb, gb) = (f.counters(), g.counters());
    let mut x = Subset::empty(n);
    let mut seen: HashSet<Vec<usize>> = HashSet::new();
    seen.insert(Vec::new());
    let mut best: Option<Iterate> = None;
    let (mut values, mut iterates) = (Vec::new(), Vec::new());
    let mut converged = false;
    let mut iterations = 0;
    while iterations < max_iterations {
        iterations += 1;
        let bounds = [supergradient_grow(f, &x)?, supergradient_shrink(f, &x)?];
        let mut step: Option<Iterate> = None;
        for m in &bounds {
            let cover = submodular_set_cover(g, m, c)?;
            let (fy, gy) = values_at(f, g, &cover.selected)?;
            let it = Iterate {
                selected: cover.selected,
                f_value: fy,
                g_value: gy,
            };
            iterates.push(it.clone());
            if step.as_ref().is_none_or(|s| fy < s.f_value) {
                step = Some(it);
            }
        }
        let step = step.expect("two bounds");
        if best
            .as_ref()
            .is_none_or(|b| step.f_value < b.f_value - tol_for(b.f_value))
        {
            best = Some(step.clone());
        }
        values.push(best.as_ref().map_or(0.0, |b| b.f_value));
        if !seen.insert(step.selected.clone()) {
            converged = true;
            break;
        }
        x = Subset::from_ids(n, &step.selected)?;
    }
    let best = best.expect("at least one iteration");
    Ok(ScResult {
        selected: best.selected,
        f_value: best.f_value,
        g_value: best.g_value,
        iterations,
        converged,
        values,
        iterates,
        counters: (f.counters() - fb) + (g.counters() - gb),
    })
}

/// `max g(X)` subject to `f(X) <= b`: replace `f` by each of its modular
/// upper bounds at the current set, run knapsack greedy on `g` under that
/// bound, keep the better; every iterate satisfies `f(X) <= b` because the
/// bound dominates `f`.
pub fn scsk_solve(
    f: &mut FunctionInstance,
    g: &mut FunctionInstance,
    b: f64,
    max_iterations: usize,
) -> Result<ScResult> {
    check_pair(f, g)?;
    if !(b.is_finite() && b >= 0.0) {
        return invalid(format!("budget must be finite and non-negative, got {}", b));
    }
    let n = f.n();
    let (fb, gb) = (f.counters(), g.counters());
    let mut x = Subset::empty(n);
    let mut seen: HashSet<Vec<usize>> = HashSet::new();
    seen.insert(Vec::new());
    let mut best = Iterate {
        selected: Vec::new(),
        f_value: 0.0,
        g_value: 0.0,
    };
    let (mut values, mut iterates) = (Vec::new(), Vec::new());
    let mut converged = false;
    let mut iterations = 0;
    while iterations < max_iterations {
        iterations += 1;
        let bounds = [supergradient_grow(f, &x)?, supergradient_shrink(f, &x)?];
        let mut step: Option<Iterate> = None;
        for m in &bounds {
            let budget = b - m.offset;
            let costs: Vec<f64> = m.weights.iter().map(|w| w.max(MIN_COST)).collect();
            let y = if costs.iter().any(|&c| c <= budget) {
                let k = Constraint::Knapsack { costs, budget };
                greedy_lazy(g, &k)?.selected
            } else {
                Vec::new()
            };
            let (fy, gy) = values_at(f, g, &y)?;
            let it = Iterate {
                selected: y,
                f_value: fy,
                g_value: gy,
            };
            iterates.push(it.clone());
            if step.as_ref().is_none_or(|s| gy > s.g_value) {
                step = Some(it);
            }
        }
        let step = step.expect("two bounds");
        if step.g_value > best.g_value + tol_for(best.g_value) {
            best = step.clone();
        }
        values.push(best.g_value);
        if !seen.insert(step.selected.clone()) {
            converged = true;
            break;
        }
        x = Subset::from_ids(n, &step.selected)?;
    }
    Ok(ScResult {
        selected: best.selected,
        f_value: best.f_value,
        g_value: best.g_value,
        iterations,
        converged,
        values,
        iterates,
        counters: (f.counters() - fb) + (g.counters() - gb),
    })
}

/// Which side(s) of `f - g` are replaced by modular bounds.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum DsVariant {
    /// `g` by a lower bound; the submodular `f - h` is minimized exactly.
    SubSup,
    /// `f` by an upper bound; `g - m` is maximized by local search.
    SupSub,
    /// Both; the modular difference is minimized exactly.
    ModMod,
}

#[derive(Clone, Debug, Serialize)]
pub struct DsResult {
    pub selected: Vec<usize>,
    /// `f(X) - g(X)`.
    pub value: f64,
    pub f_value: f64,
    pub g_value: f64,
    pub iterations: usize,
    /// Stopped because no candidate improved, not because of the cap.
    pub converged: bool,
    /// Objective after `∅` and after each accepted iteration.
    pub values: Vec<f64>,
    pub counters: EvalCounters,
}

fn negated(m: &ModularFunction) -> ModularFunction {
    ModularFunction::new(-m.offset, m.weights.iter().map(|w| -w).collect())
}

/// `min f(X) - g(X)` from `X = ∅`, replacing one or both functions by
/// modular bounds tight at the current set. Moves only on strict
/// improvement, so the objective trace never increases.
pub fn ds_minimize(
    f: &mut FunctionInstance,
    g: &mut FunctionInstance,
    variant: DsVariant,
    max_iterations: usize,
) -> Result<DsResult> {
    check_pair(f, g)?;
    let n = f.n();
    let (fb, gb) = (f.counters(), g.counters());
    let mut side = EvalCounters::default();
    let tie = Permutation::identity(n);
    let mut x = Subset::empty(n);
    let mut current = (0.0, 0.0, 0.0);
    let mut values = vec![0.0];
    let mut converged = false;
    let mut iterations = 0;
    while iterations < max_iterations {
        iterations += 1;
        let candidates: Vec<Vec<usize>> = match variant {
            DsVariant::SubSup => {
                let h = subgradient_at(g, &x, &tie)?;
                let mut inner = plus_modular(f, &negated(&h))?;
                let r = min_norm_point(&mut inner, &MnpOptions::default())?;
                side += inner.counters();
                vec![r.minimizer_min]
            }
            DsVariant::SupSub => {
                let mut out = Vec::new();
                for m in [supergradient_grow(f, &x)?, supergradient_shrink(f, &x)?] {
                    let mut inner = plus_modular(g, &negated(&m))?;
                    let r = local_search_usm(&mut inner, DEFAULT_LOCAL_SEARCH_EPS)?;
                    side += inner.counters();
                    out.push(r.selected);
                }
                out
            }
            DsVariant::ModMod => {
                let h = subgradient_at(g, &x, &tie)?;
                let mut out = Vec::new();
                for m in [supergradient_grow(f, &x)?, supergradient_shrink(f, &x)?] {
                    out.push((0..n).filter(|&j| m.weights[j] - h.weights[j] < 0.0).collect());
                }
                out
            }
        };
        let mut step: Option<(Vec<usize>, (f64, f64, f64))> = None;
        for y in candidates {
            let (fy, gy) = values_at(f, g, &y)?;
            let v = fy - gy;
            if step.as_ref().is_none_or(|(_, s)| v < s.0) {
                step = Some((y, (v, fy, gy)));
            }
        }
        let (y, s) = step.expect("at least one candidate");
        if s.0 < current.0 - tol_for(current.0) {
            x = Subset::from_ids(n, &y)?;
            current = s;
            values.push(s.0);
        } else {
            converged = true;
            break;
        }
    }
    Ok(DsResult {
        selected: x.sorted(),
        value: current.0,
        f_value: current.1,
        g_value: current.2,
        iterations,
        converged,
        values,
        counters: (f.counters() - fb) + (g.counters() - gb) + side,
    })
}
