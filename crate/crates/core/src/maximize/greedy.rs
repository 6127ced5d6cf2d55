use std::cmp::Ordering;
use std::collections::BinaryHeap;

use rand::seq::SliceRandom;

use super::{best_singleton, gain_floor, rng, Constraint, MaximizationResult, TraceStep};
use crate::cmp_value;
use crate::error::{invalid, Result};
use crate::function::FunctionInstance;
use crate::ground::Subset;

/// Greedy: repeatedly add the feasible element with the largest gain (gain
/// per unit cost under a knapsack), stopping when nothing feasible has a
/// non-negative gain. Under a knapsack the answer is the better of the ratio
/// greedy set and the best feasible singleton.
pub fn greedy_naive(f: &mut FunctionInstance, constraint: &Constraint) -> Result<MaximizationResult> {
    constraint.validate(f.n())?;
    let before = f.counters();
    f.clear_memo();
    let (mut trace, mut values) = (Vec::new(), Vec::new());
    let mut spent = 0.0;
    loop {
        let mut best: Option<(usize, f64, f64)> = None;
        for j in 0..f.n() {
            if f.memo_set().contains(j) || spent + constraint.unit_cost(j) > constraint.capacity() {
                continue;
            }
            let g = f.gain_add_unchecked(j);
            let key = g / constraint.unit_cost(j);
            if best.is_none_or(|(_, k, _)| key > k) {
                best = Some((j, key, g));
            }
        }
        match best {
            Some((j, _, g)) if g > gain_floor(f.value()) => {
                f.update(j)?;
                spent += constraint.unit_cost(j);
                trace.push(TraceStep {
                    element: j,
                    gain: g,
                    added: true,
                });
                values.push(f.value());
            }
            _ => break,
        }
    }
    let all: Vec<usize> = (0..f.n()).collect();
    finish_knapsack(f, constraint, &all)?;
    let mut res = MaximizationResult::new(f, before);
    res.trace = trace;
    res.values = values;
    Ok(res)
}

/// Lazy (accelerated) greedy over the whole ground set; same output as
/// [`greedy_naive`] on submodular functions.
pub fn greedy_lazy(f: &mut FunctionInstance, constraint: &Constraint) -> Result<MaximizationResult> {
    let all: Vec<usize> = (0..f.n()).collect();
    greedy_lazy_on(f, constraint, &all)
}

/// Lazy-greedy heap entry: a (possibly stale) score computed in `round`.
#[derive(Clone, Copy, Debug)]
pub(crate) struct Entry {
    pub key: f64,
    pub gain: f64,
    pub id: usize,
    pub round: usize,
}

impl PartialEq for Entry {
    fn eq(&self, o: &Self) -> bool {
        self.cmp(o) == Ordering::Equal
    }
}

impl Eq for Entry {}

impl PartialOrd for Entry {
    fn partial_cmp(&self, o: &Self) -> Option<Ordering> {
        Some(self.cmp(o))
    }
}

impl Ord for Entry {
    /// Larger key first; equal keys prefer the smaller id.
    fn cmp(&self, o: &Self) -> Ordering {
        cmp_value(self.key, o.key).then(o.id.cmp(&self.id))
    }
}

/// Lazy greedy restricted to `candidates`.
///
/// Keeps stale gains as upper bounds in a max-heap. The top is accepted if
/// its gain was computed in the current round; otherwise it is recomputed and
/// accepted right away when it still beats the next bound, else reinserted.
/// A cardinality `k` larger than the candidate list is clamped.
pub fn greedy_lazy_on(
    f: &mut FunctionInstance,
    constraint: &Constraint,
    candidates: &[usize],
) -> Result<MaximizationResult> {
    let n = f.n();
    let sorted: Vec<usize> = Subset::from_ids(n, candidates)?.sorted();
    let constraint = match constraint {
        Constraint::Cardinality(k) if *k > sorted.len() && !sorted.is_empty() => Constraint::Cardinality(sorted.len()),
        c => c.clone(),
    };
    constraint.validate(n)?;
    let before = f.counters();
    f.clear_memo();

    let key_of = |g: f64, j: usize| g / constraint.unit_cost(j);
    let mut heap = BinaryHeap::with_capacity(sorted.len());
    for &j in &sorted {
        if constraint.unit_cost(j) > constraint.capacity() {
            continue;
        }
        let g = f.gain_add_unchecked(j);
        heap.push(Entry {
            key: key_of(g, j),
            gain: g,
            id: j,
            round: 0,
        });
    }
    let mut recomputes = vec![heap.len() as u64];
    let (mut trace, mut values) = (Vec::new(), Vec::new());
    let mut spent = 0.0;
    let mut round = 0usize;
    loop {
        let mut rc = 0u64;
        let accepted = loop {
            let Some(top) = heap.pop() else { break None };
            if spent + constraint.unit_cost(top.id) > constraint.capacity() {
                continue;
            }
            if top.round == round {
                break Some(top);
            }
            let g = f.gain_add_unchecked(top.id);
            rc += 1;
            let fresh = Entry {
                key: key_of(g, top.id),
                gain: g,
                id: top.id,
                round,
            };
            match heap.peek() {
                Some(next) if *next > fresh => heap.push(fresh),
                _ => break Some(fresh),
            }
        };
        if round > 0 {
            recomputes.push(rc);
        } else {
            recomputes[0] += rc;
        }
        match accepted {
            Some(e) if e.gain > gain_floor(f.value()) => {
                f.update(e.id)?;
                spent += constraint.unit_cost(e.id);
                trace.push(TraceStep {
                    element: e.id,
                    gain: e.gain,
                    added: true,
                });
                values.push(f.value());
                round += 1;
            }
            _ => break,
        }
    }
    finish_knapsack(f, &constraint, &sorted)?;
    let mut res = MaximizationResult::new(f, before);
    res.trace = trace;
    res.values = values;
    res.recomputes = recomputes;
    Ok(res)
}

/// Replaces the greedy set by the best feasible singleton when that is
/// strictly better (knapsack only).
fn finish_knapsack(f: &mut FunctionInstance, constraint: &Constraint, candidates: &[usize]) -> Result<()> {
    if !constraint.is_knapsack() {
        return Ok(());
    }
    if let Some((j, v)) = best_singleton(f, constraint, candidates)? {
        if v > f.value() - gain_floor(f.value()) {
            f.set_memo(&[j])?;
        }
    }
    Ok(())
}

/// Per-step sample size `ceil((n / k) ln(1 / eps))`.
pub fn stochastic_sample_size(n: usize, k: usize, eps: f64) -> usize {
    ((n as f64 / k as f64) * (1.0 / eps).ln()).ceil().max(1.0) as usize
}

/// Stochastic greedy: each of `k` steps scores a uniform sample (without
/// replacement) of the unselected elements and adds the sample's best.
pub fn greedy_stochastic(f: &mut FunctionInstance, k: usize, eps: f64, seed: u64) -> Result<MaximizationResult> {
    Constraint::Cardinality(k).validate(f.n())?;
    if !(eps > 0.0 && eps < 1.0) {
        return invalid(format!("epsilon must lie in (0, 1), got {}", eps));
    }
    let before = f.counters();
    f.clear_memo();
    let mut rng = rng(seed);
    let size = stochastic_sample_size(f.n(), k, eps);
    let (mut trace, mut values) = (Vec::new(), Vec::new());
    for _ in 0..k {
        let rest = f.memo_set().complement();
        let mut sample: Vec<usize> = rest.choose_multiple(&mut rng, size.min(rest.len())).copied().collect();
        sample.sort_unstable();
        let mut best: Option<(usize, f64)> = None;
        for &j in &sample {
            let g = f.gain_add_unchecked(j);
            if best.is_none_or(|(_, b)| g > b) {
                best = Some((j, g));
            }
        }
        match best {
            Some((j, g)) if g > gain_floor(f.value()) => {
                f.update(j)?;
                trace.push(TraceStep {
                    element: j,
                    gain: g,
                    added: true,
                });
                values.push(f.value());
            }
            _ => break,
        }
    }
    let mut res = MaximizationResult::new(f, before);
    res.trace = trace;
    res.values = values;
    res.seed = Some(seed);
    Ok(res)
}
