use std::collections::BTreeMap;

use rand::seq::SliceRandom;

use super::{gain_floor, greedy_lazy_on, rng, Constraint, MaximizationResult, TraceStep};
use crate::counters::EvalCounters;
use crate::error::{invalid, Result};
use crate::function::FunctionInstance;
use crate::ground::Subset;

/// Sieve streaming over `stream` (each element seen once) with at most `k`
/// elements.
///
/// Keeps one detached copy of `f` per live threshold `v = (1 + eps)^i` with
/// `m <= v <= 2 k m`, `m` the largest singleton value seen so far. Copies
/// whose threshold falls below `m` are dropped. An element joins the set of
/// threshold `v` when that set has room and its gain is at least
/// `(v / 2 - f(S_v)) / (k - |S_v|)`. Returns the best set over thresholds.
pub fn sieve_streaming(f: &FunctionInstance, stream: &[usize], k: usize, eps: f64) -> Result<MaximizationResult> {
    let n = f.n();
    Constraint::Cardinality(k).validate(n)?;
    if !(eps > 0.0 && eps < 1.0) {
        return invalid(format!("epsilon must lie in (0, 1), got {}", eps));
    }
    Subset::from_ids(n, stream)?;
    let probe = f.fresh();
    let base = (1.0 + eps).ln();
    let mut sieves: BTreeMap<i64, (FunctionInstance, Vec<TraceStep>)> = BTreeMap::new();
    let mut retired = EvalCounters::default();
    let mut best_dropped: Option<(Vec<usize>, f64, Vec<TraceStep>)> = None;
    let mut m = 0.0f64;

    for &e in stream {
        m = m.max(probe.gain_empty(e)?);
        if m <= 0.0 {
            continue;
        }
        let lo = (m.ln() / base).ceil() as i64;
        let hi = ((2.0 * k as f64 * m).ln() / base).floor() as i64;
        let stale: Vec<i64> = sieves.range(..lo).map(|(&i, _)| i).collect();
        for i in stale {
            let (inst, trace) = sieves.remove(&i).expect("live threshold");
            retired += inst.counters();
            if best_dropped.as_ref().is_none_or(|(_, v, _)| inst.value() > *v) {
                best_dropped = Some((inst.memo_set().sorted(), inst.value(), trace));
            }
        }
        for i in lo..=hi {
            sieves.entry(i).or_insert_with(|| (f.fresh(), Vec::new()));
        }
        for (&i, (inst, trace)) in sieves.iter_mut() {
            let size = inst.memo_set().len();
            if size >= k {
                continue;
            }
            let v = (i as f64 * base).exp();
            let g = inst.gain_add_unchecked(e);
            if g >= (v / 2.0 - inst.value()) / (k - size) as f64 && g > gain_floor(inst.value()) {
                inst.update(e)?;
                trace.push(TraceStep {
                    element: e,
                    gain: g,
                    added: true,
                });
            }
        }
    }

    let mut counters = probe.counters() + retired;
    let mut best: (Vec<usize>, f64, Vec<TraceStep>) = best_dropped.unwrap_or((Vec::new(), 0.0, Vec::new()));
    for (inst, trace) in sieves.values() {
        counters += inst.counters();
        if inst.value() > best.1 {
            best = (inst.memo_set().sorted(), inst.value(), trace.clone());
        }
    }
    let values = best
        .2
        .iter()
        .scan(0.0, |acc, s| {
            *acc += s.gain;
            Some(*acc)
        })
        .collect();
    Ok(MaximizationResult {
        selected: best.0,
        value: best.1,
        counters,
        trace: best.2,
        values,
        seed: None,
        recomputes: Vec::new(),
    })
}

/// Two-round distributed greedy: a seeded random equal partition into
/// `machines` parts, lazy greedy for `k` on each part (each on its own
/// copy of `f`), then lazy greedy for `k` over the union of the part
/// solutions. Returns the better of the second round and the best part.
pub fn distributed_greedy(f: &FunctionInstance, k: usize, machines: usize, seed: u64) -> Result<MaximizationResult> {
    let n = f.n();
    Constraint::Cardinality(k).validate(n)?;
    if machines == 0 || machines > n {
        return invalid(format!("machine count must lie in 1..={}, got {}", n, machines));
    }
    let mut ids: Vec<usize> = (0..n).collect();
    ids.shuffle(&mut rng(seed));
    let mut counters = EvalCounters::default();
    let mut union = Vec::new();
    let mut best_part: Option<MaximizationResult> = None;
    for p in 0..machines {
        let part = &ids[p * n / machines..(p + 1) * n / machines];
        let mut local = f.fresh();
        let r = greedy_lazy_on(&mut local, &Constraint::Cardinality(k), part)?;
        counters += r.counters;
        union.extend_from_slice(&r.selected);
        if best_part.as_ref().is_none_or(|b| r.value > b.value) {
            best_part = Some(r);
        }
    }
    let mut merged = f.fresh();
    let second = greedy_lazy_on(&mut merged, &Constraint::Cardinality(k), &union)?;
    counters += second.counters;
    let best_part = best_part.expect("at least one machine");
    let mut res = if best_part.value > second.value {
        best_part
    } else {
        second
    };
    res.counters = counters;
    res.seed = Some(seed);
    Ok(res)
}
