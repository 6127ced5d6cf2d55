//! Maximization under cardinality and knapsack constraints, and
//! unconstrained maximization of non-monotone functions.
//!
//! Every algorithm drives gains through a [`FunctionInstance`], so running
//! the same call on a memoized and a value-oracle instance returns the same
//! set with very different [`EvalCounters`]. Ties in every argmax go to the
//! smallest element id. Randomized algorithms take an explicit seed.

mod greedy;
mod mm;
mod nonmonotone;
mod streaming;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

pub(crate) use greedy::Entry;
pub use greedy::{greedy_lazy, greedy_lazy_on, greedy_naive, greedy_stochastic, stochastic_sample_size};
pub use mm::{minorize_maximize, SigmaRule};
pub use nonmonotone::{bidirectional_greedy, local_search_usm, randomized_greedy, DEFAULT_LOCAL_SEARCH_EPS};
pub use streaming::{distributed_greedy, sieve_streaming};

use crate::counters::EvalCounters;
use crate::error::{invalid, Result};
use crate::function::FunctionInstance;
use crate::tol_for;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub enum Constraint {
    /// At most `k` elements.
    Cardinality(usize),
    /// Total cost at most `budget`.
    Knapsack { costs: Vec<f64>, budget: f64 },
}

impl Constraint {
    pub fn validate(&self, n: usize) -> Result<()> {
        match self {
            Constraint::Cardinality(k) => {
                if *k == 0 || *k > n {
                    return invalid(format!("cardinality k = {} must lie in 1..={}", k, n));
                }
            }
            Constraint::Knapsack { costs, budget } => {
                if costs.len() != n {
                    return invalid(format!("{} costs for a ground set of {}", costs.len(), n));
                }
                if !(budget.is_finite() && *budget > 0.0) {
                    return invalid(format!("budget must be finite and positive, got {}", budget));
                }
                if let Some(c) = costs.iter().find(|c| !(c.is_finite() && **c > 0.0)) {
                    return invalid(format!("costs must be finite and positive, got {}", c));
                }
                if costs.iter().all(|c| c > budget) {
                    return invalid("no element fits within the budget");
                }
            }
        }
        Ok(())
    }

    /// Cost of a set (its size under a cardinality constraint).
    pub fn cost(&self, set: &[usize]) -> f64 {
        match self {
            Constraint::Cardinality(_) => set.len() as f64,
            Constraint::Knapsack { costs, .. } => set.iter().map(|&j| costs[j]).sum(),
        }
    }

    pub(crate) fn unit_cost(&self, j: usize) -> f64 {
        match self {
            Constraint::Cardinality(_) => 1.0,
            Constraint::Knapsack { costs, .. } => costs[j],
        }
    }

    pub(crate) fn capacity(&self) -> f64 {
        match self {
            Constraint::Cardinality(k) => *k as f64,
            Constraint::Knapsack { budget, .. } => *budget,
        }
    }

    pub(crate) fn is_knapsack(&self) -> bool {
        matches!(self, Constraint::Knapsack { .. })
    }
}

/// One accepted move: `element` entered (or left) the set and the objective
/// changed by `gain`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct TraceStep {
    pub element: usize,
    pub gain: f64,
    pub added: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct MaximizationResult {
    /// Selected ids, ascending.
    pub selected: Vec<usize>,
    pub value: f64,
    pub counters: EvalCounters,
    pub trace: Vec<TraceStep>,
    /// Objective after each accepted move or iteration.
    pub values: Vec<f64>,
    pub seed: Option<u64>,
    /// Gain recomputations per round (lazy greedy; round 0 is the initial sweep).
    pub recomputes: Vec<u64>,
}

impl MaximizationResult {
    fn new(f: &FunctionInstance, before: EvalCounters) -> Self {
        MaximizationResult {
            selected: f.memo_set().sorted(),
            value: f.value(),
            counters: f.counters() - before,
            trace: Vec::new(),
            values: Vec::new(),
            seed: None,
            recomputes: Vec::new(),
        }
    }
}

/// Gains at or below this are not worth accepting.
pub(crate) fn gain_floor(value: f64) -> f64 {
    -tol_for(value)
}

pub(crate) fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Best singleton `argmax f({j})` among `candidates` with `cost <= budget`.
pub(crate) fn best_singleton(
    f: &FunctionInstance,
    constraint: &Constraint,
    candidates: &[usize],
) -> Result<Option<(usize, f64)>> {
    let mut best: Option<(usize, f64)> = None;
    for &j in candidates {
        if constraint.unit_cost(j) > constraint.capacity() {
            continue;
        }
        let v = f.gain_empty(j)?;
        if best.is_none_or(|(_, b)| v > b) {
            best = Some((j, v));
        }
    }
    Ok(best)
}
