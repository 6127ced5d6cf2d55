use std::cell::Cell;

use crate::counters::EvalCounters;
use crate::error::{invalid, Result, SubmodError};
use crate::ground::Subset;

/// Structural facts about a function class (per instance where it depends on data).
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ClassTraits {
    pub monotone: bool,
    pub submodular: bool,
}

/// A set function together with its memoized statistic `p_X`.
///
/// Implementors hold immutable problem data (shared behind an `Arc` so
/// clones are cheap) plus a statistic describing some set `X` owned by the
/// caller. The caller ([`FunctionInstance`]) guarantees the preconditions:
/// `gain_add` is only called with `j` outside `set`, `gain_remove` with `j`
/// inside, and `update`/`downdate` receive the set *after* the change.
pub trait MemoFunction: Send {
    fn name(&self) -> &'static str;
    fn n(&self) -> usize;
    fn traits(&self) -> ClassTraits;

    /// From-scratch `f(set)`, ignoring the statistic.
    fn evaluate(&self, set: &[usize]) -> f64;
    /// Scalar entries touched by one `evaluate` of a set of size `len`.
    fn eval_cost(&self, len: usize) -> u64;

    /// `f(j | ∅)` from the (implicit) empty statistic.
    fn gain_empty(&self, j: usize) -> f64 {
        self.evaluate(&[j])
    }
    /// `f(set + j) - f(set)` from the statistic.
    fn gain_add(&self, j: usize, set: &Subset) -> f64;
    /// `f(set) - f(set - j)` from the statistic.
    fn gain_remove(&self, j: usize, set: &Subset) -> f64;
    /// Scalar entries touched by one gain at `j`.
    fn gain_cost(&self, j: usize) -> u64;
    /// Scalar entries touched by one update or downdate at `j`.
    fn update_cost(&self, j: usize) -> u64 {
        self.gain_cost(j)
    }
    /// `f(set)` read off the statistic.
    fn value(&self, set: &Subset) -> f64;

    fn update(&mut self, j: usize, set: &Subset);
    fn downdate(&mut self, j: usize, set: &Subset);
    fn rebuild(&mut self, set: &Subset);

    /// The statistic flattened to numbers, for consistency checks.
    fn statistic(&self) -> Vec<f64>;
    /// Allowed deviation between a live and a rebuilt statistic.
    fn statistic_tolerance(&self) -> f64 {
        1e-9
    }
    fn box_clone(&self) -> Box<dyn MemoFunction>;
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
pub enum OracleMode {
    /// Precomputational model: gains come from the statistic.
    Memoized,
    /// Value-oracle model: every gain costs a from-scratch evaluation (`p_X = f(X)` only).
    ValueOracle,
}

/// Result of rebuilding the statistic from scratch and comparing.
#[derive(Clone, Debug, PartialEq)]
pub struct StatisticReport {
    pub max_deviation: f64,
    pub entries: usize,
    pub tolerance: f64,
}

impl StatisticReport {
    pub fn consistent(&self) -> bool {
        self.max_deviation <= self.tolerance
    }
}

#[derive(Clone, Copy, Debug)]
struct Probe {
    element: usize,
    adding: bool,
    value: f64,
}

/// A function class plus its live memo state and counters.
///
/// Gains are read-only; the memo set changes only through
/// [`update`](Self::update), [`downdate`](Self::downdate) and
/// [`set_memo`](Self::set_memo). Counters live in cells so that read-only
/// probes can still be counted.
pub struct FunctionInstance {
    func: Box<dyn MemoFunction>,
    memo: Subset,
    mode: OracleMode,
    counters: Cell<EvalCounters>,
    vo_value: f64,
    vo_probe: Cell<Option<Probe>>,
}

impl std::fmt::Debug for FunctionInstance {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("FunctionInstance")
            .field("class", &self.func.name())
            .field("n", &self.n())
            .field("mode", &self.mode)
            .field("memo", &self.memo.members())
            .field("counters", &self.counters.get())
            .finish()
    }
}

impl FunctionInstance {
    /// Wraps a class with an empty memo set.
    pub fn new(mut func: Box<dyn MemoFunction>) -> Self {
        let n = func.n();
        let memo = Subset::empty(n);
        func.rebuild(&memo);
        FunctionInstance {
            func,
            memo,
            mode: OracleMode::Memoized,
            counters: Cell::new(EvalCounters::default()),
            vo_value: 0.0,
            vo_probe: Cell::new(None),
        }
    }

    pub fn n(&self) -> usize {
        self.func.n()
    }

    pub fn class_name(&self) -> &'static str {
        self.func.name()
    }

    pub fn traits(&self) -> ClassTraits {
        self.func.traits()
    }

    pub fn mode(&self) -> OracleMode {
        self.mode
    }

    pub fn memo_set(&self) -> &Subset {
        &self.memo
    }

    pub fn counters(&self) -> EvalCounters {
        self.counters.get()
    }

    pub fn reset_counters(&self) {
        self.counters.set(EvalCounters::default());
    }

    fn bump(&self, f: impl FnOnce(&mut EvalCounters)) {
        let mut c = self.counters.get();
        f(&mut c);
        self.counters.set(c);
    }

    fn oracle(&self, set: &[usize]) -> f64 {
        self.bump(|c| {
            c.oracle_evals += 1;
            c.scalar_ops += self.func.eval_cost(set.len());
        });
        if set.is_empty() {
            return 0.0;
        }
        self.func.evaluate(set)
    }

    fn check_id(&self, j: usize) -> Result<()> {
        if j >= self.n() {
            return invalid(format!(
                "element {} out of range for ground set of size {}",
                j,
                self.n()
            ));
        }
        Ok(())
    }

    /// From-scratch `f(set)`. Counts one oracle evaluation; memo state is untouched.
    pub fn evaluate(&self, set: &[usize]) -> Result<f64> {
        let mut sorted = set.to_vec();
        sorted.sort_unstable();
        for w in sorted.windows(2) {
            if w[0] == w[1] {
                return invalid(format!("duplicate element {}", w[0]));
            }
        }
        if let Some(&last) = sorted.last() {
            self.check_id(last)?;
        }
        Ok(self.oracle(set))
    }

    /// `f(X)` for the current memo set, read from the statistic (or the cached
    /// value in value-oracle mode). Not counted.
    pub fn value(&self) -> f64 {
        match self.mode {
            OracleMode::Memoized => {
                if self.memo.is_empty() {
                    0.0
                } else {
                    self.func.value(&self.memo)
                }
            }
            OracleMode::ValueOracle => self.vo_value,
        }
    }

    /// `f(j | X)` for `j` outside the memo set.
    pub fn gain_add(&self, j: usize) -> Result<f64> {
        self.check_id(j)?;
        if self.memo.contains(j) {
            return Err(SubmodError::Precondition(format!(
                "gain_add: element {} already in X",
                j
            )));
        }
        Ok(self.gain_add_unchecked(j))
    }

    pub(crate) fn gain_add_unchecked(&self, j: usize) -> f64 {
        match self.mode {
            OracleMode::Memoized => {
                self.bump(|c| {
                    c.gain_evals += 1;
                    c.scalar_ops += self.func.gain_cost(j);
                });
                self.func.gain_add(j, &self.memo)
            }
            OracleMode::ValueOracle => {
                let mut set = self.memo.members().to_vec();
                set.push(j);
                let v = self.oracle(&set);
                self.vo_probe.set(Some(Probe {
                    element: j,
                    adding: true,
                    value: v,
                }));
                v - self.vo_value
            }
        }
    }

    /// `f(j | X \ j)` for `j` inside the memo set.
    pub fn gain_remove(&self, j: usize) -> Result<f64> {
        self.check_id(j)?;
        if !self.memo.contains(j) {
            return Err(SubmodError::Precondition(format!(
                "gain_remove: element {} not in X",
                j
            )));
        }
        Ok(self.gain_remove_unchecked(j))
    }

    pub(crate) fn gain_remove_unchecked(&self, j: usize) -> f64 {
        match self.mode {
            OracleMode::Memoized => {
                self.bump(|c| {
                    c.gain_evals += 1;
                    c.scalar_ops += self.func.gain_cost(j);
                });
                self.func.gain_remove(j, &self.memo)
            }
            OracleMode::ValueOracle => {
                let set: Vec<usize> = self.memo.members().iter().copied().filter(|&m| m != j).collect();
                let v = self.oracle(&set);
                self.vo_probe.set(Some(Probe {
                    element: j,
                    adding: false,
                    value: v,
                }));
                self.vo_value - v
            }
        }
    }

    /// `f(j | ∅) = f({j})`, independent of the memo set.
    pub fn gain_empty(&self, j: usize) -> Result<f64> {
        self.check_id(j)?;
        Ok(match self.mode {
            OracleMode::Memoized => {
                self.bump(|c| {
                    c.gain_evals += 1;
                    c.scalar_ops += self.func.gain_cost(j);
                });
                self.func.gain_empty(j)
            }
            OracleMode::ValueOracle => self.oracle(&[j]),
        })
    }

    /// `X <- X + j`, updating the statistic incrementally.
    pub fn update(&mut self, j: usize) -> Result<()> {
        self.check_id(j)?;
        if self.memo.contains(j) {
            return Err(SubmodError::Precondition(format!("update: element {} already in X", j)));
        }
        match self.mode {
            OracleMode::Memoized => {
                self.memo.insert(j);
                self.bump(|c| {
                    c.memo_updates += 1;
                    c.scalar_ops += self.func.update_cost(j);
                });
                self.func.update(j, &self.memo);
            }
            OracleMode::ValueOracle => {
                let cached = match self.vo_probe.get() {
                    Some(p) if p.element == j && p.adding => Some(p.value),
                    _ => None,
                };
                let v = match cached {
                    Some(v) => v,
                    None => {
                        let mut set = self.memo.members().to_vec();
                        set.push(j);
                        self.oracle(&set)
                    }
                };
                self.memo.insert(j);
                self.vo_value = v;
                self.vo_probe.set(None);
            }
        }
        Ok(())
    }

    /// `X <- X \ j`, downdating the statistic incrementally.
    pub fn downdate(&mut self, j: usize) -> Result<()> {
        self.check_id(j)?;
        if !self.memo.contains(j) {
            return Err(SubmodError::Precondition(format!("downdate: element {} not in X", j)));
        }
        match self.mode {
            OracleMode::Memoized => {
                self.memo.remove(j);
                self.bump(|c| {
                    c.memo_updates += 1;
                    c.memo_downdates += 1;
                    c.scalar_ops += self.func.update_cost(j);
                });
                self.func.downdate(j, &self.memo);
            }
            OracleMode::ValueOracle => {
                let cached = match self.vo_probe.get() {
                    Some(p) if p.element == j && !p.adding => Some(p.value),
                    _ => None,
                };
                self.memo.remove(j);
                self.vo_value = match cached {
                    Some(v) => v,
                    None => self.oracle(self.memo.members()),
                };
                self.vo_probe.set(None);
            }
        }
        Ok(())
    }

    /// Replaces the memo set and rebuilds the statistic from scratch.
    pub fn set_memo(&mut self, set: &[usize]) -> Result<()> {
        let memo = Subset::from_ids(self.n(), set)?;
        self.install(memo);
        Ok(())
    }

    pub(crate) fn install(&mut self, memo: Subset) {
        self.memo = memo;
        self.vo_probe.set(None);
        match self.mode {
            OracleMode::Memoized => {
                self.bump(|c| {
                    c.memo_rebuilds += 1;
                    c.scalar_ops += self.func.eval_cost(self.memo.len());
                });
                self.func.rebuild(&self.memo);
            }
            OracleMode::ValueOracle => {
                self.vo_value = if self.memo.is_empty() {
                    0.0
                } else {
                    self.oracle(self.memo.members())
                };
            }
        }
    }

    /// Resets the memo set to `∅`.
    pub fn clear_memo(&mut self) {
        self.install(Subset::empty(self.n()));
    }

    /// An independent copy: shares the immutable data, owns a copy of the
    /// current memo state, starts with zeroed counters.
    pub fn clone_detached(&self) -> Self {
        FunctionInstance {
            func: self.func.box_clone(),
            memo: self.memo.clone(),
            mode: self.mode,
            counters: Cell::new(EvalCounters::default()),
            vo_value: self.vo_value,
            vo_probe: Cell::new(None),
        }
    }

    /// The same function behind the value-oracle model: `p_X = f(X)` only.
    /// Keeps the current memo set (one oracle call to cache `f(X)` when non-empty).
    pub fn to_value_oracle(&self) -> Self {
        let mut func = self.func.box_clone();
        let n = func.n();
        func.rebuild(&Subset::empty(n));
        let mut inst = FunctionInstance {
            func,
            memo: Subset::empty(n),
            mode: OracleMode::ValueOracle,
            counters: Cell::new(EvalCounters::default()),
            vo_value: 0.0,
            vo_probe: Cell::new(None),
        };
        inst.install(self.memo.clone());
        inst
    }

    /// The memoized counterpart of this instance, with an empty memo set.
    pub fn to_memoized(&self) -> Self {
        let inst = FunctionInstance::new(self.func.box_clone());
        inst.counters.set(EvalCounters::default());
        inst
    }

    /// Same mode, fresh empty memo set, zeroed counters.
    pub fn fresh(&self) -> Self {
        match self.mode {
            OracleMode::Memoized => self.to_memoized(),
            OracleMode::ValueOracle => {
                let f = self.to_memoized().to_value_oracle();
                f.reset_counters();
                f
            }
        }
    }

    pub(crate) fn box_function(&self) -> Box<dyn MemoFunction> {
        self.func.box_clone()
    }

    /// Rebuilds the statistic of the current memo set on the side and reports
    /// the largest deviation `|live - rebuilt| / max(1, |live|, |rebuilt|)`.
    /// Neither the live state nor the counters change.
    pub fn verify_statistic(&self) -> StatisticReport {
        match self.mode {
            OracleMode::Memoized => {
                let live = self.func.statistic();
                let mut fresh = self.func.box_clone();
                fresh.rebuild(&self.memo);
                let rebuilt = fresh.statistic();
                let mut dev = if live.len() == rebuilt.len() {
                    0.0
                } else {
                    f64::INFINITY
                };
                for (a, b) in live.iter().zip(&rebuilt) {
                    dev = f64::max(dev, relative_deviation(*a, *b));
                }
                StatisticReport {
                    max_deviation: dev,
                    entries: live.len(),
                    tolerance: self.func.statistic_tolerance(),
                }
            }
            OracleMode::ValueOracle => {
                let truth = if self.memo.is_empty() {
                    0.0
                } else {
                    self.func.evaluate(self.memo.members())
                };
                StatisticReport {
                    max_deviation: relative_deviation(self.vo_value, truth),
                    entries: 1,
                    tolerance: self.func.statistic_tolerance(),
                }
            }
        }
    }

    /// Statistic size in scalars (0 in value-oracle mode).
    pub fn statistic_len(&self) -> usize {
        match self.mode {
            OracleMode::Memoized => self.func.statistic().len(),
            OracleMode::ValueOracle => 0,
        }
    }
}

pub(crate) fn relative_deviation(a: f64, b: f64) -> f64 {
    if a == b {
        return 0.0;
    }
    if !a.is_finite() || !b.is_finite() {
        return f64::INFINITY;
    }
    (a - b).abs() / a.abs().max(b.abs()).max(1.0)
}
