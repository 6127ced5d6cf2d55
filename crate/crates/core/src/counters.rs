use serde::{Deserialize, Serialize};
use std::ops::{Add, AddAssign, Sub};

/// Work performed against one function instance.
///
/// `oracle_evals` counts from-scratch evaluations (the value-oracle cost),
/// `gain_evals` statistic-based gains, `memo_updates` every update *and*
/// downdate (with `memo_downdates` as the removal share), `memo_rebuilds`
/// from-scratch statistic builds. `scalar_ops` is the number of scalar
/// entries touched, as reported by the function class.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct EvalCounters {
    pub oracle_evals: u64,
    pub gain_evals: u64,
    pub memo_updates: u64,
    pub memo_downdates: u64,
    pub memo_rebuilds: u64,
    pub scalar_ops: u64,
}

impl Add for EvalCounters {
    type Output = EvalCounters;

    fn add(self, o: EvalCounters) -> EvalCounters {
        EvalCounters {
            oracle_evals: self.oracle_evals + o.oracle_evals,
            gain_evals: self.gain_evals + o.gain_evals,
            memo_updates: self.memo_updates + o.memo_updates,
            memo_downdates: self.memo_downdates + o.memo_downdates,
            memo_rebuilds: self.memo_rebuilds + o.memo_rebuilds,
            scalar_ops: self.scalar_ops + o.scalar_ops,
        }
    }
}

impl AddAssign for EvalCounters {
    fn add_assign(&mut self, o: EvalCounters) {
        *self = *self + o;
    }
}

/// Saturating difference, for measuring the work of one call.
impl Sub for EvalCounters {
    type Output = EvalCounters;

    fn sub(self, o: EvalCounters) -> EvalCounters {
        EvalCounters {
            oracle_evals: self.oracle_evals.saturating_sub(o.oracle_evals),
            gain_evals: self.gain_evals.saturating_sub(o.gain_evals),
            memo_updates: self.memo_updates.saturating_sub(o.memo_updates),
            memo_downdates: self.memo_downdates.saturating_sub(o.memo_downdates),
            memo_rebuilds: self.memo_rebuilds.saturating_sub(o.memo_rebuilds),
            scalar_ops: self.scalar_ops.saturating_sub(o.scalar_ops),
        }
    }
}
