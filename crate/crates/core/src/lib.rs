//! Submodular optimization in the precomputational model.
//!
//! Every function class in [`zoo`] keeps a memoized statistic describing the
//! current set `X`, from which marginal gains `f(j | X)` are read cheaply and
//! which is updated (or downdated) in place as elements enter (or leave) `X`.
//! The algorithms in [`bounds`], [`maximize`], [`minimize`] and
//! [`constrained`] only ever touch a function through that contract, so the
//! same code runs against a memoized instance or a plain value oracle
//! ([`FunctionInstance::to_value_oracle`]) and the [`EvalCounters`] show the
//! difference.

pub mod bounds;
pub mod constrained;
mod counters;
mod error;
mod function;
mod ground;
pub mod maximize;
pub mod minimize;
mod modular;
pub mod zoo;

pub use counters::EvalCounters;
pub use error::{Result, SubmodError};
pub use function::{ClassTraits, FunctionInstance, MemoFunction, OracleMode, StatisticReport};
pub use ground::{GroundSet, Permutation, Subset};
pub use modular::ModularFunction;
pub use zoo::{make_function, Concave, FunctionSpec};

/// Relative tolerance used for every float comparison in the crate.
pub const REL_TOL: f64 = 1e-9;
/// Absolute floor paired with [`REL_TOL`].
pub const ABS_TOL: f64 = 1e-12;

/// Total order on values that treats `-0.0` and `0.0` as equal (an empty
/// `f64` sum is `-0.0`), so zero-gain ties fall through to the id rule.
pub(crate) fn cmp_value(a: f64, b: f64) -> std::cmp::Ordering {
    (a + 0.0).total_cmp(&(b + 0.0))
}

/// `|a - b| <= REL_TOL * max(|a|, |b|) + ABS_TOL`.
pub fn approx_eq(a: f64, b: f64) -> bool {
    if a == b {
        return true;
    }
    (a - b).abs() <= REL_TOL * a.abs().max(b.abs()) + ABS_TOL
}

/// Tolerance scaled to the magnitude of `scale`, never below `ABS_TOL`.
pub fn tol_for(scale: f64) -> f64 {
    REL_TOL * scale.abs().max(1.0)
}
