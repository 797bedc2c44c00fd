//! Error type shared across the crate.

use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

/// Errors produced by chain analysis, the solver, and the imitation pipeline.
///
/// Invariant *violations* on constructed data (bad row sums, out-of-range
/// rewards) are reported through [`crate::mdp::ValidationOutcome`], not here;
/// this enum covers operations that cannot produce a result at all.
#[derive(Debug, Clone, PartialEq)]
pub enum IlrError {
    /// Two objects that must agree on |S| or |A| do not.
    DimensionMismatch { expected: usize, got: usize, what: &'static str },
    /// An operation requiring an irreducible chain was given a reducible one.
    ReducibleChain { recurrent_classes: Vec<Vec<usize>> },
    /// An operation requiring an aperiodic chain was given a periodic one.
    PeriodicChain { period: usize },
    /// The linear system for a stationary distribution was singular.
    SingularSystem,
    /// d(t) never crossed 1/4 before the configured cap.
    MixingCapTooSmall { t_cap: usize },
    /// The truncated TV-decay tail could not be certified negligible.
    UncertifiedTail { residual: f64 },
    /// Relative value iteration did not reach the span tolerance.
    SolverDidNotConverge { iterations: usize, span: f64 },
    /// The MDP is not communicating, outside the solver's convergence domain.
    NotCommunicating,
    /// Exhaustive policy enumeration would exceed the configured budget.
    SearchSpaceTooLarge { size_log2: f64 },
    /// Subset enumeration for the TV sup oracle is limited to small supports.
    SupportTooLarge { size: usize },
    /// Rejection sampling ran out of attempts.
    RejectionBudgetExhausted { attempts: usize, what: &'static str },
    /// A deterministic policy was required.
    StochasticPolicy,
    /// A state or action index is out of range.
    IndexOutOfRange { index: usize, bound: usize, what: &'static str },
    /// Free-form invalid argument.
    InvalidArgument(String),
}

impl fmt::Display for IlrError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            IlrError::DimensionMismatch { expected, got, what } => {
                write!(f, "dimension mismatch for {what}: expected {expected}, got {got}")
            }
            IlrError::ReducibleChain { recurrent_classes } => {
                write!(f, "chain is reducible with recurrent classes {recurrent_classes:?}")
            }
            IlrError::PeriodicChain { period } => {
                write!(f, "chain is periodic with period {period}")
            }
            IlrError::SingularSystem => write!(f, "linear system is singular"),
            IlrError::MixingCapTooSmall { t_cap } => {
                write!(f, "d(t) never crossed 1/4 before t_cap = {t_cap}; increase t_cap")
            }
            IlrError::UncertifiedTail { residual } => {
                write!(f, "TV-decay tail not certified: d(t_cap) = {residual:e}")
            }
            IlrError::SolverDidNotConverge { iterations, span } => {
                write!(f, "solver hit max_iters = {iterations} with span {span:e}")
            }
            IlrError::NotCommunicating => write!(f, "MDP is not communicating"),
            IlrError::SearchSpaceTooLarge { size_log2 } => {
                write!(f, "policy space has ~2^{size_log2:.1} members, over budget")
            }
            IlrError::SupportTooLarge { size } => {
                write!(f, "support of size {size} too large for subset enumeration")
            }
            IlrError::RejectionBudgetExhausted { attempts, what } => {
                write!(f, "no {what} found after {attempts} attempts")
            }
            IlrError::StochasticPolicy => write!(f, "deterministic policy required"),
            IlrError::IndexOutOfRange { index, bound, what } => {
                write!(f, "{what} index {index} out of range (< {bound})")
            }
            IlrError::InvalidArgument(msg) => write!(f, "{msg}"),
        }
    }
}

#[cfg(feature = "std")]
impl std::error::Error for IlrError {}
