//! Tabular average-reward MDPs, exact Markov chain analysis, and the
//! imitation-by-reinforcement-learning reduction, together with the
//! verification harness that certifies its guarantees numerically.
//!
//! The crate is `no_std` (with `alloc`) so the algorithmic core stays free
//! of IO; file formats and the CLI live in the companion `ilr` crate.
//!
//! Everything here is deterministic given explicit 64-bit seeds. All types
//! are immutable after construction and all operations are pure functions,
//! so values can be shared across threads freely.

#![cfg_attr(not(feature = "std"), no_std)]
#![forbid(unsafe_code)]

extern crate alloc;

#[cfg(any(test, feature = "std"))]
extern crate std;

pub mod chain;
pub mod error;
pub mod imitation;
pub mod mdp;
pub mod rng;
pub mod solver;
pub mod verify;

mod linalg;
mod math;

pub use chain::{ChainStructure, MixingProfile};
pub use error::IlrError;
pub use imitation::{ExpertDataset, ExpertSpec, StreakDecomposition, TrajectoryReturn};
pub use mdp::{
    FiniteMdp, MarkovChain, OccupancyDistribution, Policy, RewardTable, StateDistribution,
    ValidationOutcome,
};
pub use solver::SolveResult;
pub use verify::{RandomMdpSpec, RewardStyle, TrialRecord, VerificationPlan, VerificationReport};

/// Tolerance used by all stochasticity (row/distribution sum) checks.
/// Inputs are constructed, not measured, so this is deliberately tight.
pub const STOCHASTIC_TOL: f64 = 1e-12;
