//! The imitation side: expert construction, trajectory sampling and
//! histograms, the indicator intrinsic reward, the reduction to a single
//! average-reward solve, and the behavioral-cloning baseline.

use alloc::collections::BTreeMap;
use alloc::vec;
use alloc::vec::Vec;

use rand::Rng;

use crate::chain::{certified_mixing_profile, chain_structure, stationary_distribution, MixingProfile};
use crate::error::IlrError;
use crate::mdp::{
    FiniteMdp, MarkovChain, OccupancyDistribution, Policy, RewardTable, StateDistribution,
};
use crate::rng::{sample_index, stream};
use crate::solver::{solve_average_reward, SolveResult};

/// Default iteration budget handed to the solver by [`ilr`].
const SOLVER_MAX_ITERS: usize = 1_000_000;

/// A deterministic, ergodic expert together with everything derived from it.
#[derive(Debug, Clone)]
pub struct ExpertSpec {
    pub policy: Policy,
    pub chain: MarkovChain,
    /// Limiting state distribution `ρ^E_S`.
    pub stationary: StateDistribution,
    /// Limiting state-action distribution `ρ^E`.
    pub occupancy: OccupancyDistribution,
    pub mixing: MixingProfile,
}

impl ExpertSpec {
    pub fn tau_mix(&self) -> usize {
        self.mixing.tau_mix
    }
}

/// Builds an expert for `mdp` by rejection-sampling uniformly random
/// deterministic policies until one induces an irreducible aperiodic chain.
/// Deterministic given `rng_seed`.
pub fn make_expert(
    mdp: &FiniteMdp,
    rng_seed: u64,
    max_attempts: usize,
) -> Result<ExpertSpec, IlrError> {
    let mut rng = stream(rng_seed);
    for _ in 0..max_attempts {
        let actions: Vec<usize> = (0..mdp.num_states())
            .map(|_| rng.gen_range(0..mdp.num_actions()))
            .collect();
        let policy = Policy::deterministic(&actions, mdp.num_actions())?;
        let chain = mdp.induced_chain(&policy)?;
        if !chain_structure(&chain).is_ergodic() {
            continue;
        }
        let stationary = stationary_distribution(&chain)?;
        let occupancy = stationary.occupancy(&policy)?;
        let mixing = certified_mixing_profile(&chain, 1 << 22)?;
        return Ok(ExpertSpec { policy, chain, stationary, occupancy, mixing });
    }
    Err(IlrError::RejectionBudgetExhausted {
        attempts: max_attempts,
        what: "ergodic deterministic policy",
    })
}

/// A sampled trajectory with its histogram `ρ̂`, state histogram `ρ̂_S`,
/// and positive-mass support `D`.
#[derive(Debug, Clone, PartialEq)]
pub struct ExpertDataset {
    pub trajectory: Vec<(usize, usize)>,
    pub histogram: OccupancyDistribution,
    pub state_histogram: StateDistribution,
    /// Sorted `(s, a)` pairs with positive empirical mass.
    pub support: Vec<(usize, usize)>,
    pub seed: u64,
}

impl ExpertDataset {
    /// Recomputes histogram, state histogram, and support from a trajectory.
    pub fn from_trajectory(
        num_states: usize,
        num_actions: usize,
        trajectory: Vec<(usize, usize)>,
        seed: u64,
    ) -> Result<Self, IlrError> {
        if trajectory.is_empty() {
            return Err(IlrError::InvalidArgument(alloc::string::String::from(
                "trajectory must be nonempty",
            )));
        }
        let n = trajectory.len() as f64;
        let mut counts = vec![0usize; num_states * num_actions];
        let mut state_counts = vec![0usize; num_states];
        for &(s, a) in &trajectory {
            if s >= num_states {
                return Err(IlrError::IndexOutOfRange { index: s, bound: num_states, what: "state" });
            }
            if a >= num_actions {
                return Err(IlrError::IndexOutOfRange { index: a, bound: num_actions, what: "action" });
            }
            counts[s * num_actions + a] += 1;
            state_counts[s] += 1;
        }
        let probs: Vec<f64> = counts.iter().map(|&c| c as f64 / n).collect();
        let state_probs: Vec<f64> = state_counts.iter().map(|&c| c as f64 / n).collect();
        let mut support = Vec::new();
        for s in 0..num_states {
            for a in 0..num_actions {
                if counts[s * num_actions + a] > 0 {
                    support.push((s, a));
                }
            }
        }
        Ok(ExpertDataset {
            trajectory,
            histogram: OccupancyDistribution::new(num_states, num_actions, probs)?,
            state_histogram: StateDistribution::new(state_probs)?,
            support,
            seed,
        })
    }

    pub fn len(&self) -> usize {
        self.trajectory.len()
    }

    pub fn is_empty(&self) -> bool {
        self.trajectory.is_empty()
    }

    /// Dataset truncated to its first `n` steps, with statistics recomputed.
    pub fn prefix(&self, n: usize) -> Result<Self, IlrError> {
        Self::from_trajectory(
            self.histogram.num_states(),
            self.histogram.num_actions(),
            self.trajectory[..n.min(self.trajectory.len())].to_vec(),
            self.seed,
        )
    }
}

/// Rolls out `n_steps` of `policy` in `mdp` from the initial state,
/// recording `(s_t, a_t)` pairs. No burn-in is applied: the histogram is
/// taken from `s1` onward.
pub fn sample_trajectory(
    mdp: &FiniteMdp,
    policy: &Policy,
    n_steps: usize,
    rng_seed: u64,
) -> Result<ExpertDataset, IlrError> {
    if n_steps == 0 {
        return Err(IlrError::InvalidArgument(alloc::string::String::from("n_steps must be >= 1")));
    }
    if policy.num_states() != mdp.num_states() || policy.num_actions() != mdp.num_actions() {
        return Err(IlrError::DimensionMismatch {
            expected: mdp.num_states(),
            got: policy.num_states(),
            what: "policy states",
        });
    }
    let mut rng = stream(rng_seed);
    let mut trajectory = Vec::with_capacity(n_steps);
    let mut state = mdp.initial_state();
    for _ in 0..n_steps {
        let action = match policy.action_if_deterministic(state) {
            Some(a) => a,
            None => sample_index(&mut rng, policy.row(state)),
        };
        trajectory.push((state, action));
        state = sample_index(&mut rng, mdp.transition_row(state, action));
    }
    ExpertDataset::from_trajectory(mdp.num_states(), mdp.num_actions(), trajectory, rng_seed)
}

/// Total and per-step return of a trajectory under a reward table.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrajectoryReturn {
    pub total: f64,
    pub per_step: f64,
}

pub fn trajectory_return(trajectory: &[(usize, usize)], reward: &RewardTable) -> TrajectoryReturn {
    let total: f64 = trajectory.iter().map(|&(s, a)| reward.value(s, a)).sum();
    TrajectoryReturn { total, per_step: total / trajectory.len() as f64 }
}

/// The indicator reward: 1 exactly on the dataset support, 0 elsewhere.
pub fn intrinsic_reward(
    mdp: &FiniteMdp,
    support: &[(usize, usize)],
) -> Result<RewardTable, IlrError> {
    let mut values = vec![vec![0.0; mdp.num_actions()]; mdp.num_states()];
    for &(s, a) in support {
        if s >= mdp.num_states() {
            return Err(IlrError::IndexOutOfRange { index: s, bound: mdp.num_states(), what: "state" });
        }
        if a >= mdp.num_actions() {
            return Err(IlrError::IndexOutOfRange { index: a, bound: mdp.num_actions(), what: "action" });
        }
        values[s][a] = 1.0;
    }
    RewardTable::new(values, "intrinsic")
}

/// The reduction: build the intrinsic reward from the dataset support and
/// make a single call to the average-reward solver. The solver never sees
/// the extrinsic reward.
pub fn ilr(
    mdp: &FiniteMdp,
    dataset: &ExpertDataset,
    solver_tol: f64,
) -> Result<(Policy, f64, SolveResult), IlrError> {
    let reward = intrinsic_reward(mdp, &dataset.support)?;
    let result = solve_average_reward(mdp, &reward, solver_tol, SOLVER_MAX_ITERS)?;
    Ok((result.policy.clone(), result.gain, result))
}

/// Maximum-likelihood baseline: the empirical majority action at each
/// visited state (ties toward the lowest index), uniform at unvisited ones.
pub fn behavioral_cloning(mdp: &FiniteMdp, dataset: &ExpertDataset) -> Result<Policy, IlrError> {
    if dataset.is_empty() {
        return Err(IlrError::InvalidArgument(alloc::string::String::from("dataset is empty")));
    }
    let n = mdp.num_states();
    let na = mdp.num_actions();
    let mut counts = vec![vec![0usize; na]; n];
    for &(s, a) in &dataset.trajectory {
        counts[s][a] += 1;
    }
    let mut rows = Vec::with_capacity(n);
    for state_counts in &counts {
        let total: usize = state_counts.iter().sum();
        if total == 0 {
            rows.push(vec![1.0 / na as f64; na]);
        } else {
            let best = state_counts
                .iter()
                .enumerate()
                .max_by(|(i, c), (j, d)| c.cmp(d).then(j.cmp(i)))
                .map(|(i, _)| i)
                .unwrap();
            let mut row = vec![0.0; na];
            row[best] = 1.0;
            rows.push(row);
        }
    }
    Policy::new(rows)
}

/// Maximal agreement runs of a trajectory against a deterministic reference
/// policy, with the disagreement count `B`.
#[derive(Debug, Clone, PartialEq)]
pub struct StreakDecomposition {
    /// Map from streak length to how many maximal streaks have that length.
    pub streak_lengths: BTreeMap<usize, usize>,
    pub disagreement_count: usize,
    pub agreement_fraction: f64,
}

impl StreakDecomposition {
    pub fn num_streaks(&self) -> usize {
        self.streak_lengths.values().sum()
    }

    pub fn agreement_steps(&self) -> usize {
        self.streak_lengths.iter().map(|(len, count)| len * count).sum()
    }
}

pub fn streak_decompose(
    trajectory: &[(usize, usize)],
    reference: &Policy,
) -> Result<StreakDecomposition, IlrError> {
    if !reference.is_deterministic() {
        return Err(IlrError::StochasticPolicy);
    }
    let mut streak_lengths = BTreeMap::new();
    let mut disagreement_count = 0usize;
    let mut run = 0usize;
    for &(s, a) in trajectory {
        if reference.action_if_deterministic(s) == Some(a) {
            run += 1;
        } else {
            disagreement_count += 1;
            if run > 0 {
                *streak_lengths.entry(run).or_insert(0) += 1;
                run = 0;
            }
        }
    }
    if run > 0 {
        *streak_lengths.entry(run).or_insert(0) += 1;
    }
    let agree = trajectory.len() - disagreement_count;
    Ok(StreakDecomposition {
        streak_lengths,
        disagreement_count,
        agreement_fraction: if trajectory.is_empty() { 0.0 } else { agree as f64 / trajectory.len() as f64 },
    })
}
