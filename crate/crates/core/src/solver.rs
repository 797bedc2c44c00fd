//! Average-reward planning: relative value iteration with greedy policy
//! extraction, exact policy evaluation through limiting distributions, and
//! an exhaustive enumeration oracle for small instances.

use alloc::vec;
use alloc::vec::Vec;

use crate::chain::{chain_structure, limiting_state_distribution};
use crate::error::IlrError;
use crate::math;
use crate::mdp::{FiniteMdp, Policy, RewardTable, StateDistribution};

/// Self-loop weight of the aperiodicity transform. Mixing every action with
/// a self-loop leaves each policy's limiting distribution (hence gain)
/// unchanged while removing periodic oscillation from the value iterates.
const LAZINESS: f64 = 0.01;

/// Outcome of [`solve_average_reward`].
#[derive(Debug, Clone, PartialEq)]
pub struct SolveResult {
    pub policy: Policy,
    /// Expected per-step reward of `policy` from the initial state,
    /// evaluated exactly via [`policy_gain`].
    pub gain: f64,
    pub iterations: usize,
    /// Span seminorm of the last value-iterate difference.
    pub span_residual: f64,
    /// Whether `policy` induces an irreducible aperiodic chain.
    pub ergodic_under_policy: bool,
}

/// True when every state is reachable from every other under some policy,
/// i.e. the union support graph over all actions is strongly connected.
pub fn is_communicating(mdp: &FiniteMdp) -> bool {
    let uniform = Policy::uniform(mdp.num_states(), mdp.num_actions());
    match mdp.induced_chain(&uniform) {
        Ok(chain) => chain_structure(&chain).irreducible,
        Err(_) => false,
    }
}

/// Relative value iteration for the average-reward objective.
///
/// Iterates `h_{k+1}(s) = max_a [r(s,a) + Σ_{s'} T(s'|s,a) h_k(s')] - offset`
/// with the offset pinned at the initial state, stopping when the span
/// seminorm of successive differences falls below `tol`. The greedy policy
/// breaks ties toward the lowest action index, and its gain is evaluated
/// exactly rather than read off the iteration.
pub fn solve_average_reward(
    mdp: &FiniteMdp,
    reward: &RewardTable,
    tol: f64,
    max_iters: usize,
) -> Result<SolveResult, IlrError> {
    if reward.num_states() != mdp.num_states() || reward.num_actions() != mdp.num_actions() {
        return Err(IlrError::DimensionMismatch {
            expected: mdp.num_states() * mdp.num_actions(),
            got: reward.num_states() * reward.num_actions(),
            what: "reward entries",
        });
    }
    if !(tol > 0.0) {
        return Err(IlrError::InvalidArgument(alloc::string::String::from("tol must be positive")));
    }
    if !is_communicating(mdp) {
        return Err(IlrError::NotCommunicating);
    }

    let n = mdp.num_states();
    let s_ref = mdp.initial_state();
    let mut h = vec![0.0; n];
    let mut lazy = false;
    let mut span = f64::INFINITY;
    let mut span_at_checkpoint = f64::INFINITY;
    let mut iterations = 0;

    while iterations < max_iters {
        iterations += 1;
        let backed_up = bellman_backup(mdp, reward, &h, lazy);
        let offset = backed_up[s_ref];
        let mut min_diff = f64::INFINITY;
        let mut max_diff = f64::NEG_INFINITY;
        let mut new_h = backed_up;
        for (s, v) in new_h.iter_mut().enumerate() {
            *v -= offset;
            let diff = *v - h[s];
            min_diff = min_diff.min(diff);
            max_diff = max_diff.max(diff);
        }
        span = max_diff - min_diff;
        h = new_h;
        if span <= tol {
            break;
        }
        // Periodic structure makes the span oscillate instead of contract;
        // switch to the lazy operator when no progress shows up.
        if !lazy && iterations % 50 == 0 {
            if span > 0.5 * span_at_checkpoint {
                lazy = true;
            }
            span_at_checkpoint = span;
        }
    }
    if span > tol {
        return Err(IlrError::SolverDidNotConverge { iterations, span });
    }

    let mut actions = Vec::with_capacity(n);
    for s in 0..n {
        let mut best_a = 0;
        let mut best_q = q_value(mdp, reward, &h, lazy, s, 0);
        for a in 1..mdp.num_actions() {
            let q = q_value(mdp, reward, &h, lazy, s, a);
            if q > best_q {
                best_q = q;
                best_a = a;
            }
        }
        actions.push(best_a);
    }
    let policy = Policy::deterministic(&actions, mdp.num_actions())?;
    let gain = policy_gain(mdp, reward, &policy)?;
    let chain = mdp.induced_chain(&policy)?;
    let ergodic_under_policy = chain_structure(&chain).is_ergodic();
    Ok(SolveResult { policy, gain, iterations, span_residual: span, ergodic_under_policy })
}

fn bellman_backup(mdp: &FiniteMdp, reward: &RewardTable, h: &[f64], lazy: bool) -> Vec<f64> {
    (0..mdp.num_states())
        .map(|s| {
            (0..mdp.num_actions())
                .map(|a| q_value(mdp, reward, h, lazy, s, a))
                .fold(f64::NEG_INFINITY, f64::max)
        })
        .collect()
}

fn q_value(mdp: &FiniteMdp, reward: &RewardTable, h: &[f64], lazy: bool, s: usize, a: usize) -> f64 {
    let expectation: f64 = mdp
        .transition_row(s, a)
        .iter()
        .zip(h)
        .map(|(&t, &v)| t * v)
        .sum();
    if lazy {
        reward.value(s, a) + (1.0 - LAZINESS) * expectation + LAZINESS * h[s]
    } else {
        reward.value(s, a) + expectation
    }
}

/// Exact expected per-step reward of `policy` from the MDP's initial state:
/// the limiting (Cesàro) state distribution weighted by the reward table.
/// Reducible induced chains are handled through absorption probabilities.
pub fn policy_gain(mdp: &FiniteMdp, reward: &RewardTable, policy: &Policy) -> Result<f64, IlrError> {
    let chain = mdp.induced_chain(policy)?;
    let start = StateDistribution::delta(mdp.num_states(), mdp.initial_state());
    let limiting = limiting_state_distribution(&chain, &start)?;
    limiting.occupancy(policy)?.expected_reward(reward)
}

/// The limiting state-action distribution of `policy` from the MDP's
/// initial state.
pub fn limiting_occupancy(
    mdp: &FiniteMdp,
    policy: &Policy,
) -> Result<crate::mdp::OccupancyDistribution, IlrError> {
    let chain = mdp.induced_chain(policy)?;
    let start = StateDistribution::delta(mdp.num_states(), mdp.initial_state());
    limiting_state_distribution(&chain, &start)?.occupancy(policy)
}

/// Evaluates every deterministic policy and returns the best gain together
/// with all policies within `1e-9` of it. Brute-force ground truth for
/// [`solve_average_reward`]; refuses action spaces over `10^6` policies.
pub fn enumerate_optimal(
    mdp: &FiniteMdp,
    reward: &RewardTable,
) -> Result<(f64, Vec<Policy>), IlrError> {
    const TIE_TOL: f64 = 1e-9;
    let n = mdp.num_states();
    let na = mdp.num_actions();
    let size_log2 = n as f64 * math::ln(na as f64) / math::ln(2.0);
    if size_log2 > math::ln(1e6) / math::ln(2.0) {
        return Err(IlrError::SearchSpaceTooLarge { size_log2 });
    }

    let mut best_gain = f64::NEG_INFINITY;
    let mut actions = vec![0usize; n];
    loop {
        let policy = Policy::deterministic(&actions, na)?;
        let gain = policy_gain(mdp, reward, &policy)?;
        if gain > best_gain {
            best_gain = gain;
        }
        if !advance(&mut actions, na) {
            break;
        }
    }

    let mut best_policies = Vec::new();
    let mut actions = vec![0usize; n];
    loop {
        let policy = Policy::deterministic(&actions, na)?;
        let gain = policy_gain(mdp, reward, &policy)?;
        if gain >= best_gain - TIE_TOL {
            best_policies.push(policy);
        }
        if !advance(&mut actions, na) {
            break;
        }
    }
    Ok((best_gain, best_policies))
}

/// Odometer increment over action assignments; false once exhausted.
fn advance(actions: &mut [usize], num_actions: usize) -> bool {
    for slot in actions.iter_mut() {
        *slot += 1;
        if *slot < num_actions {
            return true;
        }
        *slot = 0;
    }
    false
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    /// Two states, action 0 stays, action 1 moves; reward only for leaving 0.
    fn stay_go_mdp() -> FiniteMdp {
        FiniteMdp::new(
            vec![
                vec![vec![1.0, 0.0], vec![0.0, 1.0]],
                vec![vec![0.0, 1.0], vec![1.0, 0.0]],
            ],
            vec![vec![0.0, 1.0], vec![0.0, 0.0]],
            0,
        )
        .unwrap()
    }

    #[test]
    fn solver_finds_the_cycle_policy() {
        let mdp = stay_go_mdp();
        let result = solve_average_reward(&mdp, &mdp.extrinsic_reward(), 1e-9, 100_000).unwrap();
        assert_eq!(result.policy.action_if_deterministic(0), Some(1));
        assert_eq!(result.policy.action_if_deterministic(1), Some(1));
        assert!((result.gain - 0.5).abs() < 1e-9);
        // the optimal cycle is periodic
        assert!(!result.ergodic_under_policy);
    }

    #[test]
    fn enumeration_agrees_on_the_cycle_mdp() {
        let mdp = stay_go_mdp();
        let (best, policies) = enumerate_optimal(&mdp, &mdp.extrinsic_reward()).unwrap();
        assert!((best - 0.5).abs() < 1e-12);
        assert_eq!(policies.len(), 1);
        assert_eq!(policies[0].action_if_deterministic(0), Some(1));
    }

    #[test]
    fn zero_reward_gives_lexicographic_policy() {
        let mdp = stay_go_mdp();
        let zeros = RewardTable::constant(2, 2, 0.0, "zeros").unwrap();
        let result = solve_average_reward(&mdp, &zeros, 1e-9, 10_000).unwrap();
        assert_eq!(result.gain, 0.0);
        assert_eq!(result.policy.action_if_deterministic(0), Some(0));
        assert_eq!(result.policy.action_if_deterministic(1), Some(0));
    }

    #[test]
    fn unit_reward_gives_unit_gain() {
        let mdp = stay_go_mdp();
        let ones = RewardTable::constant(2, 2, 1.0, "ones").unwrap();
        let result = solve_average_reward(&mdp, &ones, 1e-9, 10_000).unwrap();
        assert!((result.gain - 1.0).abs() < 1e-12);
    }

    #[test]
    fn gain_ignores_transient_rewards() {
        // policy absorbs into state 1 where rewards vanish
        let mdp = stay_go_mdp();
        let reward = RewardTable::new(vec![vec![1.0, 1.0], vec![0.0, 0.0]], "transient").unwrap();
        let absorb = Policy::deterministic(&[1, 0], 2).unwrap();
        assert_eq!(policy_gain(&mdp, &reward, &absorb).unwrap(), 0.0);
    }

    #[test]
    fn single_state_gain_reads_the_table() {
        let mdp = FiniteMdp::new(
            vec![vec![vec![1.0], vec![1.0], vec![1.0]]],
            vec![vec![0.1, 0.9, 0.4]],
            0,
        )
        .unwrap();
        let policy = Policy::deterministic(&[2], 3).unwrap();
        assert!((policy_gain(&mdp, &mdp.extrinsic_reward(), &policy).unwrap() - 0.4).abs() < 1e-15);
        let (best, policies) = enumerate_optimal(&mdp, &mdp.extrinsic_reward()).unwrap();
        assert!((best - 0.9).abs() < 1e-15);
        assert_eq!(policies.len(), 1);
        assert_eq!(policies[0].action_if_deterministic(0), Some(1));
    }

    #[test]
    fn constant_reward_ties_every_policy() {
        let mdp = stay_go_mdp();
        let c = RewardTable::constant(2, 2, 0.3, "const").unwrap();
        let (best, policies) = enumerate_optimal(&mdp, &c).unwrap();
        assert!((best - 0.3).abs() < 1e-12);
        assert_eq!(policies.len(), 4);
    }

    #[test]
    fn non_communicating_mdp_is_rejected() {
        let mdp = FiniteMdp::new(
            vec![
                vec![vec![1.0, 0.0]],
                vec![vec![0.0, 1.0]],
            ],
            vec![vec![0.0], vec![1.0]],
            0,
        )
        .unwrap();
        let err = solve_average_reward(&mdp, &mdp.extrinsic_reward(), 1e-9, 1000);
        assert!(matches!(err, Err(IlrError::NotCommunicating)));
    }
}
