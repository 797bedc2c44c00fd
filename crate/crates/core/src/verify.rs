//! Executable checks: each distribution identity, mixing bound,
//! concentration statement, and the end-to-end high-probability guarantee
//! becomes a seeded, reproducible pass/fail experiment. Statements that are
//! theorems are checked with zero failure budget; statements that hold with
//! probability get a required success rate plus three standard errors of
//! sampling slack.

use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use rand::Rng;

use crate::chain::{
    certified_mixing_profile, chain_structure, limiting_state_distribution, total_variation,
    tv_decay_sum, tv_sup_oracle,
};
use crate::error::IlrError;
use crate::imitation::{ilr, intrinsic_reward, sample_trajectory, ExpertDataset, ExpertSpec};
use crate::math;
use crate::mdp::{FiniteMdp, Policy, RewardTable, StateDistribution};
use crate::rng::{derive_seed, stream, substream, Stream};
use crate::solver::is_communicating;

/// Solver span tolerance used by every check that runs the reduction.
pub const CHECK_SOLVER_TOL: f64 = 1e-9;

/// Slop for comparisons that are exact in theory but float in practice.
const EXACT_TOL: f64 = 1e-9;

/// Sample-size and constant bookkeeping for the end-to-end guarantee.
#[derive(Debug, Clone, PartialEq)]
pub struct VerificationPlan {
    pub eta: f64,
    pub delta: f64,
    /// `η / (2 + 8 τ_mix)`.
    pub epsilon: f64,
    /// `ε + sqrt(8 |S| τ_mix / N)`; satisfies `κ (1 + 4 τ_mix) ≤ η`.
    pub kappa_bound: f64,
    /// `ceil(max{800 |S|, 450 ln(2/δ)} τ_mix³ / η²)`, or 1 when `τ_mix = 0`.
    pub n_required: usize,
    pub n_trials: usize,
    pub master_seed: u64,
    pub tau_mix: usize,
    pub num_states: usize,
}

/// Derives the sample size and constants from the target `(η, δ)`.
pub fn plan_from_proposition1(
    mdp: &FiniteMdp,
    expert: &ExpertSpec,
    eta: f64,
    delta: f64,
    n_trials: usize,
    master_seed: u64,
) -> Result<VerificationPlan, IlrError> {
    if !(eta > 0.0 && eta <= 1.0) {
        return Err(IlrError::InvalidArgument(String::from("eta must be in (0, 1]")));
    }
    if !(delta > 0.0 && delta < 1.0) {
        return Err(IlrError::InvalidArgument(String::from("delta must be in (0, 1)")));
    }
    let tau = expert.tau_mix();
    let num_states = mdp.num_states();
    let n_required = if tau == 0 {
        1
    } else {
        let lead = (800.0 * num_states as f64).max(450.0 * math::ln(2.0 / delta));
        let tau3 = (tau * tau * tau) as f64;
        math::ceil(lead * tau3 / (eta * eta)) as usize
    };
    let epsilon = eta / (2.0 + 8.0 * tau as f64);
    let kappa_bound =
        epsilon + math::sqrt(8.0 * num_states as f64 * tau as f64 / n_required as f64);
    // guaranteed by the sample-size formula; a violation is a bug here
    debug_assert!(kappa_bound * (1.0 + 4.0 * tau as f64) <= eta + EXACT_TOL);
    Ok(VerificationPlan {
        eta,
        delta,
        epsilon,
        kappa_bound,
        n_required,
        n_trials,
        master_seed,
        tau_mix: tau,
        num_states,
    })
}

/// One trial of a verification run.
#[derive(Debug, Clone, PartialEq)]
pub struct TrialRecord {
    pub trial: usize,
    pub seed: u64,
    pub measured: f64,
    pub bound: f64,
    pub satisfied: bool,
    pub note: String,
}

/// Aggregated pass/fail evidence for one check.
#[derive(Debug, Clone, PartialEq)]
pub struct VerificationReport {
    pub check_name: String,
    pub trials: usize,
    pub successes: usize,
    pub empirical_rate: f64,
    pub required_rate: f64,
    pub pass: bool,
    pub per_trial_records: Vec<TrialRecord>,
}

impl VerificationReport {
    /// Pass iff the empirical rate reaches the required rate minus three
    /// standard errors of the required rate at this trial count.
    pub fn from_records(
        check_name: &str,
        required_rate: f64,
        per_trial_records: Vec<TrialRecord>,
    ) -> Self {
        let trials = per_trial_records.len();
        let successes = per_trial_records.iter().filter(|r| r.satisfied).count();
        let empirical_rate = if trials == 0 { 0.0 } else { successes as f64 / trials as f64 };
        let slack = if trials == 0 {
            0.0
        } else {
            3.0 * math::sqrt(required_rate * (1.0 - required_rate) / trials as f64)
        };
        VerificationReport {
            check_name: String::from(check_name),
            trials,
            successes,
            empirical_rate,
            required_rate,
            pass: empirical_rate >= required_rate - slack,
            per_trial_records,
        }
    }
}

/// How rewards of a generated MDP are filled in.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RewardStyle {
    /// Every `(s, a)` gets an independent uniform reward in `[0, 1]`.
    Uniform,
    /// 10% of pairs get a uniform reward, the rest zero.
    Sparse,
}

/// Garnet-style random MDP parameters.
#[derive(Debug, Clone, PartialEq)]
pub struct RandomMdpSpec {
    pub num_states: usize,
    pub num_actions: usize,
    /// Number of distinct successors per `(s, a)`.
    pub branching: usize,
    pub reward_style: RewardStyle,
    pub ensure_communicating: bool,
    pub seed: u64,
}

/// Samples an MDP: for each `(s, a)`, `branching` distinct successors with
/// Dirichlet-uniform probabilities, rewards per `reward_style`. When
/// requested, rejection-samples until the union graph over all actions is
/// strongly connected. Bit-deterministic given the seed.
pub fn generate_random_mdp(spec: &RandomMdpSpec) -> Result<FiniteMdp, IlrError> {
    if spec.num_states == 0 || spec.num_actions == 0 {
        return Err(IlrError::InvalidArgument(String::from("states and actions must be positive")));
    }
    if spec.branching == 0 || spec.branching > spec.num_states {
        return Err(IlrError::InvalidArgument(format!(
            "branching {} must be in 1..={}",
            spec.branching, spec.num_states
        )));
    }
    const MAX_REJECTIONS: usize = 10_000;
    let mut rng = stream(spec.seed);
    for _ in 0..MAX_REJECTIONS {
        let mut transitions = Vec::with_capacity(spec.num_states);
        let mut rewards = Vec::with_capacity(spec.num_states);
        for _ in 0..spec.num_states {
            let mut per_action = Vec::with_capacity(spec.num_actions);
            let mut reward_row = Vec::with_capacity(spec.num_actions);
            for _ in 0..spec.num_actions {
                per_action.push(random_sparse_row(&mut rng, spec.num_states, spec.branching));
                let r = match spec.reward_style {
                    RewardStyle::Uniform => rng.gen::<f64>(),
                    RewardStyle::Sparse => {
                        if rng.gen::<f64>() < 0.1 {
                            rng.gen::<f64>()
                        } else {
                            0.0
                        }
                    }
                };
                reward_row.push(r);
            }
            transitions.push(per_action);
            rewards.push(reward_row);
        }
        let mdp = FiniteMdp::new(transitions, rewards, 0)?;
        if !spec.ensure_communicating || is_communicating(&mdp) {
            return Ok(mdp);
        }
    }
    Err(IlrError::RejectionBudgetExhausted { attempts: MAX_REJECTIONS, what: "communicating MDP" })
}

/// A probability row with `branching` distinct positive entries.
fn random_sparse_row(rng: &mut Stream, num_states: usize, branching: usize) -> Vec<f64> {
    // partial Fisher-Yates for the successor set
    let mut indices: Vec<usize> = (0..num_states).collect();
    for i in 0..branching {
        let j = rng.gen_range(i..num_states);
        indices.swap(i, j);
    }
    let mut row = vec![0.0; num_states];
    let mut total = 0.0;
    for &s in &indices[..branching] {
        let w = exp1(rng);
        row[s] = w;
        total += w;
    }
    for p in row.iter_mut() {
        *p /= total;
    }
    row
}

/// Exp(1) draw; normalized vectors of these are Dirichlet(1,...,1).
fn exp1(rng: &mut Stream) -> f64 {
    -math::ln(1.0 - rng.gen::<f64>())
}

/// A random distribution on `k` points with full support.
pub fn random_distribution(rng: &mut Stream, k: usize) -> Vec<f64> {
    let mut probs: Vec<f64> = (0..k).map(|_| exp1(rng)).collect();
    let total: f64 = probs.iter().sum();
    for p in probs.iter_mut() {
        *p /= total;
    }
    probs
}

/// A reward table with independent uniform entries in `[0, 1]`.
pub fn random_reward_table(
    rng: &mut Stream,
    num_states: usize,
    num_actions: usize,
) -> RewardTable {
    let values = (0..num_states)
        .map(|_| (0..num_actions).map(|_| rng.gen::<f64>()).collect())
        .collect();
    RewardTable::new(values, "random").expect("uniform draws are in [0,1]")
}

/// TV identity suite: on random pairs of small-support distributions, the
/// half-L1 formula must equal the subset-enumeration supremum, the
/// maximizer set `{x : p(x) > q(x)}` must realize it, and bounded test
/// vectors must obey `|E_p[v] - E_q[v]| ≤ 2 TV(p, q)`.
pub fn check_tv_duality(n_trials: usize, master_seed: u64) -> VerificationReport {
    let mut records = Vec::with_capacity(n_trials);
    for trial in 0..n_trials {
        let seed = derive_seed(master_seed, trial as u64);
        let mut rng = stream(seed);
        let k = rng.gen_range(2..=12usize);
        let p = random_distribution(&mut rng, k);
        let q = random_distribution(&mut rng, k);
        let tv = total_variation(&p, &q).unwrap();
        let (sup, _) = tv_sup_oracle(&p, &q).unwrap();
        let identity_gap = math::abs(tv - sup);

        // maximizer-set form: the indicator of {x : p > q} attains the sup
        let witness_gap: f64 = p
            .iter()
            .zip(&q)
            .map(|(&a, &b)| if a > b { a - b } else { 0.0 })
            .sum();
        let maximizer_gap = math::abs(witness_gap - tv);

        // bounded test vector
        let v: Vec<f64> = (0..k).map(|_| rng.gen::<f64>()).collect();
        let e_p: f64 = p.iter().zip(&v).map(|(a, b)| a * b).sum();
        let e_q: f64 = q.iter().zip(&v).map(|(a, b)| a * b).sum();
        let excess = math::abs(e_p - e_q) - 2.0 * tv;

        let measured = identity_gap.max(maximizer_gap).max(excess.max(0.0));
        let satisfied = identity_gap <= 1e-12 && maximizer_gap <= 1e-12 && excess <= 1e-12;
        records.push(TrialRecord {
            trial,
            seed,
            measured,
            bound: 1e-12,
            satisfied,
            note: String::new(),
        });
    }
    VerificationReport::from_records("tv-duality", 1.0, records)
}

/// A random irreducible aperiodic chain on up to `max_states` states.
pub fn random_ergodic_chain(
    rng_seed: u64,
    max_states: usize,
) -> Result<crate::mdp::MarkovChain, IlrError> {
    let mut rng = stream(rng_seed);
    for attempt in 0..10_000u64 {
        let n = rng.gen_range(2..=max_states);
        let branching = rng.gen_range(2.min(n)..=n);
        let spec = RandomMdpSpec {
            num_states: n,
            num_actions: 1,
            branching,
            reward_style: RewardStyle::Uniform,
            ensure_communicating: true,
            seed: derive_seed(rng_seed, attempt),
        };
        let mdp = generate_random_mdp(&spec)?;
        let chain = mdp.induced_chain(&Policy::uniform(n, 1))?;
        if chain_structure(&chain).is_ergodic() {
            return Ok(chain);
        }
    }
    Err(IlrError::RejectionBudgetExhausted { attempts: 10_000, what: "ergodic chain" })
}

/// Mixing suite: on random ergodic chains, the truncated-plus-certified-tail
/// TV decay sum from every indicator start (and one random start) must stay
/// below `2 τ_mix`, and the decay curve must obey `d(ℓ τ_mix) ≤ 2^{-ℓ}`.
pub fn check_lemma3(
    n_chains: usize,
    max_states: usize,
    master_seed: u64,
) -> Result<VerificationReport, IlrError> {
    let mut records = Vec::with_capacity(n_chains);
    for trial in 0..n_chains {
        let seed = derive_seed(master_seed, trial as u64);
        let chain = random_ergodic_chain(seed, max_states)?;
        let profile = certified_mixing_profile(&chain, 1 << 22)?;
        let budget = 2.0 * profile.tau_mix as f64;
        let n = chain.num_states();

        let mut worst_sum = 0.0f64;
        let mut ok = true;
        let mut starts: Vec<StateDistribution> =
            (0..n).map(|s| StateDistribution::delta(n, s)).collect();
        let mut rng = substream(seed, 1);
        starts.push(StateDistribution::new(random_distribution(&mut rng, n))?);
        for start in &starts {
            let sum = tv_decay_sum(&chain, start, &profile)?;
            worst_sum = worst_sum.max(sum);
            if sum > budget + 1e-6 {
                ok = false;
            }
        }
        let mut note = String::new();
        if profile.tau_mix >= 1 {
            let mut level = 1usize;
            while level * profile.tau_mix <= profile.t_cap && level < 64 {
                let d = profile.d_curve[level * profile.tau_mix];
                if d > libm::pow(2.0, -(level as f64)) + 1e-12 {
                    ok = false;
                    note = format!("d({} tau) = {d} over 2^-{level}", level);
                }
                level += 1;
            }
        }
        records.push(TrialRecord { trial, seed, measured: worst_sum, bound: budget, satisfied: ok, note });
    }
    Ok(VerificationReport::from_records("lemma3", 1.0, records))
}

/// Histogram concentration: the empirical state-action histogram of an
/// `n_samples`-step expert trajectory must land within
/// `ε + sqrt(8 |S| τ_mix / N)` of the expert occupancy, at the stated rate.
pub fn check_lemma4(
    mdp: &FiniteMdp,
    expert: &ExpertSpec,
    n_samples: usize,
    epsilon: f64,
    n_trials: usize,
    master_seed: u64,
) -> Result<VerificationReport, IlrError> {
    let tau = expert.tau_mix() as f64;
    let bound = epsilon
        + math::sqrt(8.0 * mdp.num_states() as f64 * tau / n_samples as f64);
    let required_rate = if tau == 0.0 {
        1.0
    } else {
        (1.0 - 2.0 * math::exp(-epsilon * epsilon * n_samples as f64 / (4.5 * tau))).max(0.0)
    };
    let mut records = Vec::with_capacity(n_trials);
    for trial in 0..n_trials {
        let seed = derive_seed(master_seed, trial as u64);
        let dataset = sample_trajectory(mdp, &expert.policy, n_samples, seed)?;
        let tv = total_variation(expert.occupancy.as_flat(), dataset.histogram.as_flat())?;
        records.push(TrialRecord {
            trial,
            seed,
            measured: tv,
            bound,
            satisfied: tv <= bound,
            note: String::new(),
        });
    }
    Ok(VerificationReport::from_records("lemma4", required_rate, records))
}

/// Per-dataset certificate from the intrinsic-reward argument.
#[derive(Debug, Clone, PartialEq)]
pub struct Lemma5Outcome {
    /// `TV(ρ^E, ρ̂)`, computed exactly.
    pub kappa_realized: f64,
    pub intrinsic_gain: f64,
    pub satisfied: bool,
}

/// Whenever the histogram is within `κ` of the expert occupancy, the solved
/// policy's intrinsic gain must reach `1 - κ`: the expert itself already
/// attains it and the solver is optimal.
pub fn check_lemma5(
    mdp: &FiniteMdp,
    expert: &ExpertSpec,
    dataset: &ExpertDataset,
) -> Result<Lemma5Outcome, IlrError> {
    let kappa_realized =
        total_variation(expert.occupancy.as_flat(), dataset.histogram.as_flat())?;
    let (_, intrinsic_gain, _) = ilr(mdp, dataset, CHECK_SOLVER_TOL)?;
    Ok(Lemma5Outcome {
        kappa_realized,
        intrinsic_gain,
        satisfied: intrinsic_gain >= 1.0 - kappa_realized - EXACT_TOL,
    })
}

/// Intrinsic-to-extrinsic transfer: for an ergodic policy with intrinsic
/// gain `1 - κ` against the expert's support indicator, every bounded
/// extrinsic reward must satisfy
/// `E_{ρ^π}[R] ≥ (1 - κ) E_{ρ^E}[R] - 4 τ_mix κ`. Exact, zero failures.
pub fn check_lemma7(
    mdp: &FiniteMdp,
    expert: &ExpertSpec,
    policy: &Policy,
    n_random_rewards: usize,
    master_seed: u64,
) -> Result<VerificationReport, IlrError> {
    let chain = mdp.induced_chain(policy)?;
    let structure = chain_structure(&chain);
    if !structure.irreducible {
        return Err(IlrError::ReducibleChain { recurrent_classes: structure.recurrent_classes });
    }
    if structure.period != Some(1) {
        return Err(IlrError::PeriodicChain { period: structure.period.unwrap_or(0) });
    }
    let occupancy = limiting_state_distribution(
        &chain,
        &StateDistribution::delta(mdp.num_states(), mdp.initial_state()),
    )?
    .occupancy(policy)?;

    // agreement indicator: 1 exactly on (s, π_E(s))
    let expert_support: Vec<(usize, usize)> = (0..mdp.num_states())
        .map(|s| (s, expert.policy.action_if_deterministic(s).expect("expert is deterministic")))
        .collect();
    let agreement = intrinsic_reward(mdp, &expert_support)?;
    let kappa = 1.0 - occupancy.expected_reward(&agreement)?;
    let tau = expert.tau_mix() as f64;

    let mut rng = stream(master_seed);
    let mut records = Vec::with_capacity(n_random_rewards);
    for trial in 0..n_random_rewards {
        let reward = random_reward_table(&mut rng, mdp.num_states(), mdp.num_actions());
        let lhs = occupancy.expected_reward(&reward)?;
        let rhs = (1.0 - kappa) * expert.occupancy.expected_reward(&reward)? - 4.0 * tau * kappa;
        records.push(TrialRecord {
            trial,
            seed: master_seed,
            measured: lhs,
            bound: rhs,
            satisfied: lhs >= rhs - EXACT_TOL,
            note: format!("kappa={kappa:.6}"),
        });
    }
    Ok(VerificationReport::from_records("lemma7", 1.0, records))
}

/// End-to-end check of the high-probability guarantee: sample a dataset of
/// the planned size, run the reduction, and demand both `TV(ρ^E, ρ^I) ≤ η`
/// and extrinsic regret at most `η` against 20 random bounded rewards.
/// Trials whose learned policy is not ergodic count as flagged failures.
pub fn check_proposition1(
    mdp: &FiniteMdp,
    expert: &ExpertSpec,
    plan: &VerificationPlan,
) -> Result<VerificationReport, IlrError> {
    const N_EXTRINSIC_REWARDS: usize = 20;
    let mut records = Vec::with_capacity(plan.n_trials);
    for trial in 0..plan.n_trials {
        let seed = derive_seed(plan.master_seed, trial as u64);
        let dataset = sample_trajectory(mdp, &expert.policy, plan.n_required, seed)?;
        let record = match ilr(mdp, &dataset, CHECK_SOLVER_TOL) {
            Err(e) => TrialRecord {
                trial,
                seed,
                measured: 1.0,
                bound: plan.eta,
                satisfied: false,
                note: format!("solver failure: {e}"),
            },
            Ok((policy, _, result)) => {
                let chain = mdp.induced_chain(&policy)?;
                let learner_occ = limiting_state_distribution(
                    &chain,
                    &StateDistribution::delta(mdp.num_states(), mdp.initial_state()),
                )?
                .occupancy(&policy)?;
                let tv = total_variation(expert.occupancy.as_flat(), learner_occ.as_flat())?;
                let mut reward_rng = substream(seed, 1);
                let mut regret_ok = true;
                for _ in 0..N_EXTRINSIC_REWARDS {
                    let reward =
                        random_reward_table(&mut reward_rng, mdp.num_states(), mdp.num_actions());
                    let learner = learner_occ.expected_reward(&reward)?;
                    let target = expert.occupancy.expected_reward(&reward)?;
                    if learner < target - plan.eta - EXACT_TOL {
                        regret_ok = false;
                        break;
                    }
                }
                let note = if result.ergodic_under_policy {
                    String::new()
                } else {
                    String::from("non-ergodic learner")
                };
                TrialRecord {
                    trial,
                    seed,
                    measured: tv,
                    bound: plan.eta,
                    satisfied: result.ergodic_under_policy
                        && tv <= plan.eta + EXACT_TOL
                        && regret_ok,
                    note,
                }
            }
        };
        records.push(record);
    }
    Ok(VerificationReport::from_records("prop1", 1.0 - plan.delta, records))
}

/// The boundary of the deterministic-expert assumption: a stochastic expert
/// on a one-state MDP splits mass across actions, any deterministic learner
/// concentrates it, and the TV gap stays bounded away from zero. The check
/// passes when imitation fails.
pub fn stochastic_expert_demo(master_seed: u64) -> Result<VerificationReport, IlrError> {
    stochastic_expert_demo_with(0.5, master_seed)
}

/// Same demo with a configurable expert split; `p0 = 1` is the
/// deterministic control case, which is flagged as not a counterexample.
pub fn stochastic_expert_demo_with(
    p0: f64,
    master_seed: u64,
) -> Result<VerificationReport, IlrError> {
    const TV_FLOOR: f64 = 0.1;
    let mdp = FiniteMdp::new(
        vec![vec![vec![1.0], vec![1.0]]],
        vec![vec![0.5, 0.5]],
        0,
    )?;
    let expert_policy = Policy::new(vec![vec![p0, 1.0 - p0]])?;
    let expert_occ = StateDistribution::delta(1, 0).occupancy(&expert_policy)?;
    let dataset = sample_trajectory(&mdp, &expert_policy, 10_000, master_seed)?;
    let (learner, _, _) = ilr(&mdp, &dataset, CHECK_SOLVER_TOL)?;
    let learner_occ = StateDistribution::delta(1, 0).occupancy(&learner)?;
    let tv = total_variation(expert_occ.as_flat(), learner_occ.as_flat())?;
    let note = if expert_policy.is_deterministic() {
        String::from("not a counterexample: expert is deterministic")
    } else {
        String::new()
    };
    let record = TrialRecord {
        trial: 0,
        seed: master_seed,
        measured: tv,
        bound: TV_FLOOR,
        satisfied: tv >= TV_FLOOR,
        note,
    };
    Ok(VerificationReport::from_records("stochastic-demo", 1.0, vec![record]))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::imitation::make_expert;

    /// 5-state MDP where every action row is uniform, so τ_mix = 1.
    fn one_step_mixing_mdp() -> FiniteMdp {
        let row = vec![0.2; 5];
        FiniteMdp::new(
            vec![vec![row.clone(), row.clone()]; 5],
            vec![vec![0.0, 0.0]; 5],
            0,
        )
        .unwrap()
    }

    #[test]
    fn plan_matches_hand_arithmetic() {
        // |S| = 5, τ = 1, η = 0.5, δ = 0.1:
        // N = ceil(max(4000, 450 ln 20) / 0.25) = 16000
        let mdp = one_step_mixing_mdp();
        let expert = make_expert(&mdp, 1, 100).unwrap();
        assert_eq!(expert.tau_mix(), 1);
        let plan = plan_from_proposition1(&mdp, &expert, 0.5, 0.1, 10, 7).unwrap();
        assert_eq!(plan.num_states, 5);
        assert_eq!(plan.n_required, 16_000);
        assert!((plan.epsilon - 0.05).abs() < 1e-15);
        assert!(plan.kappa_bound * (1.0 + 4.0) <= plan.eta + 1e-12);
    }

    #[test]
    fn plan_scales_with_tau_cubed() {
        // same formula at τ = 2: ceil(4000 · 8 / 0.25) = 128000
        let lead = (800.0 * 5.0f64).max(450.0 * (2.0f64 / 0.1).ln());
        assert_eq!((lead * 8.0 / 0.25).ceil() as usize, 128_000);
    }

    #[test]
    fn plan_degenerates_cleanly_at_tau_zero() {
        let mdp = FiniteMdp::new(vec![vec![vec![1.0]]], vec![vec![0.3]], 0).unwrap();
        let expert = make_expert(&mdp, 0, 10).unwrap();
        assert_eq!(expert.tau_mix(), 0);
        let plan = plan_from_proposition1(&mdp, &expert, 0.5, 0.1, 1, 0).unwrap();
        assert_eq!(plan.n_required, 1);
    }

    /// 5-state MDP whose every action row is a well-mixed distribution.
    fn fast_mdp(seed: u64) -> FiniteMdp {
        // full branching keeps the expert chain fast-mixing
        generate_random_mdp(&RandomMdpSpec {
            num_states: 5,
            num_actions: 2,
            branching: 5,
            reward_style: RewardStyle::Uniform,
            ensure_communicating: true,
            seed,
        })
        .unwrap()
    }

    #[test]
    fn tv_duality_suite_is_clean() {
        let report = check_tv_duality(200, 99);
        assert!(report.pass);
        assert_eq!(report.successes, 200);
    }

    #[test]
    fn lemma3_suite_is_clean_small() {
        let report = check_lemma3(20, 8, 17).unwrap();
        assert!(report.pass, "{report:?}");
        assert_eq!(report.successes, 20);
    }

    #[test]
    fn lemma4_large_sample_concentrates() {
        let mdp = fast_mdp(5);
        let expert = make_expert(&mdp, 2, 100).unwrap();
        let report = check_lemma4(&mdp, &expert, 100_000, 0.05, 20, 11).unwrap();
        assert!(report.pass, "{report:?}");
        assert_eq!(report.successes, 20);
    }

    #[test]
    fn lemma4_with_loose_epsilon_is_vacuous() {
        let mdp = fast_mdp(5);
        let expert = make_expert(&mdp, 2, 100).unwrap();
        let report = check_lemma4(&mdp, &expert, 10, 1.0, 10, 3).unwrap();
        assert_eq!(report.successes, 10);
    }

    #[test]
    fn lemma5_holds_on_seeded_datasets() {
        let mdp = fast_mdp(7);
        let expert = make_expert(&mdp, 4, 100).unwrap();
        for trial in 0..5u64 {
            let dataset =
                sample_trajectory(&mdp, &expert.policy, 2_000, derive_seed(21, trial)).unwrap();
            let outcome = check_lemma5(&mdp, &expert, &dataset).unwrap();
            assert!(outcome.satisfied, "{outcome:?}");
        }
    }

    #[test]
    fn lemma7_holds_for_the_expert_itself() {
        let mdp = fast_mdp(9);
        let expert = make_expert(&mdp, 6, 100).unwrap();
        let report = check_lemma7(&mdp, &expert, &expert.policy.clone(), 50, 31).unwrap();
        assert_eq!(report.successes, 50, "{report:?}");
    }

    #[test]
    fn lemma7_holds_for_an_unrelated_ergodic_policy() {
        let mdp = fast_mdp(13);
        let expert = make_expert(&mdp, 8, 100).unwrap();
        let other = make_expert(&mdp, 77, 100).unwrap();
        let report = check_lemma7(&mdp, &expert, &other.policy, 50, 32).unwrap();
        assert_eq!(report.successes, 50, "{report:?}");
    }

    #[test]
    fn proposition1_small_run_passes() {
        let mdp = fast_mdp(15);
        let expert = make_expert(&mdp, 10, 100).unwrap();
        let plan = plan_from_proposition1(&mdp, &expert, 0.5, 0.2, 10, 41).unwrap();
        let report = check_proposition1(&mdp, &expert, &plan).unwrap();
        assert!(report.pass, "{report:?}");
    }

    #[test]
    fn stochastic_demo_certifies_the_gap() {
        let report = stochastic_expert_demo(5).unwrap();
        assert!(report.pass);
        assert!((report.per_trial_records[0].measured - 0.5).abs() < 1e-9);
    }

    #[test]
    fn stochastic_demo_skewed_and_control() {
        let skewed = stochastic_expert_demo_with(0.9, 5).unwrap();
        assert!((skewed.per_trial_records[0].measured - 0.1).abs() < 1e-9);
        let control = stochastic_expert_demo_with(1.0, 5).unwrap();
        assert!(!control.pass);
        assert!(control.per_trial_records[0].note.contains("not a counterexample"));
    }

    #[test]
    fn generator_is_deterministic_and_validates() {
        let spec = RandomMdpSpec {
            num_states: 5,
            num_actions: 3,
            branching: 2,
            reward_style: RewardStyle::Sparse,
            ensure_communicating: true,
            seed: 123,
        };
        let a = generate_random_mdp(&spec).unwrap();
        let b = generate_random_mdp(&spec).unwrap();
        assert_eq!(a, b);
        assert!(a.validate().is_ok());
        assert!(is_communicating(&a));
    }

    #[test]
    fn generator_rejects_bad_branching() {
        let spec = RandomMdpSpec {
            num_states: 5,
            num_actions: 2,
            branching: 9,
            reward_style: RewardStyle::Uniform,
            ensure_communicating: false,
            seed: 0,
        };
        assert!(generate_random_mdp(&spec).is_err());
    }

    #[test]
    fn full_branching_is_always_communicating() {
        for seed in 0..5 {
            let mdp = generate_random_mdp(&RandomMdpSpec {
                num_states: 4,
                num_actions: 2,
                branching: 4,
                reward_style: RewardStyle::Uniform,
                ensure_communicating: false,
                seed,
            })
            .unwrap();
            assert!(is_communicating(&mdp));
        }
    }
}
