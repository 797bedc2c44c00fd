//! Property tests for the distribution identities and solver contracts.

use ilr_core::chain::{
    cesaro_average, chain_structure, stationary_distribution, total_variation, tv_sup_oracle,
};
use ilr_core::imitation::{sample_trajectory, streak_decompose};
use ilr_core::mdp::{OccupancyDistribution, Policy, RewardTable, StateDistribution};
use ilr_core::rng::{stream, substream};
use ilr_core::solver::{enumerate_optimal, policy_gain, solve_average_reward};
use ilr_core::verify::{
    generate_random_mdp, random_distribution, random_ergodic_chain, RandomMdpSpec, RewardStyle,
};
use proptest::prelude::*;
use rand::Rng;

fn random_mdp(seed: u64, num_states: usize, num_actions: usize) -> ilr_core::FiniteMdp {
    generate_random_mdp(&RandomMdpSpec {
        num_states,
        num_actions,
        branching: num_states,
        reward_style: RewardStyle::Uniform,
        ensure_communicating: true,
        seed,
    })
    .unwrap()
}

proptest! {
    #[test]
    fn expected_reward_is_linear_in_the_table(seed in any::<u64>(), alpha in 0.0f64..=1.0) {
        let mut rng = stream(seed);
        let n = rng.gen_range(2..6usize);
        let na = rng.gen_range(1..4usize);
        let occ = OccupancyDistribution::new(n, na, random_distribution(&mut rng, n * na)).unwrap();
        let r1 = ilr_core::verify::random_reward_table(&mut rng, n, na);
        let r2 = ilr_core::verify::random_reward_table(&mut rng, n, na);
        let blended: Vec<Vec<f64>> = (0..n)
            .map(|s| (0..na).map(|a| alpha * r1.value(s, a) + (1.0 - alpha) * r2.value(s, a)).collect())
            .collect();
        let blend = RewardTable::new(blended, "blend").unwrap();
        let lhs = occ.expected_reward(&blend).unwrap();
        let rhs = alpha * occ.expected_reward(&r1).unwrap()
            + (1.0 - alpha) * occ.expected_reward(&r2).unwrap();
        prop_assert!((lhs - rhs).abs() <= 1e-12);
    }

    #[test]
    fn deterministic_chain_rows_are_transition_rows(seed in any::<u64>()) {
        let mut rng = stream(seed);
        let n = rng.gen_range(2..6usize);
        let na = rng.gen_range(2..4usize);
        let mdp = random_mdp(seed, n, na);
        let actions: Vec<usize> = (0..n).map(|_| rng.gen_range(0..na)).collect();
        let policy = Policy::deterministic(&actions, na).unwrap();
        let chain = mdp.induced_chain(&policy).unwrap();
        for s in 0..n {
            prop_assert_eq!(chain.row(s), mdp.transition_row(s, actions[s]));
        }
    }

    #[test]
    fn occupancy_marginal_roundtrips(seed in any::<u64>()) {
        let mut rng = stream(seed);
        let n = rng.gen_range(2..8usize);
        let na = rng.gen_range(1..5usize);
        let rho = StateDistribution::new(random_distribution(&mut rng, n)).unwrap();
        let mut rows = Vec::with_capacity(n);
        for _ in 0..n {
            rows.push(random_distribution(&mut rng, na));
        }
        let policy = Policy::new(rows).unwrap();
        let marginal = rho.occupancy(&policy).unwrap().state_marginal();
        for (p, q) in marginal.probs().iter().zip(rho.probs()) {
            prop_assert!((p - q).abs() <= 1e-12);
        }
    }

    #[test]
    fn tv_equals_subset_supremum_and_bounds_test_functions(seed in any::<u64>()) {
        let mut rng = stream(seed);
        let k = rng.gen_range(2..=12usize);
        let p = random_distribution(&mut rng, k);
        let q = random_distribution(&mut rng, k);
        let tv = total_variation(&p, &q).unwrap();
        let (sup, witness) = tv_sup_oracle(&p, &q).unwrap();
        prop_assert!((tv - sup).abs() <= 1e-12);
        // the returned subset is exactly the positive-gap set
        let expected: Vec<usize> = (0..k).filter(|&i| p[i] > q[i]).collect();
        prop_assert_eq!(witness, expected);
        let v: Vec<f64> = (0..k).map(|_| rng.gen::<f64>()).collect();
        let gap: f64 = p.iter().zip(&q).zip(&v).map(|((a, b), w)| (a - b) * w).sum();
        prop_assert!(gap.abs() <= 2.0 * tv + 1e-12);
    }

    #[test]
    fn streak_accounting_identities(seed in any::<u64>()) {
        let mut rng = stream(seed);
        let n = rng.gen_range(2..5usize);
        let na = rng.gen_range(2..4usize);
        let steps = rng.gen_range(1..200usize);
        let trajectory: Vec<(usize, usize)> =
            (0..steps).map(|_| (rng.gen_range(0..n), rng.gen_range(0..na))).collect();
        let reference_actions: Vec<usize> = (0..n).map(|_| rng.gen_range(0..na)).collect();
        let reference = Policy::deterministic(&reference_actions, na).unwrap();
        let d = streak_decompose(&trajectory, &reference).unwrap();
        prop_assert_eq!(d.agreement_steps() + d.disagreement_count, steps);
        prop_assert!(d.num_streaks() <= d.disagreement_count + 1);
    }

    #[test]
    fn trajectories_are_seed_deterministic(seed in any::<u64>()) {
        let mdp = random_mdp(seed, 4, 2);
        let mut rng = substream(seed, 9);
        let actions: Vec<usize> = (0..4).map(|_| rng.gen_range(0..2usize)).collect();
        let policy = Policy::deterministic(&actions, 2).unwrap();
        let a = sample_trajectory(&mdp, &policy, 100, seed).unwrap();
        let b = sample_trajectory(&mdp, &policy, 100, seed).unwrap();
        prop_assert_eq!(a, b);
    }
}

// The Cesàro cross-checks and the exhaustive oracle are costly per case.
proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn stationary_agrees_with_cesaro(seed in any::<u64>()) {
        let chain = random_ergodic_chain(seed, 8).unwrap();
        let rho = stationary_distribution(&chain).unwrap();
        let start = StateDistribution::delta(chain.num_states(), 0);
        let avg = cesaro_average(&chain, &start, 100_000).unwrap();
        let tv = total_variation(rho.probs(), avg.probs()).unwrap();
        prop_assert!(tv <= 1e-3, "tv = {}", tv);
    }

    #[test]
    fn solver_matches_exhaustive_oracle(seed in any::<u64>()) {
        let mut rng = stream(seed);
        let n = rng.gen_range(2..=4usize);
        let na = rng.gen_range(2..=3usize);
        let mdp = random_mdp(seed, n, na);
        let reward = mdp.extrinsic_reward();
        let solved = solve_average_reward(&mdp, &reward, 1e-9, 1_000_000).unwrap();
        let (best, _) = enumerate_optimal(&mdp, &reward).unwrap();
        prop_assert!((solved.gain - best).abs() <= 1e-6, "solved {} vs best {}", solved.gain, best);
        let replayed = policy_gain(&mdp, &reward, &solved.policy).unwrap();
        prop_assert!((replayed - solved.gain).abs() <= 1e-9);
    }

    #[test]
    fn optimal_policy_set_is_affine_invariant(seed in any::<u64>()) {
        let mut rng = stream(seed);
        let n = rng.gen_range(2..=3usize);
        let na = 2usize;
        let mdp = random_mdp(seed, n, na);
        let reward = mdp.extrinsic_reward();
        // a r + b mapped back into [0,1]
        let scaled: Vec<Vec<f64>> = reward
            .values()
            .iter()
            .map(|row| row.iter().map(|&r| 0.4 * r + 0.3).collect())
            .collect();
        let scaled = RewardTable::new(scaled, "affine").unwrap();
        let (_, policies_a) = enumerate_optimal(&mdp, &reward).unwrap();
        let (_, policies_b) = enumerate_optimal(&mdp, &scaled).unwrap();
        prop_assert_eq!(policies_a, policies_b);
    }

    #[test]
    fn ergodic_policy_gain_matches_cesaro_route(seed in any::<u64>()) {
        let mdp = random_mdp(seed, 4, 2);
        let mut rng = substream(seed, 2);
        let actions: Vec<usize> = (0..4).map(|_| rng.gen_range(0..2usize)).collect();
        let policy = Policy::deterministic(&actions, 2).unwrap();
        let chain = mdp.induced_chain(&policy).unwrap();
        prop_assume!(chain_structure(&chain).is_ergodic());
        let reward = mdp.extrinsic_reward();
        let exact = policy_gain(&mdp, &reward, &policy).unwrap();
        let start = StateDistribution::delta(4, mdp.initial_state());
        let cesaro = cesaro_average(&chain, &start, 2_000_000).unwrap();
        let via_cesaro = cesaro.occupancy(&policy).unwrap().expected_reward(&reward).unwrap();
        prop_assert!((exact - via_cesaro).abs() <= 1e-6);
    }
}
