//! Command implementations. Every command is deterministic given its full
//! flag set: all randomness flows from `--seed` through derived sub-streams.

use std::path::{Path, PathBuf};

use serde::Serialize;

use ilr_core::chain::total_variation;
use ilr_core::imitation::{
    behavioral_cloning, ilr, intrinsic_reward, make_expert, sample_trajectory, ExpertSpec,
};
use ilr_core::mdp::FiniteMdp;
use ilr_core::rng::derive_seed;
use ilr_core::solver::{limiting_occupancy, policy_gain};
use ilr_core::verify::{
    check_lemma3, check_lemma4, check_lemma5, check_lemma7, check_proposition1, check_tv_duality,
    generate_random_mdp, plan_from_proposition1, stochastic_expert_demo, RandomMdpSpec,
    RewardStyle, TrialRecord, VerificationReport,
};

use crate::cli::{GenMdpArgs, ImitateArgs, Method, SweepArgs, VerifyArgs, VerifyCheck};
use crate::config::{load_config, pick, pick_opt};
use crate::exit::{from_core, invalid_input, CliError, EXIT_VERIFY_FAILED};
use crate::formats::{
    read_dataset, read_mdp, write_dataset, write_json, write_mdp, write_report_csv,
    write_sweep_csv, PolicyFile, ReportFile, SweepRow,
};

// sub-stream indices hung off --seed
const STREAM_MDP: u64 = 100;
const STREAM_EXPERT: u64 = 101;
const STREAM_POLICY: u64 = 102;

const MAX_ATTEMPTS: usize = 100_000;
const MIXING_CAP: usize = 1 << 22;

/// Largest total sampling volume a verify run will attempt.
const MAX_TOTAL_SAMPLES: u64 = 200_000_000;

pub fn cmd_gen_mdp(args: &GenMdpArgs) -> Result<i32, CliError> {
    let cfg = load_config(args.config.as_deref())?;
    let states = pick(&args.states, &cfg.states, 5);
    let actions = pick(&args.actions, &cfg.actions, 2);
    let branching = pick(&args.branching, &cfg.branching, states);
    let seed = pick(&args.seed, &cfg.seed, 0);
    let reward_style = parse_reward_style(&pick(
        &args.reward_style,
        &cfg.reward_style,
        String::from("uniform"),
    ))?;
    if branching > states {
        return Err(invalid_input(format!("branching {branching} exceeds states {states}")));
    }
    let spec = RandomMdpSpec {
        num_states: states,
        num_actions: actions,
        branching,
        reward_style,
        ensure_communicating: !args.allow_non_communicating,
        seed: derive_seed(seed, STREAM_MDP),
    };
    let mdp = generate_random_mdp(&spec).map_err(from_core)?;
    write_mdp(&args.out, &mdp)?;
    println!("wrote {} ({} states, {} actions, seed {})", args.out.display(), states, actions, seed);
    if args.with_expert {
        let expert =
            make_expert(&mdp, derive_seed(seed, STREAM_EXPERT), MAX_ATTEMPTS).map_err(from_core)?;
        println!("expert tau_mix = {}", expert.tau_mix());
    }
    Ok(0)
}

#[derive(Debug, Serialize)]
struct ImitateReport {
    method: &'static str,
    n_samples: usize,
    seed: u64,
    intrinsic_gain: f64,
    extrinsic_gain: f64,
    expert_gain: f64,
    tv_to_expert: f64,
    ergodic: bool,
    expert_tau_mix: usize,
}

pub fn cmd_imitate(args: &ImitateArgs) -> Result<i32, CliError> {
    let cfg = load_config(args.config.as_deref())?;
    let n_samples = pick(&args.samples, &cfg.samples, 1_000);
    let seed = pick(&args.seed, &cfg.seed, 0);
    let solver_tol = pick(&args.solver_tol, &cfg.solver_tol, 1e-9);
    let mdp = read_mdp(&args.mdp)?;
    let expert =
        make_expert(&mdp, derive_seed(seed, STREAM_EXPERT), MAX_ATTEMPTS).map_err(from_core)?;
    let dataset = match &args.dataset {
        Some(path) => {
            let loaded = read_dataset(path)?;
            if loaded.histogram.num_states() != mdp.num_states()
                || loaded.histogram.num_actions() != mdp.num_actions()
            {
                return Err(invalid_input(format!(
                    "{}: dataset shape disagrees with the MDP",
                    path.display()
                )));
            }
            loaded
        }
        None => sample_trajectory(&mdp, &expert.policy, n_samples, derive_seed(seed, 0))
            .map_err(from_core)?,
    };
    let n_samples = dataset.len();

    let method = match args.method {
        Some(m) => m,
        None => match cfg.method.as_deref() {
            None | Some("ilr") => Method::Ilr,
            Some("bc") => Method::Bc,
            Some(other) => return Err(invalid_input(format!("unknown method {other:?}"))),
        },
    };
    let (policy, method_name) = match method {
        Method::Ilr => {
            let (policy, _, _) = ilr(&mdp, &dataset, solver_tol).map_err(from_core)?;
            (policy, "ILR")
        }
        Method::Bc => (behavioral_cloning(&mdp, &dataset).map_err(from_core)?, "BC"),
    };

    let extrinsic = mdp.extrinsic_reward();
    let r_int = intrinsic_reward(&mdp, &dataset.support).map_err(from_core)?;
    let learner_occ = limiting_occupancy(&mdp, &policy).map_err(from_core)?;
    let chain = mdp.induced_chain(&policy).map_err(from_core)?;
    let ergodic = ilr_core::chain::chain_structure(&chain).is_ergodic();
    let report = ImitateReport {
        method: method_name,
        n_samples,
        seed,
        intrinsic_gain: learner_occ.expected_reward(&r_int).map_err(from_core)?,
        extrinsic_gain: policy_gain(&mdp, &extrinsic, &policy).map_err(from_core)?,
        expert_gain: expert.occupancy.expected_reward(&extrinsic).map_err(from_core)?,
        tv_to_expert: total_variation(expert.occupancy.as_flat(), learner_occ.as_flat())
            .map_err(from_core)?,
        ergodic,
        expert_tau_mix: expert.tau_mix(),
    };

    if let Some(base) = &args.out {
        write_dataset(&with_suffix(base, ".dataset.json"), mdp.num_states(), mdp.num_actions(), &dataset)?;
        write_json(&with_suffix(base, ".policy.json"), &PolicyFile::from_policy(&policy))?;
        write_json(&with_suffix(base, ".report.json"), &report)?;
    }
    println!("{}", serde_json::to_string_pretty(&report).expect("report serializes"));
    Ok(0)
}

pub fn cmd_verify(args: &VerifyArgs) -> Result<i32, CliError> {
    let cfg = load_config(args.config.as_deref())?;
    let seed = pick(&args.seed, &cfg.seed, 0);
    let report = match args.check {
        VerifyCheck::TvDuality => {
            let trials = pick(&args.trials, &cfg.trials, 1_000);
            check_tv_duality(trials, seed)
        }
        VerifyCheck::StochasticDemo => stochastic_expert_demo(seed).map_err(from_core)?,
        VerifyCheck::Lemma3 => {
            let trials = pick(&args.trials, &cfg.trials, 200);
            let max_states = pick(&args.max_states, &cfg.max_states, 15);
            check_lemma3(trials, max_states, seed).map_err(from_core)?
        }
        VerifyCheck::Lemma4 => {
            let (mdp, expert) = mdp_and_expert(args, &cfg, seed)?;
            let trials = pick(&args.trials, &cfg.trials, 500);
            let samples = pick(&args.samples, &cfg.samples, 100_000);
            let epsilon = pick(&args.epsilon, &cfg.epsilon, 0.05);
            guard_volume(trials, samples)?;
            check_lemma4(&mdp, &expert, samples, epsilon, trials, seed).map_err(from_core)?
        }
        VerifyCheck::Lemma5 => {
            let (mdp, expert) = mdp_and_expert(args, &cfg, seed)?;
            let trials = pick(&args.trials, &cfg.trials, 100);
            let samples = pick(&args.samples, &cfg.samples, 2_000);
            guard_volume(trials, samples)?;
            lemma5_report(&mdp, &expert, trials, samples, seed)?
        }
        VerifyCheck::Lemma7 => {
            let (mdp, expert) = mdp_and_expert(args, &cfg, seed)?;
            let trials = pick(&args.trials, &cfg.trials, 100);
            let policy = make_expert(&mdp, derive_seed(seed, STREAM_POLICY), MAX_ATTEMPTS)
                .map_err(from_core)?
                .policy;
            check_lemma7(&mdp, &expert, &policy, trials, derive_seed(seed, 1)).map_err(from_core)?
        }
        VerifyCheck::Prop1 => {
            let (mdp, expert) = mdp_and_expert(args, &cfg, seed)?;
            let trials = pick(&args.trials, &cfg.trials, 50);
            let eta = pick(&args.eta, &cfg.eta, 0.5);
            let delta = pick(&args.delta, &cfg.delta, 0.2);
            let mut plan = plan_from_proposition1(&mdp, &expert, eta, delta, trials, seed)
                .map_err(from_core)?;
            if let Some(n) = pick_opt(&args.samples_override, &cfg.samples_override) {
                plan.n_required = n;
            }
            guard_volume(plan.n_trials, plan.n_required)?;
            println!(
                "plan: tau_mix={} epsilon={} kappa_bound={} N={}",
                plan.tau_mix, plan.epsilon, plan.kappa_bound, plan.n_required
            );
            check_proposition1(&mdp, &expert, &plan).map_err(from_core)?
        }
    };

    if let Some(base) = &args.out {
        write_json(&with_suffix(base, ".json"), &ReportFile::from_report(&report))?;
        write_report_csv(&with_suffix(base, ".csv"), &report)?;
    }
    println!(
        "{}: {} ({}/{} trials, rate {:.4}, required {:.4})",
        report.check_name,
        if report.pass { "PASS" } else { "FAIL" },
        report.successes,
        report.trials,
        report.empirical_rate,
        report.required_rate
    );
    Ok(if report.pass { 0 } else { EXIT_VERIFY_FAILED })
}

fn lemma5_report(
    mdp: &FiniteMdp,
    expert: &ExpertSpec,
    trials: usize,
    samples: usize,
    seed: u64,
) -> Result<VerificationReport, CliError> {
    let mut records = Vec::with_capacity(trials);
    for trial in 0..trials {
        let trial_seed = derive_seed(seed, trial as u64);
        let dataset =
            sample_trajectory(mdp, &expert.policy, samples, trial_seed).map_err(from_core)?;
        let outcome = check_lemma5(mdp, expert, &dataset).map_err(from_core)?;
        records.push(TrialRecord {
            trial,
            seed: trial_seed,
            measured: outcome.intrinsic_gain,
            bound: 1.0 - outcome.kappa_realized,
            satisfied: outcome.satisfied,
            note: String::new(),
        });
    }
    Ok(VerificationReport::from_records("lemma5", 1.0, records))
}

pub fn cmd_sweep(args: &SweepArgs) -> Result<i32, CliError> {
    let cfg = load_config(args.config.as_deref())?;
    let seed = pick(&args.seed, &cfg.seed, 0);
    let trials = pick(&args.trials, &cfg.trials, 20);
    let max_samples = pick(&args.samples, &cfg.samples, 4_096);
    let solver_tol = pick(&args.solver_tol, &cfg.solver_tol, 1e-9);
    let fractions = parse_fractions(&pick(
        &args.fractions,
        &cfg.fractions,
        String::from("0.00390625,0.015625,0.0625,0.25,1.0"),
    ))?;
    let methods = parse_methods(&pick(&args.methods, &cfg.methods, String::from("ilr,bc")))?;

    let mdp = read_mdp(&args.mdp)?;
    let expert =
        make_expert(&mdp, derive_seed(seed, STREAM_EXPERT), MAX_ATTEMPTS).map_err(from_core)?;
    let extrinsic = mdp.extrinsic_reward();
    let expert_gain = expert.occupancy.expected_reward(&extrinsic).map_err(from_core)?;

    let mut rows = Vec::new();
    for trial in 0..trials {
        let trial_seed = derive_seed(seed, trial as u64);
        let full =
            sample_trajectory(&mdp, &expert.policy, max_samples, trial_seed).map_err(from_core)?;
        for &fraction in &fractions {
            let n = ((fraction * max_samples as f64).ceil() as usize).clamp(1, max_samples);
            let dataset = full.prefix(n).map_err(from_core)?;
            let r_int = intrinsic_reward(&mdp, &dataset.support).map_err(from_core)?;
            for &method in &methods {
                let policy = match method {
                    Method::Ilr => ilr(&mdp, &dataset, solver_tol).map_err(from_core)?.0,
                    Method::Bc => behavioral_cloning(&mdp, &dataset).map_err(from_core)?,
                };
                let occ = limiting_occupancy(&mdp, &policy).map_err(from_core)?;
                rows.push(SweepRow {
                    dataset_fraction: fraction,
                    n_samples: n,
                    method: match method {
                        Method::Ilr => "ILR",
                        Method::Bc => "BC",
                    },
                    extrinsic_gain: occ.expected_reward(&extrinsic).map_err(from_core)?,
                    expert_gain,
                    tv_to_expert: total_variation(expert.occupancy.as_flat(), occ.as_flat())
                        .map_err(from_core)?,
                    intrinsic_gain: occ.expected_reward(&r_int).map_err(from_core)?,
                    trial,
                    seed: trial_seed,
                });
            }
        }
    }
    write_sweep_csv(&args.out, &rows)?;
    println!("wrote {} rows to {}", rows.len(), args.out.display());
    Ok(0)
}

/// MDP from `--mdp` when given, else generated from the flag set; expert is
/// always derived from the seed.
fn mdp_and_expert(
    args: &VerifyArgs,
    cfg: &crate::config::ConfigFile,
    seed: u64,
) -> Result<(FiniteMdp, ExpertSpec), CliError> {
    let mdp = match &args.mdp {
        Some(path) => read_mdp(path)?,
        None => {
            let states = pick(&args.states, &cfg.states, 5);
            let actions = pick(&args.actions, &cfg.actions, 2);
            let branching = pick(&args.branching, &cfg.branching, states);
            if branching > states {
                return Err(invalid_input(format!("branching {branching} exceeds states {states}")));
            }
            generate_random_mdp(&RandomMdpSpec {
                num_states: states,
                num_actions: actions,
                branching,
                reward_style: RewardStyle::Uniform,
                ensure_communicating: true,
                seed: derive_seed(seed, STREAM_MDP),
            })
            .map_err(from_core)?
        }
    };
    let expert = make_expert(&mdp, derive_seed(seed, STREAM_EXPERT), MAX_ATTEMPTS)
        .map_err(from_core)?;
    // large mixing caps guard against pathological generated chains
    debug_assert!(expert.mixing.t_cap <= MIXING_CAP);
    Ok((mdp, expert))
}

fn guard_volume(trials: usize, samples_per_trial: usize) -> Result<(), CliError> {
    let total = trials as u64 * samples_per_trial as u64;
    if total > MAX_TOTAL_SAMPLES {
        return Err(invalid_input(format!(
            "run would sample {total} steps (> {MAX_TOTAL_SAMPLES}); \
             lower --trials/--samples or use --samples-override"
        )));
    }
    Ok(())
}

fn parse_reward_style(text: &str) -> Result<RewardStyle, CliError> {
    match text {
        "uniform" => Ok(RewardStyle::Uniform),
        "sparse" => Ok(RewardStyle::Sparse),
        other => Err(invalid_input(format!("unknown reward style {other:?}"))),
    }
}

fn parse_fractions(text: &str) -> Result<Vec<f64>, CliError> {
    let mut out = Vec::new();
    for part in text.split(',') {
        let f: f64 = part
            .trim()
            .parse()
            .map_err(|_| invalid_input(format!("bad fraction {part:?}")))?;
        if !(f > 0.0 && f <= 1.0) {
            return Err(invalid_input(format!("fraction {f} outside (0, 1]")));
        }
        out.push(f);
    }
    if out.is_empty() {
        return Err(invalid_input("no fractions given"));
    }
    Ok(out)
}

fn parse_methods(text: &str) -> Result<Vec<Method>, CliError> {
    let mut out = Vec::new();
    for part in text.split(',') {
        match part.trim().to_ascii_lowercase().as_str() {
            "ilr" => out.push(Method::Ilr),
            "bc" => out.push(Method::Bc),
            other => return Err(invalid_input(format!("unknown method {other:?}"))),
        }
    }
    if out.is_empty() {
        return Err(invalid_input("no methods given"));
    }
    Ok(out)
}

fn with_suffix(base: &Path, suffix: &str) -> PathBuf {
    let mut name = base.as_os_str().to_os_string();
    name.push(suffix);
    PathBuf::from(name)
}
