//! Command-line surface.

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Debug, Parser)]
#[command(
    name = "ilr",
    about = "Finite-MDP laboratory for imitation learning by average-reward RL",
    version
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Generate a random communicating MDP and write it to a JSON file.
    GenMdp(GenMdpArgs),
    /// Sample an expert dataset from an MDP and imitate it.
    Imitate(ImitateArgs),
    /// Run one verification check and report pass/fail per trial.
    Verify(VerifyArgs),
    /// Dataset-size sweep: imitate from growing prefixes of one trajectory.
    Sweep(SweepArgs),
}

#[derive(Debug, Args)]
pub struct GenMdpArgs {
    /// Output path for the MDP JSON file.
    #[arg(long)]
    pub out: PathBuf,
    #[arg(long)]
    pub states: Option<usize>,
    #[arg(long)]
    pub actions: Option<usize>,
    /// Distinct successors per (state, action) row; defaults to --states.
    #[arg(long)]
    pub branching: Option<usize>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Reward style: "uniform" or "sparse".
    #[arg(long)]
    pub reward_style: Option<String>,
    /// Skip the rejection loop that enforces a communicating MDP.
    #[arg(long)]
    pub allow_non_communicating: bool,
    /// Also derive a deterministic ergodic expert and print its mixing time.
    #[arg(long)]
    pub with_expert: bool,
    #[arg(long)]
    pub config: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Method {
    Ilr,
    Bc,
}

#[derive(Debug, Args)]
pub struct ImitateArgs {
    /// MDP JSON file to imitate in.
    #[arg(long)]
    pub mdp: PathBuf,
    /// "ilr" (default) or "bc".
    #[arg(long, value_enum)]
    pub method: Option<Method>,
    /// Expert trajectory length.
    #[arg(long)]
    pub samples: Option<usize>,
    /// Reuse a previously written dataset file instead of sampling.
    #[arg(long)]
    pub dataset: Option<PathBuf>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub solver_tol: Option<f64>,
    /// Base path; writes <out>.policy.json and <out>.report.json.
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long)]
    pub config: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum VerifyCheck {
    /// Total-variation identities on random distribution pairs.
    TvDuality,
    /// Mixing-time decay: truncated TV sums and submultiplicativity.
    Lemma3,
    /// Histogram concentration around the expert occupancy.
    Lemma4,
    /// Intrinsic gain of the solved policy reaches 1 - kappa.
    Lemma5,
    /// Intrinsic-to-extrinsic transfer for ergodic policies.
    Lemma7,
    /// End-to-end high-probability guarantee.
    Prop1,
    /// Stochastic experts defeat deterministic imitation.
    StochasticDemo,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    /// Which check to run.
    #[arg(value_enum)]
    pub check: VerifyCheck,
    /// MDP JSON file; generated from the seed when absent.
    #[arg(long)]
    pub mdp: Option<PathBuf>,
    #[arg(long)]
    pub states: Option<usize>,
    #[arg(long)]
    pub actions: Option<usize>,
    #[arg(long)]
    pub branching: Option<usize>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub eta: Option<f64>,
    #[arg(long)]
    pub delta: Option<f64>,
    #[arg(long)]
    pub epsilon: Option<f64>,
    #[arg(long)]
    pub trials: Option<usize>,
    /// Per-trial sample count (checks that sample trajectories).
    #[arg(long)]
    pub samples: Option<usize>,
    /// Replace prop1's prescribed per-trial sample count.
    #[arg(long)]
    pub samples_override: Option<usize>,
    /// State-count cap for randomly generated chains (lemma3).
    #[arg(long)]
    pub max_states: Option<usize>,
    /// Base path; writes <out>.json and <out>.csv.
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long)]
    pub config: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    /// MDP JSON file to sweep over.
    #[arg(long)]
    pub mdp: PathBuf,
    /// Output CSV path.
    #[arg(long)]
    pub out: PathBuf,
    #[arg(long)]
    pub trials: Option<usize>,
    /// Full trajectory length; fractions are prefixes of it.
    #[arg(long)]
    pub samples: Option<usize>,
    /// Comma-separated dataset fractions in (0, 1].
    #[arg(long)]
    pub fractions: Option<String>,
    /// Comma-separated methods, e.g. "ilr,bc".
    #[arg(long)]
    pub methods: Option<String>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub solver_tol: Option<f64>,
    #[arg(long)]
    pub config: Option<PathBuf>,
}
