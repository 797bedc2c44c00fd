//! On-disk formats: MDP files, dataset files, policy files, verification
//! reports (JSON), and the per-trial / sweep CSV schemas.

use std::fs;
use std::io::Write;
use std::path::Path;

use serde::{Deserialize, Serialize};

use ilr_core::imitation::ExpertDataset;
use ilr_core::mdp::{FiniteMdp, Policy, ValidationOutcome};
use ilr_core::verify::VerificationReport;

use crate::exit::{invalid_input, runtime_failure, CliError};

/// Leading comment line of every CSV this tool writes.
pub const CSV_SCHEMA_COMMENT: &str = "# ilr csv schema=1";

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MdpFile {
    pub num_states: usize,
    pub num_actions: usize,
    pub transitions: Vec<Vec<Vec<f64>>>,
    pub rewards: Vec<Vec<f64>>,
    pub initial_state: usize,
}

impl MdpFile {
    pub fn from_mdp(mdp: &FiniteMdp) -> Self {
        MdpFile {
            num_states: mdp.num_states(),
            num_actions: mdp.num_actions(),
            transitions: mdp.transitions().clone(),
            rewards: mdp.rewards().clone(),
            initial_state: mdp.initial_state(),
        }
    }
}

pub fn write_mdp(path: &Path, mdp: &FiniteMdp) -> Result<(), CliError> {
    write_json(path, &MdpFile::from_mdp(mdp))
}

/// Loads and validates an MDP file. Any invariant violation is rejected.
pub fn read_mdp(path: &Path) -> Result<FiniteMdp, CliError> {
    let file: MdpFile = read_json(path)?;
    if file.transitions.len() != file.num_states
        || file.transitions.iter().any(|per_a| per_a.len() != file.num_actions)
    {
        return Err(invalid_input(format!("{}: table shape disagrees with header", path.display())));
    }
    let mdp = FiniteMdp::new_unchecked(file.transitions, file.rewards, file.initial_state);
    match mdp.validate() {
        ValidationOutcome::Ok => Ok(mdp),
        ValidationOutcome::Violations(v) => Err(invalid_input(format!(
            "{}: invalid MDP: {}",
            path.display(),
            v.join("; ")
        ))),
    }
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DatasetFile {
    pub seed: u64,
    pub n: usize,
    pub num_states: usize,
    pub num_actions: usize,
    /// `[state, action]` pairs.
    pub trajectory: Vec<[usize; 2]>,
    /// Stored for cross-checking; recomputed on load.
    pub support: Vec<[usize; 2]>,
}

impl DatasetFile {
    pub fn from_dataset(num_states: usize, num_actions: usize, dataset: &ExpertDataset) -> Self {
        DatasetFile {
            seed: dataset.seed,
            n: dataset.len(),
            num_states,
            num_actions,
            trajectory: dataset.trajectory.iter().map(|&(s, a)| [s, a]).collect(),
            support: dataset.support.iter().map(|&(s, a)| [s, a]).collect(),
        }
    }
}

pub fn write_dataset(
    path: &Path,
    num_states: usize,
    num_actions: usize,
    dataset: &ExpertDataset,
) -> Result<(), CliError> {
    write_json(path, &DatasetFile::from_dataset(num_states, num_actions, dataset))
}

pub fn read_dataset(path: &Path) -> Result<ExpertDataset, CliError> {
    let file: DatasetFile = read_json(path)?;
    let trajectory = file.trajectory.iter().map(|&[s, a]| (s, a)).collect();
    let dataset =
        ExpertDataset::from_trajectory(file.num_states, file.num_actions, trajectory, file.seed)
            .map_err(|e| invalid_input(format!("{}: {e}", path.display())))?;
    let stored: Vec<(usize, usize)> = file.support.iter().map(|&[s, a]| (s, a)).collect();
    if stored != dataset.support {
        return Err(invalid_input(format!(
            "{}: stored support disagrees with the recomputed histogram",
            path.display()
        )));
    }
    if file.n != dataset.len() {
        return Err(invalid_input(format!("{}: stored n disagrees with trajectory", path.display())));
    }
    Ok(dataset)
}

#[derive(Debug, Serialize, Deserialize)]
pub struct PolicyFile {
    pub action_probs: Vec<Vec<f64>>,
    pub deterministic: bool,
}

impl PolicyFile {
    pub fn from_policy(policy: &Policy) -> Self {
        PolicyFile {
            action_probs: policy.rows().clone(),
            deterministic: policy.is_deterministic(),
        }
    }
}

/// JSON mirror of a verification report.
#[derive(Debug, Serialize)]
pub struct ReportFile<'a> {
    pub check_name: &'a str,
    pub trials: usize,
    pub successes: usize,
    pub empirical_rate: f64,
    pub required_rate: f64,
    pub pass: bool,
    pub records: Vec<RecordRow<'a>>,
}

#[derive(Debug, Serialize)]
pub struct RecordRow<'a> {
    pub trial: usize,
    pub seed: u64,
    pub measured: f64,
    pub bound: f64,
    pub satisfied: bool,
    pub note: &'a str,
}

impl<'a> ReportFile<'a> {
    pub fn from_report(report: &'a VerificationReport) -> Self {
        ReportFile {
            check_name: &report.check_name,
            trials: report.trials,
            successes: report.successes,
            empirical_rate: report.empirical_rate,
            required_rate: report.required_rate,
            pass: report.pass,
            records: report
                .per_trial_records
                .iter()
                .map(|r| RecordRow {
                    trial: r.trial,
                    seed: r.seed,
                    measured: r.measured,
                    bound: r.bound,
                    satisfied: r.satisfied,
                    note: &r.note,
                })
                .collect(),
        }
    }
}

/// Per-trial records as CSV: `trial,seed,measured,bound,satisfied`.
pub fn write_report_csv(path: &Path, report: &VerificationReport) -> Result<(), CliError> {
    let mut out = String::new();
    out.push_str(CSV_SCHEMA_COMMENT);
    out.push('\n');
    out.push_str("trial,seed,measured,bound,satisfied\n");
    for r in &report.per_trial_records {
        out.push_str(&format!("{},{},{},{},{}\n", r.trial, r.seed, r.measured, r.bound, r.satisfied));
    }
    fs::write(path, out).map_err(|e| runtime_failure(format!("{}: {e}", path.display())))
}

/// One row of the sweep CSV.
#[derive(Debug, Clone)]
pub struct SweepRow {
    pub dataset_fraction: f64,
    pub n_samples: usize,
    pub method: &'static str,
    pub extrinsic_gain: f64,
    pub expert_gain: f64,
    pub tv_to_expert: f64,
    pub intrinsic_gain: f64,
    pub trial: usize,
    pub seed: u64,
}

pub const SWEEP_HEADER: &str =
    "dataset_fraction,n_samples,method,extrinsic_gain,expert_gain,tv_to_expert,intrinsic_gain,trial,seed";

pub fn write_sweep_csv(path: &Path, rows: &[SweepRow]) -> Result<(), CliError> {
    let file = fs::File::create(path)
        .map_err(|e| runtime_failure(format!("{}: {e}", path.display())))?;
    let mut w = std::io::BufWriter::new(file);
    let emit = |w: &mut dyn Write| -> std::io::Result<()> {
        writeln!(w, "{CSV_SCHEMA_COMMENT}")?;
        writeln!(w, "{SWEEP_HEADER}")?;
        for r in rows {
            writeln!(
                w,
                "{},{},{},{},{},{},{},{},{}",
                r.dataset_fraction,
                r.n_samples,
                r.method,
                r.extrinsic_gain,
                r.expert_gain,
                r.tv_to_expert,
                r.intrinsic_gain,
                r.trial,
                r.seed
            )?;
        }
        Ok(())
    };
    emit(&mut w).map_err(|e| runtime_failure(format!("{}: {e}", path.display())))
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<(), CliError> {
    let mut text = serde_json::to_string_pretty(value)
        .map_err(|e| runtime_failure(format!("serializing {}: {e}", path.display())))?;
    text.push('\n');
    fs::write(path, text).map_err(|e| runtime_failure(format!("{}: {e}", path.display())))
}

pub fn read_json<T: for<'de> Deserialize<'de>>(path: &Path) -> Result<T, CliError> {
    let text = fs::read_to_string(path)
        .map_err(|e| invalid_input(format!("{}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| invalid_input(format!("{}: {e}", path.display())))
}
