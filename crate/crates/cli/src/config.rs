//! Optional config file support. A config file pins defaults (for CI);
//! command-line flags override it. Unknown keys are rejected.

use std::path::Path;

use serde::Deserialize;

use crate::exit::CliError;
use crate::formats::read_json;

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigFile {
    pub states: Option<usize>,
    pub actions: Option<usize>,
    pub branching: Option<usize>,
    pub seed: Option<u64>,
    pub eta: Option<f64>,
    pub delta: Option<f64>,
    pub epsilon: Option<f64>,
    pub trials: Option<usize>,
    pub samples: Option<usize>,
    pub samples_override: Option<usize>,
    pub max_states: Option<usize>,
    pub method: Option<String>,
    pub methods: Option<String>,
    pub reward_style: Option<String>,
    pub fractions: Option<String>,
    pub solver_tol: Option<f64>,
}

pub fn load_config(path: Option<&Path>) -> Result<ConfigFile, CliError> {
    match path {
        None => Ok(ConfigFile::default()),
        Some(p) => read_json(p),
    }
}

/// Flag beats config beats default.
pub fn pick<T: Clone>(flag: &Option<T>, config: &Option<T>, default: T) -> T {
    flag.clone().or_else(|| config.clone()).unwrap_or(default)
}

/// Flag beats config; may be absent.
pub fn pick_opt<T: Clone>(flag: &Option<T>, config: &Option<T>) -> Option<T> {
    flag.clone().or_else(|| config.clone())
}
