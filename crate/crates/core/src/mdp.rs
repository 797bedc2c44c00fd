//! The finite average-reward MDP data model: dynamics, policies, induced
//! chains, distributions over states and state-action pairs, and bounded
//! reward tables.

use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use crate::error::IlrError;
use crate::math;
use crate::STOCHASTIC_TOL;

/// A finite MDP `(S, A, T, R, s1)` with per-step rewards in `[0, 1]`.
#[derive(Debug, Clone, PartialEq)]
pub struct FiniteMdp {
    num_states: usize,
    num_actions: usize,
    /// `transitions[s][a][s']`, each `[s][a]` row a distribution over `s'`.
    transitions: Vec<Vec<Vec<f64>>>,
    /// `rewards[s][a]` in `[0, 1]`.
    rewards: Vec<Vec<f64>>,
    initial_state: usize,
}

/// Result of validating a [`FiniteMdp`]. Violations are data, not failures.
#[derive(Debug, Clone, PartialEq)]
pub enum ValidationOutcome {
    Ok,
    Violations(Vec<String>),
}

impl ValidationOutcome {
    pub fn is_ok(&self) -> bool {
        matches!(self, ValidationOutcome::Ok)
    }
}

impl FiniteMdp {
    /// Builds an MDP without checking invariants. Pair with [`Self::validate`].
    pub fn new_unchecked(
        transitions: Vec<Vec<Vec<f64>>>,
        rewards: Vec<Vec<f64>>,
        initial_state: usize,
    ) -> Self {
        let num_states = transitions.len();
        let num_actions = transitions.first().map_or(0, Vec::len);
        FiniteMdp { num_states, num_actions, transitions, rewards, initial_state }
    }

    /// Builds an MDP and rejects it if any invariant fails.
    pub fn new(
        transitions: Vec<Vec<Vec<f64>>>,
        rewards: Vec<Vec<f64>>,
        initial_state: usize,
    ) -> Result<Self, IlrError> {
        let mdp = Self::new_unchecked(transitions, rewards, initial_state);
        match mdp.validate() {
            ValidationOutcome::Ok => Ok(mdp),
            ValidationOutcome::Violations(v) => {
                Err(IlrError::InvalidArgument(format!("invalid MDP: {}", v.join("; "))))
            }
        }
    }

    /// Checks every invariant: shapes, row stochasticity within
    /// [`STOCHASTIC_TOL`], reward bounds, and the initial-state range.
    /// Out-of-tolerance rows are reported, never renormalized.
    pub fn validate(&self) -> ValidationOutcome {
        let mut violations = Vec::new();
        if self.num_states == 0 {
            violations.push(String::from("num_states must be positive"));
        }
        if self.num_actions == 0 {
            violations.push(String::from("num_actions must be positive"));
        }
        if self.transitions.len() != self.num_states || self.rewards.len() != self.num_states {
            violations.push(format!(
                "transition/reward tables must have {} state rows",
                self.num_states
            ));
            return ValidationOutcome::Violations(violations);
        }
        for (s, per_action) in self.transitions.iter().enumerate() {
            if per_action.len() != self.num_actions {
                violations.push(format!("state {s} has {} actions, expected {}", per_action.len(), self.num_actions));
                continue;
            }
            for (a, row) in per_action.iter().enumerate() {
                if row.len() != self.num_states {
                    violations.push(format!("transition row at ({s},{a}) has wrong length"));
                    continue;
                }
                if let Some(msg) = check_distribution_row(row) {
                    violations.push(format!("{msg} at ({s},{a})"));
                }
            }
        }
        for (s, row) in self.rewards.iter().enumerate() {
            if row.len() != self.num_actions {
                violations.push(format!("reward row at state {s} has wrong length"));
                continue;
            }
            for (a, &r) in row.iter().enumerate() {
                if !(0.0..=1.0).contains(&r) {
                    violations.push(format!("reward {r} out of [0,1] at ({s},{a})"));
                }
            }
        }
        if self.initial_state >= self.num_states {
            violations.push(format!(
                "initial_state {} out of range (< {})",
                self.initial_state, self.num_states
            ));
        }
        if violations.is_empty() {
            ValidationOutcome::Ok
        } else {
            ValidationOutcome::Violations(violations)
        }
    }

    pub fn num_states(&self) -> usize {
        self.num_states
    }

    pub fn num_actions(&self) -> usize {
        self.num_actions
    }

    pub fn initial_state(&self) -> usize {
        self.initial_state
    }

    /// The transition row `T[s][a][·]`.
    pub fn transition_row(&self, s: usize, a: usize) -> &[f64] {
        &self.transitions[s][a]
    }

    pub fn transitions(&self) -> &Vec<Vec<Vec<f64>>> {
        &self.transitions
    }

    pub fn rewards(&self) -> &Vec<Vec<f64>> {
        &self.rewards
    }

    /// The environment's own reward as a labeled table.
    pub fn extrinsic_reward(&self) -> RewardTable {
        RewardTable::new(self.rewards.clone(), "extrinsic").expect("rewards validated in [0,1]")
    }

    /// `P[s][s'] = Σ_a π[s][a] T[s][a][s']`.
    pub fn induced_chain(&self, policy: &Policy) -> Result<MarkovChain, IlrError> {
        if policy.num_states() != self.num_states {
            return Err(IlrError::DimensionMismatch {
                expected: self.num_states,
                got: policy.num_states(),
                what: "policy states",
            });
        }
        if policy.num_actions() != self.num_actions {
            return Err(IlrError::DimensionMismatch {
                expected: self.num_actions,
                got: policy.num_actions(),
                what: "policy actions",
            });
        }
        let mut matrix = vec![vec![0.0; self.num_states]; self.num_states];
        for s in 0..self.num_states {
            // Deterministic rows copy T exactly, no arithmetic on the way.
            if let Some(a) = policy.action_if_deterministic(s) {
                matrix[s].copy_from_slice(&self.transitions[s][a]);
                continue;
            }
            for a in 0..self.num_actions {
                let w = policy.prob(s, a);
                if w == 0.0 {
                    continue;
                }
                for (sp, &t) in self.transitions[s][a].iter().enumerate() {
                    matrix[s][sp] += w * t;
                }
            }
        }
        MarkovChain::new(matrix)
    }
}

fn check_distribution_row(row: &[f64]) -> Option<String> {
    for &p in row {
        if p < 0.0 {
            return Some(format!("negative probability {p}"));
        }
    }
    let sum: f64 = row.iter().sum();
    if math::abs(sum - 1.0) > STOCHASTIC_TOL {
        return Some(format!("row sum {sum}"));
    }
    None
}

/// A stationary policy: one action distribution per state.
#[derive(Debug, Clone, PartialEq)]
pub struct Policy {
    action_probs: Vec<Vec<f64>>,
    deterministic: bool,
}

impl Policy {
    pub fn new(action_probs: Vec<Vec<f64>>) -> Result<Self, IlrError> {
        if action_probs.is_empty() {
            return Err(IlrError::InvalidArgument(String::from("policy needs at least one state")));
        }
        let num_actions = action_probs[0].len();
        for (s, row) in action_probs.iter().enumerate() {
            if row.len() != num_actions {
                return Err(IlrError::InvalidArgument(format!("ragged policy row at state {s}")));
            }
            if let Some(msg) = check_distribution_row(row) {
                return Err(IlrError::InvalidArgument(format!("{msg} in policy row {s}")));
            }
        }
        let deterministic = action_probs
            .iter()
            .all(|row| row.iter().filter(|&&p| p == 1.0).count() == 1 && row.iter().all(|&p| p == 0.0 || p == 1.0));
        Ok(Policy { action_probs, deterministic })
    }

    /// The deterministic policy taking `actions[s]` at each state.
    pub fn deterministic(actions: &[usize], num_actions: usize) -> Result<Self, IlrError> {
        let mut rows = Vec::with_capacity(actions.len());
        for &a in actions {
            if a >= num_actions {
                return Err(IlrError::IndexOutOfRange { index: a, bound: num_actions, what: "action" });
            }
            let mut row = vec![0.0; num_actions];
            row[a] = 1.0;
            rows.push(row);
        }
        Self::new(rows)
    }

    /// The uniform policy over all actions at every state.
    pub fn uniform(num_states: usize, num_actions: usize) -> Self {
        let row = vec![1.0 / num_actions as f64; num_actions];
        Policy { action_probs: vec![row; num_states], deterministic: num_actions == 1 }
    }

    pub fn num_states(&self) -> usize {
        self.action_probs.len()
    }

    pub fn num_actions(&self) -> usize {
        self.action_probs[0].len()
    }

    pub fn prob(&self, s: usize, a: usize) -> f64 {
        self.action_probs[s][a]
    }

    pub fn row(&self, s: usize) -> &[f64] {
        &self.action_probs[s]
    }

    pub fn rows(&self) -> &Vec<Vec<f64>> {
        &self.action_probs
    }

    pub fn is_deterministic(&self) -> bool {
        self.deterministic
    }

    /// The single chosen action at `s`, when this policy is deterministic.
    pub fn action_if_deterministic(&self, s: usize) -> Option<usize> {
        if !self.deterministic {
            return None;
        }
        self.action_probs[s].iter().position(|&p| p == 1.0)
    }
}

/// A row-stochastic matrix over states.
#[derive(Debug, Clone, PartialEq)]
pub struct MarkovChain {
    matrix: Vec<Vec<f64>>,
}

impl MarkovChain {
    pub fn new(matrix: Vec<Vec<f64>>) -> Result<Self, IlrError> {
        let n = matrix.len();
        if n == 0 {
            return Err(IlrError::InvalidArgument(String::from("chain needs at least one state")));
        }
        for (s, row) in matrix.iter().enumerate() {
            if row.len() != n {
                return Err(IlrError::InvalidArgument(format!("chain row {s} has wrong length")));
            }
            if let Some(msg) = check_distribution_row(row) {
                return Err(IlrError::InvalidArgument(format!("{msg} in chain row {s}")));
            }
        }
        Ok(MarkovChain { matrix })
    }

    pub fn num_states(&self) -> usize {
        self.matrix.len()
    }

    pub fn row(&self, s: usize) -> &[f64] {
        &self.matrix[s]
    }

    pub fn matrix(&self) -> &Vec<Vec<f64>> {
        &self.matrix
    }

    /// One step of the chain applied to a distribution: `out = dist · P`.
    pub fn step_distribution(&self, dist: &[f64]) -> Vec<f64> {
        let n = self.num_states();
        let mut out = vec![0.0; n];
        for (s, &mass) in dist.iter().enumerate() {
            if mass == 0.0 {
                continue;
            }
            for (sp, &p) in self.matrix[s].iter().enumerate() {
                out[sp] += mass * p;
            }
        }
        out
    }
}

/// A probability distribution over states.
#[derive(Debug, Clone, PartialEq)]
pub struct StateDistribution {
    probs: Vec<f64>,
}

impl StateDistribution {
    pub fn new(probs: Vec<f64>) -> Result<Self, IlrError> {
        if probs.is_empty() {
            return Err(IlrError::InvalidArgument(String::from("empty distribution")));
        }
        if let Some(msg) = check_distribution_row(&probs) {
            return Err(IlrError::InvalidArgument(msg));
        }
        Ok(StateDistribution { probs })
    }

    /// Point mass at `state`.
    pub fn delta(num_states: usize, state: usize) -> Self {
        let mut probs = vec![0.0; num_states];
        probs[state] = 1.0;
        StateDistribution { probs }
    }

    pub fn uniform(num_states: usize) -> Self {
        StateDistribution { probs: vec![1.0 / num_states as f64; num_states] }
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn num_states(&self) -> usize {
        self.probs.len()
    }

    /// `ρ(s,a) = ρ_S(s) π(a|s)`.
    pub fn occupancy(&self, policy: &Policy) -> Result<OccupancyDistribution, IlrError> {
        if policy.num_states() != self.probs.len() {
            return Err(IlrError::DimensionMismatch {
                expected: self.probs.len(),
                got: policy.num_states(),
                what: "policy states",
            });
        }
        let num_actions = policy.num_actions();
        let mut probs = vec![0.0; self.probs.len() * num_actions];
        for (s, &mass) in self.probs.iter().enumerate() {
            for a in 0..num_actions {
                probs[s * num_actions + a] = mass * policy.prob(s, a);
            }
        }
        Ok(OccupancyDistribution { num_states: self.probs.len(), num_actions, probs })
    }
}

/// A probability distribution over state-action pairs, stored row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct OccupancyDistribution {
    num_states: usize,
    num_actions: usize,
    probs: Vec<f64>,
}

impl OccupancyDistribution {
    pub fn new(num_states: usize, num_actions: usize, probs: Vec<f64>) -> Result<Self, IlrError> {
        if probs.len() != num_states * num_actions {
            return Err(IlrError::DimensionMismatch {
                expected: num_states * num_actions,
                got: probs.len(),
                what: "occupancy entries",
            });
        }
        if let Some(msg) = check_distribution_row(&probs) {
            return Err(IlrError::InvalidArgument(msg));
        }
        Ok(OccupancyDistribution { num_states, num_actions, probs })
    }

    pub fn num_states(&self) -> usize {
        self.num_states
    }

    pub fn num_actions(&self) -> usize {
        self.num_actions
    }

    pub fn prob(&self, s: usize, a: usize) -> f64 {
        self.probs[s * self.num_actions + a]
    }

    /// Flat row-major view, for distribution-level math such as TV distance.
    pub fn as_flat(&self) -> &[f64] {
        &self.probs
    }

    /// Marginal over actions; recovers the state distribution.
    pub fn state_marginal(&self) -> StateDistribution {
        let mut probs = vec![0.0; self.num_states];
        for s in 0..self.num_states {
            for a in 0..self.num_actions {
                probs[s] += self.prob(s, a);
            }
        }
        StateDistribution { probs }
    }

    /// `Σ_{s,a} ρ(s,a) r(s,a)`.
    pub fn expected_reward(&self, reward: &RewardTable) -> Result<f64, IlrError> {
        if reward.num_states() != self.num_states || reward.num_actions() != self.num_actions {
            return Err(IlrError::DimensionMismatch {
                expected: self.num_states * self.num_actions,
                got: reward.num_states() * reward.num_actions(),
                what: "reward entries",
            });
        }
        let mut acc = 0.0;
        for s in 0..self.num_states {
            for a in 0..self.num_actions {
                acc += self.prob(s, a) * reward.value(s, a);
            }
        }
        Ok(acc)
    }

    /// Pairs with positive mass.
    pub fn support(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for s in 0..self.num_states {
            for a in 0..self.num_actions {
                if self.prob(s, a) > 0.0 {
                    out.push((s, a));
                }
            }
        }
        out
    }
}

/// A bounded reward table `r[s][a] ∈ [0, 1]` with a free-text label.
#[derive(Debug, Clone, PartialEq)]
pub struct RewardTable {
    values: Vec<Vec<f64>>,
    label: String,
}

impl RewardTable {
    pub fn new(values: Vec<Vec<f64>>, label: &str) -> Result<Self, IlrError> {
        for (s, row) in values.iter().enumerate() {
            for (a, &r) in row.iter().enumerate() {
                if !(0.0..=1.0).contains(&r) {
                    return Err(IlrError::InvalidArgument(format!(
                        "reward {r} out of [0,1] at ({s},{a})"
                    )));
                }
            }
        }
        Ok(RewardTable { values, label: String::from(label) })
    }

    /// Constant reward `c` everywhere.
    pub fn constant(num_states: usize, num_actions: usize, c: f64, label: &str) -> Result<Self, IlrError> {
        Self::new(vec![vec![c; num_actions]; num_states], label)
    }

    pub fn num_states(&self) -> usize {
        self.values.len()
    }

    pub fn num_actions(&self) -> usize {
        self.values.first().map_or(0, Vec::len)
    }

    pub fn value(&self, s: usize, a: usize) -> f64 {
        self.values[s][a]
    }

    pub fn values(&self) -> &Vec<Vec<f64>> {
        &self.values
    }

    pub fn label(&self) -> &str {
        &self.label
    }
}
