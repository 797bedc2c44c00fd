//! Exact analysis of finite Markov chains: structure (irreducibility,
//! period, recurrent classes), stationary and limiting distributions, total
//! variation distance, and mixing profiles with certified tail bounds.

use alloc::vec;
use alloc::vec::Vec;

use crate::error::IlrError;
use crate::linalg;
use crate::math;
use crate::mdp::{MarkovChain, StateDistribution};
use crate::STOCHASTIC_TOL;

/// Residual tolerance for the stationary-distribution linear solve.
const STATIONARY_RESIDUAL_TOL: f64 = 1e-10;

/// Tail threshold below which a truncated TV-decay curve counts as certified.
const TAIL_CERTIFIED_TOL: f64 = 1e-9;

/// Structural decomposition of a chain's positive-probability edge graph.
#[derive(Debug, Clone, PartialEq)]
pub struct ChainStructure {
    pub irreducible: bool,
    /// gcd of return-cycle lengths; `Some` only when irreducible.
    pub period: Option<usize>,
    /// Strongly connected components with no outgoing edges, sorted.
    pub recurrent_classes: Vec<Vec<usize>>,
}

impl ChainStructure {
    /// Irreducible and aperiodic.
    pub fn is_ergodic(&self) -> bool {
        self.irreducible && self.period == Some(1)
    }
}

/// Computes SCCs, recurrent classes, and (for irreducible chains) the period.
pub fn chain_structure(chain: &MarkovChain) -> ChainStructure {
    let n = chain.num_states();
    let adjacency: Vec<Vec<usize>> = (0..n)
        .map(|s| (0..n).filter(|&sp| chain.row(s)[sp] > 0.0).collect())
        .collect();
    let components = strongly_connected_components(&adjacency);

    let mut recurrent_classes = Vec::new();
    for component in &components {
        let leaves = component.iter().any(|&s| {
            adjacency[s].iter().any(|&sp| !component.contains(&sp))
        });
        if !leaves {
            let mut class = component.clone();
            class.sort_unstable();
            recurrent_classes.push(class);
        }
    }
    recurrent_classes.sort();

    let irreducible = components.len() == 1;
    let period = irreducible.then(|| period_of_irreducible(&adjacency));
    ChainStructure { irreducible, period, recurrent_classes }
}

/// Iterative Tarjan SCC.
fn strongly_connected_components(adjacency: &[Vec<usize>]) -> Vec<Vec<usize>> {
    let n = adjacency.len();
    let mut index = vec![usize::MAX; n];
    let mut lowlink = vec![0usize; n];
    let mut on_stack = vec![false; n];
    let mut stack = Vec::new();
    let mut next_index = 0usize;
    let mut components = Vec::new();

    // (node, next child position)
    let mut call_stack: Vec<(usize, usize)> = Vec::new();
    for root in 0..n {
        if index[root] != usize::MAX {
            continue;
        }
        call_stack.push((root, 0));
        index[root] = next_index;
        lowlink[root] = next_index;
        next_index += 1;
        stack.push(root);
        on_stack[root] = true;

        while let Some(&mut (v, ref mut child)) = call_stack.last_mut() {
            if *child < adjacency[v].len() {
                let w = adjacency[v][*child];
                *child += 1;
                if index[w] == usize::MAX {
                    index[w] = next_index;
                    lowlink[w] = next_index;
                    next_index += 1;
                    stack.push(w);
                    on_stack[w] = true;
                    call_stack.push((w, 0));
                } else if on_stack[w] {
                    lowlink[v] = lowlink[v].min(index[w]);
                }
            } else {
                call_stack.pop();
                if let Some(&(parent, _)) = call_stack.last() {
                    lowlink[parent] = lowlink[parent].min(lowlink[v]);
                }
                if lowlink[v] == index[v] {
                    let mut component = Vec::new();
                    loop {
                        let w = stack.pop().unwrap();
                        on_stack[w] = false;
                        component.push(w);
                        if w == v {
                            break;
                        }
                    }
                    components.push(component);
                }
            }
        }
    }
    components
}

/// BFS level-difference gcd from state 0; valid for irreducible graphs.
fn period_of_irreducible(adjacency: &[Vec<usize>]) -> usize {
    let n = adjacency.len();
    let mut level = vec![i64::MIN; n];
    let mut queue = alloc::collections::VecDeque::new();
    level[0] = 0;
    queue.push_back(0usize);
    while let Some(v) = queue.pop_front() {
        for &w in &adjacency[v] {
            if level[w] == i64::MIN {
                level[w] = level[v] + 1;
                queue.push_back(w);
            }
        }
    }
    let mut g: u64 = 0;
    for v in 0..n {
        for &w in &adjacency[v] {
            let diff = (level[v] + 1 - level[w]).unsigned_abs();
            g = gcd(g, diff);
        }
    }
    g as usize
}

fn gcd(a: u64, b: u64) -> u64 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

/// The unique `ρ` with `ρP = ρ` for an irreducible chain, by direct linear
/// solve with a normalization row replacing one redundant balance equation.
pub fn stationary_distribution(chain: &MarkovChain) -> Result<StateDistribution, IlrError> {
    let structure = chain_structure(chain);
    if !structure.irreducible {
        return Err(IlrError::ReducibleChain { recurrent_classes: structure.recurrent_classes });
    }
    let probs = stationary_on_support(chain.matrix(), &(0..chain.num_states()).collect::<Vec<_>>())?;
    // residual check on the balance equations
    let stepped = chain.step_distribution(&probs);
    let residual = probs
        .iter()
        .zip(&stepped)
        .map(|(p, q)| math::abs(p - q))
        .fold(0.0, f64::max);
    if residual > STATIONARY_RESIDUAL_TOL {
        return Err(IlrError::InvalidArgument(alloc::format!(
            "stationary solve residual {residual:e} exceeds {STATIONARY_RESIDUAL_TOL:e}"
        )));
    }
    StateDistribution::new(probs)
}

/// Solves the balance equations restricted to `support` (a recurrent class,
/// so rows do not leave it) and embeds the result in the full state space.
fn stationary_on_support(matrix: &[Vec<f64>], support: &[usize]) -> Result<Vec<f64>, IlrError> {
    let m = support.len();
    let full_n = matrix.len();
    if m == 1 {
        let mut probs = vec![0.0; full_n];
        probs[support[0]] = 1.0;
        return Ok(probs);
    }
    // rows of (P^T - I), last row replaced by normalization
    let mut a = vec![vec![0.0; m]; m];
    let mut b = vec![0.0; m];
    for (j, &sj) in support.iter().enumerate() {
        for (i, &si) in support.iter().enumerate() {
            a[j][i] = matrix[si][sj] - if i == j { 1.0 } else { 0.0 };
        }
    }
    for entry in a[m - 1].iter_mut() {
        *entry = 1.0;
    }
    b[m - 1] = 1.0;
    let x = linalg::solve(a, b)?;
    let mut probs = vec![0.0; full_n];
    let mut total = 0.0;
    for (i, &s) in support.iter().enumerate() {
        let p = if x[i] < 0.0 && x[i] > -STOCHASTIC_TOL { 0.0 } else { x[i] };
        if p < 0.0 {
            return Err(IlrError::SingularSystem);
        }
        probs[s] = p;
        total += p;
    }
    for p in probs.iter_mut() {
        *p /= total;
    }
    Ok(probs)
}

/// `(1/n) Σ_{i=0}^{n-1} start · P^i` — the Cesàro average that defines the
/// limiting distribution, kept as an independent oracle for the linear solve
/// and the only route available for periodic chains.
pub fn cesaro_average(
    chain: &MarkovChain,
    start: &StateDistribution,
    n_terms: usize,
) -> Result<StateDistribution, IlrError> {
    if n_terms == 0 {
        return Err(IlrError::InvalidArgument(alloc::string::String::from(
            "cesaro_average needs n_terms >= 1",
        )));
    }
    if start.num_states() != chain.num_states() {
        return Err(IlrError::DimensionMismatch {
            expected: chain.num_states(),
            got: start.num_states(),
            what: "start distribution",
        });
    }
    let mut current = start.probs().to_vec();
    let mut acc = vec![0.0; current.len()];
    for i in 0..n_terms {
        for (t, &c) in acc.iter_mut().zip(&current) {
            *t += c;
        }
        if i + 1 < n_terms {
            current = chain.step_distribution(&current);
        }
    }
    let scale = 1.0 / n_terms as f64;
    for t in acc.iter_mut() {
        *t *= scale;
    }
    // Cesàro sums of exact distributions can drift by a few ulps; renormalize.
    let total: f64 = acc.iter().sum();
    for t in acc.iter_mut() {
        *t /= total;
    }
    StateDistribution::new(acc)
}

/// The Cesàro limit of `start · P^t`: exact for any chain, via absorption
/// probabilities into each recurrent class combined with the class-level
/// stationary distributions.
pub fn limiting_state_distribution(
    chain: &MarkovChain,
    start: &StateDistribution,
) -> Result<StateDistribution, IlrError> {
    if start.num_states() != chain.num_states() {
        return Err(IlrError::DimensionMismatch {
            expected: chain.num_states(),
            got: start.num_states(),
            what: "start distribution",
        });
    }
    let structure = chain_structure(chain);
    if structure.irreducible {
        return stationary_distribution(chain);
    }
    let n = chain.num_states();
    let mut class_of = vec![usize::MAX; n];
    for (c, class) in structure.recurrent_classes.iter().enumerate() {
        for &s in class {
            class_of[s] = c;
        }
    }
    let transient: Vec<usize> = (0..n).filter(|&s| class_of[s] == usize::MAX).collect();

    // absorption[c][s]: probability of ending in class c starting from s
    let num_classes = structure.recurrent_classes.len();
    let mut absorption = vec![vec![0.0; n]; num_classes];
    for (c, class) in structure.recurrent_classes.iter().enumerate() {
        for &s in class {
            absorption[c][s] = 1.0;
        }
    }
    if !transient.is_empty() {
        let m = transient.len();
        let mut pos = vec![usize::MAX; n];
        for (i, &s) in transient.iter().enumerate() {
            pos[s] = i;
        }
        // (I - Q) h = r, one right-hand side per class
        let mut a = vec![vec![0.0; m]; m];
        for (i, &s) in transient.iter().enumerate() {
            for (j, &t) in transient.iter().enumerate() {
                a[i][j] = if i == j { 1.0 } else { 0.0 } - chain.row(s)[t];
            }
        }
        for (c, class) in structure.recurrent_classes.iter().enumerate() {
            let mut b = vec![0.0; m];
            for (i, &s) in transient.iter().enumerate() {
                for &t in class {
                    b[i] += chain.row(s)[t];
                }
            }
            let h = linalg::solve(a.clone(), b)?;
            for (i, &s) in transient.iter().enumerate() {
                absorption[c][s] = h[i].clamp(0.0, 1.0);
            }
        }
    }

    let mut probs = vec![0.0; n];
    for (c, class) in structure.recurrent_classes.iter().enumerate() {
        let weight: f64 = start
            .probs()
            .iter()
            .enumerate()
            .map(|(s, &p)| p * absorption[c][s])
            .sum();
        if weight == 0.0 {
            continue;
        }
        let class_stationary = stationary_on_support(chain.matrix(), class)?;
        for (s, &p) in class_stationary.iter().enumerate() {
            probs[s] += weight * p;
        }
    }
    let total: f64 = probs.iter().sum();
    for p in probs.iter_mut() {
        *p /= total;
    }
    StateDistribution::new(probs)
}

/// `½ Σ |p_x - q_x|` — half the L1 distance.
pub fn total_variation(p: &[f64], q: &[f64]) -> Result<f64, IlrError> {
    if p.len() != q.len() {
        return Err(IlrError::DimensionMismatch {
            expected: p.len(),
            got: q.len(),
            what: "distribution support",
        });
    }
    Ok(0.5 * p.iter().zip(q).map(|(a, b)| math::abs(a - b)).sum::<f64>())
}

/// Brute-force `sup_{M ⊆ X} |p(M) - q(M)|` over all `2^|X|` subsets.
/// Returns the supremum and one maximizing subset. Limited to `|X| ≤ 20`.
pub fn tv_sup_oracle(p: &[f64], q: &[f64]) -> Result<(f64, Vec<usize>), IlrError> {
    if p.len() != q.len() {
        return Err(IlrError::DimensionMismatch {
            expected: p.len(),
            got: q.len(),
            what: "distribution support",
        });
    }
    let n = p.len();
    if n > 20 {
        return Err(IlrError::SupportTooLarge { size: n });
    }
    // maximizing the signed gap p(M) - q(M) suffices: complementing M
    // flips the sign, so the same supremum is reached
    let mut best = 0.0f64;
    let mut best_mask: u32 = 0;
    for mask in 0u32..(1u32 << n) {
        let mut diff = 0.0;
        for i in 0..n {
            if mask & (1 << i) != 0 {
                diff += p[i] - q[i];
            }
        }
        if diff > best {
            best = diff;
            best_mask = mask;
        }
    }
    let subset = (0..n).filter(|i| best_mask & (1 << i) != 0).collect();
    Ok((best, subset))
}

/// Worst-case-start TV decay curve and mixing time of an ergodic chain.
#[derive(Debug, Clone, PartialEq)]
pub struct MixingProfile {
    /// Smallest `t` with `d(t) ≤ 1/4`.
    pub tau_mix: usize,
    /// `d(t) = max_{s'} TV(δ_{s'} P^t, ρ)` for `t = 0..=t_cap`.
    pub d_curve: Vec<f64>,
    pub t_cap: usize,
    /// True when `d(t_cap)` is small enough that the truncated tail of the
    /// infinite TV sum is provably negligible.
    pub tail_certified: bool,
}

/// Computes the decay curve exactly by iterated matrix products from every
/// indicator start. The 1/4 threshold is fixed: the `2τ_mix` and `2^{-ℓ}`
/// constants downstream are only valid for it.
pub fn mixing_profile(chain: &MarkovChain, t_cap: usize) -> Result<MixingProfile, IlrError> {
    let structure = chain_structure(chain);
    if !structure.irreducible {
        return Err(IlrError::ReducibleChain { recurrent_classes: structure.recurrent_classes });
    }
    if structure.period != Some(1) {
        return Err(IlrError::PeriodicChain { period: structure.period.unwrap_or(0) });
    }
    let stationary = stationary_distribution(chain)?;
    let n = chain.num_states();

    // rows[s] = δ_s P^t
    let mut rows: Vec<Vec<f64>> = (0..n)
        .map(|s| StateDistribution::delta(n, s).probs().to_vec())
        .collect();
    let mut d_curve = Vec::with_capacity(t_cap + 1);
    let mut tau_mix = None;
    for t in 0..=t_cap {
        let d = rows
            .iter()
            .map(|row| total_variation(row, stationary.probs()).unwrap())
            .fold(0.0, f64::max);
        if let Some(&prev) = d_curve.last() {
            debug_assert!(d <= prev + STOCHASTIC_TOL, "d(t) must be non-increasing");
        }
        d_curve.push(d);
        if tau_mix.is_none() && d <= 0.25 {
            tau_mix = Some(t);
        }
        if t < t_cap {
            for row in rows.iter_mut() {
                *row = chain.step_distribution(row);
            }
        }
    }
    let tau_mix = tau_mix.ok_or(IlrError::MixingCapTooSmall { t_cap })?;
    let tail_certified = d_curve[t_cap] < TAIL_CERTIFIED_TOL;
    Ok(MixingProfile { tau_mix, d_curve, t_cap, tail_certified })
}

/// Like [`mixing_profile`], but grows `t_cap` geometrically until the tail
/// is certified, up to `max_t_cap`.
pub fn certified_mixing_profile(
    chain: &MarkovChain,
    max_t_cap: usize,
) -> Result<MixingProfile, IlrError> {
    let mut t_cap = 64usize;
    loop {
        match mixing_profile(chain, t_cap.min(max_t_cap)) {
            Ok(profile) if profile.tail_certified => return Ok(profile),
            Ok(profile) => {
                if t_cap >= max_t_cap {
                    return Err(IlrError::UncertifiedTail {
                        residual: profile.d_curve[profile.t_cap],
                    });
                }
            }
            Err(IlrError::MixingCapTooSmall { .. }) if t_cap < max_t_cap => {}
            Err(e) => return Err(e),
        }
        t_cap *= 2;
    }
}

/// Upper estimate of `Σ_{t=0}^∞ TV(start · P^t, ρ)`: the truncated sum plus
/// a tail bound of `d(t_cap) · 2 τ_mix` justified by the submultiplicative
/// decay `d(ℓ τ_mix) ≤ 2^{-ℓ}`.
pub fn tv_decay_sum(
    chain: &MarkovChain,
    start: &StateDistribution,
    profile: &MixingProfile,
) -> Result<f64, IlrError> {
    if !profile.tail_certified {
        return Err(IlrError::UncertifiedTail { residual: profile.d_curve[profile.t_cap] });
    }
    if start.num_states() != chain.num_states() {
        return Err(IlrError::DimensionMismatch {
            expected: chain.num_states(),
            got: start.num_states(),
            what: "start distribution",
        });
    }
    let stationary = stationary_distribution(chain)?;
    let mut current = start.probs().to_vec();
    let mut sum = 0.0;
    for t in 0..=profile.t_cap {
        sum += total_variation(&current, stationary.probs())?;
        if t < profile.t_cap {
            current = chain.step_distribution(&current);
        }
    }
    let tail = profile.d_curve[profile.t_cap] * 2.0 * profile.tau_mix as f64;
    Ok(sum + tail)
}
