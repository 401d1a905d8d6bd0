//! Step-by-step simulation of the persistent independent cascade.
//!
//! Every active node retries every inactive neighbour with a fresh Bernoulli
//! trial at every step, and activations within a step depend only on the set
//! that was active when the step began. A step consumes a pre-sampled
//! [`StepMatrix`] whose entry `(k, j)` is the outcome of `k`'s attempt on `j`.

use rand::Rng;
use thiserror::Error;

use crate::active_set::ActiveSet;
use crate::graph::{Graph, NodeId};
use crate::matrix::{check_dim, sample_step_matrix, MatrixError, StepMatrix};
use crate::stats::{EstimateCell, StatsError};
use crate::streams::{count_trials, Domain};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum CascadeError {
    #[error("node {0} is already active")]
    AlreadyActive(usize),
    #[error(transparent)]
    Dimension(#[from] MatrixError),
    #[error(transparent)]
    Stats(#[from] StatsError),
}

/// Probability that inactive node `j` is activated in the next step when `s`
/// is active: `1 - prod_{k in s} (1 - p_kj)`.
///
/// Accumulated as a running union `q <- q + p - q p`, which equals the
/// product form and returns `p_kj` unchanged when only one neighbour is
/// active.
pub fn activation_probability(g: &Graph, s: &ActiveSet, j: NodeId) -> Result<f64, CascadeError> {
    check_dim(g.node_count(), s.universe())?;
    let j = j.index();
    if s.contains(j) {
        return Err(CascadeError::AlreadyActive(j));
    }
    Ok(union_probability(g, s, j))
}

pub(crate) fn union_probability(g: &Graph, s: &ActiveSet, j: usize) -> f64 {
    g.neighbors(j)
        .iter()
        .filter(|&&(k, _)| s.contains(k))
        .fold(0.0, |q, &(_, p)| q + p - q * p)
}

/// One simultaneous update: `s` together with every `j` for which some
/// `k in s` has `outcomes[k][j] = 1`.
pub fn step(g: &Graph, s: &ActiveSet, outcomes: &StepMatrix) -> Result<ActiveSet, CascadeError> {
    check_dim(g.node_count(), outcomes.dim())?;
    check_dim(g.node_count(), s.universe())?;
    let mut next = s.clone();
    for k in s.iter() {
        next.union_words(outcomes.row_words(k));
    }
    Ok(next)
}

/// Active sets `states[0..=n]` of one cascade.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CascadeTrajectory {
    pub states: Vec<ActiveSet>,
}

impl CascadeTrajectory {
    pub fn steps(&self) -> usize {
        self.states.len() - 1
    }

    pub fn final_state(&self) -> &ActiveSet {
        self.states.last().expect("trajectory holds the seed state")
    }

    /// Whether `states[k]` is a subset of `states[k + 1]` throughout.
    pub fn is_monotone(&self) -> bool {
        self.states.windows(2).all(|w| w[0].is_subset(&w[1]))
    }
}

/// Runs `n` steps from `seeds`, drawing a fresh step matrix per step.
///
/// Panics if `seeds` is not a subset of `g`'s node range.
pub fn run_cascade<R: Rng + ?Sized>(g: &Graph, seeds: &ActiveSet, n: usize, rng: &mut R) -> CascadeTrajectory {
    assert_eq!(seeds.universe(), g.node_count(), "seed set sized for another graph");
    let mut states = Vec::with_capacity(n + 1);
    states.push(seeds.clone());
    for _ in 0..n {
        let t = sample_step_matrix(g, rng);
        let next = step(g, states.last().unwrap(), &t).expect("dimensions checked above");
        states.push(next);
    }
    CascadeTrajectory { states }
}

/// Monte Carlo estimate of `P_ij(n)` for every `j`, seeding only `i`.
pub fn estimate_p_row(
    g: &Graph,
    i: NodeId,
    n: usize,
    trials: u64,
    master_seed: u64,
    confidence: f64,
) -> Result<Vec<EstimateCell>, CascadeError> {
    if trials == 0 {
        return Err(StatsError::NoTrials.into());
    }
    let seeds = ActiveSet::singleton(g.node_count(), i.index());
    let counts = count_trials(g.node_count(), trials, master_seed, Domain::Cascade, |rng, counts| {
        let mut state = seeds.clone();
        for _ in 0..n {
            if state.is_full() {
                break;
            }
            let t = sample_step_matrix(g, rng);
            state = step(g, &state, &t).expect("matrix sampled for g");
        }
        for j in state.iter() {
            counts[j] += 1;
        }
    });
    counts
        .into_iter()
        .map(|c| EstimateCell::new(c, trials, confidence).map_err(Into::into))
        .collect()
}

/// [`estimate_p_row`] for every seed node; row `i` is seeded by node `i`.
pub fn estimate_p_matrix(
    g: &Graph,
    n: usize,
    trials: u64,
    master_seed: u64,
    confidence: f64,
) -> Result<Vec<Vec<EstimateCell>>, CascadeError> {
    g.nodes()
        .map(|i| estimate_p_row(g, i, n, trials, master_seed, confidence))
        .collect()
}
