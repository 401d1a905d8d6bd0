//! Checks of `P_ij(n) = P_ji(n)`.
//!
//! Three independent routes are provided:
//!
//! * [`check_exact_symmetry`] computes the full matrix `P(n)` with the exact
//!   oracle and measures its largest asymmetry.
//! * [`check_transpose_identity`] samples step-matrix sequences and checks, on
//!   every draw, that entry `(j, i)` of `T^(n) ... T^(1)` equals entry `(i, j)`
//!   of `T^(1) ... T^(n)`. This is an exact boolean identity.
//! * [`check_reversal_distribution`] estimates the entry positivity of both
//!   product orders on independent streams and requires overlapping
//!   confidence intervals, since the two products agree only in law.
//!
//! [`check_mc_consistency`] additionally cross-validates both Monte Carlo
//! engines against the exact values.

use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::cascade::{estimate_p_matrix, CascadeError};
use crate::exact::{ExactError, ExactOracle};
use crate::graph::Graph;
use crate::matrix::{
    chain_column, estimate_product_positivity, left_to_right_product, matrix_estimate_p, sample_sequence,
    ProductOrder,
};
use crate::stats::{EstimateCell, StatsError};
use crate::streams::{stream_rng, Domain};

pub use crate::stats::wilson_interval;

/// Minimum fraction of pairs whose interval must cover the exact value.
pub const COVERAGE_THRESHOLD: f64 = 0.95;

/// Node count up to which the transpose check also compares full
/// matrix-matrix products.
pub const FULL_PRODUCT_MAX_NODES: usize = 12;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum VerifyError {
    #[error(transparent)]
    Exact(#[from] ExactError),
    #[error(transparent)]
    Cascade(#[from] CascadeError),
    #[error(transparent)]
    Stats(#[from] StatsError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct GraphSummary {
    pub nodes: usize,
    pub edges: usize,
}

impl From<&Graph> for GraphSummary {
    fn from(g: &Graph) -> Self {
        GraphSummary {
            nodes: g.node_count(),
            edges: g.edge_count(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Method {
    Exact,
    PerSample,
    MonteCarlo,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SymmetryReport {
    pub graph: GraphSummary,
    pub n: usize,
    pub method: Method,
    pub max_abs_asymmetry: f64,
    /// Pair `(i, j)` attaining `max_abs_asymmetry`, or the first violation.
    pub argmax: Option<(usize, usize)>,
    pub tolerance: f64,
    /// Number of failed comparisons (always 0 for the exact method when
    /// passing).
    pub violations: u64,
    /// Number of comparisons performed.
    pub checks: u64,
    pub pass: bool,
}

/// Exact check: `max |P_ij(n) - P_ji(n)| <= tol`.
pub fn check_exact_symmetry(
    oracle: &ExactOracle,
    g: &Graph,
    n: usize,
    tol: f64,
) -> Result<SymmetryReport, VerifyError> {
    let p = oracle.exact_p_matrix(g, n)?;
    let (max_abs_asymmetry, argmax) = p.max_asymmetry();
    let nodes = g.node_count() as u64;
    let violations = (0..p.node_count())
        .flat_map(|i| (i + 1..p.node_count()).map(move |j| (i, j)))
        .filter(|&(i, j)| (p.get(i, j) - p.get(j, i)).abs() > tol)
        .count() as u64;
    Ok(SymmetryReport {
        graph: g.into(),
        n,
        method: Method::Exact,
        max_abs_asymmetry,
        argmax,
        tolerance: tol,
        violations,
        checks: nodes * nodes.saturating_sub(1) / 2,
        pass: max_abs_asymmetry <= tol,
    })
}

#[derive(Debug, Clone, Copy, Default)]
struct Tally {
    violations: u64,
    first: Option<(u64, usize, usize)>,
}

impl Tally {
    fn merge(self, other: Tally) -> Tally {
        let first = match (self.first, other.first) {
            (Some(a), Some(b)) => Some(a.min(b)),
            (a, b) => a.or(b),
        };
        Tally {
            violations: self.violations + other.violations,
            first,
        }
    }
}

/// Per-sample check of the transpose identity
/// `(T^(n) ... T^(1))[j][i] = (T^(1) ... T^(n))[i][j]` for all pairs.
///
/// Entries are read by folding the sampled sequence and its reversal over
/// unit vectors. For graphs with at most [`FULL_PRODUCT_MAX_NODES`] nodes
/// the full products are also formed and compared as matrices.
pub fn check_transpose_identity(
    g: &Graph,
    n: usize,
    samples: u64,
    master_seed: u64,
) -> Result<SymmetryReport, VerifyError> {
    if samples == 0 {
        return Err(StatsError::NoTrials.into());
    }
    let dim = g.node_count();
    let full_products = dim <= FULL_PRODUCT_MAX_NODES;
    let tally = (0..samples)
        .into_par_iter()
        .map(|sample| {
            let mut rng = stream_rng(master_seed, Domain::Transpose, sample);
            let forward = sample_sequence(g, n, &mut rng);
            let reversed: Vec<_> = forward.iter().rev().cloned().collect();
            let fwd_cols: Vec<_> = (0..dim)
                .map(|s| chain_column(dim, &forward, s).expect("sampled for g"))
                .collect();
            let rev_cols: Vec<_> = (0..dim)
                .map(|s| chain_column(dim, &reversed, s).expect("sampled for g"))
                .collect();
            let mut tally = Tally::default();
            let mut flag = |i: usize, j: usize| {
                tally.violations += 1;
                tally.first.get_or_insert((sample, i, j));
            };
            for i in 0..dim {
                for j in 0..dim {
                    // chain_entry(forward, i, j) against chain_entry(reversed, j, i).
                    if fwd_cols[i].contains(j) != rev_cols[j].contains(i) {
                        flag(i, j);
                    }
                }
            }
            if full_products {
                // left_to_right_product(reversed) is T^(n) ... T^(1).
                let fwd = left_to_right_product(dim, &reversed).expect("sampled for g");
                let rev = left_to_right_product(dim, &forward).expect("sampled for g");
                let fwd_t = fwd.transpose();
                for i in 0..dim {
                    for j in 0..dim {
                        if fwd_t.get(i, j) != rev.get(i, j) || fwd.get(j, i) != fwd_cols[i].contains(j) {
                            flag(i, j);
                        }
                    }
                }
            }
            tally
        })
        .reduce(Tally::default, Tally::merge);
    Ok(SymmetryReport {
        graph: g.into(),
        n,
        method: Method::PerSample,
        max_abs_asymmetry: if tally.violations == 0 { 0.0 } else { 1.0 },
        argmax: tally.first.map(|(_, i, j)| (i, j)),
        tolerance: 0.0,
        violations: tally.violations,
        checks: samples * (dim * dim) as u64,
        pass: tally.violations == 0,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConsistencyRecord {
    pub i: usize,
    pub j: usize,
    pub exact: f64,
    pub cascade: EstimateCell,
    pub cascade_inside_ci: bool,
    pub matrix: EstimateCell,
    pub matrix_inside_ci: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConsistencyReport {
    pub graph: GraphSummary,
    pub n: usize,
    pub trials: u64,
    pub confidence: f64,
    pub records: Vec<ConsistencyRecord>,
    pub cascade_coverage: f64,
    pub matrix_coverage: f64,
    pub coverage_threshold: f64,
}

impl ConsistencyReport {
    pub fn pass(&self) -> bool {
        self.cascade_coverage >= self.coverage_threshold && self.matrix_coverage >= self.coverage_threshold
    }
}

fn coverage(hits: usize, total: usize) -> f64 {
    if total == 0 {
        1.0
    } else {
        hits as f64 / total as f64
    }
}

/// Compares both Monte Carlo engines against the exact oracle on every
/// ordered pair `i != j`. The engines draw from disjoint streams of the
/// same master seed.
pub fn check_mc_consistency(
    oracle: &ExactOracle,
    g: &Graph,
    n: usize,
    trials: u64,
    confidence: f64,
    master_seed: u64,
) -> Result<ConsistencyReport, VerifyError> {
    let exact = oracle.exact_p_matrix(g, n)?;
    let cascade = estimate_p_matrix(g, n, trials, master_seed, confidence)?;
    let matrix = matrix_estimate_p(g, n, trials, master_seed, confidence)?;
    let dim = g.node_count();
    let mut records = Vec::with_capacity(dim * dim.saturating_sub(1));
    for i in 0..dim {
        for j in (0..dim).filter(|&j| j != i) {
            let value = exact.get(i, j);
            records.push(ConsistencyRecord {
                i,
                j,
                exact: value,
                cascade: cascade[i][j],
                cascade_inside_ci: cascade[i][j].contains(value),
                matrix: matrix[i][j],
                matrix_inside_ci: matrix[i][j].contains(value),
            });
        }
    }
    let total = records.len();
    let cascade_hits = records.iter().filter(|r| r.cascade_inside_ci).count();
    let matrix_hits = records.iter().filter(|r| r.matrix_inside_ci).count();
    Ok(ConsistencyReport {
        graph: g.into(),
        n,
        trials,
        confidence,
        cascade_coverage: coverage(cascade_hits, total),
        matrix_coverage: coverage(matrix_hits, total),
        coverage_threshold: COVERAGE_THRESHOLD,
        records,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ReversalRecord {
    pub i: usize,
    pub j: usize,
    pub forward: EstimateCell,
    pub reverse: EstimateCell,
    pub overlap: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ReversalReport {
    pub graph: GraphSummary,
    pub n: usize,
    pub samples: u64,
    pub confidence: f64,
    pub records: Vec<ReversalRecord>,
    pub max_abs_difference: f64,
    pub non_overlapping: usize,
    pub pass: bool,
}

/// Estimates `P(product[i][j] > 0)` for `T^(n) ... T^(1)` and for
/// `T^(1) ... T^(n)` on independent streams; passes when every pair's two
/// intervals overlap.
pub fn check_reversal_distribution(
    g: &Graph,
    n: usize,
    samples: u64,
    master_seed: u64,
    confidence: f64,
) -> Result<ReversalReport, VerifyError> {
    let forward = estimate_product_positivity(g, n, samples, master_seed, confidence, ProductOrder::Forward)?;
    let reverse = estimate_product_positivity(g, n, samples, master_seed, confidence, ProductOrder::Reverse)?;
    let dim = g.node_count();
    let records: Vec<ReversalRecord> = (0..dim)
        .flat_map(|i| (0..dim).map(move |j| (i, j)))
        .map(|(i, j)| ReversalRecord {
            i,
            j,
            forward: forward[i][j],
            reverse: reverse[i][j],
            overlap: forward[i][j].overlaps(&reverse[i][j]),
        })
        .collect();
    let max_abs_difference = records
        .iter()
        .map(|r| (r.forward.point - r.reverse.point).abs())
        .fold(0.0, f64::max);
    let non_overlapping = records.iter().filter(|r| !r.overlap).count();
    Ok(ReversalReport {
        graph: g.into(),
        n,
        samples,
        confidence,
        records,
        max_abs_difference,
        non_overlapping,
        pass: non_overlapping == 0,
    })
}
