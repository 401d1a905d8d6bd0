//! Exact activation probabilities by evolving the law of the active set.
//!
//! The active set is a Markov chain on subsets of the nodes. Given the
//! current set `s`, each inactive node `j` activates independently with
//! probability `q_j(s) = 1 - prod_{k in s}(1 - p_kj)`: the trials aimed at
//! different targets use disjoint edge variables. The chain is tracked as a
//! table from bitmask to probability mass.

use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::active_set::ActiveSet;
use crate::cascade::union_probability;
use crate::graph::Graph;

/// Largest node count the oracle accepts unless configured otherwise.
pub const DEFAULT_EXACT_CAP: usize = 20;
const MAX_MASK_NODES: usize = 63;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ExactError {
    #[error("graph has {nodes} nodes, exact computation is capped at {cap}")]
    CapExceeded { nodes: usize, cap: usize },
    #[error("distribution is over {found} nodes, graph has {expected}")]
    DimensionMismatch { expected: usize, found: usize },
}

/// Probability law of the active set after `step` steps.
#[derive(Debug, Clone, PartialEq)]
pub struct ActivationDistribution {
    node_count: usize,
    seeds: u64,
    step: usize,
    mass: BTreeMap<u64, f64>,
}

impl ActivationDistribution {
    /// Point mass on `seeds` at step 0.
    pub fn point_mass(seeds: &ActiveSet) -> Self {
        let mask = seeds
            .to_mask()
            .filter(|_| seeds.universe() <= MAX_MASK_NODES)
            .expect("exact distributions are limited to 63 nodes");
        ActivationDistribution {
            node_count: seeds.universe(),
            seeds: mask,
            step: 0,
            mass: BTreeMap::from([(mask, 1.0)]),
        }
    }

    pub fn node_count(&self) -> usize {
        self.node_count
    }

    pub fn step(&self) -> usize {
        self.step
    }

    /// Mass per active set, keyed by bitmask (bit `k` set when node `k` is
    /// active), in increasing key order.
    pub fn masses(&self) -> &BTreeMap<u64, f64> {
        &self.mass
    }

    pub fn mass_of(&self, set: &ActiveSet) -> f64 {
        set.to_mask()
            .and_then(|m| self.mass.get(&m).copied())
            .unwrap_or(0.0)
    }

    pub fn total_mass(&self) -> f64 {
        self.mass.values().sum()
    }

    /// `P(j active)` for every node `j`, summing mass over sets containing `j`.
    pub fn marginals(&self) -> Vec<f64> {
        (0..self.node_count)
            .map(|j| {
                self.mass
                    .iter()
                    .filter(|(&m, _)| m >> j & 1 == 1)
                    .map(|(_, &w)| w)
                    .sum()
            })
            .collect()
    }

    /// Whether every supported set contains the seeds and every mass is
    /// non-negative, with total mass within `tol` of one.
    pub fn is_valid(&self, tol: f64) -> bool {
        self.mass
            .iter()
            .all(|(&m, &w)| m & self.seeds == self.seeds && w >= 0.0)
            && (self.total_mass() - 1.0).abs() <= tol
    }
}

/// `P_ij(n)` for all ordered pairs; row `i` is seeded by node `i`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ProbabilityMatrix {
    pub n: usize,
    pub values: Vec<Vec<f64>>,
}

impl ProbabilityMatrix {
    pub fn node_count(&self) -> usize {
        self.values.len()
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.values[i][j]
    }

    /// Largest `|P_ij - P_ji|` and the first pair `(i, j)`, `i < j`, reaching
    /// it. `None` when there are no pairs.
    pub fn max_asymmetry(&self) -> (f64, Option<(usize, usize)>) {
        let n = self.node_count();
        let mut best = (0.0, None);
        for i in 0..n {
            for j in i + 1..n {
                let d = (self.values[i][j] - self.values[j][i]).abs();
                if best.1.is_none() || d > best.0 {
                    best = (d, Some((i, j)));
                }
            }
        }
        best
    }
}

/// Exact engine with a configurable node cap.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ExactOracle {
    cap: usize,
}

impl Default for ExactOracle {
    fn default() -> Self {
        ExactOracle {
            cap: DEFAULT_EXACT_CAP,
        }
    }
}

fn transition_masks(g: &Graph, s: u64) -> Vec<(u64, f64)> {
    let n = g.node_count();
    let active = ActiveSet::from_mask(n, s);
    let mut out = vec![(s, 1.0)];
    for j in (0..n).filter(|&j| s >> j & 1 == 0) {
        let q = union_probability(g, &active, j);
        let bit = 1u64 << j;
        if q == 0.0 {
            continue;
        }
        if q == 1.0 {
            for entry in &mut out {
                entry.0 |= bit;
            }
            continue;
        }
        let mut split = Vec::with_capacity(out.len() * 2);
        for &(m, w) in &out {
            split.push((m, w * (1.0 - q)));
            split.push((m | bit, w * q));
        }
        out = split;
    }
    out
}

/// Law of the next active set given the current set `s`. Keys are bitmasks
/// of supersets of `s`.
pub fn transition_distribution(g: &Graph, s: &ActiveSet) -> Result<BTreeMap<u64, f64>, ExactError> {
    check_universe(g, s.universe())?;
    if g.node_count() > MAX_MASK_NODES {
        return Err(ExactError::CapExceeded {
            nodes: g.node_count(),
            cap: MAX_MASK_NODES,
        });
    }
    let mask = s.to_mask().expect("at most 63 nodes");
    Ok(transition_masks(g, mask).into_iter().collect())
}

fn check_universe(g: &Graph, found: usize) -> Result<(), ExactError> {
    if g.node_count() == found {
        Ok(())
    } else {
        Err(ExactError::DimensionMismatch {
            expected: g.node_count(),
            found,
        })
    }
}

impl ExactOracle {
    /// Panics if `cap` exceeds 63, the width of the bitmask keys.
    pub fn with_cap(cap: usize) -> Self {
        assert!(cap <= MAX_MASK_NODES, "exact cap above {MAX_MASK_NODES}");
        ExactOracle { cap }
    }

    pub fn cap(&self) -> usize {
        self.cap
    }

    fn check_cap(&self, g: &Graph) -> Result<(), ExactError> {
        if g.node_count() > self.cap {
            Err(ExactError::CapExceeded {
                nodes: g.node_count(),
                cap: self.cap,
            })
        } else {
            Ok(())
        }
    }

    /// Pushes `d` forward `steps` steps.
    pub fn evolve_distribution(
        &self,
        g: &Graph,
        d: &ActivationDistribution,
        steps: usize,
    ) -> Result<ActivationDistribution, ExactError> {
        self.check_cap(g)?;
        check_universe(g, d.node_count)?;
        let full = if g.node_count() == 64 {
            u64::MAX
        } else {
            (1u64 << g.node_count()) - 1
        };
        let mut mass = d.mass.clone();
        for _ in 0..steps {
            let mut next: BTreeMap<u64, f64> = BTreeMap::new();
            for (&m, &w) in &mass {
                if m == full {
                    *next.entry(m).or_insert(0.0) += w;
                    continue;
                }
                for (m2, w2) in transition_masks(g, m) {
                    *next.entry(m2).or_insert(0.0) += w * w2;
                }
            }
            mass = next;
        }
        Ok(ActivationDistribution {
            node_count: d.node_count,
            seeds: d.seeds,
            step: d.step + steps,
            mass,
        })
    }

    /// Row `i` of `P(n)`.
    ///
    /// The law is evolved `n - 1` steps; the last step is folded into the
    /// marginals, `P(j active at n) = sum_S mass(S) * (1 if j in S else
    /// q_j(S))`, which is the same quantity without expanding the final
    /// table.
    pub fn exact_p_row(&self, g: &Graph, i: usize, n: usize) -> Result<Vec<f64>, ExactError> {
        self.check_cap(g)?;
        let nodes = g.node_count();
        let mut row = vec![0.0; nodes];
        row[i] = 1.0;
        if n == 0 {
            return Ok(row);
        }
        let start = ActivationDistribution::point_mass(&ActiveSet::singleton(nodes, i));
        let d = self.evolve_distribution(g, &start, n - 1)?;
        for (j, value) in row.iter_mut().enumerate() {
            if j == i {
                continue;
            }
            *value = d
                .mass
                .iter()
                .map(|(&m, &w)| {
                    if m >> j & 1 == 1 {
                        w
                    } else {
                        w * union_probability(g, &ActiveSet::from_mask(nodes, m), j)
                    }
                })
                .sum();
        }
        Ok(row)
    }

    /// `P_ij(n)` for every ordered pair.
    pub fn exact_p_matrix(&self, g: &Graph, n: usize) -> Result<ProbabilityMatrix, ExactError> {
        self.check_cap(g)?;
        let values = (0..g.node_count())
            .into_par_iter()
            .map(|i| self.exact_p_row(g, i, n))
            .collect::<Result<Vec<_>, _>>()?;
        Ok(ProbabilityMatrix { n, values })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{generate_er_graph, EdgeProbability};

    fn set(n: usize, nodes: &[usize]) -> u64 {
        ActiveSet::from_nodes(n, nodes.iter().copied()).to_mask().unwrap()
    }

    #[test]
    fn full_set_is_absorbing() {
        let g = Graph::from_edges(3, [(0, 1, 0.4), (1, 2, 0.4)]).unwrap();
        let t = transition_distribution(&g, &ActiveSet::full(3)).unwrap();
        assert_eq!(t, BTreeMap::from([(0b111, 1.0)]));
        let d = ActivationDistribution::point_mass(&ActiveSet::full(3));
        let e = ExactOracle::default().evolve_distribution(&g, &d, 5).unwrap();
        assert_eq!(e.masses(), d.masses());
        assert_eq!(e.step(), 5);
    }

    #[test]
    fn two_node_single_bernoulli() {
        let g = Graph::from_edges(2, [(0, 1, 0.5)]).unwrap();
        let t = transition_distribution(&g, &ActiveSet::singleton(2, 0)).unwrap();
        assert_eq!(t, BTreeMap::from([(0b01, 0.5), (0b11, 0.5)]));
    }

    #[test]
    fn triangle_two_independent_trials() {
        let g = Graph::from_edges(3, [(0, 1, 0.5), (0, 2, 0.5), (1, 2, 0.5)]).unwrap();
        let t = transition_distribution(&g, &ActiveSet::singleton(3, 0)).unwrap();
        let expected = BTreeMap::from([
            (set(3, &[0]), 0.25),
            (set(3, &[0, 1]), 0.25),
            (set(3, &[0, 2]), 0.25),
            (set(3, &[0, 1, 2]), 0.25),
        ]);
        assert_eq!(t, expected);
    }

    #[test]
    fn evolve_zero_steps_is_identity() {
        let g = Graph::from_edges(2, [(0, 1, 0.5)]).unwrap();
        let d = ActivationDistribution::point_mass(&ActiveSet::singleton(2, 0));
        assert_eq!(ExactOracle::default().evolve_distribution(&g, &d, 0).unwrap(), d);
    }

    #[test]
    fn two_node_two_steps() {
        let g = Graph::from_edges(2, [(0, 1, 0.5)]).unwrap();
        let d = ActivationDistribution::point_mass(&ActiveSet::singleton(2, 0));
        let e = ExactOracle::default().evolve_distribution(&g, &d, 2).unwrap();
        assert_eq!(e.masses(), &BTreeMap::from([(0b01, 0.25), (0b11, 0.75)]));
    }

    #[test]
    fn cap_is_enforced() {
        let g = generate_er_graph(21, 0.1, EdgeProbability::Fixed(0.5), 1).unwrap();
        let oracle = ExactOracle::default();
        assert_eq!(
            oracle.exact_p_matrix(&g, 1),
            Err(ExactError::CapExceeded { nodes: 21, cap: 20 })
        );
        let d = ActivationDistribution::point_mass(&ActiveSet::singleton(21, 0));
        assert!(oracle.evolve_distribution(&g, &d, 1).is_err());
        let small = ExactOracle::with_cap(4);
        let g5 = Graph::empty(5).unwrap();
        assert!(small.exact_p_matrix(&g5, 1).is_err());
        assert!(ExactOracle::with_cap(22).exact_p_matrix(&g, 0).is_ok());
    }

    #[test]
    fn n_zero_is_identity() {
        let g = generate_er_graph(5, 0.8, EdgeProbability::Uniform, 3).unwrap();
        let m = ExactOracle::default().exact_p_matrix(&g, 0).unwrap();
        for i in 0..5 {
            for j in 0..5 {
                assert_eq!(m.get(i, j), if i == j { 1.0 } else { 0.0 });
            }
        }
    }

    #[test]
    fn n_one_copies_edge_probabilities() {
        let g = generate_er_graph(7, 0.6, EdgeProbability::Uniform, 10).unwrap();
        let m = ExactOracle::default().exact_p_matrix(&g, 1).unwrap();
        for i in 0..7 {
            for j in 0..7 {
                if i != j {
                    assert_eq!(m.get(i, j).to_bits(), g.prob(i, j).to_bits());
                }
            }
        }
    }

    #[test]
    fn path_two_steps() {
        let g = Graph::from_edges(3, [(0, 1, 0.3), (1, 2, 0.7)]).unwrap();
        let m = ExactOracle::default().exact_p_matrix(&g, 2).unwrap();
        assert!((m.get(0, 2) - 0.21).abs() < 1e-12);
        assert!((m.get(2, 0) - 0.21).abs() < 1e-12);
    }

    #[test]
    fn folded_last_step_matches_full_marginals() {
        let g = generate_er_graph(6, 0.7, EdgeProbability::Uniform, 21).unwrap();
        let oracle = ExactOracle::default();
        for n in 1..5 {
            for i in 0..6 {
                let row = oracle.exact_p_row(&g, i, n).unwrap();
                let start = ActivationDistribution::point_mass(&ActiveSet::singleton(6, i));
                let d = oracle.evolve_distribution(&g, &start, n).unwrap();
                for (a, b) in row.iter().zip(d.marginals()) {
                    assert!((a - b).abs() < 1e-12);
                }
            }
        }
    }

    #[test]
    fn mass_is_conserved_and_supports_grow() {
        let g = generate_er_graph(8, 0.5, EdgeProbability::Uniform, 4).unwrap();
        let oracle = ExactOracle::default();
        let mut d = ActivationDistribution::point_mass(&ActiveSet::singleton(8, 2));
        for _ in 0..6 {
            let next = oracle.evolve_distribution(&g, &d, 1).unwrap();
            assert!(next.is_valid(1e-12));
            for &m in next.masses().keys() {
                assert!(d.masses().keys().any(|&prev| prev & m == prev));
            }
            d = next;
        }
    }

    #[test]
    fn deterministic_probabilities_give_point_masses() {
        let g = Graph::from_edges(5, [(0, 1, 1.0), (1, 2, 1.0), (3, 4, 1.0), (2, 3, 0.0)]).unwrap();
        let oracle = ExactOracle::default();
        let d = ActivationDistribution::point_mass(&ActiveSet::singleton(5, 0));
        for steps in 0..4 {
            assert_eq!(oracle.evolve_distribution(&g, &d, steps).unwrap().masses().len(), 1);
        }
        let m = oracle.exact_p_matrix(&g, 3).unwrap();
        assert!(m.values.iter().flatten().all(|&v| v == 0.0 || v == 1.0));
        assert_eq!(m.get(0, 2), 1.0);
        assert_eq!(m.get(0, 3), 0.0);
    }

    #[test]
    fn max_asymmetry_reports_pair() {
        let m = ProbabilityMatrix {
            n: 1,
            values: vec![vec![1.0, 0.2, 0.3], vec![0.2, 1.0, 0.5], vec![0.3, 0.4, 1.0]],
        };
        let (d, pair) = m.max_asymmetry();
        assert!((d - 0.1).abs() < 1e-15);
        assert_eq!(pair, Some((1, 2)));
        let single = ProbabilityMatrix { n: 0, values: vec![vec![1.0]] };
        assert_eq!(single.max_asymmetry(), (0.0, None));
    }
}
