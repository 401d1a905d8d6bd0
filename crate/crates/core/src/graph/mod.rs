//! Undirected graphs with symmetric activation probabilities.
//!
//! Probabilities are stored once per unordered pair under the canonical key
//! `(min, max)`, so `p(i, j)` and `p(j, i)` read the same slot. Pairs with
//! probability zero are not stored: they are not edges.

mod edge_list;
mod generate;

pub use edge_list::{parse_edge_list, serialize_edge_list};
pub use generate::{generate_er_graph, EdgeProbability};

use std::collections::BTreeMap;
use std::fmt;

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum GraphError {
    #[error("graph must have at least one node")]
    NoNodes,
    #[error("self-loop on node {0}")]
    SelfLoop(usize),
    #[error("node {node} out of range for {node_count} nodes")]
    NodeOutOfRange { node: usize, node_count: usize },
    #[error("probability {p} on pair ({u}, {v}) outside [0, 1]")]
    ProbabilityOutOfRange { u: usize, v: usize, p: f64 },
    #[error("pair ({u}, {v}) listed more than once")]
    DuplicatePair { u: usize, v: usize },
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("line {line}: {source}")]
    AtLine {
        line: usize,
        #[source]
        source: Box<GraphError>,
    },
}

/// Index of a node in a [`Graph`], checked against the graph that issued it.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct NodeId(usize);

impl NodeId {
    pub fn index(self) -> usize {
        self.0
    }
}

impl fmt::Display for NodeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}

/// One stored edge, canonical `u < v`, `0 < p <= 1`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Edge {
    pub u: usize,
    pub v: usize,
    pub p: f64,
}

/// Immutable undirected graph with edge probabilities.
#[derive(Debug, Clone, PartialEq)]
pub struct Graph {
    node_count: usize,
    edges: Vec<Edge>,
    adjacency: Vec<Vec<(usize, f64)>>,
}

impl Graph {
    /// Graph on `node_count` nodes with no edges.
    pub fn empty(node_count: usize) -> Result<Self, GraphError> {
        Self::from_edges(node_count, std::iter::empty())
    }

    /// Builds a graph from `(u, v, p)` triples in either orientation.
    ///
    /// Zero-probability triples are accepted and dropped. A pair may appear
    /// only once, whatever its orientation.
    pub fn from_edges<I>(node_count: usize, edges: I) -> Result<Self, GraphError>
    where
        I: IntoIterator<Item = (usize, usize, f64)>,
    {
        if node_count == 0 {
            return Err(GraphError::NoNodes);
        }
        let mut table: BTreeMap<(usize, usize), f64> = BTreeMap::new();
        for (u, v, p) in edges {
            check_triple(node_count, u, v, p)?;
            let key = (u.min(v), u.max(v));
            if table.insert(key, p).is_some() {
                return Err(GraphError::DuplicatePair { u: key.0, v: key.1 });
            }
        }
        let edges: Vec<Edge> = table
            .into_iter()
            .filter(|&(_, p)| p > 0.0)
            .map(|((u, v), p)| Edge { u, v, p })
            .collect();
        let mut adjacency = vec![Vec::new(); node_count];
        for e in &edges {
            adjacency[e.u].push((e.v, e.p));
            adjacency[e.v].push((e.u, e.p));
        }
        for row in &mut adjacency {
            row.sort_by_key(|&(n, _)| n);
        }
        Ok(Graph {
            node_count,
            edges,
            adjacency,
        })
    }

    pub fn node_count(&self) -> usize {
        self.node_count
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    /// Edges in canonical order: `(u, v)` lexicographic with `u < v`.
    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    /// Neighbors of `node` with their edge probabilities, by increasing index.
    pub fn neighbors(&self, node: usize) -> &[(usize, f64)] {
        &self.adjacency[node]
    }

    pub fn node(&self, index: usize) -> Result<NodeId, GraphError> {
        if index < self.node_count {
            Ok(NodeId(index))
        } else {
            Err(GraphError::NodeOutOfRange {
                node: index,
                node_count: self.node_count,
            })
        }
    }

    pub fn nodes(&self) -> impl Iterator<Item = NodeId> {
        (0..self.node_count).map(NodeId)
    }

    /// `p_ij`; exactly `0.0` for absent pairs and for `i == j`.
    pub fn prob(&self, i: usize, j: usize) -> f64 {
        assert!(i < self.node_count && j < self.node_count);
        self.adjacency[i]
            .binary_search_by_key(&j, |&(n, _)| n)
            .map(|pos| self.adjacency[i][pos].1)
            .unwrap_or(0.0)
    }

    /// Whether every node can reach every other through edges.
    pub fn is_connected(&self) -> bool {
        let mut seen = vec![false; self.node_count];
        let mut stack = vec![0];
        seen[0] = true;
        while let Some(u) = stack.pop() {
            for &(v, _) in &self.adjacency[u] {
                if !seen[v] {
                    seen[v] = true;
                    stack.push(v);
                }
            }
        }
        seen.into_iter().all(|s| s)
    }

    /// Dense `N × N` copy of the probability table.
    pub fn to_table(&self) -> ProbabilityTable {
        let n = self.node_count;
        let mut probs = vec![vec![0.0; n]; n];
        for e in &self.edges {
            probs[e.u][e.v] = e.p;
            probs[e.v][e.u] = e.p;
        }
        ProbabilityTable { probs }
    }

    pub fn validate(&self) -> ValidationReport {
        validate(&self.to_table())
    }
}

pub(super) fn check_triple(node_count: usize, u: usize, v: usize, p: f64) -> Result<(), GraphError> {
    for node in [u, v] {
        if node >= node_count {
            return Err(GraphError::NodeOutOfRange { node, node_count });
        }
    }
    if u == v {
        return Err(GraphError::SelfLoop(u));
    }
    if !(0.0..=1.0).contains(&p) {
        return Err(GraphError::ProbabilityOutOfRange { u, v, p });
    }
    Ok(())
}

/// Dense, unchecked probability table. Unlike [`Graph`] it can hold invalid
/// data, which makes it the input type of [`validate`].
#[derive(Debug, Clone, PartialEq)]
pub struct ProbabilityTable {
    pub probs: Vec<Vec<f64>>,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Violation {
    NoNodes,
    NotSquare { row: usize, len: usize },
    Range { i: usize, j: usize, p: f64 },
    Symmetry { i: usize, j: usize, p_ij: f64, p_ji: f64 },
    SelfPair { i: usize, p: f64 },
}

#[derive(Debug, Clone, PartialEq)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn is_ok(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Lists every violated graph invariant in `table`.
pub fn validate(table: &ProbabilityTable) -> ValidationReport {
    let n = table.probs.len();
    let mut violations = Vec::new();
    if n == 0 {
        violations.push(Violation::NoNodes);
    }
    for (row, r) in table.probs.iter().enumerate() {
        if r.len() != n {
            violations.push(Violation::NotSquare { row, len: r.len() });
        }
    }
    if !violations.is_empty() {
        return ValidationReport { violations };
    }
    for i in 0..n {
        let d = table.probs[i][i];
        if d != 0.0 {
            violations.push(Violation::SelfPair { i, p: d });
        }
        for j in 0..n {
            let p = table.probs[i][j];
            if i != j && !(0.0..=1.0).contains(&p) {
                violations.push(Violation::Range { i, j, p });
            }
            if i < j && p.to_bits() != table.probs[j][i].to_bits() {
                violations.push(Violation::Symmetry {
                    i,
                    j,
                    p_ij: p,
                    p_ji: table.probs[j][i],
                });
            }
        }
    }
    ValidationReport { violations }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn path3() -> Graph {
        Graph::from_edges(3, [(0, 1, 0.3), (1, 2, 0.7)]).unwrap()
    }

    #[test]
    fn probabilities_are_symmetric_and_absent_is_zero() {
        let g = path3();
        assert_eq!(g.prob(0, 1), 0.3);
        assert_eq!(g.prob(1, 0), 0.3);
        assert_eq!(g.prob(2, 1), 0.7);
        assert_eq!(g.prob(0, 2), 0.0);
        assert_eq!(g.prob(1, 1), 0.0);
    }

    #[test]
    fn edges_are_canonical() {
        let g = Graph::from_edges(4, [(3, 2, 0.1), (1, 0, 0.2), (0, 3, 0.4)]).unwrap();
        let pairs: Vec<_> = g.edges().iter().map(|e| (e.u, e.v)).collect();
        assert_eq!(pairs, vec![(0, 1), (0, 3), (2, 3)]);
    }

    #[test]
    fn zero_probability_is_not_an_edge() {
        let g = Graph::from_edges(3, [(0, 1, 0.0), (1, 2, 0.5)]).unwrap();
        assert_eq!(g.edge_count(), 1);
        assert!(g.neighbors(0).is_empty());
    }

    #[test]
    fn constructor_errors() {
        assert_eq!(Graph::empty(0), Err(GraphError::NoNodes));
        assert_eq!(
            Graph::from_edges(2, [(0, 0, 0.3)]),
            Err(GraphError::SelfLoop(0))
        );
        assert!(matches!(
            Graph::from_edges(2, [(0, 1, 1.5)]),
            Err(GraphError::ProbabilityOutOfRange { .. })
        ));
        assert!(matches!(
            Graph::from_edges(2, [(0, 1, f64::NAN)]),
            Err(GraphError::ProbabilityOutOfRange { .. })
        ));
        assert!(matches!(
            Graph::from_edges(2, [(0, 2, 0.5)]),
            Err(GraphError::NodeOutOfRange { node: 2, .. })
        ));
        assert_eq!(
            Graph::from_edges(3, [(0, 1, 0.5), (1, 0, 0.5)]),
            Err(GraphError::DuplicatePair { u: 0, v: 1 })
        );
    }

    #[test]
    fn node_ids_are_bounds_checked() {
        let g = path3();
        assert_eq!(g.node(2).unwrap().index(), 2);
        assert!(g.node(3).is_err());
        assert_eq!(g.nodes().count(), 3);
    }

    #[test]
    fn validate_clean_graph() {
        assert!(path3().validate().is_ok());
    }

    #[test]
    fn validate_flags_range() {
        let mut t = path3().to_table();
        t.probs[0][1] = 1.2;
        t.probs[1][0] = 1.2;
        let report = validate(&t);
        assert!(report
            .violations
            .iter()
            .any(|v| matches!(v, Violation::Range { i: 0, j: 1, .. })));
    }

    #[test]
    fn validate_flags_asymmetry_and_self_pairs() {
        let mut t = path3().to_table();
        t.probs[2][1] = 0.6;
        t.probs[0][0] = 0.5;
        let report = validate(&t);
        assert!(report
            .violations
            .contains(&Violation::Symmetry { i: 1, j: 2, p_ij: 0.7, p_ji: 0.6 }));
        assert!(report
            .violations
            .contains(&Violation::SelfPair { i: 0, p: 0.5 }));
    }

    #[test]
    fn validate_flags_shape() {
        let t = ProbabilityTable {
            probs: vec![vec![0.0, 0.1], vec![0.1]],
        };
        assert_eq!(
            validate(&t).violations,
            vec![Violation::NotSquare { row: 1, len: 1 }]
        );
        assert_eq!(
            validate(&ProbabilityTable { probs: vec![] }).violations,
            vec![Violation::NoNodes]
        );
    }

    #[test]
    fn connectivity() {
        assert!(path3().is_connected());
        assert!(!Graph::from_edges(3, [(0, 1, 0.5)]).unwrap().is_connected());
        assert!(Graph::empty(1).unwrap().is_connected());
    }
}
