//! Seeded Erdős–Rényi graphs.

use std::fmt;
use std::str::FromStr;

use rand::distr::Open01;
use rand::Rng;

use super::{Graph, GraphError};
use crate::streams::{stream_rng, Domain};

/// Probability assigned to each generated edge.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum EdgeProbability {
    Fixed(f64),
    /// Independent uniform draw on the open interval (0, 1).
    Uniform,
}

impl fmt::Display for EdgeProbability {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            EdgeProbability::Fixed(p) => write!(f, "{p}"),
            EdgeProbability::Uniform => f.write_str("uniform"),
        }
    }
}

impl FromStr for EdgeProbability {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        if s.eq_ignore_ascii_case("uniform") || s.eq_ignore_ascii_case("uniform-random") {
            return Ok(EdgeProbability::Uniform);
        }
        match s.parse::<f64>() {
            Ok(p) if (0.0..=1.0).contains(&p) => Ok(EdgeProbability::Fixed(p)),
            _ => Err(format!("expected a probability in [0, 1] or \"uniform\", got {s:?}")),
        }
    }
}

/// G(n, density) with the given edge probabilities; deterministic in `seed`.
///
/// Pairs are visited in canonical order and each consumes exactly one
/// inclusion draw, plus one probability draw when included and
/// [`EdgeProbability::Uniform`].
pub fn generate_er_graph(
    n_nodes: usize,
    edge_density: f64,
    prob: EdgeProbability,
    seed: u64,
) -> Result<Graph, GraphError> {
    if !(0.0..=1.0).contains(&edge_density) {
        return Err(GraphError::ProbabilityOutOfRange {
            u: 0,
            v: 0,
            p: edge_density,
        });
    }
    let mut rng = stream_rng(seed, Domain::Generator, 0);
    let mut edges = Vec::new();
    for u in 0..n_nodes {
        for v in u + 1..n_nodes {
            if rng.random_bool(edge_density) {
                let p = match prob {
                    EdgeProbability::Fixed(p) => p,
                    EdgeProbability::Uniform => rng.sample(Open01),
                };
                edges.push((u, v, p));
            }
        }
    }
    Graph::from_edges(n_nodes, edges)
}
