//! Independent cascade with persistent activations on undirected graphs with
//! symmetric edge probabilities.
//!
//! The probability `P_ij(n)` that node `j` is active within `n` steps when
//! only `i` starts active can be computed three ways:
//!
//! * [`cascade`]: Monte Carlo simulation of the cascade, step by step;
//! * [`matrix`]: products of random symmetric boolean step matrices;
//! * [`exact`]: the exact law of the active set, evolved over subsets.
//!
//! [`verify`] uses them to check that `P_ij(n) = P_ji(n)`.

pub mod active_set;
pub mod cascade;
pub mod corpus;
pub mod exact;
pub mod graph;
pub mod matrix;
pub mod stats;
pub mod streams;
pub mod verify;

pub use active_set::ActiveSet;
pub use cascade::{activation_probability, estimate_p_matrix, estimate_p_row, run_cascade, step, CascadeTrajectory};
pub use exact::{
    transition_distribution, ActivationDistribution, ExactOracle, ProbabilityMatrix, DEFAULT_EXACT_CAP,
};
pub use graph::{generate_er_graph, parse_edge_list, serialize_edge_list, EdgeProbability, Graph, NodeId};
pub use matrix::{apply_matrix, chain_entry, matrix_estimate_p, sample_step_matrix, ProductOrder, StepMatrix};
pub use stats::{wilson_interval, EstimateCell};
