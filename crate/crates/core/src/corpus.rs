//! Seeded graph collections for verification runs.

use rand::distr::Open01;
use rand::Rng;

use crate::graph::{generate_er_graph, EdgeProbability, Graph};
use crate::streams::{stream_rng, Domain};

fn pairs(n: usize) -> Vec<(usize, usize)> {
    (0..n).flat_map(|u| (u + 1..n).map(move |v| (u, v))).collect()
}

fn is_connected(n: usize, pairs: &[(usize, usize)], mask: u64) -> bool {
    let mut reached = 1u64;
    loop {
        let mut next = reached;
        for (idx, &(u, v)) in pairs.iter().enumerate() {
            if mask >> idx & 1 == 1 && (reached >> u & 1 == 1 || reached >> v & 1 == 1) {
                next |= 1 << u | 1 << v;
            }
        }
        if next == reached {
            return reached.count_ones() as usize == n;
        }
        reached = next;
    }
}

/// Edge masks (bit `k` = `k`-th pair in lexicographic order) of all
/// connected labelled graphs on `n` nodes. Practical for `n <= 6`.
pub fn connected_edge_masks(n: usize) -> Vec<u64> {
    assert!((1..=8).contains(&n), "enumeration supports 1..=8 nodes");
    let pairs = pairs(n);
    (0..1u64 << pairs.len())
        .filter(|&m| is_connected(n, &pairs, m))
        .collect()
}

fn permutations(n: usize) -> Vec<Vec<usize>> {
    fn go(prefix: &mut Vec<usize>, used: &mut [bool], out: &mut Vec<Vec<usize>>) {
        if prefix.len() == used.len() {
            out.push(prefix.clone());
            return;
        }
        for k in 0..used.len() {
            if !used[k] {
                used[k] = true;
                prefix.push(k);
                go(prefix, used, out);
                prefix.pop();
                used[k] = false;
            }
        }
    }
    let mut out = Vec::new();
    go(&mut Vec::new(), &mut vec![false; n], &mut out);
    out
}

/// Smallest edge mask among all relabellings of `mask`.
fn canonical_mask(n: usize, pairs: &[(usize, usize)], perms: &[Vec<usize>], mask: u64) -> u64 {
    let index = |u: usize, v: usize| {
        let (a, b) = (u.min(v), u.max(v));
        pairs.iter().position(|&p| p == (a, b)).unwrap()
    };
    debug_assert_eq!(pairs.len(), n * n.saturating_sub(1) / 2);
    perms
        .iter()
        .map(|perm| {
            pairs
                .iter()
                .enumerate()
                .filter(|&(k, _)| mask >> k & 1 == 1)
                .fold(0u64, |acc, (_, &(u, v))| acc | 1 << index(perm[u], perm[v]))
        })
        .min()
        .unwrap()
}

/// One edge mask per isomorphism class of connected graphs on `n` nodes.
pub fn connected_class_masks(n: usize) -> Vec<u64> {
    let pairs = pairs(n);
    let perms = permutations(n);
    let mut classes: Vec<u64> = connected_edge_masks(n)
        .into_iter()
        .map(|m| canonical_mask(n, &pairs, &perms, m))
        .collect();
    classes.sort_unstable();
    classes.dedup();
    classes
}

/// Graph with the edges of `mask`, each probability drawn uniformly from
/// (0, 1) on stream `stream` of `seed`.
pub fn graph_from_mask(n: usize, mask: u64, seed: u64, stream: u64) -> Graph {
    let mut rng = stream_rng(seed, Domain::Generator, stream);
    let edges: Vec<_> = pairs(n)
        .into_iter()
        .enumerate()
        .filter(|&(k, _)| mask >> k & 1 == 1)
        .map(|(_, (u, v))| (u, v, rng.sample(Open01)))
        .collect();
    Graph::from_edges(n, edges).expect("valid by construction")
}

/// Every connected labelled graph on `n` nodes with seeded uniform
/// probabilities.
pub fn connected_graphs(n: usize, seed: u64) -> Vec<Graph> {
    connected_edge_masks(n)
        .into_iter()
        .enumerate()
        .map(|(k, m)| graph_from_mask(n, m, seed, k as u64 + 1))
        .collect()
}

/// One connected graph per isomorphism class on `n` nodes, seeded uniform
/// probabilities.
pub fn connected_graph_classes(n: usize, seed: u64) -> Vec<Graph> {
    connected_class_masks(n)
        .into_iter()
        .enumerate()
        .map(|(k, m)| graph_from_mask(n, m, seed, k as u64 + 1))
        .collect()
}

/// `count` Erdős–Rényi graphs with node counts in `[min_nodes, max_nodes]`,
/// density in [0.2, 0.8] and uniform probabilities.
pub fn random_graphs(count: usize, min_nodes: usize, max_nodes: usize, seed: u64) -> Vec<Graph> {
    let mut rng = stream_rng(seed, Domain::Generator, u64::MAX);
    (0..count)
        .map(|_| {
            let n = rng.random_range(min_nodes..=max_nodes);
            let density = rng.random_range(0.2..=0.8);
            let graph_seed: u64 = rng.random();
            generate_er_graph(n, density, EdgeProbability::Uniform, graph_seed).expect("valid parameters")
        })
        .collect()
}
