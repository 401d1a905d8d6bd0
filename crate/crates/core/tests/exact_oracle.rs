mod common;

use common::{brute_force_row, brute_force_transition};
use icsym_core::corpus::{connected_edge_masks, graph_from_mask};
use icsym_core::{transition_distribution, ActiveSet, ExactOracle, Graph};

fn edge_triples(g: &Graph) -> Vec<(usize, usize, f64)> {
    g.edges().iter().map(|e| (e.u, e.v, e.p)).collect()
}

#[test]
fn frozen_anchor_values() {
    // Values confirmed by brute_force_row below, frozen here.
    let two = [(0, 1, 0.5)];
    let triangle = [(0, 1, 0.5), (0, 2, 0.5), (1, 2, 0.5)];
    let path = [(0, 1, 0.3), (1, 2, 0.7)];
    assert!((brute_force_row(2, &two, 0, 2)[1] - 0.75).abs() < 1e-15);
    assert!((brute_force_row(3, &triangle, 0, 2)[2] - 13.0 / 16.0).abs() < 1e-15);
    assert!((brute_force_row(3, &path, 0, 2)[2] - 0.21).abs() < 1e-15);
    assert!((brute_force_row(3, &path, 2, 2)[0] - 0.21).abs() < 1e-15);

    let oracle = ExactOracle::default();
    for (nodes, edges, i, j, value) in [
        (2, &two[..], 0, 1, 0.75),
        (3, &triangle[..], 0, 2, 0.8125),
        (3, &path[..], 0, 2, 0.21),
        (3, &path[..], 2, 0, 0.21),
    ] {
        let g = Graph::from_edges(nodes, edges.iter().copied()).unwrap();
        let p = oracle.exact_p_matrix(&g, 2).unwrap();
        assert!((p.get(i, j) - value).abs() < 1e-12, "{i}->{j}: {}", p.get(i, j));
    }
}

/// Per-node independence of the one-step law, checked against direct
/// enumeration of edge outcomes on every graph with at most four edges.
#[test]
fn transition_factorisation_matches_edge_enumeration() {
    let mut checked = 0;
    for nodes in 2..=5 {
        let pair_count = nodes * (nodes - 1) / 2;
        for mask in 0u64..1 << pair_count {
            if mask.count_ones() > 4 {
                continue;
            }
            let g = graph_from_mask(nodes, mask, 99, mask);
            let edges = edge_triples(&g);
            for start in 0u64..1 << nodes {
                let ours = transition_distribution(&g, &ActiveSet::from_mask(nodes, start)).unwrap();
                let reference = brute_force_transition(&edges, start);
                let ours: Vec<_> = ours.into_iter().filter(|&(_, w)| w > 0.0).collect();
                assert_eq!(ours.len(), reference.len(), "support differs on {edges:?} from {start:b}");
                for ((m1, w1), (m2, w2)) in ours.iter().zip(&reference) {
                    assert_eq!(m1, m2);
                    assert!((w1 - w2).abs() < 1e-12);
                }
                checked += 1;
            }
        }
    }
    assert!(checked > 10_000);
}

#[test]
fn exact_rows_match_enumeration_on_small_graphs() {
    let oracle = ExactOracle::default();
    for nodes in 2..=4 {
        for (k, mask) in connected_edge_masks(nodes).into_iter().enumerate() {
            let g = graph_from_mask(nodes, mask, 5, k as u64);
            let edges = edge_triples(&g);
            for steps in 0..=3 {
                if edges.len() * steps > 18 {
                    continue;
                }
                let p = oracle.exact_p_matrix(&g, steps).unwrap();
                for i in 0..nodes {
                    let reference = brute_force_row(nodes, &edges, i, steps);
                    for j in 0..nodes {
                        assert!((p.get(i, j) - reference[j]).abs() < 1e-12);
                    }
                }
            }
        }
    }
}

#[test]
fn monotone_in_steps() {
    let oracle = ExactOracle::default();
    for (k, mask) in connected_edge_masks(5).into_iter().enumerate().step_by(7) {
        let g = graph_from_mask(5, mask, 2, k as u64);
        let mut prev = oracle.exact_p_matrix(&g, 0).unwrap();
        for n in 1..=6 {
            let cur = oracle.exact_p_matrix(&g, n).unwrap();
            for i in 0..5 {
                for j in 0..5 {
                    assert!(cur.get(i, j) >= prev.get(i, j) - 1e-12);
                    assert!((0.0..=1.0 + 1e-12).contains(&cur.get(i, j)));
                }
                assert_eq!(cur.get(i, i), 1.0);
            }
            prev = cur;
        }
    }
}
