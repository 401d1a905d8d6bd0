use icsym_core::corpus::random_graphs;
use icsym_core::matrix::{propagate, sample_sequence};
use icsym_core::streams::{stream_rng, Domain};
use icsym_core::{apply_matrix, step, ActiveSet};
use proptest::prelude::*;

#[test]
fn cascade_step_and_matrix_application_agree() {
    for (gi, g) in random_graphs(20, 6, 30, 4).iter().enumerate() {
        let n = g.node_count();
        for t in 0..50u64 {
            let mut rng = stream_rng(gi as u64, Domain::Cascade, t);
            let seq = sample_sequence(g, 6, &mut rng);
            let seeds = ActiveSet::singleton(n, (t as usize) % n);
            let mut state = seeds.clone();
            let by_matrix = propagate(&seq, &seeds).unwrap();
            for (k, t_k) in seq.iter().enumerate() {
                let a = step(g, &state, t_k).unwrap();
                assert_eq!(a, apply_matrix(t_k, &state).unwrap());
                assert_eq!(a, by_matrix[k + 1]);
                assert!(state.is_subset(&a));
                state = a;
            }
        }
    }
}

proptest! {
    #[test]
    fn agreement_from_arbitrary_sets(n in 1usize..70, seed: u64, members: Vec<usize>) {
        let g = &random_graphs(1, n, n, seed)[0];
        let mut rng = stream_rng(seed, Domain::Cascade, 0);
        let s = ActiveSet::from_nodes(n, members.into_iter().map(|m| m % n));
        for t in sample_sequence(g, 3, &mut rng) {
            prop_assert_eq!(step(g, &s, &t).unwrap(), apply_matrix(&t, &s).unwrap());
        }
    }
}
