//! Brute-force reference computations, independent of the engines.
#![allow(dead_code)]

/// Enumerates every assignment of success/failure to every edge at every
/// step and returns `P(j active after steps)` for each `j`, starting from
/// `{source}`.
pub fn brute_force_row(nodes: usize, edges: &[(usize, usize, f64)], source: usize, steps: usize) -> Vec<f64> {
    let vars = edges.len() * steps;
    assert!(vars <= 24, "too many outcome variables to enumerate");
    let mut result = vec![0.0; nodes];
    for outcome in 0u64..1 << vars {
        let mut weight = 1.0;
        let mut active = vec![false; nodes];
        active[source] = true;
        for s in 0..steps {
            let before = active.clone();
            for (e, &(u, v, p)) in edges.iter().enumerate() {
                let fired = outcome >> (s * edges.len() + e) & 1 == 1;
                weight *= if fired { p } else { 1.0 - p };
                if fired {
                    if before[u] {
                        active[v] = true;
                    }
                    if before[v] {
                        active[u] = true;
                    }
                }
            }
        }
        for (j, &a) in active.iter().enumerate() {
            if a {
                result[j] += weight;
            }
        }
    }
    result
}

/// Law of the next active set from `start` (bitmask), by enumerating all
/// `2^edges` one-step edge outcomes.
pub fn brute_force_transition(edges: &[(usize, usize, f64)], start: u64) -> std::collections::BTreeMap<u64, f64> {
    let mut law = std::collections::BTreeMap::new();
    for outcome in 0u64..1 << edges.len() {
        let mut weight = 1.0;
        let mut next = start;
        for (e, &(u, v, p)) in edges.iter().enumerate() {
            let fired = outcome >> e & 1 == 1;
            weight *= if fired { p } else { 1.0 - p };
            if fired {
                if start >> u & 1 == 1 {
                    next |= 1 << v;
                }
                if start >> v & 1 == 1 {
                    next |= 1 << u;
                }
            }
        }
        *law.entry(next).or_insert(0.0) += weight;
    }
    law.retain(|_, w| *w > 0.0);
    law
}
