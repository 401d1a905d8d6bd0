//! Plain-text edge lists.
//!
//! ```text
//! # comment
//! 3          # node count
//! 0 1 0.5    # u v p
//! 1 2 0.5
//! ```

use std::collections::HashSet;
use std::fmt::Write as _;

use super::{check_triple, Graph, GraphError};

fn parse_err(line: usize, message: impl Into<String>) -> GraphError {
    GraphError::Parse {
        line,
        message: message.into(),
    }
}

/// Parses an edge list. Line numbers in errors are 1-based.
pub fn parse_edge_list(text: &str) -> Result<Graph, GraphError> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(idx, raw)| (idx + 1, raw.split('#').next().unwrap_or("").trim()))
        .filter(|(_, l)| !l.is_empty());

    let (header_line, header) = lines
        .next()
        .ok_or_else(|| parse_err(1, "missing node count"))?;
    let node_count: usize = match header.split_whitespace().collect::<Vec<_>>()[..] {
        [tok] => tok
            .parse()
            .map_err(|_| parse_err(header_line, format!("invalid node count {tok:?}")))?,
        _ => return Err(parse_err(header_line, "expected a single node count")),
    };

    let mut triples = Vec::new();
    let mut line_of = Vec::new();
    for (line, content) in lines {
        let toks: Vec<&str> = content.split_whitespace().collect();
        let [u, v, p] = toks[..] else {
            return Err(parse_err(
                line,
                format!("expected \"u v p\", found {} tokens", toks.len()),
            ));
        };
        let u: usize = u
            .parse()
            .map_err(|_| parse_err(line, format!("invalid node index {u:?}")))?;
        let v: usize = v
            .parse()
            .map_err(|_| parse_err(line, format!("invalid node index {v:?}")))?;
        let p: f64 = p
            .parse()
            .map_err(|_| parse_err(line, format!("invalid probability {p:?}")))?;
        triples.push((u, v, p));
        line_of.push(line);
    }

    if node_count == 0 {
        return Err(parse_err(header_line, "node count must be positive"));
    }
    let mut seen = HashSet::new();
    for (&(u, v, p), &line) in triples.iter().zip(&line_of) {
        let at_line = |source| GraphError::AtLine {
            line,
            source: Box::new(source),
        };
        check_triple(node_count, u, v, p).map_err(at_line)?;
        if !seen.insert((u.min(v), u.max(v))) {
            return Err(at_line(GraphError::DuplicatePair {
                u: u.min(v),
                v: u.max(v),
            }));
        }
    }
    Graph::from_edges(node_count, triples)
}

/// Writes `g` as an edge list in canonical edge order. Probabilities use the
/// shortest decimal form that parses back to the same `f64`.
pub fn serialize_edge_list(g: &Graph) -> String {
    let mut out = String::new();
    writeln!(out, "{}", g.node_count()).unwrap();
    for e in g.edges() {
        writeln!(out, "{} {} {}", e.u, e.v, e.p).unwrap();
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{generate_er_graph, EdgeProbability};
    use proptest::prelude::*;

    #[test]
    fn parses_path() {
        let g = parse_edge_list("3\n0 1 0.5\n1 2 0.5").unwrap();
        assert_eq!(g.node_count(), 3);
        assert_eq!(g.prob(0, 1), 0.5);
        assert_eq!(g.prob(1, 2), 0.5);
        assert_eq!(g.prob(0, 2), 0.0);
    }

    #[test]
    fn comments_blank_lines_and_zero_edges() {
        let text = "# header\n\n  4   # nodes\n0 1 0.25 # first\n\n2 3 0\n";
        let g = parse_edge_list(text).unwrap();
        assert_eq!(g.node_count(), 4);
        assert_eq!(g.edge_count(), 1);
    }

    fn line_of(err: GraphError) -> usize {
        match err {
            GraphError::Parse { line, .. } | GraphError::AtLine { line, .. } => line,
            other => panic!("no line in {other:?}"),
        }
    }

    #[test]
    fn self_loop_is_rejected() {
        let err = parse_edge_list("2\n0 0 0.3").unwrap_err();
        assert_eq!(line_of(err.clone()), 2);
        assert!(matches!(
            err,
            GraphError::AtLine { ref source, .. } if **source == GraphError::SelfLoop(0)
        ));
    }

    #[test]
    fn out_of_range_probability_is_rejected() {
        let err = parse_edge_list("2\n0 1 1.5").unwrap_err();
        assert!(matches!(
            err,
            GraphError::AtLine { line: 2, ref source, .. }
                if matches!(**source, GraphError::ProbabilityOutOfRange { .. })
        ));
    }

    #[test]
    fn malformed_lines_report_line_numbers() {
        assert_eq!(line_of(parse_edge_list("3\n0 1\n").unwrap_err()), 2);
        assert_eq!(line_of(parse_edge_list("3\n# c\n0 1 x\n").unwrap_err()), 3);
        assert_eq!(line_of(parse_edge_list("3\n0 -1 0.5\n").unwrap_err()), 2);
        assert_eq!(line_of(parse_edge_list("three\n").unwrap_err()), 1);
        assert_eq!(line_of(parse_edge_list("3 4\n").unwrap_err()), 1);
        assert_eq!(line_of(parse_edge_list("0\n").unwrap_err()), 1);
        assert_eq!(line_of(parse_edge_list("# only\n").unwrap_err()), 1);
        assert_eq!(line_of(parse_edge_list("3\n0 5 0.5\n").unwrap_err()), 2);
    }

    #[test]
    fn duplicate_pairs_are_rejected() {
        let err = parse_edge_list("3\n0 1 0.5\n1 2 0.1\n1 0 0.4\n").unwrap_err();
        assert_eq!(line_of(err), 4);
        assert!(parse_edge_list("3\n0 1 0.5\n0 1 0.5\n").is_err());
    }

    #[test]
    fn serialization_is_canonical() {
        let g = Graph::from_edges(3, [(2, 1, 0.7), (1, 0, 0.3)]).unwrap();
        assert_eq!(serialize_edge_list(&g), "3\n0 1 0.3\n1 2 0.7\n");
    }

    proptest! {
        #[test]
        fn round_trip(n in 1usize..14, density in 0.0f64..=1.0, seed: u64) {
            let g = generate_er_graph(n, density, EdgeProbability::Uniform, seed).unwrap();
            prop_assert_eq!(parse_edge_list(&serialize_edge_list(&g)).unwrap(), g);
        }
    }
}
