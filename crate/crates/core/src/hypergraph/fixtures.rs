//! The seven small Breaker-win hypergraphs used in the TD(4,4) analysis.
//!
//! Vertices `x1, x2, ...` come first (in index order), followed by `u` and
//! `v` where present.

use super::Hypergraph;
use crate::error::{Error, Result};

struct Fixture {
    labels: &'static [&'static str],
    edges: &'static [&'static [&'static str]],
}

const FIXTURES: [Fixture; 7] = [
    Fixture {
        labels: &["x1", "x2", "x3", "x4", "x5", "u", "v"],
        edges: &[&["x1", "x3", "x4"], &["x3", "x5", "u"], &["x1", "x2", "v"], &["u", "v"]],
    },
    Fixture {
        labels: &["x1", "x2", "x3", "x4", "x5", "x6", "u", "v"],
        edges: &[&["x1", "x2", "x3"], &["x3", "x4", "u"], &["x5", "x6", "v"], &["u", "v"]],
    },
    Fixture {
        labels: &["x1", "x2", "x3", "x4", "x5", "x6", "x7", "u"],
        edges: &[&["x1", "x2", "x3"], &["x3", "x4", "x5"], &["x5", "x6", "u"], &["u", "x7"]],
    },
    Fixture {
        labels: &["x1", "x2", "x3", "x4", "x5", "x6"],
        edges: &[&["x1", "x2", "x3"], &["x3", "x4", "x5"], &["x5", "x6"]],
    },
    Fixture { labels: &["x1", "x2", "x3", "x4"], edges: &[&["x1", "x2", "x3"], &["x3", "x4"]] },
    Fixture { labels: &["x1", "x2", "x3"], edges: &[&["x1", "x2", "x3"]] },
    Fixture { labels: &["x1", "x2"], edges: &[&["x1", "x2"]] },
];

fn lookup(i: usize) -> Result<&'static Fixture> {
    if (1..=7).contains(&i) {
        Ok(&FIXTURES[i - 1])
    } else {
        Err(Error::NoSuchFixture(i))
    }
}

/// Hypergraph `H_i`, `i` in `1..=7`.
pub fn fixture_h(i: usize) -> Result<Hypergraph> {
    let f = lookup(i)?;
    let index = |name: &str| f.labels.iter().position(|l| *l == name).expect("label");
    Hypergraph::new(f.labels.len(), f.edges.iter().map(|e| e.iter().map(|name| index(name)).collect::<Vec<_>>()))
}

/// Vertex names of `H_i` in index order.
pub fn fixture_labels(i: usize) -> Result<Vec<String>> {
    Ok(lookup(i)?.labels.iter().map(|s| s.to_string()).collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn shapes() {
        let sizes: Vec<(usize, usize)> = (1..=7)
            .map(|i| {
                let h = fixture_h(i).unwrap();
                (h.vertex_count(), h.edge_count())
            })
            .collect();
        assert_eq!(sizes, vec![(7, 4), (8, 4), (8, 4), (6, 3), (4, 2), (3, 1), (2, 1)]);
        assert!(fixture_h(0).is_err());
        assert!(fixture_h(8).is_err());
    }

    #[test]
    fn h4_edges() {
        let h = fixture_h(4).unwrap();
        let edges: Vec<Vec<usize>> = h.edges().iter().map(|e| e.iter().collect()).collect();
        assert_eq!(edges, vec![vec![0, 1, 2], vec![2, 3, 4], vec![4, 5]]);
    }

    #[test]
    fn h7_single_pair() {
        let h = fixture_h(7).unwrap();
        assert_eq!(h.edge_count(), 1);
        assert_eq!(h.edge(0).len(), 2);
    }
}
