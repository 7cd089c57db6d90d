//! Block designs, triple systems and transversal designs.

mod construct;
mod structure;

use std::collections::HashMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hypergraph::{Hypergraph, VertexSet};

pub use construct::{all_triples, cyclic_td3, flawed_ts62_blocks, make_sts, make_td, make_ts, td44_labels};
pub use structure::{
    delete_group, find_resolution, find_resolution_blocks, is_atomic, is_hamiltonian_pair, is_pan_hamiltonian,
    point_multigraph, rtd_extend, rtd_to_affine, td_to_projective, PointMultigraph,
};

/// Parameters `(v, k, λ)` of a balanced incomplete block design.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct DesignParams {
    pub v: usize,
    pub k: usize,
    pub lambda: usize,
}

impl DesignParams {
    pub fn new(v: usize, k: usize, lambda: usize) -> Result<Self> {
        if k < 2 || v < k || lambda < 1 {
            return Err(Error::InvalidParameters(format!(
                "need v >= k >= 2 and lambda >= 1 (got v={v}, k={k}, lambda={lambda})"
            )));
        }
        Ok(DesignParams { v, k, lambda })
    }

    pub fn is_admissible(&self) -> bool {
        let DesignParams { v, k, lambda } = *self;
        (lambda * (v - 1)) % (k - 1) == 0 && (lambda * v * (v - 1)) % (k * (k - 1)) == 0
    }

    /// Number of blocks `b = λv(v−1)/(k(k−1))`, when integral.
    pub fn block_count(&self) -> Option<usize> {
        let DesignParams { v, k, lambda } = *self;
        let num = lambda * v * (v - 1);
        (num % (k * (k - 1)) == 0).then(|| num / (k * (k - 1)))
    }

    /// Replication number `r = λ(v−1)/(k−1)`, when integral.
    pub fn replication(&self) -> Option<usize> {
        let DesignParams { v, k, lambda } = *self;
        (lambda * (v - 1) % (k - 1) == 0).then(|| lambda * (v - 1) / (k - 1))
    }
}

/// The two divisibility conditions on `(v, k, λ)`.
pub fn admissible(v: usize, k: usize, lambda: usize) -> Result<bool> {
    Ok(DesignParams::new(v, k, lambda)?.is_admissible())
}

/// One problem found by a validator.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Issue {
    BlockSize { block: usize, expected: usize, found: usize },
    PointOutOfRange { block: usize, point: usize },
    RepeatedPoint { block: usize, point: usize },
    BlockCount { expected: Option<usize>, found: usize },
    Replication { point: usize, expected: Option<usize>, found: usize },
    PairCoverage { pair: (usize, usize), expected: usize, found: usize },
    Groups { message: String },
}

impl fmt::Display for Issue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Issue::BlockSize { block, expected, found } => {
                write!(f, "block {block} has {found} points, expected {expected}")
            }
            Issue::PointOutOfRange { block, point } => write!(f, "block {block} uses unknown point {point}"),
            Issue::RepeatedPoint { block, point } => write!(f, "block {block} repeats point {point}"),
            Issue::BlockCount { expected: Some(e), found } => write!(f, "{found} blocks, expected {e}"),
            Issue::BlockCount { expected: None, found } => {
                write!(f, "{found} blocks, but the block count is not integral")
            }
            Issue::Replication { point, expected: Some(e), found } => {
                write!(f, "point {point} lies in {found} blocks, expected {e}")
            }
            Issue::Replication { point, expected: None, found } => {
                write!(f, "point {point} lies in {found} blocks; replication number is not integral")
            }
            Issue::PairCoverage { pair: (a, b), expected, found } => {
                write!(f, "pair {{{a},{b}}} covered {found} times, expected {expected}")
            }
            Issue::Groups { message } => f.write_str(message),
        }
    }
}

/// Everything a validator found wrong; valid iff empty.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ValidationReport {
    pub issues: Vec<Issue>,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.issues.is_empty()
    }

    pub fn pair_issues(&self) -> impl Iterator<Item = &Issue> {
        self.issues.iter().filter(|i| matches!(i, Issue::PairCoverage { .. }))
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.issues.is_empty() {
            return f.write_str("valid");
        }
        for (i, issue) in self.issues.iter().enumerate() {
            if i > 0 {
                f.write_str("\n")?;
            }
            write!(f, "{issue}")?;
        }
        Ok(())
    }
}

/// Block sizes, ranges, repeats and pair counts. `wanted(a, b)` gives the
/// required coverage of the pair `a < b`.
fn check_blocks(
    report: &mut ValidationReport,
    point_count: usize,
    k: usize,
    blocks: &[Vec<usize>],
    wanted: impl Fn(usize, usize) -> usize,
) -> Vec<usize> {
    let mut pairs: HashMap<(usize, usize), usize> = HashMap::new();
    let mut replication = vec![0; point_count];
    for (i, block) in blocks.iter().enumerate() {
        if block.len() != k {
            report.issues.push(Issue::BlockSize { block: i, expected: k, found: block.len() });
        }
        let mut seen = Vec::with_capacity(block.len());
        for &p in block {
            if p >= point_count {
                report.issues.push(Issue::PointOutOfRange { block: i, point: p });
            } else if seen.contains(&p) {
                report.issues.push(Issue::RepeatedPoint { block: i, point: p });
            } else {
                seen.push(p);
                replication[p] += 1;
            }
        }
        for (x, &a) in seen.iter().enumerate() {
            for &b in &seen[x + 1..] {
                *pairs.entry((a.min(b), a.max(b))).or_insert(0) += 1;
            }
        }
    }
    for a in 0..point_count {
        for b in a + 1..point_count {
            let found = pairs.get(&(a, b)).copied().unwrap_or(0);
            let expected = wanted(a, b);
            if found != expected {
                report.issues.push(Issue::PairCoverage { pair: (a, b), expected, found });
            }
        }
    }
    replication
}

/// Check that `blocks` form a BIBD with parameters `(v, k, λ)`.
pub fn validate_bibd(blocks: &[Vec<usize>], v: usize, k: usize, lambda: usize) -> ValidationReport {
    let mut report = ValidationReport::default();
    let replication = check_blocks(&mut report, v, k, blocks, |_, _| lambda);
    let (b, r) = match DesignParams::new(v, k, lambda) {
        Ok(p) => (p.block_count(), p.replication()),
        Err(_) => (None, None),
    };
    if b != Some(blocks.len()) {
        report.issues.push(Issue::BlockCount { expected: b, found: blocks.len() });
    }
    for (point, &found) in replication.iter().enumerate() {
        if r != Some(found) {
            report.issues.push(Issue::Replication { point, expected: r, found });
        }
    }
    report
}

/// Check the transversal design axioms for groups and blocks on `k·n` points.
pub fn validate_td(k: usize, n: usize, groups: &[Vec<usize>], blocks: &[Vec<usize>]) -> ValidationReport {
    let mut report = ValidationReport::default();
    let point_count = k * n;
    let mut group_of = vec![None; point_count];
    if groups.len() != k {
        report.issues.push(Issue::Groups { message: format!("{} groups, expected {k}", groups.len()) });
    }
    for (g, group) in groups.iter().enumerate() {
        if group.len() != n {
            report
                .issues
                .push(Issue::Groups { message: format!("group {g} has {} points, expected {n}", group.len()) });
        }
        for &p in group {
            match group_of.get(p) {
                None => report.issues.push(Issue::Groups { message: format!("group {g} uses unknown point {p}") }),
                Some(Some(other)) => {
                    report.issues.push(Issue::Groups { message: format!("point {p} lies in groups {other} and {g}") })
                }
                Some(None) => group_of[p] = Some(g),
            }
        }
    }
    if let Some(p) = group_of.iter().position(|g| g.is_none()) {
        report.issues.push(Issue::Groups { message: format!("point {p} lies in no group") });
    }
    let replication = check_blocks(&mut report, point_count, k, blocks, |a, b| match (group_of[a], group_of[b]) {
        (Some(x), Some(y)) if x == y => 0,
        _ => 1,
    });
    if blocks.len() != n * n {
        report.issues.push(Issue::BlockCount { expected: Some(n * n), found: blocks.len() });
    }
    for (point, &found) in replication.iter().enumerate() {
        if found != n {
            report.issues.push(Issue::Replication { point, expected: Some(n), found });
        }
    }
    report
}

/// A block design: points `0..v` and a multiset of blocks.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Design {
    pub params: DesignParams,
    pub blocks: Vec<Vec<usize>>,
}

impl Design {
    /// Build and validate.
    pub fn new(params: DesignParams, blocks: Vec<Vec<usize>>) -> Result<Self> {
        let d = Design { params, blocks };
        let report = d.validate();
        if !report.is_valid() {
            return Err(Error::InvalidDesign(report.to_string()));
        }
        Ok(d)
    }

    /// Wrap without validation (for inspecting broken inputs).
    pub fn unchecked(params: DesignParams, blocks: Vec<Vec<usize>>) -> Self {
        Design { params, blocks }
    }

    pub fn validate(&self) -> ValidationReport {
        validate_bibd(&self.blocks, self.params.v, self.params.k, self.params.lambda)
    }

    pub fn to_hypergraph(&self) -> Result<Hypergraph> {
        Hypergraph::new(self.params.v, self.blocks.iter().map(|b| b.iter().copied()))
    }
}

/// A transversal design TD(k, n): `k` groups of `n` points and `n²` blocks
/// meeting every group once.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TransversalDesign {
    pub k: usize,
    pub n: usize,
    pub groups: Vec<Vec<usize>>,
    pub blocks: Vec<Vec<usize>>,
}

impl TransversalDesign {
    pub fn new(k: usize, n: usize, groups: Vec<Vec<usize>>, blocks: Vec<Vec<usize>>) -> Result<Self> {
        let td = TransversalDesign { k, n, groups, blocks };
        let report = td.validate();
        if !report.is_valid() {
            return Err(Error::InvalidDesign(report.to_string()));
        }
        Ok(td)
    }

    pub fn unchecked(k: usize, n: usize, groups: Vec<Vec<usize>>, blocks: Vec<Vec<usize>>) -> Self {
        TransversalDesign { k, n, groups, blocks }
    }

    pub fn point_count(&self) -> usize {
        self.k * self.n
    }

    pub fn validate(&self) -> ValidationReport {
        validate_td(self.k, self.n, &self.groups, &self.blocks)
    }

    pub fn group_of(&self, point: usize) -> Option<usize> {
        self.groups.iter().position(|g| g.contains(&point))
    }

    /// Blocks as edges, followed by the listed groups as extra edges.
    pub fn to_hypergraph(&self, include_groups: &[usize]) -> Result<Hypergraph> {
        let mut edges: Vec<VertexSet> = self.blocks.iter().map(|b| b.iter().copied().collect()).collect();
        for &g in include_groups {
            let group = self
                .groups
                .get(g)
                .ok_or_else(|| Error::InvalidParameters(format!("group index {g} out of range (k={})", self.k)))?;
            edges.push(group.iter().copied().collect());
        }
        Hypergraph::from_sets(self.point_count(), edges)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn admissibility_examples() {
        assert!(admissible(7, 3, 1).unwrap());
        assert!(!admissible(6, 3, 1).unwrap());
        assert!(admissible(13, 4, 1).unwrap());
        assert!(admissible(16, 4, 1).unwrap());
        assert!(!admissible(14, 4, 1).unwrap());
        assert!(admissible(2, 3, 1).is_err());
        assert!(admissible(5, 3, 0).is_err());
    }

    #[test]
    fn counts() {
        let p = DesignParams::new(9, 3, 1).unwrap();
        assert_eq!((p.block_count(), p.replication()), (Some(12), Some(4)));
        let q = DesignParams::new(6, 3, 1).unwrap();
        assert_eq!(q.replication(), None);
    }

    #[test]
    fn fano_valid() {
        let blocks: Vec<Vec<usize>> = (0..7).map(|i| vec![i, (i + 1) % 7, (i + 3) % 7]).collect();
        assert!(validate_bibd(&blocks, 7, 3, 1).is_valid());
    }

    #[test]
    fn flawed_ts62_list_is_invalid() {
        let report = validate_bibd(&flawed_ts62_blocks(), 6, 3, 2);
        assert!(!report.is_valid());
        assert!(report.issues.contains(&Issue::PairCoverage { pair: (2, 4), expected: 2, found: 3 }));
        assert!(report.issues.contains(&Issue::BlockCount { expected: Some(10), found: 9 }));
    }

    #[test]
    fn single_block_design() {
        assert!(validate_bibd(&[vec![0, 1, 2]], 3, 3, 1).is_valid());
        assert!(!validate_bibd(&[vec![0, 1, 2]], 3, 3, 2).is_valid());
    }

    #[test]
    fn bad_blocks_reported() {
        let report = validate_bibd(&[vec![0, 0, 5]], 3, 3, 1);
        assert!(report.issues.iter().any(|i| matches!(i, Issue::RepeatedPoint { .. })));
        assert!(report.issues.iter().any(|i| matches!(i, Issue::PointOutOfRange { .. })));
    }

    #[test]
    fn td_group_edges() {
        let td = make_td(4, 4).unwrap();
        let h = td.to_hypergraph(&[]).unwrap();
        assert_eq!((h.edge_count(), h.uniformity()), (16, Some(4)));
        let all = td.to_hypergraph(&[0, 1, 2, 3]).unwrap();
        assert_eq!(all.edge_count(), 20);
        let blocks: Vec<Vec<usize>> = all.edges().iter().map(|e| e.iter().collect()).collect();
        assert!(validate_bibd(&blocks, 16, 4, 1).is_valid());
        assert!(td.to_hypergraph(&[4]).is_err());
    }

    #[test]
    fn td_validator_catches_in_group_pair() {
        let groups = vec![vec![0, 1], vec![2, 3]];
        let blocks = vec![vec![0, 1], vec![0, 3], vec![1, 2], vec![2, 3]];
        let report = validate_td(2, 2, &groups, &blocks);
        assert!(report.issues.contains(&Issue::PairCoverage { pair: (0, 1), expected: 0, found: 1 }));
    }
}
