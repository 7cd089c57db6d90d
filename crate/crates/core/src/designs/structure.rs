//! Resolutions, plane conversions, the graphs `G[x]` and Hamiltonicity tests.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::{Design, DesignParams, TransversalDesign};
use crate::error::{Error, Result};

fn mask(block: &[usize]) -> u64 {
    block.iter().fold(0, |m, &p| m | 1 << p)
}

struct Resolver {
    masks: Vec<u64>,
    full: u64,
    used: Vec<bool>,
    classes: Vec<Vec<usize>>,
}

impl Resolver {
    /// Extend the last class (whose points are `cover`) until every block is used.
    fn search(&mut self, cover: u64) -> bool {
        if cover == self.full {
            if self.used.iter().all(|&u| u) {
                return true;
            }
            // Classes are unordered, so the next class may as well hold the
            // lowest unused block.
            let b = self.used.iter().position(|&u| !u).expect("unused block");
            self.used[b] = true;
            self.classes.push(vec![b]);
            if self.search(self.masks[b]) {
                return true;
            }
            self.classes.pop();
            self.used[b] = false;
            return false;
        }
        let p = (!cover & self.full).trailing_zeros();
        for b in 0..self.masks.len() {
            if self.used[b] || self.masks[b] >> p & 1 == 0 || self.masks[b] & cover != 0 {
                continue;
            }
            self.used[b] = true;
            self.classes.last_mut().expect("open class").push(b);
            if self.search(cover | self.masks[b]) {
                return true;
            }
            self.classes.last_mut().expect("open class").pop();
            self.used[b] = false;
        }
        false
    }
}

/// Partition `blocks` into parallel classes by backtracking; returns block
/// indices per class.
pub fn find_resolution_blocks(point_count: usize, blocks: &[Vec<usize>]) -> Option<Vec<Vec<usize>>> {
    if point_count == 0 || point_count > 64 || blocks.is_empty() {
        return None;
    }
    if blocks.iter().any(|b| b.iter().any(|&p| p >= point_count)) {
        return None;
    }
    let full = if point_count == 64 { u64::MAX } else { (1u64 << point_count) - 1 };
    let mut r = Resolver {
        masks: blocks.iter().map(|b| mask(b)).collect(),
        full,
        used: vec![false; blocks.len()],
        classes: Vec::new(),
    };
    r.used[0] = true;
    r.classes.push(vec![0]);
    if r.search(r.masks[0]) {
        for class in r.classes.iter_mut() {
            class.sort_unstable();
        }
        Some(r.classes)
    } else {
        None
    }
}

/// A resolution of a transversal design, if one exists.
pub fn find_resolution(td: &TransversalDesign) -> Option<Vec<Vec<usize>>> {
    find_resolution_blocks(td.point_count(), &td.blocks)
}

fn check_resolution(td: &TransversalDesign, resolution: &[Vec<usize>]) -> Result<()> {
    let full = if td.point_count() == 64 { u64::MAX } else { (1u64 << td.point_count()) - 1 };
    let mut seen = vec![false; td.blocks.len()];
    if resolution.len() != td.n {
        return Err(Error::InvalidParameters(format!(
            "resolution has {} classes, expected {}",
            resolution.len(),
            td.n
        )));
    }
    for (c, class) in resolution.iter().enumerate() {
        let mut cover = 0u64;
        for &b in class {
            let block = td
                .blocks
                .get(b)
                .ok_or_else(|| Error::InvalidParameters(format!("class {c} names unknown block {b}")))?;
            if seen[b] || cover & mask(block) != 0 {
                return Err(Error::InvalidParameters(format!("class {c} is not a parallel class")));
            }
            seen[b] = true;
            cover |= mask(block);
        }
        if cover != full {
            return Err(Error::InvalidParameters(format!("class {c} misses points")));
        }
    }
    Ok(())
}

/// Add a point `u` to a TD(n+1, n) and the lines `g ∪ {u}`: the projective
/// plane of order `n`. `u` is the last point.
pub fn td_to_projective(td: &TransversalDesign) -> Result<Design> {
    let n = td.n;
    if td.k != n + 1 {
        return Err(Error::InvalidParameters(format!("projective closure needs k = n + 1 (TD({},{n}))", td.k)));
    }
    let u = td.point_count();
    let mut blocks = td.blocks.clone();
    blocks.extend(td.groups.iter().map(|g| {
        let mut line = g.clone();
        line.push(u);
        line
    }));
    Design::new(DesignParams::new(n * n + n + 1, n + 1, 1)?, blocks)
}

/// Blocks and groups of a resolvable TD(n, n) together: the affine plane of order `n`.
pub fn rtd_to_affine(td: &TransversalDesign, resolution: &[Vec<usize>]) -> Result<Design> {
    if td.k != td.n {
        return Err(Error::InvalidParameters(format!("affine plane needs k = n (TD({},{}))", td.k, td.n)));
    }
    check_resolution(td, resolution)?;
    let mut blocks = td.blocks.clone();
    blocks.extend(td.groups.iter().cloned());
    Design::new(DesignParams::new(td.n * td.n, td.n, 1)?, blocks)
}

/// Add a new group with one point per parallel class, joined to every block
/// of its class: a TD(k+1, n).
pub fn rtd_extend(td: &TransversalDesign, resolution: &[Vec<usize>]) -> Result<TransversalDesign> {
    check_resolution(td, resolution)?;
    let base = td.point_count();
    let mut blocks = td.blocks.clone();
    for (c, class) in resolution.iter().enumerate() {
        for &b in class {
            blocks[b].push(base + c);
        }
    }
    let mut groups = td.groups.clone();
    groups.push((base..base + td.n).collect());
    TransversalDesign::new(td.k + 1, td.n, groups, blocks)
}

/// Remove a group and its points; the remaining points are renumbered in order.
pub fn delete_group(td: &TransversalDesign, group: usize) -> Result<TransversalDesign> {
    if td.k < 3 || group >= td.k {
        return Err(Error::InvalidParameters(format!("cannot delete group {group} of TD({},{})", td.k, td.n)));
    }
    let gone = &td.groups[group];
    let mut relabel = vec![None; td.point_count()];
    let mut next = 0;
    for (p, slot) in relabel.iter_mut().enumerate() {
        if !gone.contains(&p) {
            *slot = Some(next);
            next += 1;
        }
    }
    let map = |set: &Vec<usize>| -> Vec<usize> { set.iter().filter_map(|&p| relabel[p]).collect() };
    let groups = td.groups.iter().enumerate().filter(|&(g, _)| g != group).map(|(_, s)| map(s)).collect();
    let blocks = td.blocks.iter().map(map).collect();
    TransversalDesign::new(td.k - 1, td.n, groups, blocks)
}

/// `G[x]`: one edge `yz` for each block `{x, y, z}` of a triple system.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PointMultigraph {
    pub point: usize,
    pub vertices: Vec<usize>,
    /// Multiplicity of each edge `(y, z)` with `y < z`.
    pub edges: BTreeMap<(usize, usize), usize>,
}

impl PointMultigraph {
    pub fn multiplicity(&self, y: usize, z: usize) -> usize {
        self.edges.get(&(y.min(z), y.max(z))).copied().unwrap_or(0)
    }

    /// Degree counted with multiplicity.
    pub fn degree(&self, y: usize) -> usize {
        self.edges.iter().filter(|((a, b), _)| *a == y || *b == y).map(|(_, m)| m).sum()
    }

    pub fn neighbours(&self, y: usize) -> Vec<usize> {
        let mut out: Vec<usize> = self
            .edges
            .keys()
            .filter_map(|&(a, b)| {
                if a == y {
                    Some(b)
                } else if b == y {
                    Some(a)
                } else {
                    None
                }
            })
            .collect();
        out.sort_unstable();
        out
    }

    pub fn is_regular(&self, d: usize) -> bool {
        self.vertices.iter().all(|&y| self.degree(y) == d)
    }

    /// Connected components, each sorted, ordered by smallest vertex.
    pub fn components(&self) -> Vec<Vec<usize>> {
        let mut seen = std::collections::BTreeSet::new();
        let mut out = Vec::new();
        for &start in &self.vertices {
            if !seen.insert(start) {
                continue;
            }
            let mut comp = vec![start];
            let mut stack = vec![start];
            while let Some(y) = stack.pop() {
                for z in self.neighbours(y) {
                    if seen.insert(z) {
                        comp.push(z);
                        stack.push(z);
                    }
                }
            }
            comp.sort_unstable();
            out.push(comp);
        }
        out
    }

    /// If the underlying simple graph is one cycle through every vertex, the
    /// cyclic order starting at the smallest vertex towards its smaller
    /// neighbour.
    pub fn as_cycle(&self) -> Option<Vec<usize>> {
        if self.vertices.len() < 3 || self.vertices.iter().any(|&y| self.neighbours(y).len() != 2) {
            return None;
        }
        let start = *self.vertices.iter().min()?;
        let mut order = vec![start];
        let mut prev = start;
        let mut cur = self.neighbours(start)[0];
        while cur != start {
            order.push(cur);
            let nb = self.neighbours(cur);
            let next = if nb[0] == prev { nb[1] } else { nb[0] };
            prev = cur;
            cur = next;
        }
        (order.len() == self.vertices.len()).then_some(order)
    }
}

/// `G[x]` for a triple system.
pub fn point_multigraph(design: &Design, x: usize) -> Result<PointMultigraph> {
    if design.params.k != 3 {
        return Err(Error::InvalidParameters(format!("G[x] needs block size 3, got {}", design.params.k)));
    }
    if x >= design.params.v {
        return Err(Error::VertexOutOfRange { vertex: x, count: design.params.v });
    }
    let mut edges = BTreeMap::new();
    for block in design.blocks.iter().filter(|b| b.contains(&x)) {
        let rest: Vec<usize> = block.iter().copied().filter(|&p| p != x).collect();
        if let [y, z] = rest[..] {
            *edges.entry((y.min(z), y.max(z))).or_insert(0) += 1;
        }
    }
    Ok(PointMultigraph { point: x, vertices: (0..design.params.v).filter(|&p| p != x).collect(), edges })
}

/// Whether `G[x] ∪ G[y]` is a single cycle, for points `x ≠ y` of group
/// `group` in a TD(3, n).
pub fn is_hamiltonian_pair(td: &TransversalDesign, group: usize, x: usize, y: usize) -> Result<bool> {
    if td.k != 3 {
        return Err(Error::InvalidParameters(format!("Hamiltonicity is defined for k = 3, got k = {}", td.k)));
    }
    let members = td.groups.get(group).ok_or_else(|| Error::InvalidParameters(format!("no group {group}")))?;
    if x == y || !members.contains(&x) || !members.contains(&y) {
        return Err(Error::InvalidParameters(format!("{x} and {y} must be distinct points of group {group}")));
    }
    let others: Vec<usize> =
        td.groups.iter().enumerate().filter(|&(g, _)| g != group).flat_map(|(_, s)| s.iter().copied()).collect();
    let mut adj: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    for block in td.blocks.iter().filter(|b| b.contains(&x) || b.contains(&y)) {
        let rest: Vec<usize> = block.iter().copied().filter(|p| *p != x && *p != y).collect();
        if let [a, b] = rest[..] {
            adj.entry(a).or_default().push(b);
            adj.entry(b).or_default().push(a);
        }
    }
    if others.iter().any(|p| adj.get(p).map_or(0, Vec::len) != 2) {
        return Ok(false);
    }
    let mut seen = vec![others[0]];
    let mut stack = vec![others[0]];
    while let Some(p) = stack.pop() {
        for &q in &adj[&p] {
            if !seen.contains(&q) {
                seen.push(q);
                stack.push(q);
            }
        }
    }
    Ok(seen.len() == others.len())
}

/// Every pair of points of the group gives a Hamiltonian union.
pub fn is_pan_hamiltonian(td: &TransversalDesign, group: usize) -> Result<bool> {
    let members = td.groups.get(group).ok_or_else(|| Error::InvalidParameters(format!("no group {group}")))?.clone();
    for (i, &x) in members.iter().enumerate() {
        for &y in &members[i + 1..] {
            if !is_hamiltonian_pair(td, group, x, y)? {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// Pan-Hamiltonian with respect to every group.
pub fn is_atomic(td: &TransversalDesign) -> Result<bool> {
    for g in 0..td.k {
        if !is_pan_hamiltonian(td, g)? {
            return Ok(false);
        }
    }
    Ok(true)
}
