//! Permutations, automorphism groups and isomorphism testing.
//!
//! Both searches use the same backtracking matcher: vertices are mapped one
//! at a time, pruned by per-vertex invariants (colour, degree, incident edge
//! sizes, co-degree profile) and by pairwise co-degrees against vertices
//! already mapped. An edge is checked as soon as its last vertex is mapped.

use std::collections::{HashMap, HashSet, VecDeque};

use serde::{Deserialize, Serialize};

use super::{GameState, Hypergraph, VertexSet};
use crate::error::{Error, Result};

/// Default vertex bound for automorphism searches.
pub const AUTOMORPHISM_VERTEX_BOUND: usize = 24;
/// Default vertex bound for isomorphism tests.
pub const ISOMORPHISM_VERTEX_BOUND: usize = 12;

/// A bijection on `0..n`, stored as the image of each point.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Permutation {
    image: Vec<usize>,
}

impl Permutation {
    pub fn new(image: Vec<usize>) -> Result<Self> {
        let n = image.len();
        let mut seen = vec![false; n];
        for &x in &image {
            if x >= n || seen[x] {
                return Err(Error::NotAPermutation(format!("{image:?}")));
            }
            seen[x] = true;
        }
        Ok(Permutation { image })
    }

    pub fn identity(n: usize) -> Self {
        Permutation { image: (0..n).collect() }
    }

    /// Build from disjoint cycles; points not mentioned are fixed.
    pub fn from_cycles(n: usize, cycles: &[Vec<usize>]) -> Result<Self> {
        let mut image: Vec<usize> = (0..n).collect();
        let mut touched = vec![false; n];
        for cycle in cycles {
            for (i, &a) in cycle.iter().enumerate() {
                if a >= n || touched[a] {
                    return Err(Error::NotAPermutation(format!("cycles {cycles:?}")));
                }
                touched[a] = true;
                image[a] = cycle[(i + 1) % cycle.len()];
            }
        }
        Ok(Permutation { image })
    }

    pub fn len(&self) -> usize {
        self.image.len()
    }

    pub fn is_empty(&self) -> bool {
        self.image.is_empty()
    }

    pub fn image(&self) -> &[usize] {
        &self.image
    }

    pub fn apply(&self, v: usize) -> usize {
        self.image[v]
    }

    pub fn apply_set(&self, s: VertexSet) -> VertexSet {
        s.iter().map(|v| self.image[v]).collect()
    }

    /// `self ∘ other`: apply `other` first.
    pub fn compose(&self, other: &Permutation) -> Permutation {
        Permutation { image: other.image.iter().map(|&x| self.image[x]).collect() }
    }

    pub fn inverse(&self) -> Permutation {
        let mut inv = vec![0; self.image.len()];
        for (i, &x) in self.image.iter().enumerate() {
            inv[x] = i;
        }
        Permutation { image: inv }
    }

    pub fn is_identity(&self) -> bool {
        self.image.iter().enumerate().all(|(i, &x)| i == x)
    }
}

/// True iff `p` maps the edge multiset of `h` onto itself.
pub fn is_automorphism(h: &Hypergraph, p: &Permutation) -> bool {
    match h.apply_permutation(p) {
        Ok(img) => img.edge_multiset() == h.edge_multiset(),
        Err(_) => false,
    }
}

/// Per-hypergraph data used by the matcher.
struct Structure {
    n: usize,
    edges: Vec<u64>,
    mult: HashMap<u64, u32>,
    codeg: Vec<u32>,
    signature: Vec<Vec<u32>>,
}

impl Structure {
    fn new(h: &Hypergraph, colors: &[u8]) -> Self {
        let n = h.vertex_count();
        let edges: Vec<u64> = h.edges().iter().map(|e| e.bits()).collect();
        let mut mult = HashMap::new();
        for &e in &edges {
            *mult.entry(e).or_insert(0) += 1;
        }
        let mut codeg = vec![0u32; n * n];
        for &e in &edges {
            let vs: Vec<usize> = VertexSet::from_bits(e).iter().collect();
            for &a in &vs {
                for &b in &vs {
                    if a != b {
                        codeg[a * n + b] += 1;
                    }
                }
            }
        }
        let signature = (0..n)
            .map(|v| {
                let mut sizes: Vec<u32> = edges.iter().filter(|&&e| e >> v & 1 == 1).map(|e| e.count_ones()).collect();
                sizes.sort_unstable();
                let mut co: Vec<u32> = (0..n).filter(|&w| w != v).map(|w| codeg[v * n + w]).collect();
                co.sort_unstable();
                let mut sig = vec![colors[v] as u32, sizes.len() as u32];
                sig.extend(sizes);
                sig.push(u32::MAX);
                sig.extend(co);
                sig
            })
            .collect();
        Structure { n, edges, mult, codeg, signature }
    }

    fn size_profile(&self) -> Vec<u32> {
        let mut p: Vec<u32> = self.edges.iter().map(|e| e.count_ones()).collect();
        p.sort_unstable();
        p
    }
}

struct Matcher<'a> {
    src: &'a Structure,
    dst: &'a Structure,
    order: Vec<usize>,
    fixed: Vec<Option<usize>>,
    closing: Vec<Vec<u64>>,
    map: Vec<usize>,
}

const UNSET: usize = usize::MAX;

impl<'a> Matcher<'a> {
    fn new(src: &'a Structure, dst: &'a Structure, fixed_pairs: &[(usize, usize)]) -> Self {
        let n = src.n;
        let mut fixed = vec![None; n];
        let mut order = Vec::with_capacity(n);
        let mut placed = vec![false; n];
        for &(a, b) in fixed_pairs {
            fixed[a] = Some(b);
            order.push(a);
            placed[a] = true;
        }
        while order.len() < n {
            let next = (0..n)
                .filter(|&v| !placed[v])
                .max_by_key(|&v| {
                    let links = order.iter().filter(|&&u| src.codeg[u * n + v] > 0).count();
                    (links, std::cmp::Reverse(v))
                })
                .expect("unplaced vertex");
            placed[next] = true;
            order.push(next);
        }
        let mut position = vec![0; n];
        for (i, &v) in order.iter().enumerate() {
            position[v] = i;
        }
        let mut closing = vec![Vec::new(); n];
        for &e in &src.edges {
            if let Some(last) = VertexSet::from_bits(e).iter().max_by_key(|&v| position[v]) {
                closing[position[last]].push(e);
            }
        }
        for c in closing.iter_mut() {
            c.sort_unstable();
            c.dedup();
        }
        Matcher { src, dst, order, fixed, closing, map: vec![UNSET; n] }
    }

    fn run(mut self) -> Option<Vec<usize>> {
        if self.src.n != self.dst.n
            || self.src.edges.len() != self.dst.edges.len()
            || self.src.size_profile() != self.dst.size_profile()
        {
            return None;
        }
        let mut src_sigs: Vec<&Vec<u32>> = self.src.signature.iter().collect();
        let mut dst_sigs: Vec<&Vec<u32>> = self.dst.signature.iter().collect();
        src_sigs.sort();
        dst_sigs.sort();
        if src_sigs != dst_sigs {
            return None;
        }
        if self.extend(0, 0) {
            Some(self.map)
        } else {
            None
        }
    }

    fn extend(&mut self, depth: usize, used: u64) -> bool {
        let n = self.src.n;
        if depth == n {
            return true;
        }
        let v = self.order[depth];
        let candidates: Vec<usize> = match self.fixed[v] {
            Some(t) => vec![t],
            None => (0..n).collect(),
        };
        for w in candidates {
            if used >> w & 1 == 1 || self.src.signature[v] != self.dst.signature[w] {
                continue;
            }
            let consistent =
                self.order[..depth].iter().all(|&u| self.src.codeg[u * n + v] == self.dst.codeg[self.map[u] * n + w]);
            if !consistent {
                continue;
            }
            self.map[v] = w;
            let edges_ok = self.closing[depth].iter().all(|&e| {
                let img: u64 = VertexSet::from_bits(e).iter().fold(0, |acc, x| acc | 1 << self.map[x]);
                self.dst.mult.get(&img) == self.src.mult.get(&e)
            });
            if edges_ok && self.extend(depth + 1, used | 1 << w) {
                return true;
            }
            self.map[v] = UNSET;
        }
        false
    }
}

fn colored_generators(h: &Hypergraph, colors: &[u8]) -> Vec<Permutation> {
    let n = h.vertex_count();
    let structure = Structure::new(h, colors);
    let mut gens: Vec<Permutation> = Vec::new();
    for level in (0..n).rev() {
        let fixed: Vec<(usize, usize)> = (0..level).map(|u| (u, u)).collect();
        let mut orbit = orbit_of(level, &gens, n);
        for target in level + 1..n {
            if orbit[target] || structure.signature[target] != structure.signature[level] {
                continue;
            }
            let mut pairs = fixed.clone();
            pairs.push((level, target));
            if let Some(image) = Matcher::new(&structure, &structure, &pairs).run() {
                gens.push(Permutation { image });
                orbit = orbit_of(level, &gens, n);
            }
        }
    }
    gens
}

fn orbit_of(point: usize, gens: &[Permutation], n: usize) -> Vec<bool> {
    let mut seen = vec![false; n];
    seen[point] = true;
    let mut queue = VecDeque::from([point]);
    while let Some(x) = queue.pop_front() {
        for g in gens {
            let y = g.apply(x);
            if !seen[y] {
                seen[y] = true;
                queue.push_back(y);
            }
        }
    }
    seen
}

/// Generating set of the automorphism group (default vertex bound).
pub fn automorphism_generators(h: &Hypergraph) -> Result<Vec<Permutation>> {
    automorphism_generators_bounded(h, AUTOMORPHISM_VERTEX_BOUND)
}

/// Generating set of the automorphism group, refusing boards larger than `bound`.
///
/// The set contains, for every base point `i`, representatives taking `i` to
/// each point of its orbit under the pointwise stabilizer of `0..i`, so it
/// generates the whole group.
pub fn automorphism_generators_bounded(h: &Hypergraph, bound: usize) -> Result<Vec<Permutation>> {
    if h.vertex_count() > bound {
        return Err(Error::BoundExceeded { size: h.vertex_count(), bound });
    }
    Ok(colored_generators(h, &vec![0; h.vertex_count()]))
}

/// Generators of the automorphisms that also fix both players' vertex sets.
pub fn stabilizer_generators(h: &Hypergraph, state: &GameState, bound: usize) -> Result<Vec<Permutation>> {
    if h.vertex_count() > bound {
        return Err(Error::BoundExceeded { size: h.vertex_count(), bound });
    }
    let colors: Vec<u8> = (0..h.vertex_count())
        .map(|v| {
            if state.first.contains(v) {
                1
            } else if state.second.contains(v) {
                2
            } else {
                0
            }
        })
        .collect();
    Ok(colored_generators(h, &colors))
}

/// All elements of the group generated by `gens`, or `None` if it has more
/// than `limit` elements.
pub fn group_closure(gens: &[Permutation], n: usize, limit: usize) -> Option<Vec<Permutation>> {
    let id = Permutation::identity(n);
    let mut seen: HashSet<Permutation> = HashSet::from([id.clone()]);
    let mut queue = VecDeque::from([id]);
    while let Some(p) = queue.pop_front() {
        for g in gens {
            let q = g.compose(&p);
            if !seen.contains(&q) {
                if seen.len() >= limit {
                    return None;
                }
                seen.insert(q.clone());
                queue.push_back(q);
            }
        }
    }
    let mut all: Vec<Permutation> = seen.into_iter().collect();
    all.sort();
    Some(all)
}

/// Orbits of the unplayed vertices under the group generated by `gens`.
/// Every generator must map each player's set onto itself.
pub fn vertex_orbits(h: &Hypergraph, state: &GameState, gens: &[Permutation]) -> Result<Vec<Vec<usize>>> {
    let n = h.vertex_count();
    for (i, g) in gens.iter().enumerate() {
        if g.len() != n {
            return Err(Error::LengthMismatch { expected: n, found: g.len() });
        }
        if g.apply_set(state.first) != state.first || g.apply_set(state.second) != state.second {
            return Err(Error::NotStabilizing(i));
        }
    }
    let free = h.vertices().difference(state.occupied());
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(parent: &mut [usize], x: usize) -> usize {
        let mut r = x;
        while parent[r] != r {
            r = parent[r];
        }
        let mut y = x;
        while parent[y] != r {
            let next = parent[y];
            parent[y] = r;
            y = next;
        }
        r
    }
    for g in gens {
        for v in free.iter() {
            let a = find(&mut parent, v);
            let b = find(&mut parent, g.apply(v));
            if a != b {
                parent[a.max(b)] = a.min(b);
            }
        }
    }
    let mut groups: HashMap<usize, Vec<usize>> = HashMap::new();
    for v in free.iter() {
        let r = find(&mut parent, v);
        groups.entry(r).or_default().push(v);
    }
    let mut orbits: Vec<Vec<usize>> = groups.into_values().collect();
    orbits.sort();
    Ok(orbits)
}

/// A vertex bijection taking the edges of `h1` onto those of `h2`
/// (default bound of 12 vertices).
pub fn is_isomorphic(h1: &Hypergraph, h2: &Hypergraph) -> Result<Option<Permutation>> {
    is_isomorphic_bounded(h1, h2, ISOMORPHISM_VERTEX_BOUND)
}

pub fn is_isomorphic_bounded(h1: &Hypergraph, h2: &Hypergraph, bound: usize) -> Result<Option<Permutation>> {
    let size = h1.vertex_count().max(h2.vertex_count());
    if size > bound {
        return Err(Error::BoundExceeded { size, bound });
    }
    if h1.vertex_count() != h2.vertex_count() {
        return Ok(None);
    }
    let zeros = vec![0; h1.vertex_count()];
    let (s1, s2) = (Structure::new(h1, &zeros), Structure::new(h2, &zeros));
    let Some(image) = Matcher::new(&s1, &s2, &[]).run() else {
        return Ok(None);
    };
    let p = Permutation { image };
    let mapped = h1.apply_permutation(&p)?;
    assert_eq!(mapped.edge_multiset(), h2.edge_multiset(), "isomorphism witness failed");
    Ok(Some(p))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hypergraph::fixture_h;

    fn fano() -> Hypergraph {
        Hypergraph::new(7, (0..7).map(|i| vec![i, (i + 1) % 7, (i + 3) % 7])).unwrap()
    }

    #[test]
    fn fano_group_order() {
        let h = fano();
        let gens = automorphism_generators(&h).unwrap();
        assert!(gens.iter().all(|g| is_automorphism(&h, g)));
        let group = group_closure(&gens, 7, 1_000_000).unwrap();
        assert_eq!(group.len(), 168);
    }

    #[test]
    fn single_pair_group() {
        let h = Hypergraph::new(2, vec![vec![0, 1]]).unwrap();
        let gens = automorphism_generators(&h).unwrap();
        assert_eq!(group_closure(&gens, 2, 10).unwrap().len(), 2);
    }

    #[test]
    fn bound_is_enforced() {
        let h = Hypergraph::empty(30).unwrap();
        assert!(matches!(automorphism_generators(&h), Err(Error::BoundExceeded { .. })));
        assert!(matches!(is_isomorphic(&h, &h), Err(Error::BoundExceeded { .. })));
    }

    #[test]
    fn closure_respects_limit() {
        let h = fano();
        let gens = automorphism_generators(&h).unwrap();
        assert!(group_closure(&gens, 7, 100).is_none());
    }

    #[test]
    fn permutation_basics() {
        let p = Permutation::from_cycles(4, &[vec![0, 1, 2]]).unwrap();
        assert_eq!(p.image(), &[1, 2, 0, 3]);
        assert!(p.compose(&p.inverse()).is_identity());
        assert!(Permutation::new(vec![0, 0]).is_err());
        assert!(Permutation::from_cycles(3, &[vec![0, 1], vec![1, 2]]).is_err());
    }

    #[test]
    fn identity_is_automorphism() {
        let h = fixture_h(1).unwrap();
        assert!(is_automorphism(&h, &Permutation::identity(7)));
        assert!(!is_automorphism(&h, &Permutation::identity(6)));
    }

    #[test]
    fn relabeled_h5_is_isomorphic() {
        let h5 = fixture_h(5).unwrap();
        let p = Permutation::new(vec![3, 1, 0, 2]).unwrap();
        let relabeled = h5.apply_permutation(&p).unwrap();
        let w = is_isomorphic(&h5, &relabeled).unwrap().expect("isomorphic");
        assert!(h5.apply_permutation(&w).unwrap().same_edge_multiset(&relabeled));
    }

    #[test]
    fn h6_h7_not_isomorphic() {
        assert!(is_isomorphic(&fixture_h(6).unwrap(), &fixture_h(7).unwrap()).unwrap().is_none());
    }

    #[test]
    fn orbits_without_generators_are_singletons() {
        let h = fano();
        let orbits = vertex_orbits(&h, &GameState::empty(), &[]).unwrap();
        assert_eq!(orbits.len(), 7);
    }

    #[test]
    fn orbit_generator_must_stabilize() {
        let h = fano();
        let state = GameState::from_sets(VertexSet::singleton(0), VertexSet::EMPTY).unwrap();
        let shift = Permutation::new((0..7).map(|i| (i + 1) % 7).collect()).unwrap();
        assert_eq!(vertex_orbits(&h, &state, &[shift]), Err(Error::NotStabilizing(0)));
    }

    #[test]
    fn stabilizer_of_a_point_in_fano() {
        let h = fano();
        let state = GameState::from_sets(VertexSet::singleton(0), VertexSet::EMPTY).unwrap();
        let gens = stabilizer_generators(&h, &state, 24).unwrap();
        let orbits = vertex_orbits(&h, &state, &gens).unwrap();
        assert_eq!(orbits.len(), 1);
        assert_eq!(group_closure(&gens, 7, 1000).unwrap().len(), 24);
    }
}
