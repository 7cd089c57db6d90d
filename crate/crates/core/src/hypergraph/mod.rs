//! Hypergraphs as game boards.
//!
//! Vertices are dense indices `0..vertex_count` and every vertex set is a
//! 64-bit mask, so a board holds at most 64 vertices. Edges are kept in a
//! stable order (certificates and reports refer to them by position) and may
//! repeat; an empty edge only ever appears as the result of deletion, where it
//! marks a hyperedge Maker has already filled.

mod fixtures;
mod perm;

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use fixtures::{fixture_h, fixture_labels};
pub use perm::{
    automorphism_generators, automorphism_generators_bounded, group_closure, is_automorphism, is_isomorphic,
    is_isomorphic_bounded, stabilizer_generators, vertex_orbits, Permutation, AUTOMORPHISM_VERTEX_BOUND,
    ISOMORPHISM_VERTEX_BOUND,
};

pub const MAX_VERTICES: usize = 64;

/// A set of vertices stored as a bit mask.
#[derive(Clone, Copy, Default, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(into = "Vec<usize>", try_from = "Vec<usize>")]
pub struct VertexSet(u64);

impl VertexSet {
    pub const EMPTY: VertexSet = VertexSet(0);

    pub const fn from_bits(bits: u64) -> Self {
        VertexSet(bits)
    }

    pub const fn bits(self) -> u64 {
        self.0
    }

    /// All vertices `0..n`.
    pub fn full(n: usize) -> Self {
        if n >= 64 {
            VertexSet(u64::MAX)
        } else {
            VertexSet((1u64 << n) - 1)
        }
    }

    pub fn singleton(v: usize) -> Self {
        VertexSet(1u64 << v)
    }

    pub fn contains(self, v: usize) -> bool {
        v < 64 && self.0 >> v & 1 == 1
    }

    pub fn insert(&mut self, v: usize) {
        self.0 |= 1u64 << v;
    }

    pub fn remove(&mut self, v: usize) {
        self.0 &= !(1u64 << v);
    }

    pub fn with(self, v: usize) -> Self {
        VertexSet(self.0 | 1u64 << v)
    }

    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub fn union(self, other: VertexSet) -> Self {
        VertexSet(self.0 | other.0)
    }

    pub fn intersection(self, other: VertexSet) -> Self {
        VertexSet(self.0 & other.0)
    }

    pub fn difference(self, other: VertexSet) -> Self {
        VertexSet(self.0 & !other.0)
    }

    pub fn is_disjoint(self, other: VertexSet) -> bool {
        self.0 & other.0 == 0
    }

    pub fn is_subset(self, other: VertexSet) -> bool {
        self.0 & !other.0 == 0
    }

    /// Smallest member.
    pub fn first(self) -> Option<usize> {
        (self.0 != 0).then(|| self.0.trailing_zeros() as usize)
    }

    pub fn iter(self) -> VertexIter {
        VertexIter(self.0)
    }
}

impl FromIterator<usize> for VertexSet {
    fn from_iter<I: IntoIterator<Item = usize>>(iter: I) -> Self {
        let mut s = VertexSet::EMPTY;
        for v in iter {
            s.insert(v);
        }
        s
    }
}

impl From<VertexSet> for Vec<usize> {
    fn from(s: VertexSet) -> Self {
        s.iter().collect()
    }
}

impl TryFrom<Vec<usize>> for VertexSet {
    type Error = Error;

    fn try_from(v: Vec<usize>) -> Result<Self> {
        if let Some(&bad) = v.iter().find(|&&x| x >= MAX_VERTICES) {
            return Err(Error::VertexOutOfRange { vertex: bad, count: MAX_VERTICES });
        }
        Ok(v.into_iter().collect())
    }
}

impl fmt::Debug for VertexSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.iter()).finish()
    }
}

pub struct VertexIter(u64);

impl Iterator for VertexIter {
    type Item = usize;

    fn next(&mut self) -> Option<usize> {
        if self.0 == 0 {
            return None;
        }
        let v = self.0.trailing_zeros() as usize;
        self.0 &= self.0 - 1;
        Some(v)
    }

    fn size_hint(&self) -> (usize, Option<usize>) {
        let n = self.0.count_ones() as usize;
        (n, Some(n))
    }
}

impl DoubleEndedIterator for VertexIter {
    fn next_back(&mut self) -> Option<usize> {
        if self.0 == 0 {
            return None;
        }
        let v = 63 - self.0.leading_zeros() as usize;
        self.0 &= !(1u64 << v);
        Some(v)
    }
}

impl ExactSizeIterator for VertexIter {}

/// The two players. `First` is Xeno in the strong game and Maker in the weak
/// game; `Second` is Ophelia or Breaker.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Side {
    First,
    Second,
}

impl Side {
    pub fn other(self) -> Side {
        match self {
            Side::First => Side::Second,
            Side::Second => Side::First,
        }
    }
}

impl fmt::Display for Side {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Side::First => "X",
            Side::Second => "O",
        })
    }
}

/// Which game is played on the board.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum GameVariant {
    /// Tic-Tac-Toe: whoever completes a hyperedge first wins; a full board
    /// without a completion is a draw.
    Strong,
    /// Maker completes a hyperedge to win; Breaker wins once every hyperedge
    /// holds one of her vertices.
    MakerBreaker,
}

impl fmt::Display for GameVariant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            GameVariant::Strong => "strong",
            GameVariant::MakerBreaker => "mb",
        })
    }
}

impl std::str::FromStr for GameVariant {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "strong" | "ttt" => Ok(GameVariant::Strong),
            "mb" | "maker-breaker" => Ok(GameVariant::MakerBreaker),
            other => Err(Error::InvalidParameters(format!("unknown variant {other:?}"))),
        }
    }
}

/// Order of turns: an explicit prefix followed by strict alternation.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct TurnSchedule {
    pub prefix: Vec<Side>,
    /// Side moving first once the prefix is exhausted.
    pub tail_start: Side,
}

impl Default for TurnSchedule {
    fn default() -> Self {
        TurnSchedule::standard()
    }
}

impl TurnSchedule {
    /// Plain alternation starting with the first player.
    pub fn standard() -> Self {
        TurnSchedule { prefix: Vec::new(), tail_start: Side::First }
    }

    /// Parse a string such as `XOO`: the listed turns, then alternation
    /// continuing from the last listed side.
    pub fn parse(s: &str) -> Result<Self> {
        let prefix = s
            .chars()
            .filter(|c| !c.is_whitespace() && *c != ',')
            .map(|c| match c.to_ascii_uppercase() {
                'X' | 'M' => Ok(Side::First),
                'O' | 'B' => Ok(Side::Second),
                other => Err(Error::InvalidParameters(format!("bad schedule symbol {other:?}"))),
            })
            .collect::<Result<Vec<_>>>()?;
        let tail_start = prefix.last().map_or(Side::First, |s| s.other());
        Ok(TurnSchedule { prefix, tail_start })
    }

    pub fn is_standard(&self) -> bool {
        self.alternation_start() == 0 && self.tail_start == Side::First
    }

    /// Side to move after `ply` moves have been made.
    pub fn side_at(&self, ply: usize) -> Side {
        if ply < self.prefix.len() {
            self.prefix[ply]
        } else if (ply - self.prefix.len()).is_multiple_of(2) {
            self.tail_start
        } else {
            self.tail_start.other()
        }
    }

    /// Smallest ply from which turns strictly alternate.
    pub fn alternation_start(&self) -> usize {
        let mut start = self.prefix.len();
        while start > 0 && self.side_at(start - 1) != self.side_at(start) {
            start -= 1;
        }
        start
    }

    pub fn symbols(&self) -> String {
        self.prefix.iter().map(|s| s.to_string()).collect()
    }
}

/// Occupancy of both players plus the side to move.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct GameState {
    /// Vertices held by Xeno / Maker.
    pub first: VertexSet,
    /// Vertices held by Ophelia / Breaker.
    pub second: VertexSet,
    pub to_move: Side,
}

impl Default for GameState {
    fn default() -> Self {
        GameState::empty()
    }
}

impl GameState {
    pub fn empty() -> Self {
        GameState { first: VertexSet::EMPTY, second: VertexSet::EMPTY, to_move: Side::First }
    }

    /// State under standard alternation; the side to move follows from the counts.
    pub fn from_sets(first: VertexSet, second: VertexSet) -> Result<Self> {
        let to_move = match first.len() as i64 - second.len() as i64 {
            0 => Side::First,
            1 => Side::Second,
            d => return Err(Error::InvalidState(format!("|X| - |O| = {d}, expected 0 or 1"))),
        };
        let s = GameState { first, second, to_move };
        if !first.is_disjoint(second) {
            return Err(Error::InvalidState("players share a vertex".into()));
        }
        Ok(s)
    }

    /// State reached under `schedule` with the given occupancy.
    pub fn scheduled(first: VertexSet, second: VertexSet, schedule: &TurnSchedule) -> Self {
        let ply = first.len() + second.len();
        GameState { first, second, to_move: schedule.side_at(ply) }
    }

    pub fn occupied(&self) -> VertexSet {
        self.first.union(self.second)
    }

    pub fn ply(&self) -> usize {
        self.first.len() + self.second.len()
    }

    pub fn owned(&self, side: Side) -> VertexSet {
        match side {
            Side::First => self.first,
            Side::Second => self.second,
        }
    }

    /// The state after `side` takes `v`; the next mover comes from `schedule`.
    pub fn play(&self, side: Side, v: usize, schedule: &TurnSchedule) -> GameState {
        let mut next = *self;
        match side {
            Side::First => next.first.insert(v),
            Side::Second => next.second.insert(v),
        }
        next.to_move = schedule.side_at(next.ply());
        next
    }

    /// Check disjointness, range, and turn consistency.
    pub fn validate(&self, vertex_count: usize, schedule: Option<&TurnSchedule>) -> Result<()> {
        if !self.first.is_disjoint(self.second) {
            return Err(Error::InvalidState("players share a vertex".into()));
        }
        if let Some(v) = self.occupied().difference(VertexSet::full(vertex_count)).first() {
            return Err(Error::VertexOutOfRange { vertex: v, count: vertex_count });
        }
        match schedule {
            Some(s) if !s.is_standard() => {
                if s.side_at(self.ply()) != self.to_move {
                    return Err(Error::InvalidState(format!(
                        "schedule gives {} to move at ply {}",
                        s.side_at(self.ply()),
                        self.ply()
                    )));
                }
            }
            _ => {
                let expected = GameState::from_sets(self.first, self.second)?.to_move;
                if expected != self.to_move {
                    return Err(Error::InvalidState(format!("under alternation {expected} is to move")));
                }
            }
        }
        Ok(())
    }
}

/// A hypergraph on vertices `0..vertex_count`.
#[derive(Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Hypergraph {
    vertex_count: usize,
    edges: Vec<VertexSet>,
}

impl fmt::Debug for Hypergraph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Hypergraph(v={}, ", self.vertex_count)?;
        f.debug_list().entries(self.edges.iter()).finish()?;
        f.write_str(")")
    }
}

/// Result of deleting vertices: the smaller hypergraph plus the old→new
/// vertex relabeling (`None` for deleted vertices).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Restriction {
    pub hypergraph: Hypergraph,
    pub old_to_new: Vec<Option<usize>>,
}

impl Hypergraph {
    pub fn new<E, I>(vertex_count: usize, edges: E) -> Result<Self>
    where
        E: IntoIterator<Item = I>,
        I: IntoIterator<Item = usize>,
    {
        if vertex_count > MAX_VERTICES {
            return Err(Error::TooManyVertices(vertex_count));
        }
        let mut out = Vec::new();
        for edge in edges {
            let mut set = VertexSet::EMPTY;
            for v in edge {
                if v >= vertex_count {
                    return Err(Error::VertexOutOfRange { vertex: v, count: vertex_count });
                }
                set.insert(v);
            }
            out.push(set);
        }
        Ok(Hypergraph { vertex_count, edges: out })
    }

    pub fn from_sets(vertex_count: usize, edges: Vec<VertexSet>) -> Result<Self> {
        if vertex_count > MAX_VERTICES {
            return Err(Error::TooManyVertices(vertex_count));
        }
        let all = VertexSet::full(vertex_count);
        for e in &edges {
            if let Some(v) = e.difference(all).first() {
                return Err(Error::VertexOutOfRange { vertex: v, count: vertex_count });
            }
        }
        Ok(Hypergraph { vertex_count, edges })
    }

    pub fn empty(vertex_count: usize) -> Result<Self> {
        Hypergraph::from_sets(vertex_count, Vec::new())
    }

    pub fn vertex_count(&self) -> usize {
        self.vertex_count
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn edges(&self) -> &[VertexSet] {
        &self.edges
    }

    pub fn edge(&self, i: usize) -> VertexSet {
        self.edges[i]
    }

    pub fn vertices(&self) -> VertexSet {
        VertexSet::full(self.vertex_count)
    }

    pub fn degree(&self, v: usize) -> usize {
        self.edges.iter().filter(|e| e.contains(v)).count()
    }

    pub fn max_degree(&self) -> usize {
        (0..self.vertex_count).map(|v| self.degree(v)).max().unwrap_or(0)
    }

    pub fn max_edge_size(&self) -> usize {
        self.edges.iter().map(|e| e.len()).max().unwrap_or(0)
    }

    /// Common edge size, if every edge has the same size.
    pub fn uniformity(&self) -> Option<usize> {
        let k = self.edges.first()?.len();
        self.edges.iter().all(|e| e.len() == k).then_some(k)
    }

    /// No pair of vertices lies in two edges (repeated edges count).
    pub fn is_linear(&self) -> bool {
        for (i, a) in self.edges.iter().enumerate() {
            for b in &self.edges[i + 1..] {
                if a.intersection(*b).len() >= 2 {
                    return false;
                }
            }
        }
        true
    }

    pub fn has_empty_edge(&self) -> bool {
        self.edges.iter().any(|e| e.is_empty())
    }

    /// Vertices lying in no edge.
    pub fn isolated(&self) -> VertexSet {
        let covered = self.edges.iter().fold(VertexSet::EMPTY, |acc, e| acc.union(*e));
        self.vertices().difference(covered)
    }

    /// Edge masks sorted, for multiset comparison.
    pub fn edge_multiset(&self) -> Vec<u64> {
        let mut m: Vec<u64> = self.edges.iter().map(|e| e.bits()).collect();
        m.sort_unstable();
        m
    }

    /// Lowest-index edge contained in `occupied`.
    pub fn completed_edge(&self, occupied: VertexSet) -> Option<usize> {
        self.edges.iter().position(|e| e.is_subset(occupied))
    }

    /// The nested hypergraph left after the moves in `state`: vertices of
    /// `state` are deleted, edges touched by the second player disappear and
    /// the first player's vertices are removed from the remaining edges.
    pub fn residual(&self, state: &GameState) -> Restriction {
        let keep = self.vertices().difference(state.occupied());
        let mut old_to_new = vec![None; self.vertex_count];
        for (new, old) in keep.iter().enumerate() {
            old_to_new[old] = Some(new);
        }
        let edges = self
            .edges
            .iter()
            .filter(|e| e.is_disjoint(state.second))
            .map(|e| e.difference(state.first).iter().map(|v| old_to_new[v].expect("kept vertex")).collect())
            .collect();
        Restriction { hypergraph: Hypergraph { vertex_count: keep.len(), edges }, old_to_new }
    }

    /// Maker takes `maker_move`, Breaker answers `breaker_move`; returns the
    /// hypergraph on which the rest of the game is played.
    pub fn restrict_after_moves(&self, maker_move: usize, breaker_move: usize) -> Result<Restriction> {
        for v in [maker_move, breaker_move] {
            if v >= self.vertex_count {
                return Err(Error::VertexOutOfRange { vertex: v, count: self.vertex_count });
            }
        }
        if maker_move == breaker_move {
            return Err(Error::SameVertex(maker_move));
        }
        let state = GameState {
            first: VertexSet::singleton(maker_move),
            second: VertexSet::singleton(breaker_move),
            to_move: Side::First,
        };
        Ok(self.residual(&state))
    }

    /// Drop vertices that lie in no edge.
    pub fn without_isolated(&self) -> Restriction {
        let state = GameState { first: self.isolated(), second: VertexSet::EMPTY, to_move: Side::First };
        self.residual(&state)
    }

    /// Vertex-disjoint union; `other` is shifted past this hypergraph's vertices.
    pub fn disjoint_union(&self, other: &Hypergraph) -> Result<Hypergraph> {
        let n = self.vertex_count + other.vertex_count;
        if n > MAX_VERTICES {
            return Err(Error::TooManyVertices(n));
        }
        let shift = self.vertex_count;
        let mut edges = self.edges.clone();
        edges.extend(other.edges.iter().map(|e| VertexSet::from_bits(e.bits() << shift)));
        Ok(Hypergraph { vertex_count: n, edges })
    }

    /// Map every edge through `p`, keeping edge order.
    pub fn apply_permutation(&self, p: &Permutation) -> Result<Hypergraph> {
        if p.len() != self.vertex_count {
            return Err(Error::LengthMismatch { expected: self.vertex_count, found: p.len() });
        }
        Ok(Hypergraph { vertex_count: self.vertex_count, edges: self.edges.iter().map(|e| p.apply_set(*e)).collect() })
    }

    /// Append extra edges.
    pub fn with_edges(&self, extra: &[VertexSet]) -> Result<Hypergraph> {
        let mut edges = self.edges.clone();
        edges.extend_from_slice(extra);
        Hypergraph::from_sets(self.vertex_count, edges)
    }

    /// Same vertex count and identical edge multiset (no relabeling).
    pub fn same_edge_multiset(&self, other: &Hypergraph) -> bool {
        self.vertex_count == other.vertex_count && self.edge_multiset() == other.edge_multiset()
    }
}

impl GameState {
    /// Map both occupancy sets through `p`.
    pub fn apply_permutation(&self, p: &Permutation) -> GameState {
        GameState { first: p.apply_set(self.first), second: p.apply_set(self.second), to_move: self.to_move }
    }
}

/// The 3×3 board of ordinary Tic-Tac-Toe, cells numbered 1..9 row by row and
/// stored as vertices 0..8.
pub fn tic_tac_toe_board() -> Hypergraph {
    let lines: [[usize; 3]; 8] =
        [[1, 2, 3], [4, 5, 6], [7, 8, 9], [1, 4, 7], [2, 5, 8], [3, 6, 9], [1, 5, 9], [7, 5, 3]];
    Hypergraph::new(9, lines.iter().map(|l| l.iter().map(|c| c - 1))).expect("valid board")
}

#[cfg(test)]
mod tests {
    use super::*;

    fn set(v: &[usize]) -> VertexSet {
        v.iter().copied().collect()
    }

    #[test]
    fn completed_edge_on_board() {
        let h = tic_tac_toe_board();
        // cells 1,4,7,9 occupied: edge "147" is index 3
        assert_eq!(h.completed_edge(set(&[0, 3, 6, 8])), Some(3));
        assert_eq!(h.completed_edge(VertexSet::EMPTY), None);
    }

    #[test]
    fn restrict_small_example() {
        // a b c d e f = 0..6; edges abc, ade, bef; Maker a, Breaker f
        let h = Hypergraph::new(6, vec![vec![0, 1, 2], vec![0, 3, 4], vec![1, 4, 5]]).unwrap();
        let r = h.restrict_after_moves(0, 5).unwrap();
        assert_eq!(r.hypergraph.vertex_count(), 4);
        // b c d e -> 0 1 2 3
        let expected = Hypergraph::new(4, vec![vec![0, 1], vec![2, 3]]).unwrap();
        assert_eq!(r.hypergraph, expected);
        assert_eq!(r.old_to_new, vec![None, Some(0), Some(1), Some(2), Some(3), None]);
    }

    #[test]
    fn restrict_errors() {
        let h = tic_tac_toe_board();
        assert_eq!(h.restrict_after_moves(2, 2), Err(Error::SameVertex(2)));
        assert!(matches!(h.restrict_after_moves(0, 9), Err(Error::VertexOutOfRange { .. })));
    }

    #[test]
    fn restrict_untouched_vertices_only_relabels() {
        let h = Hypergraph::new(5, vec![vec![1, 2], vec![2, 3]]).unwrap();
        let r = h.restrict_after_moves(0, 4).unwrap();
        assert_eq!(r.hypergraph, Hypergraph::new(3, vec![vec![0, 1], vec![1, 2]]).unwrap());
    }

    #[test]
    fn restrict_keeps_empty_edge() {
        let h = Hypergraph::new(3, vec![vec![0], vec![1, 2]]).unwrap();
        let r = h.restrict_after_moves(0, 1).unwrap();
        assert_eq!(r.hypergraph.edge_count(), 1);
        assert!(r.hypergraph.has_empty_edge());
    }

    #[test]
    fn disjoint_union_with_empty_is_identity() {
        let h = tic_tac_toe_board();
        let e = Hypergraph::empty(0).unwrap();
        assert_eq!(h.disjoint_union(&e).unwrap(), h);
    }

    #[test]
    fn schedule_parsing() {
        let s = TurnSchedule::parse("XOO").unwrap();
        let sides: Vec<Side> = (0..6).map(|p| s.side_at(p)).collect();
        use Side::*;
        assert_eq!(sides, vec![First, Second, Second, First, Second, First]);
        assert_eq!(s.alternation_start(), 2);
        assert!(TurnSchedule::parse("XO").unwrap().is_standard());
        assert!(TurnSchedule::parse("XQ").is_err());
    }

    #[test]
    fn state_validation() {
        let s = GameState::from_sets(set(&[0, 1]), set(&[2])).unwrap();
        assert_eq!(s.to_move, Side::Second);
        assert!(GameState::from_sets(set(&[0, 1]), VertexSet::EMPTY).is_err());
        let bad = GameState { first: set(&[0]), second: set(&[0]), to_move: Side::First };
        assert!(bad.validate(3, None).is_err());
    }

    #[test]
    fn linearity_and_uniformity() {
        let h = tic_tac_toe_board();
        assert_eq!(h.uniformity(), Some(3));
        assert!(h.is_linear());
        let dup = Hypergraph::new(3, vec![vec![0, 1, 2], vec![0, 1, 2]]).unwrap();
        assert!(!dup.is_linear());
    }
}
