//! Shared pieces for the integration tests: a brute-force game oracle,
//! random hypergraph generators and property bodies.

#![allow(dead_code)]

use std::collections::HashMap;

use design_games::hypergraph::{GameState, GameVariant, Hypergraph, Permutation, Side, TurnSchedule, VertexSet};
use design_games::scoring::{
    beck_maker_criterion, edge_weight, es_breaker_criterion, total_score, vertex_weight_for, Prediction, Weight,
};
use design_games::solver::{solve, GameValue, SolverConfig};
use proptest::prelude::*;
use proptest::test_runner::TestCaseError;

/// Plain memoized minimax over the full game tree, written independently of
/// the library solver. Strong: +1 first player wins, 0 draw, -1 second wins.
/// Maker-Breaker: +1 Maker wins, -1 Breaker wins.
pub struct Oracle<'a> {
    edges: &'a [VertexSet],
    all: VertexSet,
    variant: GameVariant,
    schedule: TurnSchedule,
    memo: HashMap<(u64, u64), i8>,
}

fn owns_edge(edges: &[VertexSet], mine: VertexSet) -> bool {
    edges.iter().any(|e| e.is_subset(mine))
}

impl<'a> Oracle<'a> {
    pub fn new(h: &'a Hypergraph, variant: GameVariant, schedule: TurnSchedule) -> Self {
        Oracle { edges: h.edges(), all: h.vertices(), variant, schedule, memo: HashMap::new() }
    }

    /// Value of the position, assuming nobody has won yet (except that a
    /// Maker-Breaker position with an edge already inside Maker's set counts
    /// as won).
    pub fn value(&mut self, first: VertexSet, second: VertexSet) -> i8 {
        if self.variant == GameVariant::MakerBreaker && owns_edge(self.edges, first) {
            return 1;
        }
        if let Some(&v) = self.memo.get(&(first.bits(), second.bits())) {
            return v;
        }
        let taken = first.union(second);
        let free = self.all.difference(taken);
        let result = if free.is_empty() {
            match self.variant {
                GameVariant::Strong => 0,
                GameVariant::MakerBreaker => -1,
            }
        } else {
            let side = self.schedule.side_at(taken.len());
            let sign: i8 = if side == Side::First { 1 } else { -1 };
            let mut best = -2i8;
            for v in free.iter() {
                let (f, s) = match side {
                    Side::First => (first.with(v), second),
                    Side::Second => (first, second.with(v)),
                };
                let won = match (self.variant, side) {
                    (GameVariant::Strong, Side::First) => owns_edge(self.edges, f),
                    (GameVariant::Strong, Side::Second) => owns_edge(self.edges, s),
                    (GameVariant::MakerBreaker, Side::First) => owns_edge(self.edges, f),
                    (GameVariant::MakerBreaker, Side::Second) => false,
                };
                let score = if won { 1 } else { sign * self.value(f, s) };
                best = best.max(score);
                if best == 1 {
                    break;
                }
            }
            sign * best
        };
        self.memo.insert((first.bits(), second.bits()), result);
        result
    }
}

/// Oracle value mapped to the solver's vocabulary.
pub fn oracle_value(
    h: &Hypergraph,
    variant: GameVariant,
    state: &GameState,
    schedule: Option<&TurnSchedule>,
) -> GameValue {
    let schedule = schedule.cloned().unwrap_or_default();
    let v = Oracle::new(h, variant, schedule).value(state.first, state.second);
    match variant {
        GameVariant::MakerBreaker => {
            if v > 0 {
                GameValue::MakerWin
            } else {
                GameValue::BreakerWin
            }
        }
        GameVariant::Strong => {
            let mover = if state.to_move == Side::First { v } else { -v };
            match mover {
                1 => GameValue::WinForToMove,
                0 => GameValue::Draw,
                _ => GameValue::LossForToMove,
            }
        }
    }
}

pub fn solved(h: &Hypergraph, variant: GameVariant, state: &GameState) -> GameValue {
    solve(h, variant, state, None, &SolverConfig::default()).expect("solve").value
}

/// Up to 9 vertices and 1 to 8 nonempty edges.
pub fn small_hypergraph() -> impl Strategy<Value = Hypergraph> {
    (1usize..=9).prop_flat_map(|n| {
        prop::collection::vec(1u64..(1u64 << n), 1..=8).prop_map(move |masks| {
            Hypergraph::from_sets(n, masks.into_iter().map(VertexSet::from_bits).collect()).unwrap()
        })
    })
}

/// Edges of one size, so the uniform criteria have a chance to fire.
pub fn uniform_hypergraph() -> impl Strategy<Value = Hypergraph> {
    (2usize..=3, 3usize..=9).prop_flat_map(|(k, n)| {
        let edge = prop::sample::subsequence((0..n).collect::<Vec<_>>(), k);
        prop::collection::vec(edge, 1..=8).prop_map(move |es| Hypergraph::new(n, es).unwrap())
    })
}

/// A hypergraph with two distinct vertices to play.
pub fn hypergraph_and_pair() -> impl Strategy<Value = (Hypergraph, usize, usize)> {
    small_hypergraph().prop_filter("needs two vertices", |h| h.vertex_count() >= 2).prop_flat_map(|h| {
        let n = h.vertex_count();
        (Just(h), 0..n, 0..n).prop_filter("distinct", |(_, u, v)| u != v)
    })
}

pub fn hypergraph_and_permutation() -> impl Strategy<Value = (Hypergraph, Permutation)> {
    small_hypergraph().prop_flat_map(|h| {
        let n = h.vertex_count();
        (Just(h), Just((0..n).collect::<Vec<_>>()).prop_shuffle())
            .prop_map(|(h, image)| (h, Permutation::new(image).unwrap()))
    })
}

/// A legal, still undecided position reached by alternating moves.
pub fn hypergraph_and_state() -> impl Strategy<Value = (Hypergraph, GameState)> {
    small_hypergraph().prop_flat_map(|h| {
        let n = h.vertex_count();
        (Just(h), Just((0..n).collect::<Vec<_>>()).prop_shuffle(), 0..n).prop_map(|(h, order, len)| {
            let mut state = GameState::empty();
            let schedule = TurnSchedule::standard();
            for &v in &order[..len] {
                let next = state.play(state.to_move, v, &schedule);
                if owns_edge(h.edges(), next.first) || owns_edge(h.edges(), next.second) {
                    break;
                }
                state = next;
            }
            (h, state)
        })
    })
}

pub fn prop_lemma_reduction((h, u, v): (Hypergraph, usize, usize)) -> Result<(), TestCaseError> {
    let reduced = h.restrict_after_moves(u, v).unwrap().hypergraph;
    let state = GameState::from_sets(VertexSet::singleton(u), VertexSet::singleton(v)).unwrap();
    let on_reduced = solved(&reduced, GameVariant::MakerBreaker, &GameState::empty());
    let on_h = solved(&h, GameVariant::MakerBreaker, &state);
    if on_reduced == GameValue::BreakerWin {
        prop_assert_eq!(on_h, GameValue::BreakerWin);
    }
    prop_assert_eq!(on_h, on_reduced);
    Ok(())
}

pub fn prop_disjoint_union((a, b): (Hypergraph, Hypergraph)) -> Result<(), TestCaseError> {
    let empty = GameState::empty();
    let va = solved(&a, GameVariant::MakerBreaker, &empty);
    let vb = solved(&b, GameVariant::MakerBreaker, &empty);
    let u = a.disjoint_union(&b).unwrap();
    let vu = solved(&u, GameVariant::MakerBreaker, &empty);
    if va == GameValue::BreakerWin && vb == GameValue::BreakerWin {
        prop_assert_eq!(vu, GameValue::BreakerWin);
    } else {
        prop_assert_eq!(vu, GameValue::MakerWin);
    }
    Ok(())
}

pub fn prop_permutation_invariance((h, p): (Hypergraph, Permutation)) -> Result<(), TestCaseError> {
    let ph = h.apply_permutation(&p).unwrap();
    let empty = GameState::empty();
    for variant in [GameVariant::Strong, GameVariant::MakerBreaker] {
        prop_assert_eq!(solved(&h, variant, &empty), solved(&ph, variant, &empty));
    }
    Ok(())
}

pub fn prop_strategy_stealing(h: Hypergraph) -> Result<(), TestCaseError> {
    prop_assert_ne!(solved(&h, GameVariant::Strong, &GameState::empty()), GameValue::LossForToMove);
    Ok(())
}

pub fn prop_memo_matches_plain((h, state): (Hypergraph, GameState)) -> Result<(), TestCaseError> {
    for variant in [GameVariant::Strong, GameVariant::MakerBreaker] {
        let memo = solve(&h, variant, &state, None, &SolverConfig::default()).unwrap().value;
        let plain = solve(&h, variant, &state, None, &SolverConfig::plain()).unwrap().value;
        prop_assert_eq!(memo, plain);
    }
    Ok(())
}

pub fn prop_matches_oracle((h, state): (Hypergraph, GameState)) -> Result<(), TestCaseError> {
    for variant in [GameVariant::Strong, GameVariant::MakerBreaker] {
        prop_assert_eq!(solved(&h, variant, &state), oracle_value(&h, variant, &state, None));
    }
    Ok(())
}

/// Returns whether a criterion fired.
pub fn criterion_soundness(h: &Hypergraph) -> Result<bool, TestCaseError> {
    let mb = solved(h, GameVariant::MakerBreaker, &GameState::empty());
    let mut fired = false;
    if es_breaker_criterion(h).predicted == Prediction::Breaker {
        prop_assert_eq!(mb, GameValue::BreakerWin);
        fired = true;
    }
    if beck_maker_criterion(h).predicted == Prediction::Maker {
        prop_assert_eq!(mb, GameValue::MakerWin);
        fired = true;
    }
    Ok(fired)
}

pub fn prop_criterion_soundness(h: Hypergraph) -> Result<(), TestCaseError> {
    criterion_soundness(&h).map(|_| ())
}

/// Every edge weight doubles or stays after a Maker move, and drops to zero
/// or stays after a Breaker move.
pub fn prop_weight_transition(
    (h, state): (Hypergraph, GameState),
    pick: prop::sample::Index,
    side: Side,
) -> Result<(), TestCaseError> {
    let free: Vec<usize> = h.vertices().difference(state.occupied()).iter().collect();
    if free.is_empty() {
        return Ok(());
    }
    let v = free[pick.index(free.len())];
    let next = match side {
        Side::First => GameState { first: state.first.with(v), ..state },
        Side::Second => GameState { second: state.second.with(v), ..state },
    };
    for i in 0..h.edge_count() {
        let (before, after) = (edge_weight(&h, &state, i), edge_weight(&h, &next, i));
        let ok = match side {
            Side::First => after == before || after == before + before,
            Side::Second => after == before || after == Weight::ZERO,
        };
        prop_assert!(ok, "edge {} went from {} to {}", i, before, after);
        if h.edge(i).contains(v) && !before.is_zero() {
            prop_assert_ne!(after, before);
        }
    }
    Ok(())
}

/// With Breaker to move, a maximum-weight Breaker move followed by any Maker
/// reply never raises Maker's score.
pub fn prop_es_monotone((h, state): (Hypergraph, GameState)) -> Result<(), TestCaseError> {
    let free = h.vertices().difference(state.occupied());
    if free.len() < 2 {
        return Ok(());
    }
    let before = total_score(&h, &state);
    let best = free.iter().map(|v| vertex_weight_for(&h, &state, Side::First, v)).max().unwrap();
    for b in free.iter().filter(|&v| vertex_weight_for(&h, &state, Side::First, v) == best) {
        let after_b = GameState { second: state.second.with(b), ..state };
        for m in free.iter().filter(|&m| m != b) {
            let after_m = GameState { first: after_b.first.with(m), ..after_b };
            prop_assert!(total_score(&h, &after_m) <= before, "Breaker {} then Maker {}", b, m);
        }
    }
    Ok(())
}
