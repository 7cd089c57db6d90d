//! Playing strategies against each other and checking them exhaustively.

use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use super::{immediate_wins, score_optimal_moves, GameContext, Strategy, TieBreak, Tier};
use crate::error::{Error, Result};
use crate::hypergraph::{GameState, GameVariant, Side, VertexSet};
use crate::scoring::{total_score, vertex_weight, Weight};
use crate::solver::{verify_policy, Claim, VerifyReport};

/// How a finished game ended.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Outcome {
    /// Xeno or Maker won.
    FirstWin,
    Draw,
    /// Ophelia or Breaker won.
    SecondWin,
}

impl Outcome {
    /// Rank from the first player's point of view.
    fn rank(self) -> u8 {
        match self {
            Outcome::FirstWin => 2,
            Outcome::Draw => 1,
            Outcome::SecondWin => 0,
        }
    }
}

/// The result if the game is over after `mover` took `v` (reaching `state`).
pub(crate) fn outcome_after(ctx: &GameContext, state: &GameState, mover: Side, v: usize) -> Option<Outcome> {
    let mine = state.owned(mover);
    if ctx.completes_edges(mover) && ctx.h.edges().iter().any(|e| e.contains(v) && e.is_subset(mine)) {
        return Some(match mover {
            Side::First => Outcome::FirstWin,
            Side::Second => Outcome::SecondWin,
        });
    }
    let free = ctx.free(state);
    match ctx.variant {
        GameVariant::Strong => free.is_empty().then_some(Outcome::Draw),
        GameVariant::MakerBreaker => {
            let blocked = ctx.h.edges().iter().all(|e| !e.is_disjoint(state.second));
            (free.is_empty() || blocked).then_some(Outcome::SecondWin)
        }
    }
}

/// Whether `v` is allowed by the three-tier score-optimizing rule.
pub fn is_score_optimal(ctx: &GameContext, state: &GameState, v: usize) -> bool {
    score_optimal_moves(ctx, state).1.contains(v)
}

/// One move with its score annotations.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MoveRecord {
    pub ply: usize,
    pub side: Side,
    pub vertex: usize,
    pub score_before: Weight,
    pub score_after: Weight,
    /// Weight of the chosen vertex and the largest weight on offer.
    pub weight: Weight,
    pub max_weight: Weight,
    /// The opponent threatened to win on its next move.
    pub forced: bool,
    /// Number of immediate wins the mover holds after the move.
    pub threats: usize,
    /// Tier of the three-tier rule that applied, and whether the move satisfied it.
    pub tier: Tier,
    pub score_optimal: bool,
}

/// A played game.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Transcript {
    pub variant: GameVariant,
    pub schedule: String,
    pub first: String,
    pub second: String,
    pub moves: Vec<MoveRecord>,
    pub outcome: Option<Outcome>,
    /// Why the game stopped early, if a strategy failed.
    pub fault: Option<String>,
}

impl Transcript {
    pub fn side_moves(&self, side: Side) -> usize {
        self.moves.iter().filter(|m| m.side == side).count()
    }

    /// Replay the moves and return the outcome they produce.
    pub fn replay(&self, ctx: &GameContext) -> Result<Option<Outcome>> {
        let mut state = GameState::scheduled(VertexSet::EMPTY, VertexSet::EMPTY, &ctx.schedule);
        let mut outcome = None;
        for m in &self.moves {
            if outcome.is_some() || m.side != state.to_move || !ctx.free(&state).contains(m.vertex) {
                return Err(Error::IllegalMove { name: format!("{} at ply {}", m.side, m.ply), vertex: m.vertex });
            }
            state = state.play(m.side, m.vertex, &ctx.schedule);
            outcome = outcome_after(ctx, &state, m.side, m.vertex);
        }
        Ok(outcome)
    }
}

fn annotate(ctx: &GameContext, state: &GameState, next: &GameState, v: usize) -> MoveRecord {
    let side = state.to_move;
    let (tier, options) = score_optimal_moves(ctx, state);
    let max_weight = ctx.free(state).iter().map(|u| vertex_weight(&ctx.h, state, u)).max().unwrap_or(Weight::ZERO);
    let forced = ctx.completes_edges(side.other()) && !immediate_wins(&ctx.h, state, side.other()).is_empty();
    let threats = if ctx.completes_edges(side) { immediate_wins(&ctx.h, next, side).len() } else { 0 };
    MoveRecord {
        ply: state.ply(),
        side,
        vertex: v,
        score_before: total_score(&ctx.h, state),
        score_after: total_score(&ctx.h, next),
        weight: vertex_weight(&ctx.h, state, v),
        max_weight,
        forced,
        threats,
        tier,
        score_optimal: options.contains(v),
    }
}

/// Play `first` against `second` from the empty board to the end.
pub fn simulate(ctx: &GameContext, first: &mut dyn Strategy, second: &mut dyn Strategy) -> Transcript {
    let start = GameState::scheduled(VertexSet::EMPTY, VertexSet::EMPTY, &ctx.schedule);
    simulate_from(ctx, start, first, second)
}

/// Play from `state` to the end.
pub fn simulate_from(
    ctx: &GameContext,
    mut state: GameState,
    first: &mut dyn Strategy,
    second: &mut dyn Strategy,
) -> Transcript {
    let mut t = Transcript {
        variant: ctx.variant,
        schedule: ctx.schedule.symbols(),
        first: first.name(),
        second: second.name(),
        moves: Vec::new(),
        outcome: None,
        fault: None,
    };
    for (side, s) in [(Side::First, &*first), (Side::Second, &*second)] {
        if let Err(e) = s.check(ctx, side) {
            t.fault = Some(e.to_string());
            return t;
        }
    }
    if ctx.free(&state).is_empty() {
        t.outcome = Some(if ctx.variant == GameVariant::Strong { Outcome::Draw } else { Outcome::SecondWin });
        return t;
    }
    loop {
        let side = state.to_move;
        let strategy: &mut dyn Strategy = match side {
            Side::First => &mut *first,
            Side::Second => &mut *second,
        };
        let v = match strategy.choose(ctx, &state) {
            Ok(v) => v,
            Err(e) => {
                t.fault = Some(format!("{side}: {e}"));
                return t;
            }
        };
        if !ctx.free(&state).contains(v) {
            t.fault = Some(Error::IllegalMove { name: strategy.name(), vertex: v }.to_string());
            return t;
        }
        let next = state.play(side, v, &ctx.schedule);
        t.moves.push(annotate(ctx, &state, &next, v));
        state = next;
        if let Some(o) = outcome_after(ctx, &state, side, v) {
            t.outcome = Some(o);
            return t;
        }
    }
}

/// Check `strategy` for `side` against every opponent line from the empty board.
pub fn verify_strategy_exhaustive(
    ctx: &GameContext,
    strategy: &mut dyn Strategy,
    side: Side,
    claim: Claim,
) -> Result<VerifyReport> {
    strategy.check(ctx, side)?;
    let start = GameState::scheduled(VertexSet::EMPTY, VertexSet::EMPTY, &ctx.schedule);
    let name = strategy.name();
    verify_policy(&ctx.h, ctx.variant, side, claim, &start, ctx.schedule_opt(), |s| {
        let v = strategy.choose(ctx, s)?;
        if ctx.free(s).contains(v) {
            Ok(v)
        } else {
            Err(Error::IllegalMove { name: name.clone(), vertex: v })
        }
    })
}

/// What happens when both players keep to the three-tier rule.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ScoreOptimalReport {
    /// Outcomes reached on some line.
    pub outcomes: Vec<Outcome>,
    /// Result when each branching side picks its best rule-abiding move.
    pub value: Outcome,
    pub positions: usize,
}

struct Explorer<'a> {
    ctx: &'a GameContext,
    fixed: [Option<&'a TieBreak>; 2],
    memo: HashMap<(u64, u64), (u8, Outcome)>,
}

fn bit(o: Outcome) -> u8 {
    1 << o.rank()
}

impl Explorer<'_> {
    fn visit(&mut self, state: GameState) -> (u8, Outcome) {
        let key = (state.first.bits(), state.second.bits());
        if let Some(&r) = self.memo.get(&key) {
            return r;
        }
        let side = state.to_move;
        let (_, options) = score_optimal_moves(self.ctx, &state);
        let slot = match side {
            Side::First => 0,
            Side::Second => 1,
        };
        let options = match self.fixed[slot] {
            Some(tb) => tb.pick(options).map_or(VertexSet::EMPTY, VertexSet::singleton),
            None => options,
        };
        let mut reached = 0u8;
        let mut best: Option<Outcome> = None;
        for v in options.iter() {
            let next = state.play(side, v, &self.ctx.schedule);
            let (r, o) = match outcome_after(self.ctx, &next, side, v) {
                Some(o) => (bit(o), o),
                None => self.visit(next),
            };
            reached |= r;
            let better = match (best, side) {
                (None, _) => true,
                (Some(b), Side::First) => o.rank() > b.rank(),
                (Some(b), Side::Second) => o.rank() < b.rank(),
            };
            if better {
                best = Some(o);
            }
        }
        let result = (reached, best.unwrap_or(Outcome::Draw));
        self.memo.insert(key, result);
        result
    }
}

/// Explore all games in which both sides follow the three-tier rule. A side
/// given a tie-break plays that one move; a side given `None` may take any
/// rule-abiding move.
pub fn explore_score_optimal(
    ctx: &GameContext,
    first: Option<&TieBreak>,
    second: Option<&TieBreak>,
) -> ScoreOptimalReport {
    let start = GameState::scheduled(VertexSet::EMPTY, VertexSet::EMPTY, &ctx.schedule);
    let mut ex = Explorer { ctx, fixed: [first, second], memo: HashMap::new() };
    let (reached, value) =
        if ctx.free(&start).is_empty() { (bit(Outcome::Draw), Outcome::Draw) } else { ex.visit(start) };
    let outcomes =
        [Outcome::FirstWin, Outcome::Draw, Outcome::SecondWin].into_iter().filter(|&o| reached & bit(o) != 0).collect();
    ScoreOptimalReport { outcomes, value, positions: ex.memo.len() }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::designs::{make_sts, make_td};
    use crate::hypergraph::tic_tac_toe_board;
    use crate::strategies::{ScoreOptimizing, Scripted, StsXeno, Td2Xeno};

    #[test]
    fn forced_line_ends_at_score_one() {
        // Cells 1..9 are vertices 0..8; X plays 1,9,7,4 and O plays 5,3,8.
        let ctx = GameContext::new(tic_tac_toe_board(), GameVariant::Strong);
        let mut x = Scripted { moves: vec![0, 8, 6, 3] };
        let mut o = Scripted { moves: vec![4, 2, 7] };
        let t = simulate(&ctx, &mut x, &mut o);
        assert_eq!(t.outcome, Some(Outcome::FirstWin));
        assert_eq!(t.moves.len(), 7);
        assert!(t.moves.iter().filter(|m| m.side == Side::Second).all(|m| m.score_optimal));
        assert_eq!(t.moves.last().unwrap().score_after, Weight::ONE);
        assert_eq!(t.replay(&ctx).unwrap(), t.outcome);
    }

    #[test]
    fn score_vs_score_on_ttt_is_a_draw() {
        let ctx = GameContext::new(tic_tac_toe_board(), GameVariant::Strong);
        let t = simulate(&ctx, &mut ScoreOptimizing::default(), &mut ScoreOptimizing::default());
        assert_eq!(t.outcome, Some(Outcome::Draw));
        assert!(t.moves.iter().all(|m| m.score_optimal));
    }

    #[test]
    fn illegal_move_is_a_fault() {
        let ctx = GameContext::new(tic_tac_toe_board(), GameVariant::Strong);
        let t = simulate(&ctx, &mut Scripted { moves: vec![0, 1] }, &mut Scripted { moves: vec![0] });
        assert!(t.fault.is_some());
        assert_eq!(t.outcome, None);
    }

    #[test]
    fn inapplicable_strategy_is_a_fault() {
        let ctx = GameContext::new(tic_tac_toe_board(), GameVariant::Strong);
        let t = simulate(&ctx, &mut StsXeno, &mut ScoreOptimizing::default());
        assert!(t.fault.unwrap().contains("sts-xeno"));
    }

    #[test]
    fn sts7_strategy_verifies() {
        let ctx = GameContext::new(make_sts(7).unwrap().to_hypergraph().unwrap(), GameVariant::Strong);
        let r = verify_strategy_exhaustive(&ctx, &mut StsXeno, Side::First, Claim::Win).unwrap();
        assert!(r.holds, "{:?}", r.counterexample);
        assert!(r.max_side_moves <= 5);
    }

    #[test]
    fn td2_wins_on_second_move() {
        let ctx = GameContext::for_td(&make_td(2, 3).unwrap(), GameVariant::Strong).unwrap();
        let r = verify_strategy_exhaustive(&ctx, &mut Td2Xeno, Side::First, Claim::Win).unwrap();
        assert!(r.holds);
        assert_eq!(r.max_side_moves, 2);
    }

    #[test]
    fn explorer_on_ttt() {
        let ctx = GameContext::new(tic_tac_toe_board(), GameVariant::Strong);
        let fixed = explore_score_optimal(&ctx, Some(&TieBreak::Lowest), Some(&TieBreak::Lowest));
        assert_eq!(fixed.outcomes, vec![Outcome::Draw]);
        let all = explore_score_optimal(&ctx, None, None);
        assert!(all.outcomes.contains(&Outcome::Draw));
        assert_eq!(all.value, Outcome::Draw);
    }
}
