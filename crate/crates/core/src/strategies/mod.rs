//! Move-selection strategies and the harness that plays and checks them.
//!
//! A [`Strategy`] maps a position to a vertex for the side to move. The
//! constructive strategies follow fixed proof lines and refuse positions
//! outside them, so an exhaustive check either confirms the line or reports
//! where it breaks.

mod constructive;
mod play;

use std::fmt;

use rand::seq::IteratorRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::designs::TransversalDesign;
use crate::error::{Error, Result};
use crate::hypergraph::{GameState, GameVariant, Hypergraph, Side, TurnSchedule, VertexSet};
use crate::scoring::{vertex_weight, Weight};
use crate::solver::{Solver, SolverConfig};

pub use constructive::{find_scissor, OpheliaHandicap, Scissor, StsXeno, Td2Xeno, Td3Xeno};
pub use play::{
    explore_score_optimal, is_score_optimal, simulate, simulate_from, verify_strategy_exhaustive, MoveRecord, Outcome,
    ScoreOptimalReport, Transcript,
};

/// Board plus the rules and structure a strategy may consult.
#[derive(Clone, Debug)]
pub struct GameContext {
    pub h: Hypergraph,
    pub variant: GameVariant,
    pub schedule: TurnSchedule,
    /// Point groups when the board comes from a transversal design.
    pub groups: Option<Vec<Vec<usize>>>,
}

impl GameContext {
    pub fn new(h: Hypergraph, variant: GameVariant) -> Self {
        GameContext { h, variant, schedule: TurnSchedule::standard(), groups: None }
    }

    /// Board of a transversal design; its groups are not winning sets.
    pub fn for_td(td: &TransversalDesign, variant: GameVariant) -> Result<Self> {
        Ok(GameContext {
            h: td.to_hypergraph(&[])?,
            variant,
            schedule: TurnSchedule::standard(),
            groups: Some(td.groups.clone()),
        })
    }

    pub fn with_schedule(mut self, schedule: TurnSchedule) -> Self {
        self.schedule = schedule;
        self
    }

    pub fn with_groups(mut self, groups: Vec<Vec<usize>>) -> Self {
        self.groups = Some(groups);
        self
    }

    pub fn free(&self, state: &GameState) -> VertexSet {
        self.h.vertices().difference(state.occupied())
    }

    /// Schedule to hand to the solver and verifier (`None` for plain alternation).
    pub fn schedule_opt(&self) -> Option<&TurnSchedule> {
        (!self.schedule.is_standard()).then_some(&self.schedule)
    }

    pub fn group_of(&self, v: usize) -> Option<usize> {
        self.groups.as_ref()?.iter().position(|g| g.contains(&v))
    }

    /// Whether `side` can complete edges in this game.
    pub fn completes_edges(&self, side: Side) -> bool {
        self.variant == GameVariant::Strong || side == Side::First
    }
}

/// Free vertices that complete an edge for `side` at once.
pub fn immediate_wins(h: &Hypergraph, state: &GameState, side: Side) -> VertexSet {
    let mine = state.owned(side);
    let theirs = state.owned(side.other());
    let mut out = VertexSet::EMPTY;
    for &e in h.edges() {
        if !e.is_disjoint(theirs) {
            continue;
        }
        let missing = e.difference(mine);
        if missing.len() == 1 {
            out = out.union(missing);
        }
    }
    out
}

/// Which rule of the three-tier definition a move came from.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Tier {
    Win,
    Block,
    MaxWeight,
}

/// Moves allowed by the three-tier rule for the side to move, and the tier used.
pub fn score_optimal_moves(ctx: &GameContext, state: &GameState) -> (Tier, VertexSet) {
    let side = state.to_move;
    if ctx.completes_edges(side) {
        let wins = immediate_wins(&ctx.h, state, side);
        if !wins.is_empty() {
            return (Tier::Win, wins);
        }
    }
    if ctx.completes_edges(side.other()) {
        let threats = immediate_wins(&ctx.h, state, side.other());
        if !threats.is_empty() {
            return (Tier::Block, threats);
        }
    }
    let free = ctx.free(state);
    let weights: Vec<(usize, Weight)> = free.iter().map(|v| (v, vertex_weight(&ctx.h, state, v))).collect();
    let best = weights.iter().map(|&(_, w)| w).max().unwrap_or(Weight::ZERO);
    (Tier::MaxWeight, weights.iter().filter(|&&(_, w)| w == best).map(|&(v, _)| v).collect())
}

/// How to choose among equally good vertices.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum TieBreak {
    #[default]
    Lowest,
    Highest,
    /// The first listed vertex that qualifies; unlisted vertices follow, lowest first.
    Preference(Vec<usize>),
}

impl TieBreak {
    pub fn pick(&self, options: VertexSet) -> Option<usize> {
        match self {
            TieBreak::Lowest => options.first(),
            TieBreak::Highest => options.iter().next_back(),
            TieBreak::Preference(order) => {
                order.iter().copied().find(|&v| v < 64 && options.contains(v)).or_else(|| options.first())
            }
        }
    }
}

/// A deterministic move rule for one side.
pub trait Strategy {
    fn name(&self) -> String;

    /// Human-readable scope of the strategy.
    fn applicability(&self) -> String {
        "any board".into()
    }

    /// Refuse boards, rules or sides the strategy was not built for.
    fn check(&self, _ctx: &GameContext, _side: Side) -> Result<()> {
        Ok(())
    }

    /// Move for `state.to_move`.
    fn choose(&mut self, ctx: &GameContext, state: &GameState) -> Result<usize>;
}

impl fmt::Debug for dyn Strategy + '_ {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.name())
    }
}

pub(crate) fn not_applicable(name: &str, reason: impl Into<String>) -> Error {
    Error::NotApplicable { name: name.into(), reason: reason.into() }
}

/// Win if possible, else block an immediate loss, else take a vertex of
/// maximum weight.
#[derive(Clone, Debug, Default)]
pub struct ScoreOptimizing {
    pub tiebreak: TieBreak,
}

impl ScoreOptimizing {
    pub fn new(tiebreak: TieBreak) -> Self {
        ScoreOptimizing { tiebreak }
    }
}

impl Strategy for ScoreOptimizing {
    fn name(&self) -> String {
        match &self.tiebreak {
            TieBreak::Lowest => "score".into(),
            TieBreak::Highest => "score-high".into(),
            TieBreak::Preference(_) => "score-pref".into(),
        }
    }

    fn choose(&mut self, ctx: &GameContext, state: &GameState) -> Result<usize> {
        let (_, options) = score_optimal_moves(ctx, state);
        self.tiebreak.pick(options).ok_or(Error::Terminal)
    }
}

/// Plays a fixed list of vertices in order, one per own turn.
#[derive(Clone, Debug)]
pub struct Scripted {
    pub moves: Vec<usize>,
}

impl Strategy for Scripted {
    fn name(&self) -> String {
        format!("script:{}", self.moves.iter().map(|v| v.to_string()).collect::<Vec<_>>().join(","))
    }

    fn choose(&mut self, _ctx: &GameContext, state: &GameState) -> Result<usize> {
        let played = state.owned(state.to_move).len();
        self.moves
            .get(played)
            .copied()
            .ok_or_else(|| not_applicable(&self.name(), format!("script has no move number {}", played + 1)))
    }
}

/// Uniformly random free vertex, seeded by the position so the rule stays a
/// function of the state.
#[derive(Clone, Debug)]
pub struct RandomMover {
    pub seed: u64,
}

impl Strategy for RandomMover {
    fn name(&self) -> String {
        format!("random:{}", self.seed)
    }

    fn choose(&mut self, ctx: &GameContext, state: &GameState) -> Result<usize> {
        let key =
            self.seed ^ state.first.bits().rotate_left(17) ^ state.second.bits().wrapping_mul(0x9E37_79B9_7F4A_7C15);
        let mut rng = ChaCha8Rng::seed_from_u64(key);
        ctx.free(state).iter().choose(&mut rng).ok_or(Error::Terminal)
    }
}

/// Optimal play from the exact solver.
pub struct SolverBacked {
    config: SolverConfig,
    solver: Option<Solver>,
}

impl SolverBacked {
    pub fn new(config: SolverConfig) -> Self {
        SolverBacked { config, solver: None }
    }
}

impl Default for SolverBacked {
    fn default() -> Self {
        SolverBacked::new(SolverConfig::default())
    }
}

impl Strategy for SolverBacked {
    fn name(&self) -> String {
        "solver".into()
    }

    fn choose(&mut self, ctx: &GameContext, state: &GameState) -> Result<usize> {
        let solver = match &mut self.solver {
            Some(s) => s,
            slot => slot.insert(Solver::new(&ctx.h, ctx.variant, ctx.schedule_opt().cloned(), self.config.clone())?),
        };
        solver.best_move(state)
    }
}

/// Build a strategy from its command-line name.
///
/// Names: `score`, `score-high`, `score-pref:v,v,...`, `sts-xeno`, `td2-xeno`,
/// `td3-xeno`, `ophelia-handicap`, `random`, `solver`, `script:v,v,...`.
pub fn strategy_by_name(name: &str, seed: u64) -> Result<Box<dyn Strategy>> {
    let (head, arg) = match name.split_once(':') {
        Some((h, a)) => (h, Some(a)),
        None => (name, None),
    };
    let list = |a: Option<&str>| -> Result<Vec<usize>> {
        a.unwrap_or("")
            .split(',')
            .filter(|t| !t.trim().is_empty())
            .map(|t| t.trim().parse().map_err(|_| Error::InvalidParameters(format!("bad vertex {t:?}"))))
            .collect()
    };
    Ok(match head {
        "score" => Box::new(ScoreOptimizing::default()),
        "score-high" => Box::new(ScoreOptimizing::new(TieBreak::Highest)),
        "score-pref" => Box::new(ScoreOptimizing::new(TieBreak::Preference(list(arg)?))),
        "sts-xeno" => Box::new(StsXeno),
        "td2-xeno" => Box::new(Td2Xeno),
        "td3-xeno" => Box::new(Td3Xeno),
        "ophelia-handicap" => Box::new(OpheliaHandicap),
        "random" => Box::new(RandomMover {
            seed: arg
                .map_or(Ok(seed), |a| a.parse())
                .map_err(|_| Error::InvalidParameters(format!("bad seed in {name:?}")))?,
        }),
        "solver" => Box::new(SolverBacked::default()),
        "script" => Box::new(Scripted { moves: list(arg)? }),
        _ => return Err(Error::InvalidParameters(format!("unknown strategy {name:?}"))),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hypergraph::tic_tac_toe_board;
    use crate::solver::state_of;

    fn ttt() -> GameContext {
        GameContext::new(tic_tac_toe_board(), GameVariant::Strong)
    }

    #[test]
    fn tiers_in_order() {
        let ctx = ttt();
        // X holds cells 1,2 and O holds 4,5: X completes 123.
        let s = state_of(&[0, 1], &[3, 4]).unwrap();
        assert_eq!(score_optimal_moves(&ctx, &s), (Tier::Win, VertexSet::singleton(2)));
        // O to move, no own win, must block 123.
        let s = state_of(&[0, 1], &[4]).unwrap();
        assert_eq!(score_optimal_moves(&ctx, &s), (Tier::Block, VertexSet::singleton(2)));
        let s = state_of(&[], &[]).unwrap();
        assert_eq!(score_optimal_moves(&ctx, &s), (Tier::MaxWeight, VertexSet::singleton(4)));
    }

    #[test]
    fn centre_answers_the_corner() {
        // After X takes cell 1 the centre carries the most weight.
        let ctx = ttt();
        let s = state_of(&[0], &[]).unwrap();
        let (tier, options) = score_optimal_moves(&ctx, &s);
        assert_eq!(tier, Tier::MaxWeight);
        assert_eq!(options, VertexSet::singleton(4));
    }

    #[test]
    fn tie_breaks() {
        let opts: VertexSet = [2, 5, 7].into_iter().collect();
        assert_eq!(TieBreak::Lowest.pick(opts), Some(2));
        assert_eq!(TieBreak::Highest.pick(opts), Some(7));
        assert_eq!(TieBreak::Preference(vec![9, 5, 2]).pick(opts), Some(5));
        assert_eq!(TieBreak::Preference(vec![9]).pick(opts), Some(2));
        assert_eq!(TieBreak::Lowest.pick(VertexSet::EMPTY), None);
    }

    #[test]
    fn breaker_never_claims_a_win() {
        let ctx = GameContext::new(tic_tac_toe_board(), GameVariant::MakerBreaker);
        let s = GameState {
            first: [0, 1].into_iter().collect(),
            second: [3, 4].into_iter().collect(),
            to_move: Side::Second,
        };
        assert_eq!(score_optimal_moves(&ctx, &s), (Tier::Block, VertexSet::singleton(2)));
    }

    #[test]
    fn random_is_a_function_of_the_state() {
        let ctx = ttt();
        let s = state_of(&[4], &[]).unwrap();
        let a = RandomMover { seed: 3 }.choose(&ctx, &s).unwrap();
        let b = RandomMover { seed: 3 }.choose(&ctx, &s).unwrap();
        assert_eq!(a, b);
        assert!(ctx.free(&s).contains(a));
    }

    #[test]
    fn scripted_runs_out() {
        let ctx = ttt();
        let mut s = Scripted { moves: vec![4] };
        assert_eq!(s.choose(&ctx, &GameState::empty()).unwrap(), 4);
        assert!(s.choose(&ctx, &state_of(&[4], &[0]).unwrap()).is_err());
    }

    #[test]
    fn names_round_trip() {
        for n in ["score", "score-high", "sts-xeno", "td2-xeno", "td3-xeno", "ophelia-handicap", "solver"] {
            assert_eq!(strategy_by_name(n, 0).unwrap().name(), n);
        }
        assert_eq!(strategy_by_name("script:1,2", 0).unwrap().name(), "script:1,2");
        assert_eq!(strategy_by_name("random", 5).unwrap().name(), "random:5");
        assert!(strategy_by_name("nope", 0).is_err());
    }
}
