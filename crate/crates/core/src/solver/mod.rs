//! Exact solving of strong and Maker-Breaker games.
//!
//! Every answer reduces to the question "can side S force a completion from
//! here?", answered by a depth-first search with threat forcing, Erdős–Selfridge
//! cut-offs, dead-vertex pruning, orbit pruning near the root and a
//! transposition table of exact facts. A strong-game position is a win for the
//! mover if the mover can force a completion, a loss if the opponent can, and
//! a draw otherwise.

mod certificate;
mod engine;
mod table;

use std::fmt;
use std::time::{Duration, Instant};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hypergraph::{GameState, GameVariant, Hypergraph, Side, TurnSchedule, VertexSet, AUTOMORPHISM_VERTEX_BOUND};
use engine::{Engine, Options, Turn};

pub use certificate::{
    extract_certificate, verify_certificate, verify_policy, Claim, StrategyCertificate, VerifyReport,
};

/// Limits on one solve; exceeding either yields [`GameValue::Unknown`].
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Budget {
    pub max_nodes: Option<u64>,
    pub max_time: Option<Duration>,
}

impl Budget {
    pub fn unlimited() -> Self {
        Budget::default()
    }

    pub fn nodes(n: u64) -> Self {
        Budget { max_nodes: Some(n), max_time: None }
    }

    pub fn time(t: Duration) -> Self {
        Budget { max_nodes: None, max_time: Some(t) }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SolverConfig {
    /// Use the transposition table.
    pub memo: bool,
    /// log2 of the number of table buckets (two entries each).
    pub table_bits: u32,
    /// Reduce moves by automorphism orbits at plies closer than this to the root.
    pub orbit_depth: usize,
    /// Skip orbit pruning on boards larger than this.
    pub orbit_vertex_bound: usize,
    /// Ignore vertices that lie on no edge either side can still complete.
    pub dead_vertex_pruning: bool,
    /// Cut off positions whose Erdős–Selfridge score proves the opponent safe.
    pub es_pruning: bool,
    /// Iterative deepening on the winner's move count up to this depth, then unbounded.
    pub deepening_cap: u8,
    /// Root-parallel search when greater than 1.
    pub workers: usize,
    pub budget: Budget,
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig {
            memo: true,
            table_bits: 20,
            orbit_depth: 2,
            orbit_vertex_bound: AUTOMORPHISM_VERTEX_BOUND,
            dead_vertex_pruning: true,
            es_pruning: true,
            deepening_cap: 4,
            workers: 1,
            budget: Budget::default(),
        }
    }
}

impl SolverConfig {
    /// No memoization, pruning or symmetry: plain threat-forcing search.
    pub fn plain() -> Self {
        SolverConfig {
            memo: false,
            orbit_depth: 0,
            dead_vertex_pruning: false,
            es_pruning: false,
            deepening_cap: 0,
            ..SolverConfig::default()
        }
    }

    pub fn with_budget(mut self, budget: Budget) -> Self {
        self.budget = budget;
        self
    }

    fn options(&self) -> Options {
        Options {
            memo: self.memo,
            table_bits: self.table_bits,
            orbit_depth: self.orbit_depth,
            orbit_vertex_bound: self.orbit_vertex_bound,
            dead_vertex_pruning: self.dead_vertex_pruning,
            es_pruning: self.es_pruning,
            deepening_cap: self.deepening_cap,
        }
    }
}

/// Game-theoretic value of a position.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GameValue {
    WinForToMove,
    Draw,
    LossForToMove,
    MakerWin,
    BreakerWin,
    /// The budget ran out before the value was established.
    Unknown,
}

impl GameValue {
    /// Winner of a strong-game value, given who was to move.
    pub fn strong_winner(self, to_move: Side) -> Option<Side> {
        match self {
            GameValue::WinForToMove => Some(to_move),
            GameValue::LossForToMove => Some(to_move.other()),
            _ => None,
        }
    }

    pub fn is_known(self) -> bool {
        self != GameValue::Unknown
    }
}

impl fmt::Display for GameValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            GameValue::WinForToMove => "win",
            GameValue::Draw => "draw",
            GameValue::LossForToMove => "loss",
            GameValue::MakerWin => "maker-win",
            GameValue::BreakerWin => "breaker-win",
            GameValue::Unknown => "unknown",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SolveResult {
    pub value: GameValue,
    /// Upper bound on the moves the winner needs, when a win was found by
    /// bounded search.
    pub win_depth: Option<u32>,
    pub best_move: Option<usize>,
    pub nodes_expanded: u64,
    pub table_hits: u64,
    #[serde(with = "duration_secs")]
    pub elapsed: Duration,
}

mod duration_secs {
    use serde::{Deserialize, Deserializer, Serializer};
    use std::time::Duration;

    pub fn serialize<S: Serializer>(d: &Duration, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_f64(d.as_secs_f64())
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Duration, D::Error> {
        Ok(Duration::from_secs_f64(f64::deserialize(d)?))
    }
}

/// Outcome of a position before any search.
enum Terminal {
    Decided(GameValue),
    Open,
}

/// A reusable solver for one board, variant and schedule. Tables persist
/// across queries, so solving many related positions is cheap.
pub struct Solver {
    h: Hypergraph,
    variant: GameVariant,
    schedule: Option<TurnSchedule>,
    config: SolverConfig,
    engines: Vec<Engine>,
    nodes: u64,
    hits: u64,
}

impl Solver {
    pub fn new(
        h: &Hypergraph,
        variant: GameVariant,
        schedule: Option<TurnSchedule>,
        config: SolverConfig,
    ) -> Result<Self> {
        if variant == GameVariant::Strong && h.has_empty_edge() {
            return Err(Error::InvalidParameters("strong game on a hypergraph with an empty edge".into()));
        }
        let schedule = schedule.filter(|s| !s.is_standard());
        Ok(Solver { h: h.clone(), variant, schedule, config, engines: Vec::new(), nodes: 0, hits: 0 })
    }

    pub fn hypergraph(&self) -> &Hypergraph {
        &self.h
    }

    pub fn variant(&self) -> GameVariant {
        self.variant
    }

    pub fn schedule(&self) -> Option<&TurnSchedule> {
        self.schedule.as_ref()
    }

    /// Total nodes expanded and table hits over all queries so far.
    pub fn stats(&self) -> (u64, u64) {
        (self.nodes, self.hits)
    }

    /// Side to move after `ply` moves, for play continuing from `state`.
    pub fn side_at(&self, state: &GameState, ply: usize) -> Side {
        self.turn_for(state).side(ply)
    }

    fn turn_for(&self, state: &GameState) -> Turn {
        match &self.schedule {
            Some(s) => Turn { schedule: Some(s.clone()), parity: 0 },
            None => {
                let first_even = state.ply().is_multiple_of(2) == (state.to_move == Side::First);
                Turn { schedule: None, parity: if first_even { 0 } else { 1 } }
            }
        }
    }

    fn check_state(&self, state: &GameState) -> Result<()> {
        if !state.first.is_disjoint(state.second) {
            return Err(Error::InvalidState("players share a vertex".into()));
        }
        if let Some(v) = state.occupied().difference(self.h.vertices()).first() {
            return Err(Error::VertexOutOfRange { vertex: v, count: self.h.vertex_count() });
        }
        if let Some(s) = &self.schedule {
            if s.side_at(state.ply()) != state.to_move {
                return Err(Error::InvalidState(format!(
                    "schedule gives {} to move at ply {}",
                    s.side_at(state.ply()),
                    state.ply()
                )));
            }
        }
        Ok(())
    }

    fn terminal(&self, state: &GameState) -> Result<Terminal> {
        let first_done = self.h.edges().iter().any(|e| e.is_subset(state.first));
        match self.variant {
            GameVariant::MakerBreaker => {
                if first_done {
                    return Ok(Terminal::Decided(GameValue::MakerWin));
                }
                let free = self.h.vertices().difference(state.occupied());
                if free.is_empty() || self.h.edges().iter().all(|e| !e.is_disjoint(state.second)) {
                    return Ok(Terminal::Decided(GameValue::BreakerWin));
                }
            }
            GameVariant::Strong => {
                let second_done = self.h.edges().iter().any(|e| e.is_subset(state.second));
                match (first_done, second_done) {
                    (true, true) => return Err(Error::InvalidState("both players completed an edge".into())),
                    (false, false) => {}
                    (f, _) => {
                        let winner = if f { Side::First } else { Side::Second };
                        let v =
                            if winner == state.to_move { GameValue::WinForToMove } else { GameValue::LossForToMove };
                        return Ok(Terminal::Decided(v));
                    }
                }
                if state.occupied() == self.h.vertices() {
                    return Ok(Terminal::Decided(GameValue::Draw));
                }
            }
        }
        Ok(Terminal::Open)
    }

    fn engine(&mut self, side: Side, turn: Turn) -> &mut Engine {
        let pos = self.engines.iter().position(|e| e.s_side() == side && *e.turn() == turn);
        match pos {
            Some(i) => &mut self.engines[i],
            None => {
                let strong = self.variant == GameVariant::Strong;
                self.engines.push(Engine::new(&self.h, strong, side, turn, self.config.options()));
                self.engines.last_mut().expect("just pushed")
            }
        }
    }

    /// Whether `side` can force a completion from `state` (`None` if the budget ran out).
    /// In the Maker-Breaker game only the first player completes edges.
    pub fn forces_win(&mut self, side: Side, state: &GameState) -> Result<Option<(bool, Option<u32>)>> {
        self.check_state(state)?;
        if self.variant == GameVariant::MakerBreaker && side == Side::Second {
            return Ok(Some((false, None)));
        }
        if let Terminal::Decided(v) = self.terminal(state)? {
            let won = match v {
                GameValue::MakerWin => side == Side::First,
                GameValue::WinForToMove => side == state.to_move,
                GameValue::LossForToMove => side != state.to_move,
                _ => false,
            };
            return Ok(Some((won, won.then_some(0))));
        }
        let turn = self.turn_for(state);
        let budget = self.config.budget;
        let workers = self.config.workers;
        let deadline = budget.max_time.map(|t| Instant::now() + t);
        let engine = self.engine(side, turn);
        let (n0, h0) = (engine.nodes, engine.hits);
        engine.set_limits(budget.max_nodes.map_or(u64::MAX, |n| n0.saturating_add(n)), deadline);
        let (s, o) = match side {
            Side::First => (state.first.bits(), state.second.bits()),
            Side::Second => (state.second.bits(), state.first.bits()),
        };
        let result = if workers > 1 {
            let pool = rayon::ThreadPoolBuilder::new().num_threads(workers).build();
            match pool {
                Ok(pool) => pool.install(|| engine.run_parallel(s, o)),
                Err(_) => engine.run_parallel(s, o),
            }
        } else {
            engine.run(s, o)
        };
        let (dn, dh) = (engine.nodes - n0, engine.hits - h0);
        self.nodes += dn;
        self.hits += dh;
        Ok(result.map(|(w, d)| (w, d.map(u32::from))))
    }

    /// Value of `state` without a best move.
    pub fn value(&mut self, state: &GameState) -> Result<(GameValue, Option<u32>)> {
        self.check_state(state)?;
        if let Terminal::Decided(v) = self.terminal(state)? {
            return Ok((v, None));
        }
        match self.variant {
            GameVariant::MakerBreaker => Ok(match self.forces_win(Side::First, state)? {
                None => (GameValue::Unknown, None),
                Some((true, d)) => (GameValue::MakerWin, d),
                Some((false, _)) => (GameValue::BreakerWin, None),
            }),
            GameVariant::Strong => {
                let me = state.to_move;
                match self.forces_win(me, state)? {
                    None => return Ok((GameValue::Unknown, None)),
                    Some((true, d)) => return Ok((GameValue::WinForToMove, d)),
                    Some((false, _)) => {}
                }
                Ok(match self.forces_win(me.other(), state)? {
                    None => (GameValue::Unknown, None),
                    Some((true, d)) => (GameValue::LossForToMove, d),
                    Some((false, _)) => (GameValue::Draw, None),
                })
            }
        }
    }

    /// The state after the mover takes `v`.
    pub fn child(&self, state: &GameState, v: usize) -> GameState {
        let mut next = *state;
        match state.to_move {
            Side::First => next.first.insert(v),
            Side::Second => next.second.insert(v),
        }
        next.to_move = self.turn_for(state).side(next.ply());
        next
    }

    /// Whether the mover completes an edge by taking `v`.
    fn completes(&self, state: &GameState, v: usize) -> bool {
        let mine = state.owned(state.to_move).with(v);
        self.h.edges().iter().any(|e| e.contains(v) && e.is_subset(mine))
    }

    /// Does the move keep the value `value` for the mover?
    fn realizes(&mut self, state: &GameState, v: usize, value: GameValue) -> Result<Option<bool>> {
        let me = state.to_move;
        let child = self.child(state, v);
        Ok(match (self.variant, value) {
            (GameVariant::Strong, GameValue::WinForToMove) => {
                if self.completes(state, v) {
                    Some(true)
                } else {
                    self.forces_win(me, &child)?.map(|r| r.0)
                }
            }
            (GameVariant::Strong, GameValue::Draw) => self.forces_win(me.other(), &child)?.map(|r| !r.0),
            (GameVariant::MakerBreaker, GameValue::MakerWin) if me == Side::First => {
                self.forces_win(Side::First, &child)?.map(|r| r.0)
            }
            (GameVariant::MakerBreaker, GameValue::BreakerWin) if me == Side::Second => {
                self.forces_win(Side::First, &child)?.map(|r| !r.0)
            }
            _ => Some(true),
        })
    }

    /// Lowest-index move realizing `value` (an immediate completion first, when winning).
    fn pick_move(&mut self, state: &GameState, value: GameValue) -> Result<Option<usize>> {
        let free = self.h.vertices().difference(state.occupied());
        if free.is_empty() || !value.is_known() {
            return Ok(None);
        }
        if matches!(value, GameValue::WinForToMove | GameValue::MakerWin) {
            if let Some(v) = free.iter().find(|&v| self.completes(state, v)) {
                if value == GameValue::WinForToMove || state.to_move == Side::First {
                    return Ok(Some(v));
                }
            }
        }
        for v in free.iter() {
            match self.realizes(state, v, value)? {
                Some(true) => return Ok(Some(v)),
                Some(false) => {}
                None => return Ok(None),
            }
        }
        Err(Error::InvalidState("no move realizes the computed value".into()))
    }

    /// Full solve: value, best move and statistics.
    pub fn solve(&mut self, state: &GameState) -> Result<SolveResult> {
        let start = Instant::now();
        let (n0, h0) = (self.nodes, self.hits);
        let (value, win_depth) = self.value(state)?;
        let best_move = match self.terminal(state)? {
            Terminal::Decided(_) => None,
            Terminal::Open => self.pick_move(state, value)?,
        };
        Ok(SolveResult {
            value,
            win_depth,
            best_move,
            nodes_expanded: self.nodes - n0,
            table_hits: self.hits - h0,
            elapsed: start.elapsed(),
        })
    }

    /// A move realizing the value of `state`; errors on a finished position.
    pub fn best_move(&mut self, state: &GameState) -> Result<usize> {
        if let Terminal::Decided(_) = self.terminal(state)? {
            return Err(Error::Terminal);
        }
        let (value, _) = self.value(state)?;
        if !value.is_known() {
            return Err(Error::InvalidState("budget exhausted".into()));
        }
        self.pick_move(state, value)?.ok_or(Error::Terminal)
    }
}

/// Solve one position from scratch.
pub fn solve(
    h: &Hypergraph,
    variant: GameVariant,
    state: &GameState,
    schedule: Option<&TurnSchedule>,
    config: &SolverConfig,
) -> Result<SolveResult> {
    Solver::new(h, variant, schedule.cloned(), config.clone())?.solve(state)
}

/// Best move for the mover in one position.
pub fn best_move(
    h: &Hypergraph,
    variant: GameVariant,
    state: &GameState,
    schedule: Option<&TurnSchedule>,
    config: &SolverConfig,
) -> Result<usize> {
    Solver::new(h, variant, schedule.cloned(), config.clone())?.best_move(state)
}

/// Convenience: the value of the empty board under standard alternation.
pub fn solve_empty(h: &Hypergraph, variant: GameVariant) -> Result<SolveResult> {
    solve(h, variant, &GameState::empty(), None, &SolverConfig::default())
}

/// Helper for tests and tools: a state from explicit move sets under standard alternation.
pub fn state_of(first: &[usize], second: &[usize]) -> Result<GameState> {
    GameState::from_sets(first.iter().copied().collect::<VertexSet>(), second.iter().copied().collect())
}
