//! Strategy certificates and exhaustive adversary checks.

use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use super::engine::Turn;
use super::{Solver, SolverConfig};
use crate::error::{Error, Result};
use crate::hypergraph::{GameState, GameVariant, Hypergraph, Side, TurnSchedule, VertexSet};

/// What a certificate or strategy promises for its side.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Claim {
    /// The side completes an edge (Maker-Breaker, second player: Breaker wins).
    Win,
    /// The side never loses: a win or a draw in the strong game.
    NotLose,
}

/// One prescribed move.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CertificateMove {
    pub first: VertexSet,
    pub second: VertexSet,
    #[serde(rename = "move")]
    pub vertex: usize,
}

/// A move for the certified side at every position reachable when it follows
/// the certificate.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct StrategyCertificate {
    pub side: Side,
    pub variant: GameVariant,
    pub claim: Claim,
    pub moves: Vec<CertificateMove>,
}

impl StrategyCertificate {
    pub fn len(&self) -> usize {
        self.moves.len()
    }

    pub fn is_empty(&self) -> bool {
        self.moves.is_empty()
    }

    fn index(&self) -> HashMap<(u64, u64), usize> {
        self.moves.iter().map(|m| ((m.first.bits(), m.second.bits()), m.vertex)).collect()
    }
}

/// Result of an exhaustive check.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct VerifyReport {
    pub holds: bool,
    /// Positions examined.
    pub positions: usize,
    /// Largest number of moves the checked side made on any line.
    pub max_side_moves: u32,
    /// A line (side, vertex) on which the claim fails.
    pub counterexample: Option<Vec<(Side, usize)>>,
}

fn turn_for(schedule: Option<&TurnSchedule>, state: &GameState) -> Turn {
    match schedule.filter(|s| !s.is_standard()) {
        Some(s) => Turn { schedule: Some(s.clone()), parity: 0 },
        None => {
            let first_even = state.ply().is_multiple_of(2) == (state.to_move == Side::First);
            Turn { schedule: None, parity: if first_even { 0 } else { 1 } }
        }
    }
}

/// Did `side` get what it claimed, given the finished game's winner?
fn satisfied(variant: GameVariant, side: Side, claim: Claim, winner: Option<Side>) -> bool {
    match variant {
        GameVariant::MakerBreaker => {
            let maker_won = winner == Some(Side::First);
            (side == Side::First) == maker_won
        }
        GameVariant::Strong => match claim {
            Claim::Win => winner == Some(side),
            Claim::NotLose => winner != Some(side.other()),
        },
    }
}

struct Checker<'a, F> {
    h: &'a Hypergraph,
    variant: GameVariant,
    side: Side,
    claim: Claim,
    turn: Turn,
    policy: F,
    seen: HashMap<(u64, u64), (bool, u32)>,
    path: Vec<(Side, usize)>,
    counterexample: Option<Vec<(Side, usize)>>,
}

impl<F: FnMut(&GameState) -> Result<usize>> Checker<'_, F> {
    /// Winner if the game is over in `state` (`Some(None)` for a draw).
    fn finished(&self, state: &GameState, last: Option<(Side, usize)>) -> Option<Option<Side>> {
        if let Some((who, v)) = last {
            let mine = state.owned(who);
            if self.h.edges().iter().any(|e| e.contains(v) && e.is_subset(mine))
                && (self.variant == GameVariant::Strong || who == Side::First)
            {
                return Some(Some(who));
            }
        }
        let free = self.h.vertices().difference(state.occupied());
        match self.variant {
            GameVariant::Strong => free.is_empty().then_some(None),
            GameVariant::MakerBreaker => {
                let blocked = self.h.edges().iter().all(|e| !e.is_disjoint(state.second));
                (free.is_empty() || blocked).then_some(Some(Side::Second))
            }
        }
    }

    fn visit(&mut self, state: GameState, last: Option<(Side, usize)>) -> Result<(bool, u32)> {
        if let Some(winner) = self.finished(&state, last) {
            let ok = satisfied(self.variant, self.side, self.claim, winner);
            if !ok && self.counterexample.is_none() {
                self.counterexample = Some(self.path.clone());
            }
            return Ok((ok, 0));
        }
        let key = (state.first.bits(), state.second.bits());
        if let Some(&r) = self.seen.get(&key) {
            return Ok(r);
        }
        let mover = state.to_move;
        let free = self.h.vertices().difference(state.occupied());
        let result = if mover == self.side {
            let v = (self.policy)(&state)?;
            if !free.contains(v) {
                return Err(Error::IllegalMove { name: "certified side".into(), vertex: v });
            }
            let (ok, depth) = self.step(&state, v)?;
            (ok, depth + 1)
        } else {
            let mut all_ok = true;
            let mut deepest = 0;
            for v in free.iter() {
                let (ok, depth) = self.step(&state, v)?;
                deepest = deepest.max(depth);
                if !ok {
                    all_ok = false;
                    break;
                }
            }
            (all_ok, deepest)
        };
        self.seen.insert(key, result);
        Ok(result)
    }

    fn step(&mut self, state: &GameState, v: usize) -> Result<(bool, u32)> {
        let mover = state.to_move;
        let mut next = *state;
        match mover {
            Side::First => next.first.insert(v),
            Side::Second => next.second.insert(v),
        }
        next.to_move = self.turn.side(next.ply());
        self.path.push((mover, v));
        let r = self.visit(next, Some((mover, v)));
        self.path.pop();
        r
    }
}

/// Play `policy` for `side` against every possible opponent line from `state`
/// and check that `claim` holds on all of them.
#[allow(clippy::too_many_arguments)]
pub fn verify_policy<F>(
    h: &Hypergraph,
    variant: GameVariant,
    side: Side,
    claim: Claim,
    state: &GameState,
    schedule: Option<&TurnSchedule>,
    policy: F,
) -> Result<VerifyReport>
where
    F: FnMut(&GameState) -> Result<usize>,
{
    let mut checker = Checker {
        h,
        variant,
        side,
        claim,
        turn: turn_for(schedule, state),
        policy,
        seen: HashMap::new(),
        path: Vec::new(),
        counterexample: None,
    };
    let (holds, max_side_moves) = checker.visit(*state, None)?;
    Ok(VerifyReport {
        holds,
        positions: checker.seen.len(),
        max_side_moves,
        counterexample: if holds { None } else { checker.counterexample },
    })
}

/// Replay a certificate against every opponent reply.
pub fn verify_certificate(
    h: &Hypergraph,
    certificate: &StrategyCertificate,
    state: &GameState,
    schedule: Option<&TurnSchedule>,
) -> Result<VerifyReport> {
    let index = certificate.index();
    verify_policy(h, certificate.variant, certificate.side, certificate.claim, state, schedule, |s| {
        index
            .get(&(s.first.bits(), s.second.bits()))
            .copied()
            .ok_or_else(|| Error::CertificateMissing(format!("X={:?} O={:?}", s.first, s.second)))
    })
}

/// Build a certificate for `side` from `state` using the exact solver. The
/// claim is `Win` if the side can force one, otherwise `NotLose` if it can
/// avoid losing.
pub fn extract_certificate(
    h: &Hypergraph,
    variant: GameVariant,
    side: Side,
    state: &GameState,
    schedule: Option<&TurnSchedule>,
    config: &SolverConfig,
) -> Result<StrategyCertificate> {
    let mut solver = Solver::new(h, variant, schedule.cloned(), config.clone())?;
    let budget_err = || Error::InvalidState("budget exhausted while certifying".into());
    let claim = match variant {
        GameVariant::MakerBreaker => {
            let maker = solver.forces_win(Side::First, state)?.ok_or_else(budget_err)?.0;
            match (side, maker) {
                (Side::First, true) => Claim::Win,
                (Side::Second, false) => Claim::Win,
                _ => return Err(Error::NothingToCertify(format!("{side} loses the Maker-Breaker game"))),
            }
        }
        GameVariant::Strong => {
            if solver.forces_win(side, state)?.ok_or_else(budget_err)?.0 {
                Claim::Win
            } else if !solver.forces_win(side.other(), state)?.ok_or_else(budget_err)?.0 {
                Claim::NotLose
            } else {
                return Err(Error::NothingToCertify(format!("{side} loses the strong game")));
            }
        }
    };
    let mut moves = HashMap::new();
    let mut stack = vec![*state];
    let mut visited = std::collections::HashSet::new();
    while let Some(st) = stack.pop() {
        if !visited.insert((st.first.bits(), st.second.bits())) {
            continue;
        }
        let free = h.vertices().difference(st.occupied());
        let over = free.is_empty()
            || h.edges().iter().any(|e| e.is_subset(st.first))
            || (variant == GameVariant::Strong && h.edges().iter().any(|e| e.is_subset(st.second)))
            || (variant == GameVariant::MakerBreaker && h.edges().iter().all(|e| !e.is_disjoint(st.second)));
        if over {
            continue;
        }
        if st.to_move == side {
            let v = certified_move(&mut solver, &st, side, claim)?.ok_or_else(budget_err)?;
            moves.insert((st.first.bits(), st.second.bits()), v);
            stack.push(solver.child(&st, v));
        } else {
            for v in free.iter().rev() {
                stack.push(solver.child(&st, v));
            }
        }
    }
    let mut moves: Vec<CertificateMove> = moves
        .into_iter()
        .map(|((f, s), v)| CertificateMove {
            first: VertexSet::from_bits(f),
            second: VertexSet::from_bits(s),
            vertex: v,
        })
        .collect();
    moves.sort_by_key(|m| (m.first.len() + m.second.len(), m.first, m.second));
    Ok(StrategyCertificate { side, variant, claim, moves })
}

fn certified_move(solver: &mut Solver, st: &GameState, side: Side, claim: Claim) -> Result<Option<usize>> {
    let h = solver.hypergraph().clone();
    let free = h.vertices().difference(st.occupied());
    let completing = free.iter().find(|&v| {
        let mine = st.owned(side).with(v);
        h.edges().iter().any(|e| e.contains(v) && e.is_subset(mine))
    });
    let variant = solver.variant();
    let wins_by_completion = variant == GameVariant::Strong || side == Side::First;
    if let (Some(v), true) = (completing, wins_by_completion) {
        return Ok(Some(v));
    }
    for v in free.iter() {
        let child = solver.child(st, v);
        let good = match (variant, claim) {
            (GameVariant::MakerBreaker, _) if side == Side::Second => {
                solver.forces_win(Side::First, &child)?.map(|r| !r.0)
            }
            (_, Claim::Win) => solver.forces_win(side, &child)?.map(|r| r.0),
            (_, Claim::NotLose) => solver.forces_win(side.other(), &child)?.map(|r| !r.0),
        };
        match good {
            Some(true) => return Ok(Some(v)),
            Some(false) => {}
            None => return Ok(None),
        }
    }
    Err(Error::InvalidState("no move keeps the certified value".into()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::designs::make_sts;
    use crate::hypergraph::fixture_h;

    #[test]
    fn sts7_certificate_verifies() {
        let h = make_sts(7).unwrap().to_hypergraph().unwrap();
        let cert = extract_certificate(
            &h,
            GameVariant::Strong,
            Side::First,
            &GameState::empty(),
            None,
            &SolverConfig::default(),
        )
        .unwrap();
        assert_eq!(cert.claim, Claim::Win);
        let report = verify_certificate(&h, &cert, &GameState::empty(), None).unwrap();
        assert!(report.holds);
    }

    #[test]
    fn illegal_move_is_an_error() {
        let h = make_sts(7).unwrap().to_hypergraph().unwrap();
        let mut cert = extract_certificate(
            &h,
            GameVariant::Strong,
            Side::First,
            &GameState::empty(),
            None,
            &SolverConfig::default(),
        )
        .unwrap();
        let last = cert.moves.len() - 1;
        let taken = cert.moves[last].first.first().unwrap();
        cert.moves[last].vertex = taken;
        assert!(matches!(verify_certificate(&h, &cert, &GameState::empty(), None), Err(Error::IllegalMove { .. })));
    }

    #[test]
    fn h4_breaker_pairing() {
        // x1..x6 = 0..5, edges 012, 234, 45; every edge contains one of the
        // pairs {0,1}, {2,3}, {4,5}.
        let h = fixture_h(4).unwrap();
        let policy = |s: &GameState| -> Result<usize> {
            let free = h.vertices().difference(s.occupied());
            for (a, b) in [(0, 1), (2, 3), (4, 5)] {
                for (mine, answer) in [(a, b), (b, a)] {
                    if s.first.contains(mine) && free.contains(answer) {
                        return Ok(answer);
                    }
                }
            }
            free.first().ok_or(Error::Terminal)
        };
        let report =
            verify_policy(&h, GameVariant::MakerBreaker, Side::Second, Claim::Win, &GameState::empty(), None, policy)
                .unwrap();
        assert!(report.holds, "{:?}", report.counterexample);
    }

    #[test]
    fn missing_entry_is_an_error() {
        let h = fixture_h(7).unwrap();
        let cert = StrategyCertificate {
            side: Side::Second,
            variant: GameVariant::MakerBreaker,
            claim: Claim::Win,
            moves: vec![],
        };
        assert!(matches!(verify_certificate(&h, &cert, &GameState::empty(), None), Err(Error::CertificateMissing(_))));
    }
}
