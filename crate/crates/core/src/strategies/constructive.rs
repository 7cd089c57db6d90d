//! Scissors and the proof-line strategies for triple systems and transversal
//! designs.
//!
//! Each strategy plays, in order: an immediate win, a block of the opponent's
//! immediate win, the pivot of a scissor, and otherwise the opening move its
//! proof line prescribes. A position that none of these covers is an error.

use serde::{Deserialize, Serialize};

use super::{immediate_wins, not_applicable, GameContext, Strategy};
use crate::error::Result;
use crate::hypergraph::{GameState, GameVariant, Hypergraph, Side, TurnSchedule, VertexSet};

/// A free pivot `x` with two edges through it, each missing only `x` and one
/// other vertex, free of the opponent, with different other vertices. Taking
/// `x` leaves two wins the opponent cannot both block.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Scissor {
    pub side: Side,
    pub pivot: usize,
    /// Indices of the two witness edges.
    pub edges: [usize; 2],
    /// Vertices of each witness edge already held by `side`.
    pub owned: [VertexSet; 2],
    /// The vertex completing each witness edge once the pivot is taken.
    pub finishes: [usize; 2],
}

impl Scissor {
    /// Check the witness against the board and the position.
    pub fn holds(&self, h: &Hypergraph, state: &GameState) -> bool {
        let mine = state.owned(self.side);
        let theirs = state.owned(self.side.other());
        if state.occupied().contains(self.pivot) || self.edges[0] == self.edges[1] {
            return false;
        }
        if self.finishes[0] == self.finishes[1] {
            return false;
        }
        (0..2).all(|i| {
            let e = h.edge(self.edges[i]);
            e.is_disjoint(theirs)
                && e.contains(self.pivot)
                && e.contains(self.finishes[i])
                && !state.occupied().contains(self.finishes[i])
                && e.intersection(mine) == self.owned[i]
                && e.difference(mine) == VertexSet::singleton(self.pivot).with(self.finishes[i])
        })
    }
}

/// Lowest-pivot scissor for `side`, the witness pair being the first by edge index.
pub fn find_scissor(h: &Hypergraph, state: &GameState, side: Side) -> Option<Scissor> {
    let mine = state.owned(side);
    let theirs = state.owned(side.other());
    let free = h.vertices().difference(state.occupied());
    for pivot in free.iter() {
        let mut half: Vec<(usize, usize)> = Vec::new();
        for (i, &e) in h.edges().iter().enumerate() {
            if !e.contains(pivot) || !e.is_disjoint(theirs) {
                continue;
            }
            let missing = e.difference(mine);
            if missing.len() != 2 {
                continue;
            }
            let finish = missing.difference(VertexSet::singleton(pivot)).first();
            let Some(finish) = finish else { continue };
            if let Some(&(j, f)) = half.iter().find(|&&(_, f)| f != finish) {
                return Some(Scissor {
                    side,
                    pivot,
                    edges: [j, i],
                    owned: [h.edge(j).intersection(mine), e.intersection(mine)],
                    finishes: [f, finish],
                });
            }
            half.push((i, finish));
        }
    }
    None
}

/// Win, block, or take a scissor pivot, in that order.
fn tactical(ctx: &GameContext, state: &GameState) -> Option<usize> {
    let side = state.to_move;
    if let Some(v) = immediate_wins(&ctx.h, state, side).first() {
        return Some(v);
    }
    if let Some(v) = immediate_wins(&ctx.h, state, side.other()).first() {
        return Some(v);
    }
    find_scissor(&ctx.h, state, side).map(|s| s.pivot)
}

fn require(name: &str, ok: bool, reason: &str) -> Result<()> {
    if ok {
        Ok(())
    } else {
        Err(not_applicable(name, reason))
    }
}

fn off_line(name: &str, state: &GameState) -> crate::error::Error {
    not_applicable(name, format!("position X={:?} O={:?} is off the strategy's line", state.first, state.second))
}

/// Distinct edges form a Steiner triple system: 3-uniform, every pair of
/// points in exactly one distinct edge.
fn is_repeated_sts(h: &Hypergraph) -> bool {
    if h.uniformity() != Some(3) {
        return false;
    }
    let mut distinct: Vec<VertexSet> = h.edges().to_vec();
    distinct.sort();
    distinct.dedup();
    let n = h.vertex_count();
    (0..n).all(|a| {
        (a + 1..n).all(|b| {
            let pair = VertexSet::singleton(a).with(b);
            distinct.iter().filter(|e| pair.is_subset(**e)).count() == 1
        })
    })
}

/// Edge containing all of `vs`, if any.
fn edge_through(h: &Hypergraph, vs: VertexSet) -> Option<VertexSet> {
    h.edges().iter().copied().find(|e| vs.is_subset(*e))
}

/// Xeno on a Steiner triple system (blocks may repeat), `v ≥ 7`: first move
/// 0; second move the lowest point off the block through the first two moves;
/// after that only forced moves and the scissor remain.
#[derive(Clone, Copy, Debug, Default)]
pub struct StsXeno;

impl Strategy for StsXeno {
    fn name(&self) -> String {
        "sts-xeno".into()
    }

    fn applicability(&self) -> String {
        "first player, strong game, STS(v) with v >= 7 (blocks may repeat)".into()
    }

    fn check(&self, ctx: &GameContext, side: Side) -> Result<()> {
        let name = self.name();
        require(&name, ctx.variant == GameVariant::Strong, "needs the strong game")?;
        require(&name, side == Side::First, "plays the first player")?;
        require(&name, ctx.schedule.is_standard(), "needs plain alternation")?;
        require(&name, ctx.h.vertex_count() >= 7, "needs v >= 7")?;
        require(&name, is_repeated_sts(&ctx.h), "board is not a Steiner triple system")
    }

    fn choose(&mut self, ctx: &GameContext, state: &GameState) -> Result<usize> {
        if let Some(v) = tactical(ctx, state) {
            return Ok(v);
        }
        match (state.first.len(), state.second.len()) {
            (0, 0) => Ok(0),
            (1, 1) => {
                let block = edge_through(&ctx.h, state.occupied()).ok_or_else(|| off_line(&self.name(), state))?;
                ctx.free(state).difference(block).first().ok_or_else(|| off_line(&self.name(), state))
            }
            _ => Err(off_line(&self.name(), state)),
        }
    }
}

fn td_groups<'a>(name: &str, ctx: &'a GameContext, k: usize, min_n: usize) -> Result<&'a [Vec<usize>]> {
    let groups = ctx.groups.as_deref().ok_or_else(|| not_applicable(name, "board has no group structure"))?;
    require(name, groups.len() == k, &format!("needs a TD({k},n)"))?;
    let n = groups[0].len();
    require(name, n >= min_n, &format!("needs n >= {min_n}"))?;
    require(name, groups.iter().all(|g| g.len() == n), "groups differ in size")?;
    require(name, ctx.h.uniformity() == Some(k), "blocks must meet every group")?;
    Ok(groups)
}

fn lowest(group: &[usize]) -> usize {
    group.iter().copied().min().unwrap_or(0)
}

/// Xeno on a TD(2, n), `n ≥ 2`: open on the lowest point of the first group
/// and complete a block next turn.
#[derive(Clone, Copy, Debug, Default)]
pub struct Td2Xeno;

impl Strategy for Td2Xeno {
    fn name(&self) -> String {
        "td2-xeno".into()
    }

    fn applicability(&self) -> String {
        "first player, strong game, TD(2,n) with n >= 2".into()
    }

    fn check(&self, ctx: &GameContext, side: Side) -> Result<()> {
        let name = self.name();
        require(&name, ctx.variant == GameVariant::Strong, "needs the strong game")?;
        require(&name, side == Side::First, "plays the first player")?;
        require(&name, ctx.schedule.is_standard(), "needs plain alternation")?;
        td_groups(&name, ctx, 2, 2).map(|_| ())
    }

    fn choose(&mut self, ctx: &GameContext, state: &GameState) -> Result<usize> {
        if let Some(v) = tactical(ctx, state) {
            return Ok(v);
        }
        let groups = td_groups(&self.name(), ctx, 2, 2)?;
        if state.ply() == 0 {
            return Ok(lowest(&groups[0]));
        }
        Err(off_line(&self.name(), state))
    }
}

/// Xeno on a TD(3, n), `n ≥ 3`. Opens on the first group. If Ophelia answers
/// in the same group, Xeno plays there again; otherwise he plays in the third
/// group off the block through the first two moves. Forced moves and a
/// scissor finish the game within four Xeno moves.
#[derive(Clone, Copy, Debug, Default)]
pub struct Td3Xeno;

impl Strategy for Td3Xeno {
    fn name(&self) -> String {
        "td3-xeno".into()
    }

    fn applicability(&self) -> String {
        "first player, strong game, TD(3,n) with n >= 3".into()
    }

    fn check(&self, ctx: &GameContext, side: Side) -> Result<()> {
        let name = self.name();
        require(&name, ctx.variant == GameVariant::Strong, "needs the strong game")?;
        require(&name, side == Side::First, "plays the first player")?;
        require(&name, ctx.schedule.is_standard(), "needs plain alternation")?;
        td_groups(&name, ctx, 3, 3).map(|_| ())
    }

    fn choose(&mut self, ctx: &GameContext, state: &GameState) -> Result<usize> {
        if let Some(v) = tactical(ctx, state) {
            return Ok(v);
        }
        let name = self.name();
        let groups = td_groups(&name, ctx, 3, 3)?;
        let free = ctx.free(state);
        match (state.first.len(), state.second.len()) {
            (0, 0) => Ok(lowest(&groups[0])),
            (1, 1) => {
                let x1 = state.first.first().ok_or_else(|| off_line(&name, state))?;
                let o1 = state.second.first().ok_or_else(|| off_line(&name, state))?;
                let (gx, go) = (ctx.group_of(x1), ctx.group_of(o1));
                let pick = if gx == go {
                    groups[gx.unwrap_or(0)].iter().copied().filter(|&v| free.contains(v)).min()
                } else {
                    let third = (0..3).find(|&g| Some(g) != gx && Some(g) != go).unwrap_or(0);
                    let block = edge_through(&ctx.h, state.occupied()).unwrap_or(VertexSet::EMPTY);
                    groups[third].iter().copied().filter(|&v| free.contains(v) && !block.contains(v)).min()
                };
                pick.ok_or_else(|| off_line(&name, state))
            }
            _ => Err(off_line(&name, state)),
        }
    }
}

/// Ophelia on a TD(3, n), `n ≥ 3`, when she moves twice on her first turn
/// (schedule X, O, O, then alternation). She takes a point in each group
/// Xeno avoided, not on a common block with his move; Xeno must block, and
/// her next move in his group is a scissor.
#[derive(Clone, Copy, Debug, Default)]
pub struct OpheliaHandicap;

impl OpheliaHandicap {
    pub fn schedule() -> TurnSchedule {
        TurnSchedule { prefix: vec![Side::First, Side::Second, Side::Second], tail_start: Side::First }
    }
}

impl Strategy for OpheliaHandicap {
    fn name(&self) -> String {
        "ophelia-handicap".into()
    }

    fn applicability(&self) -> String {
        "second player, strong game, TD(3,n) with n >= 3, schedule X,O,O then alternation".into()
    }

    fn check(&self, ctx: &GameContext, side: Side) -> Result<()> {
        let name = self.name();
        require(&name, ctx.variant == GameVariant::Strong, "needs the strong game")?;
        require(&name, side == Side::Second, "plays the second player")?;
        let expected = OpheliaHandicap::schedule();
        let same = (0..ctx.h.vertex_count().max(4)).all(|p| ctx.schedule.side_at(p) == expected.side_at(p));
        require(&name, same, "needs the schedule X,O,O then alternation")?;
        td_groups(&name, ctx, 3, 3).map(|_| ())
    }

    fn choose(&mut self, ctx: &GameContext, state: &GameState) -> Result<usize> {
        if let Some(v) = tactical(ctx, state) {
            return Ok(v);
        }
        let name = self.name();
        let groups = td_groups(&name, ctx, 3, 3)?;
        let free = ctx.free(state);
        let x1 = state.first.first().ok_or_else(|| off_line(&name, state))?;
        let gx = ctx.group_of(x1);
        match (state.first.len(), state.second.len()) {
            (1, 0) => {
                let g = (0..3).find(|&g| Some(g) != gx).unwrap_or(0);
                Ok(lowest(&groups[g]))
            }
            (1, 1) => {
                let o1 = state.second.first().ok_or_else(|| off_line(&name, state))?;
                let go = ctx.group_of(o1);
                let third = (0..3).find(|&g| Some(g) != gx && Some(g) != go).unwrap_or(0);
                let block = edge_through(&ctx.h, state.occupied()).unwrap_or(VertexSet::EMPTY);
                groups[third]
                    .iter()
                    .copied()
                    .filter(|&v| free.contains(v) && !block.contains(v))
                    .min()
                    .ok_or_else(|| off_line(&name, state))
            }
            _ => Err(off_line(&name, state)),
        }
    }
}
