//! Summary tables of game outcomes on design families, recomputed and
//! compared with the published expectations.

use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::board::Board;
use super::cache::{solve_cached, SolveCache, Source};
use crate::designs::TransversalDesign;
use crate::error::{Error, Result};
use crate::hypergraph::{GameState, GameVariant, Hypergraph, Side};
use crate::scoring::{beck_maker_criterion, bibd_mb_bounds, es_breaker_criterion, td_mb_bounds, Prediction};
use crate::solver::{Claim, GameValue, SolverConfig};
use crate::strategies::{verify_strategy_exhaustive, Outcome, Strategy, StsXeno, Td2Xeno, Td3Xeno};

/// Which rows to compute.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Scope {
    Small,
    Heavy,
    All,
}

impl FromStr for Scope {
    type Err = Error;

    fn from_str(s: &str) -> Result<Scope> {
        match s {
            "small" => Ok(Scope::Small),
            "heavy" => Ok(Scope::Heavy),
            "all" => Ok(Scope::All),
            _ => Err(Error::InvalidParameters(format!("unknown scope {s:?} (small, heavy, all)"))),
        }
    }
}

/// How a row's outcome was established.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RowSource {
    Criterion,
    Strategy,
    Solver,
    Cached,
}

/// One recomputed row.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TableRow {
    pub family: String,
    pub parameter: String,
    pub variant: GameVariant,
    /// `None` when the budget ran out.
    pub outcome: Option<Outcome>,
    pub source: RowSource,
    pub expected: Outcome,
    pub matches: bool,
    pub detail: String,
}

impl TableRow {
    pub fn key(&self) -> String {
        format!("{} {} {}", self.family, self.parameter, self.variant)
    }
}

/// Words for an outcome in each game.
pub fn outcome_word(variant: GameVariant, o: Option<Outcome>) -> &'static str {
    match (variant, o) {
        (_, None) => "unknown",
        (GameVariant::MakerBreaker, Some(Outcome::FirstWin)) => "maker-win",
        (GameVariant::MakerBreaker, Some(_)) => "breaker-win",
        (GameVariant::Strong, Some(Outcome::FirstWin)) => "xeno-win",
        (GameVariant::Strong, Some(Outcome::SecondWin)) => "ophelia-win",
        (GameVariant::Strong, Some(Outcome::Draw)) => "draw",
    }
}

impl fmt::Display for TableRow {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{:<14} {:<8} {:<7} {:<12} {:<12} {:<10} {}",
            self.family,
            self.parameter,
            self.variant.to_string(),
            outcome_word(self.variant, self.outcome),
            outcome_word(self.variant, Some(self.expected)),
            format!("{:?}", self.source).to_lowercase(),
            if self.matches { "ok" } else { "MISMATCH" }
        )
    }
}

/// Outcome of a solve from the empty board.
pub fn outcome_of(variant: GameVariant, value: GameValue) -> Option<Outcome> {
    match (variant, value) {
        (_, GameValue::Unknown) => None,
        (_, GameValue::MakerWin) => Some(Outcome::FirstWin),
        (_, GameValue::BreakerWin) => Some(Outcome::SecondWin),
        (_, GameValue::WinForToMove) => Some(Outcome::FirstWin),
        (_, GameValue::LossForToMove) => Some(Outcome::SecondWin),
        (_, GameValue::Draw) => Some(Outcome::Draw),
    }
}

#[derive(Clone, Debug)]
struct RowSpec {
    family: &'static str,
    parameter: String,
    variant: GameVariant,
    expected: Outcome,
    board: String,
    td: Option<(usize, usize)>,
    bibd: Option<(usize, usize)>,
    heavy: bool,
}

fn row(family: &'static str, parameter: String, variant: GameVariant, expected: Outcome, board: String) -> RowSpec {
    RowSpec { family, parameter, variant, expected, board, td: None, bibd: None, heavy: false }
}

fn specs() -> Vec<RowSpec> {
    use GameVariant::{MakerBreaker as Mb, Strong};
    use Outcome::{Draw, FirstWin, SecondWin};
    let mut out = Vec::new();
    let td = |k: usize, n: usize, variant, expected, heavy| RowSpec {
        td: Some((k, n)),
        heavy,
        ..row(
            match k {
                2 => "TD(2,n)",
                3 => "TD(3,n)",
                _ => "TD(4,n)",
            },
            format!("n={n}"),
            variant,
            expected,
            format!("td:{k}:{n}"),
        )
    };
    for variant in [Mb, Strong] {
        let lose = if variant == Mb { SecondWin } else { Draw };
        out.push(td(2, 1, variant, lose, false));
        for n in 2..=5 {
            out.push(td(2, n, variant, FirstWin, false));
        }
        for n in 1..=2 {
            out.push(td(3, n, variant, lose, false));
        }
        for n in 3..=5 {
            out.push(td(3, n, variant, FirstWin, false));
        }
        out.push(td(4, 3, variant, lose, false));
        out.push(td(4, 4, variant, lose, variant == Strong));
        out.push(td(4, 5, variant, if variant == Mb { FirstWin } else { Draw }, true));
        if variant == Mb {
            out.push(td(4, 9, variant, FirstWin, false));
        }
        let sts = |v: usize, expected| RowSpec {
            bibd: Some((v, 3)),
            ..row("BIBD(v,3,1)", format!("v={v}"), variant, expected, format!("sts:{v}"))
        };
        out.push(sts(3, lose));
        for v in [7, 9, 13] {
            out.push(sts(v, FirstWin));
        }
        out.push(RowSpec { bibd: Some((4, 4)), ..row("BIBD(v,4,1)", "v=4".into(), variant, lose, "td:4:1".into()) });
        out.push(RowSpec { bibd: Some((13, 4)), ..row("BIBD(v,4,1)", "v=13".into(), variant, lose, "proj:3".into()) });
        if variant == Mb {
            out.push(RowSpec {
                bibd: Some((16, 4)),
                heavy: true,
                ..row("BIBD(v,4,1)", "v=16".into(), variant, FirstWin, "td:4:4:4".into())
            });
        }
        for (v, l, expected) in [(3, 1, lose), (4, 2, lose), (5, 3, FirstWin), (6, 2, FirstWin), (7, 2, FirstWin)] {
            out.push(row("TS(v,lambda)", format!("({v},{l})"), variant, expected, format!("ts:{v}:{l}")));
        }
    }
    for (g, variant, expected) in [(1, Mb, SecondWin), (2, Mb, SecondWin), (3, Strong, FirstWin)] {
        out.push(RowSpec {
            heavy: true,
            ..row("TD(4,4)+groups", format!("g={g}"), variant, expected, format!("td:4:4:{g}"))
        });
    }
    out
}

/// A decisive criterion verdict for the row, if any.
fn by_criterion(spec: &RowSpec, board: Option<&Board>) -> Option<(Outcome, String)> {
    let mut verdicts = Vec::new();
    if let Some((k, n)) = spec.td {
        verdicts.extend(td_mb_bounds(k, n).ok());
    }
    if let Some((v, k)) = spec.bibd {
        verdicts.extend(bibd_mb_bounds(v, k).ok());
    }
    if let Some(b) = board {
        verdicts.push(es_breaker_criterion(&b.h));
        verdicts.push(beck_maker_criterion(&b.h));
    }
    for c in verdicts {
        match (c.predicted, spec.variant) {
            (Prediction::Breaker, GameVariant::MakerBreaker) => return Some((Outcome::SecondWin, c.inequality())),
            // Breaker winning the weak game gives Ophelia a draw.
            (Prediction::Breaker, GameVariant::Strong) => return Some((Outcome::Draw, c.inequality())),
            (Prediction::Maker, GameVariant::MakerBreaker) => return Some((Outcome::FirstWin, c.inequality())),
            _ => {}
        }
    }
    None
}

/// A verified first-player strategy for the row's board, if one applies.
fn by_strategy(board: &Board) -> Result<Option<String>> {
    let ctx = board.context(GameVariant::Strong);
    let candidates: [Box<dyn Strategy>; 3] = [Box::new(StsXeno), Box::new(Td2Xeno), Box::new(Td3Xeno)];
    for mut s in candidates {
        if s.check(&ctx, Side::First).is_err() {
            continue;
        }
        let report = verify_strategy_exhaustive(&ctx, s.as_mut(), Side::First, Claim::Win)?;
        if report.holds {
            return Ok(Some(format!("{} wins on all {} positions", s.name(), report.positions)));
        }
    }
    Ok(None)
}

fn compute(spec: &RowSpec, cache: Option<&SolveCache>, config: &SolverConfig) -> Result<TableRow> {
    let board =
        if spec.td.is_some() && by_criterion(spec, None).is_some() { None } else { Some(Board::load(&spec.board)?) };
    let finish = |outcome: Option<Outcome>, source, detail: String| TableRow {
        family: spec.family.into(),
        parameter: spec.parameter.clone(),
        variant: spec.variant,
        outcome,
        source,
        expected: spec.expected,
        matches: outcome == Some(spec.expected),
        detail,
    };
    if let Some((o, detail)) = by_criterion(spec, board.as_ref()) {
        return Ok(finish(Some(o), RowSource::Criterion, detail));
    }
    let board = board.ok_or_else(|| Error::InvalidState("row needs a board".into()))?;
    // A Xeno win transfers to a Maker win.
    if let Some(detail) = by_strategy(&board)? {
        return Ok(finish(Some(Outcome::FirstWin), RowSource::Strategy, detail));
    }
    let r = solve_cached(cache, &board.h, spec.variant, &GameState::empty(), None, config)?;
    let source = match r.source {
        Source::Cached => RowSource::Cached,
        Source::Solver => RowSource::Solver,
    };
    let detail = format!("{} nodes", r.result.nodes_expanded);
    Ok(finish(outcome_of(spec.variant, r.result.value), source, detail))
}

/// Recompute every row in `scope`, in a fixed order.
pub fn table_rows(scope: Scope, cache: Option<&SolveCache>, config: &SolverConfig) -> Result<Vec<TableRow>> {
    let chosen: Vec<RowSpec> = specs()
        .into_iter()
        .filter(|s| match scope {
            Scope::Small => !s.heavy,
            Scope::Heavy => s.heavy,
            Scope::All => true,
        })
        .collect();
    chosen.par_iter().map(|s| compute(s, cache, config)).collect()
}

/// Outcomes of a transversal design with some of its groups added as edges.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AugmentReport {
    pub groups: usize,
    pub edges: usize,
    pub maker_breaker: Option<Outcome>,
    pub strong: Option<Outcome>,
    pub nodes: u64,
}

/// Solve both games on `td` with its first `g` groups appended as edges.
pub fn augment(
    td: &TransversalDesign,
    g: usize,
    cache: Option<&SolveCache>,
    config: &SolverConfig,
) -> Result<AugmentReport> {
    if g > td.k {
        return Err(Error::InvalidParameters(format!("TD has only {} groups", td.k)));
    }
    let h: Hypergraph = td.to_hypergraph(&(0..g).collect::<Vec<_>>())?;
    let mb = solve_cached(cache, &h, GameVariant::MakerBreaker, &GameState::empty(), None, config)?;
    let strong = solve_cached(cache, &h, GameVariant::Strong, &GameState::empty(), None, config)?;
    Ok(AugmentReport {
        groups: g,
        edges: h.edge_count(),
        maker_breaker: outcome_of(GameVariant::MakerBreaker, mb.result.value),
        strong: outcome_of(GameVariant::Strong, strong.result.value),
        nodes: mb.result.nodes_expanded + strong.result.nodes_expanded,
    })
}
