use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Duration;

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand};
use serde_json::{json, Value};

use design_games::hypergraph::{
    automorphism_generators_bounded, stabilizer_generators, vertex_orbits, GameState, GameVariant, Side, TurnSchedule,
    VertexSet, AUTOMORPHISM_VERTEX_BOUND,
};
use design_games::io::{
    augment, emit_hypergraph, outcome_word, solve_cached, table_rows, Board, Header, Scope, SolveCache,
};
use design_games::scoring::{
    beck_maker_criterion, bibd_mb_bounds, es_breaker_criterion, td_mb_bounds, CriterionVerdict,
};
use design_games::solver::{extract_certificate, Budget, GameValue, SolverConfig};
use design_games::strategies::simulate;
use design_games::strategies::strategy_by_name;

const EXIT_MISMATCH: u8 = 1;
const EXIT_BUDGET: u8 = 2;

#[derive(Parser)]
#[command(name = "dgame", version, about = "Positional games on combinatorial designs")]
struct Cli {
    /// Print human-readable tables instead of JSON lines.
    #[arg(long, global = true)]
    human: bool,
    /// Bypass the solve cache.
    #[arg(long, global = true)]
    no_cache: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(clap::Args, Clone, Copy)]
struct BudgetArgs {
    /// Stop after this many search nodes.
    #[arg(long)]
    budget_nodes: Option<u64>,
    /// Stop after this many seconds.
    #[arg(long)]
    budget_secs: Option<f64>,
}

impl BudgetArgs {
    fn config(self) -> SolverConfig {
        SolverConfig::default().with_budget(Budget {
            max_nodes: self.budget_nodes,
            max_time: self.budget_secs.map(Duration::from_secs_f64),
        })
    }
}

#[derive(Subcommand)]
enum Command {
    /// Write a design file: sts V | ts V L | td K N | tdc N | proj N | affine N | ts62-flawed.
    Gen {
        kind: String,
        params: Vec<usize>,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Validate a design file; exit status 0 iff valid.
    Check { file: PathBuf },
    /// Solve a position exactly.
    Solve {
        /// A board file or a built-in name.
        board: String,
        #[arg(long, default_value = "strong")]
        variant: GameVariant,
        /// Moves already made, as x:POINT or o:POINT.
        #[arg(long, num_args = 1..)]
        moves: Vec<String>,
        /// Turn order prefix such as XOO; alternation continues afterwards.
        #[arg(long)]
        schedule: Option<String>,
        #[command(flatten)]
        budget: BudgetArgs,
        /// Write a strategy certificate for the winning (or drawing) side.
        #[arg(long)]
        certificate: Option<PathBuf>,
    },
    /// Evaluate the win criteria on a board.
    Criteria { board: String },
    /// Play two strategies against each other.
    Simulate {
        board: String,
        #[arg(long, default_value = "strong")]
        variant: GameVariant,
        #[arg(long)]
        first: String,
        #[arg(long)]
        second: String,
        #[arg(long)]
        schedule: Option<String>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Write the full transcript as JSON.
        #[arg(long)]
        transcript: Option<PathBuf>,
    },
    /// Recompute the outcome tables and compare with the expected values.
    Table {
        #[arg(long, default_value = "small")]
        scope: Scope,
        #[command(flatten)]
        budget: BudgetArgs,
    },
    /// Solve a transversal design with its first G groups added as blocks.
    Augment {
        board: String,
        #[arg(long)]
        groups: usize,
        #[command(flatten)]
        budget: BudgetArgs,
    },
    /// Vertex orbits under the automorphisms fixing the position.
    Orbits {
        board: String,
        #[arg(long, num_args = 1..)]
        moves: Vec<String>,
    },
    /// Play one Maker move and one Breaker move and print the residual hypergraph.
    Reduce {
        board: String,
        maker: String,
        breaker: String,
        /// Also drop vertices left in no edge.
        #[arg(long)]
        drop_isolated: bool,
    },
}

fn emit(record: Value) {
    println!("{record}");
}

fn cache(no_cache: bool) -> Option<SolveCache> {
    if no_cache {
        return None;
    }
    SolveCache::default_dir().and_then(|d| SolveCache::open(d).ok())
}

fn parse_moves(board: &Board, moves: &[String], schedule: &TurnSchedule) -> Result<GameState> {
    let mut first = VertexSet::EMPTY;
    let mut second = VertexSet::EMPTY;
    for m in moves {
        let (who, point) = m.split_once(':').with_context(|| format!("move {m:?} is not side:point"))?;
        let v = board.vertex(point)?;
        if first.union(second).contains(v) {
            bail!("point {point} is played twice");
        }
        match who.to_ascii_lowercase().as_str() {
            "x" | "m" => first.insert(v),
            "o" | "b" => second.insert(v),
            _ => bail!("unknown side {who:?} in move {m:?}"),
        }
    }
    let state = GameState::scheduled(first, second, schedule);
    state.validate(board.h.vertex_count(), Some(schedule))?;
    Ok(state)
}

fn schedule_of(s: &Option<String>) -> Result<TurnSchedule> {
    Ok(match s {
        Some(s) => TurnSchedule::parse(s)?,
        None => TurnSchedule::standard(),
    })
}

fn names(board: &Board, set: impl IntoIterator<Item = usize>) -> Vec<String> {
    set.into_iter().map(|v| board.name(v)).collect()
}

fn gen(kind: &str, params: &[usize], output: Option<PathBuf>) -> Result<u8> {
    let spec =
        std::iter::once(kind.to_string()).chain(params.iter().map(|p| p.to_string())).collect::<Vec<_>>().join(":");
    let arity = match kind {
        "ts62-flawed" => 0,
        "sts" | "tdc" | "proj" | "affine" => 1,
        "ts" | "td" => 2,
        _ => bail!("unknown design kind {kind:?}; expected sts, ts, td, tdc, proj, affine or ts62-flawed"),
    };
    if params.len() != arity {
        bail!("{kind} takes {arity} parameter(s)");
    }
    let board = Board::builtin(&spec)?;
    let text = board.file.context("built-in board has no design file")?.emit();
    match output {
        Some(p) => std::fs::write(&p, text).with_context(|| format!("writing {}", p.display()))?,
        None => print!("{text}"),
    }
    Ok(0)
}

fn check(file: &PathBuf, human: bool) -> Result<u8> {
    let text = std::fs::read_to_string(file).with_context(|| format!("reading {}", file.display()))?;
    let board = Board::from_text(&file.display().to_string(), &text)?;
    let Some(f) = &board.file else {
        bail!("{} is a plain hypergraph, not a design file", file.display());
    };
    let report = f.validate();
    if human {
        println!("{}: {}", file.display(), report);
    } else {
        emit(json!({
            "file": file.display().to_string(),
            "valid": report.is_valid(),
            "issues": report.issues.iter().map(|i| i.to_string()).collect::<Vec<_>>(),
        }));
    }
    Ok(if report.is_valid() { 0 } else { EXIT_MISMATCH })
}

#[allow(clippy::too_many_arguments)]
fn solve(
    board: &str,
    variant: GameVariant,
    moves: &[String],
    schedule: &Option<String>,
    budget: BudgetArgs,
    certificate: Option<PathBuf>,
    no_cache: bool,
    human: bool,
) -> Result<u8> {
    let board = Board::load(board)?;
    let sched = schedule_of(schedule)?;
    let state = parse_moves(&board, moves, &sched)?;
    let config = budget.config();
    let cache = cache(no_cache);
    let sched_opt = (!sched.is_standard()).then_some(&sched);
    let r = solve_cached(cache.as_ref(), &board.h, variant, &state, sched_opt, &config)?;
    let res = &r.result;
    if human {
        println!(
            "{} {} to move {}: {} (best move {}, {} nodes)",
            board.label,
            variant,
            state.to_move,
            res.value,
            res.best_move.map_or("-".into(), |v| board.name(v)),
            res.nodes_expanded
        );
    } else {
        emit(json!({
            "board": board.label,
            "variant": variant,
            "to_move": state.to_move,
            "value": res.value,
            "win_depth": res.win_depth,
            "best_move": res.best_move.map(|v| board.name(v)),
            "nodes": res.nodes_expanded,
            "table_hits": res.table_hits,
            "elapsed_secs": res.elapsed.as_secs_f64(),
            "source": r.source,
        }));
    }
    if res.value == GameValue::Unknown {
        return Ok(EXIT_BUDGET);
    }
    if let Some(path) = certificate {
        let side = match res.value {
            GameValue::MakerWin => Side::First,
            GameValue::BreakerWin => Side::Second,
            GameValue::LossForToMove => state.to_move.other(),
            _ => state.to_move,
        };
        let cert = extract_certificate(&board.h, variant, side, &state, sched_opt, &config)?;
        std::fs::write(&path, serde_json::to_string_pretty(&cert)?)
            .with_context(|| format!("writing {}", path.display()))?;
    }
    Ok(0)
}

fn criteria(board: &str, human: bool) -> Result<u8> {
    let board = Board::load(board)?;
    let mut verdicts: Vec<CriterionVerdict> = vec![es_breaker_criterion(&board.h), beck_maker_criterion(&board.h)];
    match board.file.as_ref().map(|f| &f.header) {
        Some(Header::Design { v, k, lambda: 1 }) => verdicts.push(bibd_mb_bounds(*v, *k)?),
        Some(Header::Td { k, n }) if board.h.edge_count() == n * n => verdicts.push(td_mb_bounds(*k, *n)?),
        _ => {}
    }
    for c in &verdicts {
        if human {
            println!("{:<18} {:<13} {}", c.criterion, c.predicted.to_string(), c.inequality());
        } else {
            emit(json!({
                "board": board.label,
                "criterion": c.criterion,
                "predicted": c.predicted,
                "checks": c.checks.iter().map(|(s, ok)| json!({"inequality": s, "holds": ok})).collect::<Vec<_>>(),
                "reason": c.reason,
            }));
        }
    }
    Ok(0)
}

#[allow(clippy::too_many_arguments)]
fn simulate_cmd(
    board: &str,
    variant: GameVariant,
    first: &str,
    second: &str,
    schedule: &Option<String>,
    seed: u64,
    transcript: Option<PathBuf>,
    human: bool,
) -> Result<u8> {
    let board = Board::load(board)?;
    let ctx = board.context(variant).with_schedule(schedule_of(schedule)?);
    let mut a = strategy_by_name(first, seed)?;
    let mut b = strategy_by_name(second, seed)?;
    let t = simulate(&ctx, a.as_mut(), b.as_mut());
    if let Some(path) = transcript {
        std::fs::write(&path, serde_json::to_string_pretty(&t)?)
            .with_context(|| format!("writing {}", path.display()))?;
    }
    let line: Vec<String> = t.moves.iter().map(|m| format!("{}:{}", m.side, board.name(m.vertex))).collect();
    if human {
        println!("{}", line.join(" "));
        println!("outcome: {}", outcome_word(variant, t.outcome));
        if let Some(f) = &t.fault {
            println!("fault: {f}");
        }
    } else {
        emit(json!({
            "board": board.label,
            "variant": variant,
            "first": t.first,
            "second": t.second,
            "moves": line,
            "outcome": t.outcome,
            "all_score_optimal": t.moves.iter().all(|m| m.score_optimal),
            "fault": t.fault,
        }));
    }
    Ok(if t.fault.is_some() { EXIT_MISMATCH } else { 0 })
}

fn table(scope: Scope, budget: BudgetArgs, no_cache: bool, human: bool) -> Result<u8> {
    let cache = cache(no_cache);
    let rows = table_rows(scope, cache.as_ref(), &budget.config())?;
    if human {
        println!(
            "{:<14} {:<8} {:<7} {:<12} {:<12} {:<10} check",
            "family", "param", "game", "computed", "expected", "source"
        );
    }
    for r in &rows {
        if human {
            println!("{r}");
        } else {
            emit(serde_json::to_value(r)?);
        }
    }
    if rows.iter().any(|r| r.outcome.is_some() && !r.matches) {
        Ok(EXIT_MISMATCH)
    } else if rows.iter().any(|r| r.outcome.is_none()) {
        Ok(EXIT_BUDGET)
    } else {
        Ok(0)
    }
}

fn augment_cmd(board: &str, g: usize, budget: BudgetArgs, no_cache: bool, human: bool) -> Result<u8> {
    let board = Board::load(board)?;
    let f = board.file.as_ref().context("augment needs a transversal design")?;
    let td = f.to_td()?;
    let cache = cache(no_cache);
    let r = augment(&td, g, cache.as_ref(), &budget.config())?;
    if human {
        println!(
            "TD({},{}) + {} groups: {} edges, maker-breaker {}, strong {}",
            td.k,
            td.n,
            g,
            r.edges,
            outcome_word(GameVariant::MakerBreaker, r.maker_breaker),
            outcome_word(GameVariant::Strong, r.strong)
        );
    } else {
        emit(json!({
            "board": board.label,
            "groups": r.groups,
            "edges": r.edges,
            "maker_breaker": outcome_word(GameVariant::MakerBreaker, r.maker_breaker),
            "strong": outcome_word(GameVariant::Strong, r.strong),
            "nodes": r.nodes,
        }));
    }
    Ok(if r.maker_breaker.is_none() || r.strong.is_none() { EXIT_BUDGET } else { 0 })
}

fn orbits(board: &str, moves: &[String], human: bool) -> Result<u8> {
    let board = Board::load(board)?;
    let state = parse_moves(&board, moves, &TurnSchedule::standard())?;
    let gens = if state.occupied().is_empty() {
        automorphism_generators_bounded(&board.h, AUTOMORPHISM_VERTEX_BOUND)?
    } else {
        stabilizer_generators(&board.h, &state, AUTOMORPHISM_VERTEX_BOUND)?
    };
    let orbits = vertex_orbits(&board.h, &state, &gens)?;
    if human {
        for o in &orbits {
            println!("{}", names(&board, o.iter().copied()).join(" "));
        }
    } else {
        emit(json!({
            "board": board.label,
            "generators": gens.len(),
            "orbits": orbits.iter().map(|o| names(&board, o.iter().copied())).collect::<Vec<_>>(),
        }));
    }
    Ok(0)
}

fn reduce(board: &str, maker: &str, breaker: &str, drop_isolated: bool) -> Result<u8> {
    let board = Board::load(board)?;
    let r = board.h.restrict_after_moves(board.vertex(maker)?, board.vertex(breaker)?)?;
    let mut kept: Vec<usize> = r.old_to_new.iter().enumerate().filter_map(|(old, new)| new.map(|_| old)).collect();
    let mut h = r.hypergraph;
    if drop_isolated {
        let r2 = h.without_isolated();
        kept = r2.old_to_new.iter().enumerate().filter_map(|(old, new)| new.map(|_| kept[old])).collect();
        h = r2.hypergraph;
    }
    println!("# points {}", names(&board, kept).join(" "));
    print!("{}", emit_hypergraph(&h));
    Ok(0)
}

fn run(cli: Cli) -> Result<u8> {
    let human = cli.human;
    match cli.command {
        Command::Gen { kind, params, output } => gen(&kind, &params, output),
        Command::Check { file } => check(&file, human),
        Command::Solve { board, variant, moves, schedule, budget, certificate } => {
            solve(&board, variant, &moves, &schedule, budget, certificate, cli.no_cache, human)
        }
        Command::Criteria { board } => criteria(&board, human),
        Command::Simulate { board, variant, first, second, schedule, seed, transcript } => {
            simulate_cmd(&board, variant, &first, &second, &schedule, seed, transcript, human)
        }
        Command::Table { scope, budget } => table(scope, budget, cli.no_cache, human),
        Command::Augment { board, groups, budget } => augment_cmd(&board, groups, budget, cli.no_cache, human),
        Command::Orbits { board, moves } => orbits(&board, &moves, human),
        Command::Reduce { board, maker, breaker, drop_isolated } => reduce(&board, &maker, &breaker, drop_isolated),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(EXIT_MISMATCH)
        }
    }
}
