//! Boolean "can side S force a win" search.
//!
//! S nodes have S to move, O nodes the opponent. The depth is the number of
//! moves S may still make (`INF` = unbounded); iterative deepening on it finds
//! short wins first. In the strong game a completion by the opponent counts as
//! failure for S; in the Maker-Breaker game S is always Maker.

use std::collections::HashMap;
use std::time::Instant;

use super::table::{Probe, Table};
use crate::hypergraph::{stabilizer_generators, vertex_orbits, GameState, Hypergraph, Side, TurnSchedule};

pub(crate) const INF: u8 = u8::MAX;

fn dec(d: u8) -> u8 {
    if d == INF {
        INF
    } else {
        d - 1
    }
}

/// Who moves at each ply.
#[derive(Clone, Debug, PartialEq, Eq)]
pub(crate) struct Turn {
    pub schedule: Option<TurnSchedule>,
    /// Without a schedule: `First` moves at plies with `(ply + parity)` even.
    pub parity: usize,
}

impl Turn {
    pub fn side(&self, ply: usize) -> Side {
        match &self.schedule {
            Some(s) => s.side_at(ply),
            None if (ply + self.parity).is_multiple_of(2) => Side::First,
            None => Side::Second,
        }
    }

    fn alternates_from(&self, ply: usize) -> bool {
        self.schedule.as_ref().is_none_or(|s| ply >= s.alternation_start())
    }
}

#[derive(Clone, Debug)]
pub(crate) struct Options {
    pub memo: bool,
    pub table_bits: u32,
    pub orbit_depth: usize,
    pub orbit_vertex_bound: usize,
    pub dead_vertex_pruning: bool,
    pub es_pruning: bool,
    pub deepening_cap: u8,
}

/// Per-position summary from S's point of view.
struct Node {
    free: u64,
    s_threats: u64,
    o_threats: u64,
    s_live: u64,
    o_live: u64,
    min_missing: u32,
    score: u128,
}

#[derive(Clone)]
pub(crate) struct Engine {
    h: Hypergraph,
    edges: Vec<u64>,
    sizes: Vec<u32>,
    all: u64,
    strong: bool,
    s_side: Side,
    turn: Turn,
    scale: u32,
    opts: Options,
    memo: Option<TableBox>,
    orbit_cache: HashMap<(u64, u64), Vec<u8>>,
    root_ply: usize,
    pub nodes: u64,
    pub hits: u64,
    node_limit: u64,
    deadline: Option<Instant>,
    pub aborted: bool,
}

/// `Table` is large; cloning an engine starts it with a fresh one.
pub(crate) struct TableBox(Table, u32);

impl Clone for TableBox {
    fn clone(&self) -> Self {
        TableBox(Table::new(self.1), self.1)
    }
}

struct MoveList {
    moves: [u8; 64],
    len: usize,
}

impl MoveList {
    fn new() -> Self {
        MoveList { moves: [0; 64], len: 0 }
    }

    fn push(&mut self, v: usize) {
        self.moves[self.len] = v as u8;
        self.len += 1;
    }

    fn as_slice(&self) -> &[u8] {
        &self.moves[..self.len]
    }
}

impl Engine {
    pub fn new(h: &Hypergraph, strong: bool, s_side: Side, turn: Turn, opts: Options) -> Self {
        let n = h.vertex_count();
        let bits = {
            let wanted = (n as f64 * 3f64.log2()).ceil() as u32;
            opts.table_bits.min(wanted.saturating_sub(1)).max(6)
        };
        Engine {
            h: h.clone(),
            edges: h.edges().iter().map(|e| e.bits()).collect(),
            sizes: h.edges().iter().map(|e| e.len() as u32).collect(),
            all: h.vertices().bits(),
            strong,
            s_side,
            turn,
            scale: h.max_edge_size() as u32,
            memo: opts.memo.then(|| TableBox(Table::new(bits), bits)),
            opts,
            orbit_cache: HashMap::new(),
            root_ply: 0,
            nodes: 0,
            hits: 0,
            node_limit: u64::MAX,
            deadline: None,
            aborted: false,
        }
    }

    pub fn set_limits(&mut self, node_limit: u64, deadline: Option<Instant>) {
        self.node_limit = node_limit;
        self.deadline = deadline;
        self.aborted = false;
    }

    fn tick(&mut self) -> bool {
        self.nodes += 1;
        if self.nodes > self.node_limit {
            self.aborted = true;
        } else if self.nodes & 1023 == 0 {
            if let Some(d) = self.deadline {
                if Instant::now() >= d {
                    self.aborted = true;
                }
            }
        }
        self.aborted
    }

    fn analyze(&self, s: u64, o: u64) -> Node {
        let free = self.all & !(s | o);
        let mut n = Node { free, s_threats: 0, o_threats: 0, s_live: 0, o_live: 0, min_missing: u32::MAX, score: 0 };
        for (i, &e) in self.edges.iter().enumerate() {
            let size = self.sizes[i];
            if e & o == 0 {
                let missing = size - (e & s).count_ones();
                let open = e & free;
                n.s_live |= open;
                if missing == 1 {
                    n.s_threats |= open;
                }
                n.min_missing = n.min_missing.min(missing);
                n.score += 1u128 << (self.scale - missing);
            }
            if self.strong && e & s == 0 {
                let open = e & free;
                n.o_live |= open;
                if size - (e & o).count_ones() == 1 {
                    n.o_threats |= open;
                }
            }
        }
        n
    }

    /// Scaled vertex weights: S's point of view, plus the opponent's in the strong game.
    fn weights(&self, s: u64, o: u64, free: u64) -> ([u128; 64], [u128; 64]) {
        let mut ws = [0u128; 64];
        let mut wo = [0u128; 64];
        for (i, &e) in self.edges.iter().enumerate() {
            let open = e & free;
            if open == 0 {
                continue;
            }
            if e & o == 0 {
                let w = 1u128 << (self.scale - (self.sizes[i] - (e & s).count_ones()));
                let mut m = open;
                while m != 0 {
                    ws[m.trailing_zeros() as usize] += w;
                    m &= m - 1;
                }
            }
            if self.strong && e & s == 0 {
                let w = 1u128 << (self.scale - (self.sizes[i] - (e & o).count_ones()));
                let mut m = open;
                while m != 0 {
                    wo[m.trailing_zeros() as usize] += w;
                    m &= m - 1;
                }
            }
        }
        (ws, wo)
    }

    fn order(&self, mut cand: u64, ws: &[u128; 64], wo: &[u128; 64]) -> MoveList {
        let mut list = MoveList::new();
        while cand != 0 {
            list.push(cand.trailing_zeros() as usize);
            cand &= cand - 1;
        }
        let key = |v: u8| ws[v as usize] + wo[v as usize];
        list.moves[..list.len].sort_by(|&a, &b| key(b).cmp(&key(a)).then(a.cmp(&b)));
        list
    }

    /// Orbit id of every vertex under the automorphisms fixing both sets.
    fn orbit_ids(&mut self, s: u64, o: u64) -> Option<&Vec<u8>> {
        let n = self.h.vertex_count();
        if n > self.opts.orbit_vertex_bound {
            return None;
        }
        if !self.orbit_cache.contains_key(&(s, o)) {
            let state = GameState {
                first: crate::hypergraph::VertexSet::from_bits(s),
                second: crate::hypergraph::VertexSet::from_bits(o),
                to_move: Side::First,
            };
            let gens = stabilizer_generators(&self.h, &state, self.opts.orbit_vertex_bound).ok()?;
            let orbits = vertex_orbits(&self.h, &state, &gens).ok()?;
            let mut ids = vec![u8::MAX; n];
            for (i, orbit) in orbits.iter().enumerate() {
                for &v in orbit {
                    ids[v] = i as u8;
                }
            }
            self.orbit_cache.insert((s, o), ids);
        }
        self.orbit_cache.get(&(s, o))
    }

    fn reduce_by_orbits(&mut self, s: u64, o: u64, list: MoveList) -> MoveList {
        let ply = (s | o).count_ones() as usize;
        if ply >= self.root_ply + self.opts.orbit_depth || list.len < 2 {
            return list;
        }
        let Some(ids) = self.orbit_ids(s, o) else {
            return list;
        };
        let mut seen = 0u64;
        let mut out = MoveList::new();
        for &v in list.as_slice() {
            let id = ids[v as usize];
            if id == u8::MAX || seen >> id & 1 == 0 {
                if id != u8::MAX {
                    seen |= 1 << id;
                }
                out.push(v as usize);
            }
        }
        out
    }

    fn probe(&mut self, s: u64, o: u64, d: u8) -> Probe {
        match &self.memo {
            Some(t) => {
                let p = t.0.probe(s, o, d);
                if p != Probe::Miss {
                    self.hits += 1;
                }
                p
            }
            None => Probe::Miss,
        }
    }

    fn store(&mut self, s: u64, o: u64, d: u8, win: bool, work: u64) -> bool {
        if !self.aborted {
            if let Some(t) = &mut self.memo {
                t.0.store(s, o, d, win, work);
            }
        }
        win
    }

    fn child(&mut self, s: u64, o: u64, d: u8) -> bool {
        let s_node = self.is_s_node(s, o);
        self.search(s, o, d, s_node)
    }

    /// Pre-checks and move generation for a node. `Err(value)` when the node
    /// is decided without branching.
    fn expand(&mut self, s: u64, o: u64, d: u8, s_node: bool) -> Result<MoveList, bool> {
        let n = self.analyze(s, o);
        let ply = (s | o).count_ones() as usize;
        let next_is_s = self.turn.side(ply + 1) == self.s_side;
        if s_node {
            if n.s_threats != 0 {
                return Err(true);
            }
            if d <= 1 {
                return Err(false);
            }
        } else {
            if d == 0 || (self.strong && n.o_threats != 0) {
                return Err(false);
            }
        }
        if n.free == 0 || n.s_live == 0 || (d != INF && n.min_missing > d as u32) {
            return Err(false);
        }
        if !s_node && next_is_s && n.s_threats.count_ones() >= 2 {
            return Err(true);
        }
        match self.probe(s, o, d) {
            Probe::Win => return Err(true),
            Probe::NoWin => return Err(false),
            Probe::Miss => {}
        }
        let mut forced = MoveList::new();
        if s_node && self.strong && !next_is_s && n.o_threats != 0 {
            if n.o_threats.count_ones() >= 2 {
                return Err(self.store(s, o, INF, false, 1));
            }
            forced.push(n.o_threats.trailing_zeros() as usize);
            return Ok(forced);
        }
        if !s_node && next_is_s && n.s_threats != 0 {
            forced.push(n.s_threats.trailing_zeros() as usize);
            return Ok(forced);
        }
        let (ws, wo) = self.weights(s, o, n.free);
        if self.opts.es_pruning {
            let hopeless = if s_node {
                let best = (0..64).filter(|&v| n.free >> v & 1 == 1).map(|v| ws[v]).max().unwrap_or(0);
                !next_is_s && self.turn.alternates_from(ply + 1) && n.score + best < 1u128 << self.scale
            } else {
                self.turn.alternates_from(ply) && n.score < 1u128 << self.scale
            };
            if hopeless {
                return Err(self.store(s, o, INF, false, 1));
            }
        }
        let cand = if self.opts.dead_vertex_pruning { n.s_live | n.o_live } else { n.free };
        let list = self.order(cand, &ws, &wo);
        Ok(self.reduce_by_orbits(s, o, list))
    }

    fn play(&self, s: u64, o: u64, m: u8, s_node: bool) -> (u64, u64) {
        if s_node {
            (s | 1 << m, o)
        } else {
            (s, o | 1 << m)
        }
    }

    fn search(&mut self, s: u64, o: u64, d: u8, s_node: bool) -> bool {
        if self.tick() {
            return false;
        }
        let list = match self.expand(s, o, d, s_node) {
            Ok(list) => list,
            Err(v) => return v,
        };
        let start = self.nodes;
        let child_depth = if s_node { dec(d) } else { d };
        for &m in list.as_slice() {
            let (cs, co) = self.play(s, o, m, s_node);
            let won = self.child(cs, co, child_depth);
            if self.aborted {
                return false;
            }
            // S needs one good move; the opponent needs one refutation.
            if won == s_node {
                let work = self.nodes - start;
                return self.store(s, o, d, won, work);
            }
        }
        let work = self.nodes - start;
        self.store(s, o, d, !s_node, work)
    }

    fn is_s_node(&self, s: u64, o: u64) -> bool {
        self.turn.side((s | o).count_ones() as usize) == self.s_side
    }

    /// Iterative deepening from a position. `Some((win, depth))`, or `None`
    /// if the budget ran out.
    pub fn run(&mut self, s: u64, o: u64) -> Option<(bool, Option<u8>)> {
        self.root_ply = (s | o).count_ones() as usize;
        let cap = self.opts.deepening_cap.min(INF - 1);
        let mut depth = 1u8;
        loop {
            let d = if depth > cap { INF } else { depth };
            let won = self.child(s, o, d);
            if self.aborted {
                return None;
            }
            if won {
                return Some((true, (d != INF).then_some(d)));
            }
            if d == INF {
                return Some((false, None));
            }
            depth += 1;
        }
    }

    /// As [`Engine::run`], but the root's children are searched by
    /// independent copies of this engine on the rayon pool. Each copy keeps a
    /// private table across deepening iterations.
    pub fn run_parallel(&mut self, s: u64, o: u64) -> Option<(bool, Option<u8>)> {
        use rayon::prelude::*;
        self.root_ply = (s | o).count_ones() as usize;
        let cap = self.opts.deepening_cap.min(INF - 1);
        let s_node = self.is_s_node(s, o);
        let mut workers: Vec<Engine> = Vec::new();
        let mut depth = 1u8;
        loop {
            let d = if depth > cap { INF } else { depth };
            self.nodes += 1;
            let result = match self.expand(s, o, d, s_node) {
                Err(v) => v,
                Ok(list) => {
                    let child_depth = if s_node { dec(d) } else { d };
                    while workers.len() < list.len {
                        let mut w = self.clone();
                        w.nodes = 0;
                        w.hits = 0;
                        workers.push(w);
                    }
                    let moves: Vec<u8> = list.as_slice().to_vec();
                    let outcomes: Vec<(bool, bool, u64, u64)> = workers
                        .par_iter_mut()
                        .zip(moves.par_iter())
                        .map(|(w, &m)| {
                            let (before_n, before_h) = (w.nodes, w.hits);
                            let (cs, co) = w.play(s, o, m, s_node);
                            let won = w.child(cs, co, child_depth);
                            (won, w.aborted, w.nodes - before_n, w.hits - before_h)
                        })
                        .collect();
                    for &(_, _, n, h) in &outcomes {
                        self.nodes += n;
                        self.hits += h;
                    }
                    if outcomes.iter().any(|o| o.1) {
                        return None;
                    }
                    if s_node {
                        outcomes.iter().any(|o| o.0)
                    } else {
                        outcomes.iter().all(|o| o.0)
                    }
                }
            };
            if result {
                return Some((true, (d != INF).then_some(d)));
            }
            if d == INF {
                return Some((false, None));
            }
            depth += 1;
        }
    }

    pub fn s_side(&self) -> Side {
        self.s_side
    }

    pub fn turn(&self) -> &Turn {
        &self.turn
    }
}
