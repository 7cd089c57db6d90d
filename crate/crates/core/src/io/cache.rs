//! On-disk cache of solve results, keyed by a content hash.

use std::fs;
use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

use rand::Rng;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use super::format::emit_hypergraph;
use crate::error::{Error, Result};
use crate::hypergraph::{GameState, GameVariant, Hypergraph, TurnSchedule};
use crate::solver::{GameValue, SolveResult, Solver, SolverConfig};

/// Bumped whenever a solver change could alter a stored answer.
pub const SOLVER_VERSION: &str = concat!("design-games-", env!("CARGO_PKG_VERSION"), "/solver-1");

/// Environment variable naming the cache directory.
pub const CACHE_ENV: &str = "DGAMES_CACHE_DIR";

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SolveCacheEntry {
    pub key: String,
    pub value: GameValue,
    pub win_depth: Option<u32>,
    pub best_move: Option<usize>,
    pub nodes: u64,
    pub solver_version: String,
    /// Seconds since the Unix epoch.
    pub timestamp: u64,
}

/// Where an answer came from.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Source {
    Solver,
    Cached,
}

#[derive(Clone, Debug)]
pub struct CachedSolve {
    pub result: SolveResult,
    pub source: Source,
    /// `Some(agrees)` when a cached answer was re-solved for the audit.
    pub audit: Option<bool>,
}

/// A directory of JSON entries, one file per key. Writers go through a
/// temporary file and a rename, so readers never see a partial entry.
#[derive(Clone, Debug)]
pub struct SolveCache {
    dir: PathBuf,
    /// Fraction of hits that are re-solved and compared.
    pub audit_rate: f64,
}

/// Content hash of a solve request.
pub fn cache_key(h: &Hypergraph, variant: GameVariant, state: &GameState, schedule: Option<&TurnSchedule>) -> String {
    let schedule = schedule.filter(|s| !s.is_standard());
    let text = format!(
        "{SOLVER_VERSION}\nvariant {variant}\nschedule {}\nstate {:x} {:x} {}\n{}",
        schedule.map_or_else(|| "-".to_string(), |s| format!("{}+{}", s.symbols(), s.tail_start)),
        state.first.bits(),
        state.second.bits(),
        state.to_move,
        emit_hypergraph(h)
    );
    hex::encode(Sha256::digest(text.as_bytes()))
}

impl SolveCache {
    pub fn open(dir: impl AsRef<Path>) -> Result<SolveCache> {
        let dir = dir.as_ref().to_path_buf();
        fs::create_dir_all(&dir)?;
        Ok(SolveCache { dir, audit_rate: 0.05 })
    }

    /// `$DGAMES_CACHE_DIR`, else `$XDG_CACHE_HOME/dgames`, else `~/.cache/dgames`.
    pub fn default_dir() -> Option<PathBuf> {
        if let Some(d) = std::env::var_os(CACHE_ENV) {
            return Some(PathBuf::from(d));
        }
        if let Some(d) = std::env::var_os("XDG_CACHE_HOME") {
            return Some(PathBuf::from(d).join("dgames"));
        }
        std::env::var_os("HOME").map(|h| PathBuf::from(h).join(".cache").join("dgames"))
    }

    pub fn dir(&self) -> &Path {
        &self.dir
    }

    fn path(&self, key: &str) -> PathBuf {
        self.dir.join(format!("{key}.json"))
    }

    /// The entry for `key`, if present and written by this solver version.
    pub fn get(&self, key: &str) -> Result<Option<SolveCacheEntry>> {
        let text = match fs::read_to_string(self.path(key)) {
            Ok(t) => t,
            Err(e) if e.kind() == std::io::ErrorKind::NotFound => return Ok(None),
            Err(e) => return Err(e.into()),
        };
        let entry: SolveCacheEntry = match serde_json::from_str(&text) {
            Ok(e) => e,
            Err(_) => return Ok(None),
        };
        Ok((entry.key == key && entry.solver_version == SOLVER_VERSION).then_some(entry))
    }

    pub fn put(&self, entry: &SolveCacheEntry) -> Result<()> {
        let json = serde_json::to_string(entry).map_err(|e| Error::Io(e.to_string()))?;
        let tmp = self.dir.join(format!(".{}.{}.tmp", entry.key, std::process::id()));
        fs::write(&tmp, json)?;
        fs::rename(&tmp, self.path(&entry.key))?;
        Ok(())
    }
}

fn entry_for(key: String, r: &SolveResult) -> SolveCacheEntry {
    SolveCacheEntry {
        key,
        value: r.value,
        win_depth: r.win_depth,
        best_move: r.best_move,
        nodes: r.nodes_expanded,
        solver_version: SOLVER_VERSION.to_string(),
        timestamp: SystemTime::now().duration_since(UNIX_EPOCH).map_or(0, |d| d.as_secs()),
    }
}

/// Solve through the cache. Unknown results are never stored. A random
/// sample of hits is re-solved; a disagreement replaces the stored entry.
pub fn solve_cached(
    cache: Option<&SolveCache>,
    h: &Hypergraph,
    variant: GameVariant,
    state: &GameState,
    schedule: Option<&TurnSchedule>,
    config: &SolverConfig,
) -> Result<CachedSolve> {
    let fresh = || Solver::new(h, variant, schedule.cloned(), config.clone())?.solve(state);
    let Some(cache) = cache else {
        return Ok(CachedSolve { result: fresh()?, source: Source::Solver, audit: None });
    };
    let key = cache_key(h, variant, state, schedule);
    if let Some(e) = cache.get(&key)? {
        let cached = SolveResult {
            value: e.value,
            win_depth: e.win_depth,
            best_move: e.best_move,
            nodes_expanded: e.nodes,
            table_hits: 0,
            elapsed: Default::default(),
        };
        if cache.audit_rate > 0.0 && rand::thread_rng().gen_bool(cache.audit_rate.min(1.0)) {
            let r = fresh()?;
            if !r.value.is_known() {
                return Ok(CachedSolve { result: cached, source: Source::Cached, audit: None });
            }
            let agrees = r.value == e.value && r.best_move == e.best_move;
            if !agrees {
                cache.put(&entry_for(key, &r))?;
                return Ok(CachedSolve { result: r, source: Source::Solver, audit: Some(false) });
            }
            return Ok(CachedSolve { result: cached, source: Source::Cached, audit: Some(true) });
        }
        return Ok(CachedSolve { result: cached, source: Source::Cached, audit: None });
    }
    let r = fresh()?;
    if r.value.is_known() {
        cache.put(&entry_for(key, &r))?;
    }
    Ok(CachedSolve { result: r, source: Source::Solver, audit: None })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::designs::make_sts;
    use crate::solver::Budget;

    #[test]
    fn hit_after_miss_and_audit() {
        let dir = tempfile::tempdir().unwrap();
        let mut cache = SolveCache::open(dir.path()).unwrap();
        let h = make_sts(7).unwrap().to_hypergraph().unwrap();
        let cfg = SolverConfig::default();
        let s = GameState::empty();
        let a = solve_cached(Some(&cache), &h, GameVariant::Strong, &s, None, &cfg).unwrap();
        assert_eq!(a.source, Source::Solver);
        let b = solve_cached(Some(&cache), &h, GameVariant::Strong, &s, None, &cfg).unwrap();
        assert_eq!(b.source, Source::Cached);
        assert_eq!(a.result.value, b.result.value);
        cache.audit_rate = 1.0;
        let c = solve_cached(Some(&cache), &h, GameVariant::Strong, &s, None, &cfg).unwrap();
        assert_eq!(c.audit, Some(true));
    }

    #[test]
    fn keys_separate_requests() {
        let h = make_sts(7).unwrap().to_hypergraph().unwrap();
        let s = GameState::empty();
        let k1 = cache_key(&h, GameVariant::Strong, &s, None);
        assert_eq!(k1, cache_key(&h, GameVariant::Strong, &s, Some(&TurnSchedule::standard())));
        assert_ne!(k1, cache_key(&h, GameVariant::MakerBreaker, &s, None));
        assert_ne!(k1, cache_key(&h, GameVariant::Strong, &s, Some(&TurnSchedule::parse("XOO").unwrap())));
        assert_eq!(k1.len(), 64);
    }

    #[test]
    fn corrupt_or_foreign_entries_are_misses() {
        let dir = tempfile::tempdir().unwrap();
        let cache = SolveCache::open(dir.path()).unwrap();
        let mut e = SolveCacheEntry {
            key: "abc".into(),
            value: GameValue::Draw,
            win_depth: None,
            best_move: Some(0),
            nodes: 1,
            solver_version: "old".into(),
            timestamp: 0,
        };
        cache.put(&e).unwrap();
        assert_eq!(cache.get("abc").unwrap(), None);
        e.solver_version = SOLVER_VERSION.into();
        cache.put(&e).unwrap();
        assert_eq!(cache.get("abc").unwrap(), Some(e));
        fs::write(dir.path().join("bad.json"), "{").unwrap();
        assert_eq!(cache.get("bad").unwrap(), None);
    }

    #[test]
    fn unknown_is_not_stored() {
        let dir = tempfile::tempdir().unwrap();
        let cache = SolveCache::open(dir.path()).unwrap();
        let h = crate::designs::make_td(4, 5).unwrap().to_hypergraph(&[]).unwrap();
        let cfg = SolverConfig::default().with_budget(Budget::nodes(1));
        let r = solve_cached(Some(&cache), &h, GameVariant::Strong, &GameState::empty(), None, &cfg).unwrap();
        assert_eq!(r.result.value, GameValue::Unknown);
        assert_eq!(fs::read_dir(dir.path()).unwrap().count(), 0);
    }
}
