//! File formats, named boards, the solve cache and summary tables.

mod board;
mod cache;
mod format;
mod table;

pub use board::{Board, BUILTIN_HELP};
pub use cache::{cache_key, solve_cached, CachedSolve, SolveCache, SolveCacheEntry, Source, CACHE_ENV, SOLVER_VERSION};
pub use format::{emit_hypergraph, parse_board_file, parse_hypergraph, BoardFile, DesignFile, Header};
pub use table::{augment, outcome_of, outcome_word, table_rows, AugmentReport, RowSource, Scope, TableRow};
