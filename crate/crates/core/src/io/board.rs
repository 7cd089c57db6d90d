//! Named boards and board files.

use std::path::Path;

use super::format::{parse_board_file, BoardFile, DesignFile};
use crate::designs::{
    cyclic_td3, find_resolution, flawed_ts62_blocks, make_sts, make_td, make_ts, rtd_to_affine, td44_labels,
    td_to_projective, Design, DesignParams,
};
use crate::error::{Error, Result};
use crate::hypergraph::{fixture_h, fixture_labels, tic_tac_toe_board, GameVariant, Hypergraph};
use crate::strategies::GameContext;

/// A board ready to play on, with point names and, for transversal designs,
/// the groups.
#[derive(Clone, Debug)]
pub struct Board {
    pub label: String,
    pub h: Hypergraph,
    pub names: Vec<String>,
    pub groups: Option<Vec<Vec<usize>>>,
    /// The design file this board was built from, if any.
    pub file: Option<DesignFile>,
}

/// Names accepted by [`Board::builtin`].
pub const BUILTIN_HELP: &str = "H1..H7, ttt, sts:V, ts:V:L, ts62-flawed, td:K:N[:G], tdc:N, proj:N, affine:N";

fn numbers(parts: &[&str], spec: &str) -> Result<Vec<usize>> {
    parts
        .iter()
        .map(|p| p.parse().map_err(|_| Error::InvalidParameters(format!("bad number {p:?} in {spec:?}"))))
        .collect()
}

impl Board {
    /// A file path if it exists, otherwise a built-in name.
    pub fn load(spec: &str) -> Result<Board> {
        let path = Path::new(spec);
        if path.is_file() {
            let text = std::fs::read_to_string(path)?;
            return Board::from_text(spec, &text);
        }
        Board::builtin(spec)
    }

    pub fn from_text(label: &str, text: &str) -> Result<Board> {
        match parse_board_file(text)? {
            BoardFile::Hypergraph(h) => Ok(Board::from_hypergraph(label, h)),
            BoardFile::Design(f) => Board::from_design_file(label, f),
        }
    }

    pub fn from_hypergraph(label: &str, h: Hypergraph) -> Board {
        let names = (0..h.vertex_count()).map(|i| i.to_string()).collect();
        Board { label: label.into(), h, names, groups: None, file: None }
    }

    pub fn from_design_file(label: &str, f: DesignFile) -> Result<Board> {
        let h = f.to_hypergraph(&[])?;
        let groups = (!f.groups.is_empty()).then(|| f.groups.clone());
        Ok(Board { label: label.into(), h, names: f.names.clone(), groups, file: Some(f) })
    }

    pub fn builtin(spec: &str) -> Result<Board> {
        let parts: Vec<&str> = spec.split(':').collect();
        let unknown =
            || Error::InvalidParameters(format!("unknown board {spec:?}; expected a file or one of {BUILTIN_HELP}"));
        let design = |d: Design| Board::from_design_file(spec, DesignFile::from_design(&d, None));
        match parts.as_slice() {
            [name] if name.len() == 2 && (name.starts_with('H') || name.starts_with('h')) => {
                let i: usize = name[1..].parse().map_err(|_| unknown())?;
                let h = fixture_h(i)?;
                Ok(Board { names: fixture_labels(i)?, ..Board::from_hypergraph(spec, h) })
            }
            ["ttt"] => {
                let h = tic_tac_toe_board();
                Ok(Board { names: (1..=9).map(|c| c.to_string()).collect(), ..Board::from_hypergraph(spec, h) })
            }
            ["ts62-flawed"] => {
                let d = Design::unchecked(DesignParams::new(6, 3, 2)?, flawed_ts62_blocks());
                design(d)
            }
            ["sts", v] => design(make_sts(numbers(&[v], spec)?[0])?),
            ["ts", v, l] => {
                let n = numbers(&[v, l], spec)?;
                design(make_ts(n[0], n[1])?)
            }
            ["td", k, n, rest @ ..] if rest.len() <= 1 => {
                let kn = numbers(&[k, n], spec)?;
                let td = make_td(kn[0], kn[1])?;
                let names = (kn == [4, 4]).then(td44_labels);
                let mut board = Board::from_design_file(spec, DesignFile::from_td(&td, names))?;
                if let Some(g) = rest.first() {
                    let g = numbers(&[g], spec)?[0];
                    if g > td.k {
                        return Err(Error::InvalidParameters(format!(
                            "TD({},{}) has only {} groups",
                            td.k, td.n, td.k
                        )));
                    }
                    board.h = td.to_hypergraph(&(0..g).collect::<Vec<_>>())?;
                }
                Ok(board)
            }
            ["tdc", n] => {
                let td = cyclic_td3(numbers(&[n], spec)?[0])?;
                Board::from_design_file(spec, DesignFile::from_td(&td, None))
            }
            ["proj", n] => {
                let n = numbers(&[n], spec)?[0];
                design(td_to_projective(&make_td(n + 1, n)?)?)
            }
            ["affine", n] => {
                let n = numbers(&[n], spec)?[0];
                let td = make_td(n, n)?;
                let res =
                    find_resolution(&td).ok_or_else(|| Error::Unsupported(format!("TD({n},{n}) has no resolution")))?;
                design(rtd_to_affine(&td, &res)?)
            }
            _ => Err(unknown()),
        }
    }

    /// Vertex index for a point name, or a plain index.
    pub fn vertex(&self, token: &str) -> Result<usize> {
        if let Some(i) = self.names.iter().position(|n| n == token) {
            return Ok(i);
        }
        match token.parse::<usize>() {
            Ok(i) if i < self.h.vertex_count() => Ok(i),
            _ => Err(Error::InvalidParameters(format!("unknown point {token:?}"))),
        }
    }

    pub fn name(&self, v: usize) -> String {
        self.names.get(v).cloned().unwrap_or_else(|| v.to_string())
    }

    pub fn context(&self, variant: GameVariant) -> GameContext {
        let ctx = GameContext::new(self.h.clone(), variant);
        match &self.groups {
            Some(g) => ctx.with_groups(g.clone()),
            None => ctx,
        }
    }
}
