//! Text formats for designs and hypergraphs.
//!
//! Design files:
//!
//! ```text
//! design v=7 k=3 lambda=1        # or: td k=4 n=4
//! points 0 1 2 3 4 5 6           # optional; fixes the index order
//! group ...                      # transversal designs only
//! block 0 1 3
//! ```
//!
//! Point names are arbitrary tokens, numbered in order of first appearance.
//!
//! Hypergraph files: a line `v <count>`, then one edge per line as vertex
//! indices; `-` stands for an empty edge. `#` starts a comment in both formats.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::designs::{validate_bibd, validate_td, Design, DesignParams, TransversalDesign, ValidationReport};
use crate::error::{Error, Result};
use crate::hypergraph::{Hypergraph, VertexSet};

/// First line of a design file.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Header {
    Design { v: usize, k: usize, lambda: usize },
    Td { k: usize, n: usize },
}

impl Header {
    pub fn point_count(&self) -> usize {
        match *self {
            Header::Design { v, .. } => v,
            Header::Td { k, n } => k * n,
        }
    }
}

/// A parsed design file with its point names.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DesignFile {
    pub header: Header,
    pub names: Vec<String>,
    pub groups: Vec<Vec<usize>>,
    pub blocks: Vec<Vec<usize>>,
}

fn strip_comment(line: &str) -> &str {
    line.split('#').next().unwrap_or("").trim()
}

fn parse_err(line: usize, message: impl Into<String>) -> Error {
    Error::Parse { line, message: message.into() }
}

fn parse_header(line_no: usize, keyword: &str, rest: &[&str]) -> Result<Header> {
    let get = |key: &str| -> Result<usize> {
        let prefix = format!("{key}=");
        let token = rest
            .iter()
            .find_map(|t| t.strip_prefix(&prefix))
            .ok_or_else(|| parse_err(line_no, format!("missing {key}=")))?;
        token.parse().map_err(|_| parse_err(line_no, format!("bad value for {key}: {token:?}")))
    };
    match keyword {
        "design" => Ok(Header::Design { v: get("v")?, k: get("k")?, lambda: get("lambda")? }),
        "td" => Ok(Header::Td { k: get("k")?, n: get("n")? }),
        _ => Err(parse_err(line_no, format!("expected a design or td header, found {keyword:?}"))),
    }
}

fn default_names(count: usize) -> Vec<String> {
    (0..count).map(|i| i.to_string()).collect()
}

impl DesignFile {
    pub fn parse(text: &str) -> Result<DesignFile> {
        let mut header = None;
        let mut names: Vec<String> = Vec::new();
        let mut groups = Vec::new();
        let mut blocks = Vec::new();
        let index = |names: &mut Vec<String>, tok: &str| -> usize {
            match names.iter().position(|n| n == tok) {
                Some(i) => i,
                None => {
                    names.push(tok.to_string());
                    names.len() - 1
                }
            }
        };
        for (i, raw) in text.lines().enumerate() {
            let line_no = i + 1;
            let line = strip_comment(raw);
            if line.is_empty() {
                continue;
            }
            let tokens: Vec<&str> = line.split_whitespace().collect();
            let (keyword, rest) = (tokens[0], &tokens[1..]);
            let Some(h) = header else {
                header = Some(parse_header(line_no, keyword, rest)?);
                continue;
            };
            match keyword {
                "points" => {
                    for t in rest {
                        if names.iter().any(|n| n == t) {
                            return Err(parse_err(line_no, format!("point {t:?} listed twice")));
                        }
                        index(&mut names, t);
                    }
                }
                "group" if matches!(h, Header::Td { .. }) => {
                    groups.push(rest.iter().map(|t| index(&mut names, t)).collect());
                }
                "block" => blocks.push(rest.iter().map(|t| index(&mut names, t)).collect()),
                other => return Err(parse_err(line_no, format!("unexpected line kind {other:?}"))),
            }
        }
        let header = header.ok_or_else(|| parse_err(0, "empty design file"))?;
        let count = header.point_count();
        if names.len() > count {
            return Err(parse_err(0, format!("{} distinct points, header allows {count}", names.len())));
        }
        for i in names.len()..count {
            let mut name = i.to_string();
            while names.contains(&name) {
                name.push('\'');
            }
            names.push(name);
        }
        Ok(DesignFile { header, names, groups, blocks })
    }

    pub fn emit(&self) -> String {
        let mut out = String::new();
        let name = |i: &usize| self.names.get(*i).cloned().unwrap_or_else(|| i.to_string());
        let join = |xs: &[usize]| xs.iter().map(name).collect::<Vec<_>>().join(" ");
        match self.header {
            Header::Design { v, k, lambda } => writeln!(out, "design v={v} k={k} lambda={lambda}"),
            Header::Td { k, n } => writeln!(out, "td k={k} n={n}"),
        }
        .ok();
        writeln!(out, "points {}", self.names.join(" ")).ok();
        for g in &self.groups {
            writeln!(out, "group {}", join(g)).ok();
        }
        for b in &self.blocks {
            writeln!(out, "block {}", join(b)).ok();
        }
        out
    }

    pub fn from_design(d: &Design, names: Option<Vec<String>>) -> DesignFile {
        DesignFile {
            header: Header::Design { v: d.params.v, k: d.params.k, lambda: d.params.lambda },
            names: names.unwrap_or_else(|| default_names(d.params.v)),
            groups: Vec::new(),
            blocks: d.blocks.clone(),
        }
    }

    pub fn from_td(td: &TransversalDesign, names: Option<Vec<String>>) -> DesignFile {
        DesignFile {
            header: Header::Td { k: td.k, n: td.n },
            names: names.unwrap_or_else(|| default_names(td.point_count())),
            groups: td.groups.clone(),
            blocks: td.blocks.clone(),
        }
    }

    pub fn validate(&self) -> ValidationReport {
        match self.header {
            Header::Design { v, k, lambda } => validate_bibd(&self.blocks, v, k, lambda),
            Header::Td { k, n } => validate_td(k, n, &self.groups, &self.blocks),
        }
    }

    /// The design, if the file describes a valid BIBD.
    pub fn to_design(&self) -> Result<Design> {
        match self.header {
            Header::Design { v, k, lambda } => Design::new(DesignParams::new(v, k, lambda)?, self.blocks.clone()),
            Header::Td { .. } => Err(Error::InvalidDesign("file holds a transversal design".into())),
        }
    }

    /// The transversal design, if the file describes a valid one.
    pub fn to_td(&self) -> Result<TransversalDesign> {
        match self.header {
            Header::Td { k, n } => TransversalDesign::new(k, n, self.groups.clone(), self.blocks.clone()),
            Header::Design { .. } => Err(Error::InvalidDesign("file holds a block design".into())),
        }
    }

    /// Blocks as edges, followed by the listed groups. Does not validate.
    pub fn to_hypergraph(&self, include_groups: &[usize]) -> Result<Hypergraph> {
        let mut edges = self.blocks.clone();
        for &g in include_groups {
            let group =
                self.groups.get(g).ok_or_else(|| Error::InvalidParameters(format!("group {g} out of range")))?;
            edges.push(group.clone());
        }
        Hypergraph::new(self.header.point_count(), edges)
    }
}

/// Canonical text of a hypergraph.
pub fn emit_hypergraph(h: &Hypergraph) -> String {
    let mut out = format!("v {}\n", h.vertex_count());
    for e in h.edges() {
        if e.is_empty() {
            out.push_str("-\n");
        } else {
            let line: Vec<String> = e.iter().map(|v| v.to_string()).collect();
            out.push_str(&line.join(" "));
            out.push('\n');
        }
    }
    out
}

pub fn parse_hypergraph(text: &str) -> Result<Hypergraph> {
    let mut count = None;
    let mut edges = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line_no = i + 1;
        let line = strip_comment(raw);
        if line.is_empty() {
            continue;
        }
        let tokens: Vec<&str> = line.split_whitespace().collect();
        let Some(n) = count else {
            match tokens.as_slice() {
                ["v", n] => count = Some(n.parse::<usize>().map_err(|_| parse_err(line_no, "bad vertex count"))?),
                _ => return Err(parse_err(line_no, "expected `v <count>`")),
            }
            continue;
        };
        if tokens == ["-"] {
            edges.push(VertexSet::EMPTY);
            continue;
        }
        let mut edge = VertexSet::EMPTY;
        for t in tokens {
            let v: usize = t.parse().map_err(|_| parse_err(line_no, format!("bad vertex {t:?}")))?;
            if v >= n {
                return Err(parse_err(line_no, format!("vertex {v} out of range (v = {n})")));
            }
            edge.insert(v);
        }
        edges.push(edge);
    }
    let n = count.ok_or_else(|| parse_err(0, "empty hypergraph file"))?;
    Hypergraph::from_sets(n, edges)
}

/// Either kind of board file.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum BoardFile {
    Design(DesignFile),
    Hypergraph(Hypergraph),
}

/// Parse a file, telling the formats apart by their first keyword.
pub fn parse_board_file(text: &str) -> Result<BoardFile> {
    let first = text.lines().map(strip_comment).find(|l| !l.is_empty()).unwrap_or("");
    match first.split_whitespace().next() {
        Some("v") => parse_hypergraph(text).map(BoardFile::Hypergraph),
        Some("design") | Some("td") => DesignFile::parse(text).map(BoardFile::Design),
        _ => Err(parse_err(1, "unrecognised file: expected `design`, `td` or `v` header")),
    }
}
