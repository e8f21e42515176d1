//! Line-oriented text formats for graphs, patterns, and update scripts.
//!
//! Graph files hold `node <id> <label>[,<label>...]` and `edge <id> <id>`
//! lines. Pattern files hold `pnode <id> <label> [x,y]` (or `[x,*]`) and
//! `pedge <id> <id>` lines. Scripts hold update units, one per line, with
//! `---` ending an update set. Everywhere `#` starts a comment.

use std::fmt::Write as _;

use teamsim_core::{Capacity, DataGraph, NodeId, PNodeId, PatternGraph};

use crate::names::{Labels, NodeNames};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("line {line}, column {column}: {message}")]
pub struct ParseError {
    pub line: usize,
    pub column: usize,
    pub message: String,
}

struct Token<'a> {
    text: &'a str,
    column: usize,
}

fn tokens(line: &str) -> Vec<Token<'_>> {
    let code = line.split('#').next().unwrap_or("");
    let mut out = Vec::new();
    let mut start = None;
    for (i, c) in code.char_indices() {
        match (c.is_whitespace(), start) {
            (true, Some(s)) => {
                out.push(Token {
                    text: &code[s..i],
                    column: s + 1,
                });
                start = None;
            }
            (false, None) => start = Some(i),
            _ => {}
        }
    }
    if let Some(s) = start {
        out.push(Token {
            text: &code[s..],
            column: s + 1,
        });
    }
    out
}

fn err(line: usize, column: usize, message: impl Into<String>) -> ParseError {
    ParseError {
        line,
        column,
        message: message.into(),
    }
}

fn expect_args(line: usize, toks: &[Token<'_>], count: usize, usage: &str) -> Result<(), ParseError> {
    if toks.len() == count + 1 {
        return Ok(());
    }
    let column = toks.get(count + 1).map_or_else(|| toks.last().map_or(1, |t| t.column + t.text.len()), |t| t.column);
    Err(err(line, column, format!("expected `{usage}`")))
}

/// Parses `[x,y]` or `[x,*]`.
pub fn parse_capacity(text: &str, line: usize, column: usize) -> Result<Capacity, ParseError> {
    let bad = || err(line, column, format!("invalid capacity `{text}`"));
    let inner = text.strip_prefix('[').and_then(|t| t.strip_suffix(']')).ok_or_else(bad)?;
    let (lo, hi) = inner.split_once(',').ok_or_else(bad)?;
    let lower: u32 = lo.trim().parse().map_err(|_| bad())?;
    let upper = match hi.trim() {
        "*" => None,
        y => Some(y.parse::<u32>().map_err(|_| bad())?),
    };
    Capacity::new(lower, upper).map_err(|e| err(line, column, e.to_string()))
}

/// A parsed data graph with its external node names.
#[derive(Clone, Debug, Default)]
pub struct GraphDoc {
    pub graph: DataGraph,
    pub names: NodeNames,
}

pub fn parse_graph(text: &str, labels: &mut Labels) -> Result<GraphDoc, ParseError> {
    let mut doc = GraphDoc::default();
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let toks = tokens(raw);
        let Some(head) = toks.first() else { continue };
        match head.text {
            "node" => {
                expect_args(line, &toks, 2, "node <id> <label>[,<label>...]")?;
                let name = toks[1].text;
                if doc.names.id(name).is_some() {
                    return Err(err(line, toks[1].column, format!("duplicate node `{name}`")));
                }
                let mut ids = Vec::new();
                for part in toks[2].text.split(',') {
                    if part.is_empty() {
                        return Err(err(line, toks[2].column, "empty label"));
                    }
                    ids.push(labels.intern(part));
                }
                let id = doc.graph.add_node(ids).map_err(|e| err(line, toks[2].column, e.to_string()))?;
                doc.names.bind(name, id);
            }
            "edge" => {
                expect_args(line, &toks, 2, "edge <id> <id>")?;
                let mut ends = [NodeId(0); 2];
                for (slot, t) in ends.iter_mut().zip(&toks[1..3]) {
                    *slot = doc
                        .names
                        .id(t.text)
                        .ok_or_else(|| err(line, t.column, format!("unknown node `{}`", t.text)))?;
                }
                doc.graph
                    .add_edge(ends[0], ends[1])
                    .map_err(|e| err(line, toks[1].column, e.to_string()))?;
            }
            other => return Err(err(line, head.column, format!("unknown directive `{other}`"))),
        }
    }
    Ok(doc)
}

pub fn write_graph(doc: &GraphDoc, labels: &Labels) -> String {
    let mut out = String::new();
    for v in doc.graph.nodes() {
        let ls: Vec<&str> = doc.graph.labels(v).iter().map(|&l| labels.name(l)).collect();
        writeln!(out, "node {} {}", doc.names.name(v), ls.join(",")).unwrap();
    }
    for (a, b) in doc.graph.edges() {
        writeln!(out, "edge {} {}", doc.names.name(a), doc.names.name(b)).unwrap();
    }
    out
}

/// Parses a pattern; connectivity is checked separately by [`PatternGraph::validate`].
pub fn parse_pattern(text: &str, labels: &mut Labels) -> Result<PatternGraph, ParseError> {
    let mut p = PatternGraph::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let toks = tokens(raw);
        let Some(head) = toks.first() else { continue };
        match head.text {
            "pnode" => {
                if toks.len() != 3 && toks.len() != 4 {
                    return Err(err(line, head.column, "expected `pnode <id> <label> [x,y]`"));
                }
                let name = toks[1].text;
                if p.find(name).is_some() {
                    return Err(err(line, toks[1].column, format!("duplicate pattern node `{name}`")));
                }
                let cap = match toks.get(3) {
                    Some(t) => parse_capacity(t.text, line, t.column)?,
                    None => Capacity::default(),
                };
                let label = labels.intern(toks[2].text);
                p.add_node(name, label, cap).map_err(|e| err(line, toks[1].column, e.to_string()))?;
            }
            "pedge" => {
                expect_args(line, &toks, 2, "pedge <id> <id>")?;
                let mut ends = [PNodeId(0); 2];
                for (slot, t) in ends.iter_mut().zip(&toks[1..3]) {
                    *slot = p
                        .find(t.text)
                        .ok_or_else(|| err(line, t.column, format!("unknown pattern node `{}`", t.text)))?;
                }
                p.add_edge(ends[0], ends[1]).map_err(|e| err(line, toks[1].column, e.to_string()))?;
            }
            other => return Err(err(line, head.column, format!("unknown directive `{other}`"))),
        }
    }
    Ok(p)
}

pub fn write_pattern(p: &PatternGraph, labels: &Labels) -> String {
    let mut out = String::new();
    for (_, n) in p.nodes() {
        writeln!(out, "pnode {} {} {}", n.name, labels.name(n.label), n.capacity).unwrap();
    }
    for (a, b) in p.edges() {
        let name = |v: PNodeId| p.node(v).map(|n| n.name.clone()).unwrap_or_default();
        writeln!(out, "pedge {} {}", name(a), name(b)).unwrap();
    }
    out
}

/// One update unit with external names.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ScriptUnit {
    PatternInsertEdge(String, String),
    PatternDeleteEdge(String, String),
    PatternInsertNode {
        name: String,
        anchor: String,
        label: String,
        capacity: Capacity,
    },
    PatternDeleteNode(String),
    PatternSetCapacity(String, Capacity),
    DataInsertEdge(String, String),
    DataDeleteEdge(String, String),
    DataInsertNode {
        name: String,
        anchor: String,
        labels: Vec<String>,
    },
    DataDeleteNode(String),
}

impl ScriptUnit {
    pub fn is_pattern(&self) -> bool {
        matches!(
            self,
            ScriptUnit::PatternInsertEdge(..)
                | ScriptUnit::PatternDeleteEdge(..)
                | ScriptUnit::PatternInsertNode { .. }
                | ScriptUnit::PatternDeleteNode(_)
                | ScriptUnit::PatternSetCapacity(..)
        )
    }
}

impl std::fmt::Display for ScriptUnit {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            ScriptUnit::PatternInsertEdge(a, b) => write!(f, "p+edge {a} {b}"),
            ScriptUnit::PatternDeleteEdge(a, b) => write!(f, "p-edge {a} {b}"),
            ScriptUnit::PatternInsertNode {
                name,
                anchor,
                label,
                capacity,
            } => write!(f, "p+node {name} anchor={anchor} label={label} cap={capacity}"),
            ScriptUnit::PatternDeleteNode(v) => write!(f, "p-node {v}"),
            ScriptUnit::PatternSetCapacity(v, c) => write!(f, "p.cap {v} {c}"),
            ScriptUnit::DataInsertEdge(a, b) => write!(f, "g+edge {a} {b}"),
            ScriptUnit::DataDeleteEdge(a, b) => write!(f, "g-edge {a} {b}"),
            ScriptUnit::DataInsertNode { name, anchor, labels } => {
                write!(f, "g+node {name} anchor={anchor} labels={}", labels.join(","))
            }
            ScriptUnit::DataDeleteNode(v) => write!(f, "g-node {v}"),
        }
    }
}

/// Units applied together as one update set.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct UpdateSet {
    pub units: Vec<ScriptUnit>,
}

/// A script entry: an update set or a session command.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ScriptItem {
    Set(UpdateSet),
    Stats,
    Rebuild,
}

fn keyed<'a>(tok: &Token<'a>, key: &str, line: usize) -> Result<&'a str, ParseError> {
    tok.text
        .strip_prefix(key)
        .and_then(|t| t.strip_prefix('='))
        .filter(|v| !v.is_empty())
        .ok_or_else(|| err(line, tok.column, format!("expected `{key}=...`")))
}

/// Parses one update unit line, already split into tokens.
fn parse_unit(line: usize, toks: &[Token<'_>]) -> Result<ScriptUnit, ParseError> {
    let head = &toks[0];
    let two = |usage: &str| -> Result<(String, String), ParseError> {
        expect_args(line, toks, 2, usage)?;
        Ok((toks[1].text.to_string(), toks[2].text.to_string()))
    };
    let one = |usage: &str| -> Result<String, ParseError> {
        expect_args(line, toks, 1, usage)?;
        Ok(toks[1].text.to_string())
    };
    Ok(match head.text {
        "p+edge" => {
            let (a, b) = two("p+edge <id> <id>")?;
            ScriptUnit::PatternInsertEdge(a, b)
        }
        "p-edge" => {
            let (a, b) = two("p-edge <id> <id>")?;
            ScriptUnit::PatternDeleteEdge(a, b)
        }
        "p+node" => {
            expect_args(line, toks, 4, "p+node <id> anchor=<id> label=<label> cap=[x,y]")?;
            let cap_text = keyed(&toks[4], "cap", line)?;
            ScriptUnit::PatternInsertNode {
                name: toks[1].text.to_string(),
                anchor: keyed(&toks[2], "anchor", line)?.to_string(),
                label: keyed(&toks[3], "label", line)?.to_string(),
                capacity: parse_capacity(cap_text, line, toks[4].column + 4)?,
            }
        }
        "p-node" => ScriptUnit::PatternDeleteNode(one("p-node <id>")?),
        "p.cap" => {
            expect_args(line, toks, 2, "p.cap <id> [x,y]")?;
            ScriptUnit::PatternSetCapacity(toks[1].text.to_string(), parse_capacity(toks[2].text, line, toks[2].column)?)
        }
        "g+edge" => {
            let (a, b) = two("g+edge <id> <id>")?;
            ScriptUnit::DataInsertEdge(a, b)
        }
        "g-edge" => {
            let (a, b) = two("g-edge <id> <id>")?;
            ScriptUnit::DataDeleteEdge(a, b)
        }
        "g+node" => {
            expect_args(line, toks, 3, "g+node <id> anchor=<id> labels=<label>[,<label>...]")?;
            let labels: Vec<String> = keyed(&toks[3], "labels", line)?.split(',').map(str::to_string).collect();
            if labels.iter().any(|l| l.is_empty()) {
                return Err(err(line, toks[3].column, "empty label"));
            }
            ScriptUnit::DataInsertNode {
                name: toks[1].text.to_string(),
                anchor: keyed(&toks[2], "anchor", line)?.to_string(),
                labels,
            }
        }
        "g-node" => ScriptUnit::DataDeleteNode(one("g-node <id>")?),
        other => return Err(err(line, head.column, format!("unknown update `{other}`"))),
    })
}

/// Parses a script of update sets and `stats` / `rebuild` commands.
///
/// A set ends at `---`, at a command, or at the end of input; an explicit
/// `---` with no units before it yields an empty set.
pub fn parse_script(text: &str) -> Result<Vec<ScriptItem>, ParseError> {
    let mut items = Vec::new();
    let mut current = UpdateSet::default();
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let toks = tokens(raw);
        let Some(head) = toks.first() else { continue };
        match head.text {
            "---" => {
                expect_args(line, &toks, 0, "---")?;
                items.push(ScriptItem::Set(std::mem::take(&mut current)));
            }
            "stats" | "rebuild" => {
                expect_args(line, &toks, 0, head.text)?;
                if !current.units.is_empty() {
                    items.push(ScriptItem::Set(std::mem::take(&mut current)));
                }
                items.push(if head.text == "stats" { ScriptItem::Stats } else { ScriptItem::Rebuild });
            }
            _ => current.units.push(parse_unit(line, &toks)?),
        }
    }
    if !current.units.is_empty() {
        items.push(ScriptItem::Set(current));
    }
    Ok(items)
}

/// Parses a script holding only update sets.
pub fn parse_updates(text: &str) -> Result<Vec<UpdateSet>, ParseError> {
    let mut sets = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let toks = tokens(raw);
        if let Some(t) = toks.first() {
            if t.text == "stats" || t.text == "rebuild" {
                return Err(err(idx + 1, t.column, format!("command `{}` is not an update", t.text)));
            }
        }
    }
    for item in parse_script(text)? {
        if let ScriptItem::Set(s) = item {
            sets.push(s);
        }
    }
    Ok(sets)
}

/// Parses a list of unit lines as a single update set.
pub fn parse_unit_lines<'a, I: IntoIterator<Item = &'a str>>(lines: I) -> Result<UpdateSet, ParseError> {
    let mut set = UpdateSet::default();
    for (idx, raw) in lines.into_iter().enumerate() {
        let toks = tokens(raw);
        if toks.is_empty() {
            continue;
        }
        set.units.push(parse_unit(idx + 1, &toks)?);
    }
    Ok(set)
}

pub fn write_updates(sets: &[UpdateSet]) -> String {
    let mut out = String::new();
    for set in sets {
        for u in &set.units {
            writeln!(out, "{u}").unwrap();
        }
        out.push_str("---\n");
    }
    out
}
