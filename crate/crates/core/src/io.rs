//! Plain-text edge-list format.
//!
//! ```text
//! n m [weighted]
//! u v [w]
//! ...
//! ```
//!
//! Vertices are 0-indexed. Writers emit edges in sorted order with a
//! single space separator and a trailing newline, so saving a loaded
//! canonical file reproduces it byte for byte.

use std::fmt::Write as _;
use std::path::Path;

use crate::error::{Error, Result};
use crate::graph::{Graph, GraphBuilder};

pub fn to_edge_list(g: &Graph) -> String {
    let mut out = String::with_capacity(16 * (g.edge_count() + 1));
    if g.is_weighted() {
        let _ = writeln!(out, "{} {} weighted", g.vertex_count(), g.edge_count());
        for &(u, v, w) in g.edges() {
            let _ = writeln!(out, "{u} {v} {w}");
        }
    } else {
        let _ = writeln!(out, "{} {}", g.vertex_count(), g.edge_count());
        for &(u, v, _) in g.edges() {
            let _ = writeln!(out, "{u} {v}");
        }
    }
    out
}

fn parse_num(tok: Option<&str>, line: usize, what: &str) -> Result<usize> {
    let tok = tok.ok_or_else(|| Error::Parse {
        line,
        msg: format!("missing {what}"),
    })?;
    tok.parse().map_err(|_| Error::Parse {
        line,
        msg: format!("bad {what} {tok:?}"),
    })
}

pub fn parse_edge_list(text: &str) -> Result<Graph> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'));
    let (hline, header) = lines.next().ok_or(Error::Parse {
        line: 1,
        msg: "empty input".into(),
    })?;
    let mut toks = header.split_whitespace();
    let n = parse_num(toks.next(), hline, "vertex count")?;
    let m = parse_num(toks.next(), hline, "edge count")?;
    let weighted = match toks.next() {
        None => false,
        Some("weighted") => true,
        Some(other) => {
            return Err(Error::Parse {
                line: hline,
                msg: format!("unexpected header token {other:?}"),
            })
        }
    };
    let mut b = GraphBuilder::new(n, weighted);
    let mut seen = 0;
    for (line, l) in lines {
        let mut toks = l.split_whitespace();
        let u = parse_num(toks.next(), line, "endpoint")?;
        let v = parse_num(toks.next(), line, "endpoint")?;
        let w = if weighted {
            parse_num(toks.next(), line, "weight")? as u32
        } else {
            1
        };
        if toks.next().is_some() {
            return Err(Error::Parse {
                line,
                msg: "trailing tokens".into(),
            });
        }
        b.add_weighted_edge(u, v, w).map_err(|e| Error::Parse {
            line,
            msg: e.to_string(),
        })?;
        seen += 1;
    }
    if seen != m {
        return Err(Error::Parse {
            line: hline,
            msg: format!("header announces {m} edges, found {seen}"),
        });
    }
    let g = b.build();
    if g.edge_count() != m {
        return Err(Error::Parse {
            line: hline,
            msg: "duplicate edges".into(),
        });
    }
    Ok(g)
}

pub fn load_edge_list(path: impl AsRef<Path>) -> Result<Graph> {
    parse_edge_list(&std::fs::read_to_string(path)?)
}

pub fn save_edge_list(g: &Graph, path: impl AsRef<Path>) -> Result<()> {
    std::fs::write(path, to_edge_list(g))?;
    Ok(())
}

/// Graphviz rendering. `labels` overrides vertex labels and `groups`
/// places vertices into named clusters.
pub fn to_dot(g: &Graph, labels: Option<&[String]>, groups: Option<&[Option<String>]>) -> String {
    let mut out = String::from("graph G {\n  node [shape=point];\n");
    let mut grouped: std::collections::BTreeMap<&str, Vec<usize>> = Default::default();
    if let Some(groups) = groups {
        for (v, grp) in groups.iter().enumerate() {
            if let Some(name) = grp {
                grouped.entry(name.as_str()).or_default().push(v);
            }
        }
    }
    for (i, (name, members)) in grouped.iter().enumerate() {
        let _ = writeln!(out, "  subgraph cluster_{i} {{\n    label=\"{name}\";");
        for v in members {
            let _ = writeln!(out, "    {v};");
        }
        out.push_str("  }\n");
    }
    if let Some(labels) = labels {
        for (v, l) in labels.iter().enumerate() {
            let _ = writeln!(out, "  {v} [label=\"{l}\"];");
        }
    }
    for &(u, v, w) in g.edges() {
        if g.is_weighted() {
            let _ = writeln!(out, "  {u} -- {v} [label=\"{w}\"];");
        } else {
            let _ = writeln!(out, "  {u} -- {v};");
        }
    }
    out.push_str("}\n");
    out
}

/// Graphs serialize as their edge-list text.
impl serde::Serialize for Graph {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        to_edge_list(self).as_str().serialize(s)
    }
}

impl<'de> serde::Deserialize<'de> for Graph {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let text = String::deserialize(d)?;
        parse_edge_list(&text).map_err(serde::de::Error::custom)
    }
}
