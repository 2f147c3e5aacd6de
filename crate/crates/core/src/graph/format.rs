//! Plain-text graph files.
//!
//! ```text
//! # comment
//! node A B C        optional declarations, fixes node order
//! A -> B            directed edge
//! B <-> C           bidirected edge
//! ```

use std::collections::HashSet;

use super::{Admg, AdmgBuilder, NodeId};
use crate::error::{Error, Result};

pub fn parse_graph(text: &str) -> Result<Admg> {
    let mut b = AdmgBuilder::new();
    let mut seen_directed = HashSet::new();
    let mut seen_bidirected = HashSet::new();

    for (lineno, raw) in text.lines().enumerate() {
        let line = lineno + 1;
        let stmt = raw.split('#').next().unwrap_or("").trim();
        if stmt.is_empty() {
            continue;
        }
        let syntax = |message: String| Error::Syntax { line, message };
        let name_at = |b: &mut AdmgBuilder, s: &str| {
            b.node(s).map_err(|_| syntax(format!("invalid node name `{s}`")))
        };

        let mut tokens = stmt.split_whitespace();
        if tokens.next() == Some("node") {
            for tok in tokens {
                name_at(&mut b, tok)?;
            }
            continue;
        }

        let (lhs, rhs, bidirected) = if let Some((l, r)) = stmt.split_once("<->") {
            (l, r, true)
        } else if let Some((l, r)) = stmt.split_once("->") {
            (l, r, false)
        } else {
            return Err(syntax(format!("expected `A -> B`, `A <-> B` or `node ...`, got `{stmt}`")));
        };
        let (lhs, rhs) = (lhs.trim(), rhs.trim());
        if lhs.is_empty() || rhs.is_empty() || lhs.contains(char::is_whitespace) || rhs.contains(char::is_whitespace) {
            return Err(syntax(format!("malformed edge `{stmt}`")));
        }
        let a = name_at(&mut b, lhs)?;
        let c = name_at(&mut b, rhs)?;
        if a == c {
            return Err(Error::SelfLoop(lhs.to_string()));
        }
        if bidirected {
            if !seen_bidirected.insert((a.min(c), a.max(c))) {
                return Err(Error::DuplicateEdge(format!("{lhs} <-> {rhs} (line {line})")));
            }
            b.bidirected.push((a, c));
        } else {
            if !seen_directed.insert((a, c)) {
                return Err(Error::DuplicateEdge(format!("{lhs} -> {rhs} (line {line})")));
            }
            b.directed.push((a, c));
        }
    }
    b.build()
}

/// Renders `g` so that `parse_graph` reproduces it exactly, node order
/// included. A `node` line is emitted only when the edge lines alone would
/// not reproduce the node order.
pub fn serialize_graph(g: &Admg) -> String {
    let mut lines = Vec::new();
    let mut mention: Vec<NodeId> = Vec::new();
    let mut mentioned = vec![false; g.num_nodes()];
    let mut note = |n: NodeId, mention: &mut Vec<NodeId>| {
        if !mentioned[n.0] {
            mentioned[n.0] = true;
            mention.push(n);
        }
    };
    for (t, h) in g.directed_edges() {
        note(t, &mut mention);
        note(h, &mut mention);
        lines.push(format!("{} -> {}", g.name(t), g.name(h)));
    }
    for (a, b) in g.bidirected_edges() {
        note(a, &mut mention);
        note(b, &mut mention);
        lines.push(format!("{} <-> {}", g.name(a), g.name(b)));
    }

    let mut out = String::new();
    let natural: Vec<NodeId> = g.nodes().collect();
    if mention != natural {
        out.push_str("node ");
        out.push_str(&g.names().join(" "));
        out.push('\n');
    }
    for l in lines {
        out.push_str(&l);
        out.push('\n');
    }
    out
}
