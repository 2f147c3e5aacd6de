//! m-separation by walk reachability.
//!
//! A walk is open given `w` when every collider on it lies in `w` and every
//! non-collider lies outside `w`. The search runs over (node, arrival mark)
//! states, so each query is linear in the size of the graph.

use crate::error::{Error, Result};
use crate::graph::{Admg, NodeId, NodeSet};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Arrival {
    Start,
    /// Arrived through an arrowhead at the current node.
    Head,
    /// Arrived through a tail at the current node.
    Tail,
}

/// Nodes outside `w` connected to `s` by a walk that is open given `w`.
/// Always contains `s` itself.
pub fn reachable(g: &Admg, s: &NodeSet, w: &NodeSet) -> Result<NodeSet> {
    g.check(s)?;
    g.check(w)?;
    if !s.is_disjoint(w) {
        return Err(Error::Overlap(format!(
            "source {} and conditioning {} intersect",
            g.fmt_set(s),
            g.fmt_set(w)
        )));
    }
    Ok(reach(g, s, w))
}

pub(crate) fn reach(g: &Admg, s: &NodeSet, w: &NodeSet) -> NodeSet {
    let n = g.num_nodes();
    let in_w: Vec<bool> = (0..n).map(|i| w.contains(NodeId(i))).collect();
    // visited[node][0] = arrived by head, [1] = arrived by tail
    let mut visited = vec![[false; 2]; n];
    let mut out = s.clone();
    let mut stack: Vec<(NodeId, Arrival)> = s.iter().map(|v| (v, Arrival::Start)).collect();

    let mut push = |u: NodeId, mark: Arrival, stack: &mut Vec<(NodeId, Arrival)>| {
        let slot = if mark == Arrival::Head { 0 } else { 1 };
        if !visited[u.0][slot] {
            visited[u.0][slot] = true;
            stack.push((u, mark));
        }
    };

    while let Some((v, arrival)) = stack.pop() {
        if arrival != Arrival::Start && !in_w[v.0] {
            out.insert(v);
        }
        // Leaving v by an edge with an arrowhead at v makes v a collider
        // exactly when we also arrived through an arrowhead.
        let pass_non_collider = arrival == Arrival::Start || !in_w[v.0];
        let pass_collider = arrival == Arrival::Head && in_w[v.0];
        let pass_into_head = match arrival {
            Arrival::Head => pass_collider,
            _ => pass_non_collider,
        };

        if pass_non_collider {
            for c in g.children_of(v) {
                push(c, Arrival::Head, &mut stack);
            }
        }
        if pass_into_head {
            for p in g.parents_of(v) {
                push(p, Arrival::Tail, &mut stack);
            }
            for u in g.spouses_of(v) {
                push(u, Arrival::Head, &mut stack);
            }
        }
    }
    out
}

/// Whether `w` m-separates `s` from `t`. Empty `s` or `t` is separated by
/// convention. The three sets must be pairwise disjoint.
pub fn m_separated(g: &Admg, s: &NodeSet, t: &NodeSet, w: &NodeSet) -> Result<bool> {
    g.check(s)?;
    g.check(t)?;
    g.check(w)?;
    for (a, b, what) in [(s, t, "s and t"), (s, w, "s and w"), (t, w, "t and w")] {
        if !a.is_disjoint(b) {
            return Err(Error::Overlap(format!("{what} share {}", g.fmt_set(&a.intersection(b)))));
        }
    }
    if s.is_empty() || t.is_empty() {
        return Ok(true);
    }
    Ok(reach(g, s, w).is_disjoint(t))
}

/// Convenience wrapper over [`m_separated`] for a single node pair.
pub fn m_separated_nodes(g: &Admg, a: NodeId, b: NodeId, w: &NodeSet) -> Result<bool> {
    m_separated(g, &NodeSet::singleton(a), &NodeSet::singleton(b), w)
}
