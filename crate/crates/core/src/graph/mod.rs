//! Acyclic directed mixed graphs.
//!
//! Directed edges (`A -> B`) are direct effects, bidirected edges (`A <-> B`)
//! are error correlations. A directed and a bidirected edge may connect the
//! same pair of nodes. Values are immutable once built.
//!
//! Nodes are addressed by [`NodeId`], an index into the graph's node order
//! (first-mention order when parsed). Ids are only meaningful for the graph
//! that issued them; use [`NodeSet::translate`] to move a set between a graph
//! and one of its projections.

mod format;
mod project;

pub use format::{parse_graph, serialize_graph};
pub use project::Reduction;

use std::collections::{BTreeSet, HashMap, VecDeque};
use std::fmt;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct NodeId(pub(crate) usize);

impl NodeId {
    pub fn index(self) -> usize {
        self.0
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum EdgeKind {
    Directed,
    Bidirected,
}

/// A single edge. Bidirected edges use the lexicographically smaller endpoint
/// name as `tail`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Edge {
    pub kind: EdgeKind,
    pub tail: NodeId,
    pub head: NodeId,
}

/// Ordered set of nodes; iteration follows graph node order.
#[derive(Debug, Clone, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct NodeSet(BTreeSet<NodeId>);

impl NodeSet {
    pub fn new() -> Self {
        NodeSet(BTreeSet::new())
    }

    pub fn singleton(n: NodeId) -> Self {
        NodeSet(BTreeSet::from([n]))
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn contains(&self, n: NodeId) -> bool {
        self.0.contains(&n)
    }

    pub fn insert(&mut self, n: NodeId) -> bool {
        self.0.insert(n)
    }

    pub fn remove(&mut self, n: NodeId) -> bool {
        self.0.remove(&n)
    }

    pub fn iter(&self) -> impl DoubleEndedIterator<Item = NodeId> + '_ {
        self.0.iter().copied()
    }

    pub fn indices(&self) -> Vec<usize> {
        self.0.iter().map(|n| n.0).collect()
    }

    pub fn union(&self, other: &NodeSet) -> NodeSet {
        NodeSet(self.0.union(&other.0).copied().collect())
    }

    pub fn difference(&self, other: &NodeSet) -> NodeSet {
        NodeSet(self.0.difference(&other.0).copied().collect())
    }

    pub fn intersection(&self, other: &NodeSet) -> NodeSet {
        NodeSet(self.0.intersection(&other.0).copied().collect())
    }

    pub fn is_disjoint(&self, other: &NodeSet) -> bool {
        self.0.is_disjoint(&other.0)
    }

    pub fn is_subset(&self, other: &NodeSet) -> bool {
        self.0.is_subset(&other.0)
    }

    pub fn with(&self, n: NodeId) -> NodeSet {
        let mut s = self.clone();
        s.insert(n);
        s
    }

    pub fn without(&self, n: NodeId) -> NodeSet {
        let mut s = self.clone();
        s.remove(n);
        s
    }

    /// Re-resolves the members of `self` (ids of `from`) by name in `to`.
    pub fn translate(&self, from: &Admg, to: &Admg) -> Result<NodeSet> {
        self.iter().map(|n| to.node(from.name(n))).collect()
    }
}

impl FromIterator<NodeId> for NodeSet {
    fn from_iter<I: IntoIterator<Item = NodeId>>(iter: I) -> Self {
        NodeSet(iter.into_iter().collect())
    }
}

impl<'a> IntoIterator for &'a NodeSet {
    type Item = NodeId;
    type IntoIter = std::iter::Copied<std::collections::btree_set::Iter<'a, NodeId>>;

    fn into_iter(self) -> Self::IntoIter {
        self.0.iter().copied()
    }
}

pub(crate) fn is_valid_name(name: &str) -> bool {
    let mut chars = name.chars();
    match chars.next() {
        Some(c) if c.is_ascii_alphabetic() || c == '_' => {}
        _ => return false,
    }
    chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
}

#[derive(Debug, Clone, Default)]
pub struct AdmgBuilder {
    names: Vec<String>,
    index: HashMap<String, usize>,
    directed: Vec<(usize, usize)>,
    bidirected: Vec<(usize, usize)>,
}

impl AdmgBuilder {
    pub fn new() -> Self {
        Self::default()
    }

    /// Declares a node (no-op if already present) and returns its index.
    pub fn node(&mut self, name: &str) -> Result<usize> {
        if let Some(&i) = self.index.get(name) {
            return Ok(i);
        }
        if !is_valid_name(name) {
            return Err(Error::InvalidName(name.to_string()));
        }
        let i = self.names.len();
        self.names.push(name.to_string());
        self.index.insert(name.to_string(), i);
        Ok(i)
    }

    pub fn directed(&mut self, tail: &str, head: &str) -> Result<&mut Self> {
        let t = self.node(tail)?;
        let h = self.node(head)?;
        self.directed.push((t, h));
        Ok(self)
    }

    pub fn bidirected(&mut self, a: &str, b: &str) -> Result<&mut Self> {
        let a = self.node(a)?;
        let b = self.node(b)?;
        self.bidirected.push((a, b));
        Ok(self)
    }

    pub fn build(&self) -> Result<Admg> {
        Admg::from_parts(self.names.clone(), &self.directed, &self.bidirected)
    }
}

#[derive(Debug, Clone)]
pub struct Admg {
    names: Vec<String>,
    index: HashMap<String, usize>,
    directed: BTreeSet<(usize, usize)>,
    /// Stored with the smaller index first.
    bidirected: BTreeSet<(usize, usize)>,
    parents: Vec<Vec<usize>>,
    children: Vec<Vec<usize>>,
    spouses: Vec<Vec<usize>>,
    topo: Vec<usize>,
}

impl PartialEq for Admg {
    fn eq(&self, other: &Self) -> bool {
        self.names == other.names
            && self.directed == other.directed
            && self.bidirected == other.bidirected
    }
}

impl Eq for Admg {}

impl Admg {
    pub(crate) fn from_parts(
        names: Vec<String>,
        directed: &[(usize, usize)],
        bidirected: &[(usize, usize)],
    ) -> Result<Admg> {
        let n = names.len();
        let mut index = HashMap::with_capacity(n);
        for (i, name) in names.iter().enumerate() {
            if !is_valid_name(name) {
                return Err(Error::InvalidName(name.clone()));
            }
            if index.insert(name.clone(), i).is_some() {
                return Err(Error::InvalidName(format!("{name} (declared twice)")));
            }
        }
        let mut dset = BTreeSet::new();
        for &(t, h) in directed {
            if t == h {
                return Err(Error::SelfLoop(names[t].clone()));
            }
            if !dset.insert((t, h)) {
                return Err(Error::DuplicateEdge(format!("{} -> {}", names[t], names[h])));
            }
        }
        let mut bset = BTreeSet::new();
        for &(a, b) in bidirected {
            if a == b {
                return Err(Error::SelfLoop(names[a].clone()));
            }
            if !bset.insert((a.min(b), a.max(b))) {
                return Err(Error::DuplicateEdge(format!("{} <-> {}", names[a], names[b])));
            }
        }
        let mut parents = vec![Vec::new(); n];
        let mut children = vec![Vec::new(); n];
        let mut spouses = vec![Vec::new(); n];
        for &(t, h) in &dset {
            parents[h].push(t);
            children[t].push(h);
        }
        for &(a, b) in &bset {
            spouses[a].push(b);
            spouses[b].push(a);
        }
        for v in parents.iter_mut().chain(children.iter_mut()).chain(spouses.iter_mut()) {
            v.sort_unstable();
        }

        // Kahn's algorithm; leftovers lie on or downstream of a cycle.
        let mut indeg: Vec<usize> = parents.iter().map(Vec::len).collect();
        let mut queue: VecDeque<usize> = (0..n).filter(|&i| indeg[i] == 0).collect();
        let mut topo = Vec::with_capacity(n);
        while let Some(v) = queue.pop_front() {
            topo.push(v);
            for &c in &children[v] {
                indeg[c] -= 1;
                if indeg[c] == 0 {
                    queue.push_back(c);
                }
            }
        }
        if topo.len() < n {
            let stuck = (0..n).find(|&i| indeg[i] > 0).unwrap();
            return Err(Error::Cycle(names[stuck].clone()));
        }

        Ok(Admg {
            names,
            index,
            directed: dset,
            bidirected: bset,
            parents,
            children,
            spouses,
            topo,
        })
    }

    pub fn num_nodes(&self) -> usize {
        self.names.len()
    }

    pub fn num_edges(&self) -> usize {
        self.directed.len() + self.bidirected.len()
    }

    pub fn node(&self, name: &str) -> Result<NodeId> {
        self.index
            .get(name)
            .map(|&i| NodeId(i))
            .ok_or_else(|| Error::UnknownNode(name.to_string()))
    }

    /// Resolves a list of names into a set.
    pub fn set<S: AsRef<str>>(&self, names: &[S]) -> Result<NodeSet> {
        names.iter().map(|n| self.node(n.as_ref())).collect()
    }

    pub fn name(&self, n: NodeId) -> &str {
        &self.names[n.0]
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn set_names(&self, s: &NodeSet) -> Vec<String> {
        s.iter().map(|n| self.names[n.0].clone()).collect()
    }

    /// `{A, B}` style rendering.
    pub fn fmt_set(&self, s: &NodeSet) -> String {
        format!("{{{}}}", self.set_names(s).join(", "))
    }

    pub fn nodes(&self) -> impl Iterator<Item = NodeId> + '_ {
        (0..self.names.len()).map(NodeId)
    }

    pub fn all_nodes(&self) -> NodeSet {
        self.nodes().collect()
    }

    pub fn topological_order(&self) -> Vec<NodeId> {
        self.topo.iter().map(|&i| NodeId(i)).collect()
    }

    pub fn has_directed(&self, tail: NodeId, head: NodeId) -> bool {
        self.directed.contains(&(tail.0, head.0))
    }

    pub fn has_bidirected(&self, a: NodeId, b: NodeId) -> bool {
        self.bidirected.contains(&(a.0.min(b.0), a.0.max(b.0)))
    }

    pub fn directed_edges(&self) -> impl Iterator<Item = (NodeId, NodeId)> + '_ {
        self.directed.iter().map(|&(t, h)| (NodeId(t), NodeId(h)))
    }

    /// Bidirected edges as (smaller index, larger index) pairs.
    pub fn bidirected_edges(&self) -> impl Iterator<Item = (NodeId, NodeId)> + '_ {
        self.bidirected.iter().map(|&(a, b)| (NodeId(a), NodeId(b)))
    }

    pub fn edges(&self) -> Vec<Edge> {
        let mut out: Vec<Edge> = self
            .directed_edges()
            .map(|(tail, head)| Edge {
                kind: EdgeKind::Directed,
                tail,
                head,
            })
            .collect();
        out.extend(self.bidirected_edges().map(|(a, b)| {
            let (tail, head) = if self.name(a) <= self.name(b) { (a, b) } else { (b, a) };
            Edge {
                kind: EdgeKind::Bidirected,
                tail,
                head,
            }
        }));
        out
    }

    pub(crate) fn parents_of(&self, n: NodeId) -> impl Iterator<Item = NodeId> + '_ {
        self.parents[n.0].iter().map(|&i| NodeId(i))
    }

    pub(crate) fn children_of(&self, n: NodeId) -> impl Iterator<Item = NodeId> + '_ {
        self.children[n.0].iter().map(|&i| NodeId(i))
    }

    pub(crate) fn spouses_of(&self, n: NodeId) -> impl Iterator<Item = NodeId> + '_ {
        self.spouses[n.0].iter().map(|&i| NodeId(i))
    }

    pub(crate) fn check(&self, s: &NodeSet) -> Result<()> {
        match s.iter().find(|n| n.0 >= self.names.len()) {
            Some(n) => Err(Error::UnknownNode(format!("#{}", n.0))),
            None => Ok(()),
        }
    }

    /// Parents of the members of `s`; members are not included unless they
    /// are themselves parents of another member.
    pub fn parents(&self, s: &NodeSet) -> NodeSet {
        s.iter().flat_map(|n| self.parents_of(n)).collect()
    }

    pub fn children(&self, s: &NodeSet) -> NodeSet {
        s.iter().flat_map(|n| self.children_of(n)).collect()
    }

    /// Siblings (bidirected neighbours) including the members themselves.
    pub fn siblings(&self, s: &NodeSet) -> NodeSet {
        s.iter().flat_map(|n| self.spouses_of(n)).chain(s.iter()).collect()
    }

    fn closure<'a, F, I>(&'a self, s: &NodeSet, next: F) -> NodeSet
    where
        F: Fn(NodeId) -> I,
        I: Iterator<Item = NodeId> + 'a,
    {
        let mut seen = s.clone();
        let mut stack: Vec<NodeId> = s.iter().collect();
        while let Some(v) = stack.pop() {
            for u in next(v) {
                if seen.insert(u) {
                    stack.push(u);
                }
            }
        }
        seen
    }

    /// Ancestors including the members themselves.
    pub fn ancestors(&self, s: &NodeSet) -> NodeSet {
        self.closure(s, |v| self.parents_of(v))
    }

    /// Descendants including the members themselves.
    pub fn descendants(&self, s: &NodeSet) -> NodeSet {
        self.closure(s, |v| self.children_of(v))
    }

    /// Nodes on causal paths from `x` to `y`, excluding `x`.
    pub fn causal_nodes(&self, x: NodeId, y: NodeId) -> NodeSet {
        let de_x = self.descendants(&NodeSet::singleton(x));
        if !de_x.contains(y) {
            return NodeSet::new();
        }
        let an_y = self.ancestors(&NodeSet::singleton(y));
        de_x.intersection(&an_y).without(x)
    }

    /// Descendants of the causal nodes, together with `x`.
    pub fn forbidden_nodes(&self, x: NodeId, y: NodeId) -> NodeSet {
        self.descendants(&self.causal_nodes(x, y)).with(x)
    }

    /// The graph with every edge `x -> c`, `c` a causal node for `(x, y)`,
    /// removed. These are exactly the first edges of causal paths to `y`.
    pub fn remove_causal_out_edges(&self, x: NodeId, y: NodeId) -> Admg {
        let cn = self.causal_nodes(x, y);
        let directed: Vec<(usize, usize)> = self
            .directed
            .iter()
            .copied()
            .filter(|&(t, h)| !(t == x.0 && cn.contains(NodeId(h))))
            .collect();
        let bidirected: Vec<(usize, usize)> = self.bidirected.iter().copied().collect();
        Admg::from_parts(self.names.clone(), &directed, &bidirected)
            .expect("edge removal preserves well-formedness")
    }

    /// True when `de(x) = {x, y}`, the setting every efficiency result
    /// assumes.
    pub fn is_reduced_for(&self, x: NodeId, y: NodeId) -> bool {
        let de = self.descendants(&NodeSet::singleton(x));
        de.len() == 2 && de.contains(y)
    }

    pub(crate) fn require_reduced(&self, x: NodeId, y: NodeId) -> Result<()> {
        if self.is_reduced_for(x, y) {
            Ok(())
        } else {
            Err(Error::Unreduced {
                x: self.name(x).to_string(),
                y: self.name(y).to_string(),
                descendants: self
                    .set_names(&self.descendants(&NodeSet::singleton(x)))
                    .join(", "),
            })
        }
    }
}

impl fmt::Display for Admg {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&serialize_graph(self))
    }
}
