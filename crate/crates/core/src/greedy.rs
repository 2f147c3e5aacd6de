//! Greedy forward growth of a valid conditional instrumental set.
//!
//! Each remaining node is visited once. It joins the instruments when that
//! keeps the tuple valid and the node is connected to the treatment, else it
//! joins the conditioning set when that keeps the tuple valid and the node is
//! connected to the outcome in the graph without causal out-edges of the
//! treatment, else it is discarded. Neither addition can increase the
//! asymptotic variance.

use serde::Serialize;

use crate::criteria::{CondInstrumentSet, Target};
use crate::error::{Error, Result};
use crate::graph::{NodeId, NodeSet};
use crate::msep::reach;

/// Which sets the m-connection guards condition on.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
pub enum GuardMode {
    /// Running sets: `N` connected to `X` given `W' ∪ Z'`, and to `Y` given
    /// `W'` in the reduced-edge graph.
    #[default]
    Running,
    /// The start sets `W ∪ Z` and `W`, held fixed for the whole run.
    Literal,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Action {
    AddedToZ,
    AddedToW,
    Discarded,
}

/// The four tests evaluated for a visited node. Tests after the decisive one
/// are still evaluated so the trace is complete.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct StepReason {
    /// `(Z' ∪ {N}, W')` is valid.
    pub z_valid: bool,
    /// `N` is m-connected to `X` under the instrument guard.
    pub z_guard: bool,
    /// `(Z', W' ∪ {N})` is valid.
    pub w_valid: bool,
    /// `N` is m-connected to `Y` under the conditioning guard.
    pub w_guard: bool,
}

impl StepReason {
    pub fn action(&self) -> Action {
        if self.z_valid && self.z_guard {
            Action::AddedToZ
        } else if self.w_valid && self.w_guard {
            Action::AddedToW
        } else {
            Action::Discarded
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct GreedyStep {
    #[serde(skip)]
    pub node: NodeId,
    pub node_name: String,
    pub action: Action,
    pub reason: StepReason,
}

#[derive(Debug, Clone)]
pub struct GreedyTrace {
    pub start: CondInstrumentSet,
    pub order: Vec<NodeId>,
    pub mode: GuardMode,
    pub steps: Vec<GreedyStep>,
    pub result: CondInstrumentSet,
}

impl GreedyTrace {
    /// Tuple after the first `k` steps.
    pub fn prefix(&self, k: usize) -> CondInstrumentSet {
        let mut t = self.start.clone();
        for s in &self.steps[..k] {
            match s.action {
                Action::AddedToZ => {
                    t.z.insert(s.node);
                }
                Action::AddedToW => {
                    t.w.insert(s.node);
                }
                Action::Discarded => {}
            }
        }
        t
    }
}

impl Target<'_> {
    /// Runs the greedy procedure from `start`. `order` defaults to graph
    /// node order over the nodes not already in the tuple.
    pub fn greedy_forward(
        &self,
        start: &CondInstrumentSet,
        order: Option<&[NodeId]>,
        mode: GuardMode,
    ) -> Result<GreedyTrace> {
        let g = self.graph;
        g.require_reduced(self.x, self.y)?;
        if !self.is_valid(start)? {
            return Err(Error::InvalidTuple(start.display(g)));
        }
        let remaining = g
            .all_nodes()
            .without(self.x)
            .without(self.y)
            .difference(&start.nodes());
        let order: Vec<NodeId> = match order {
            Some(o) => {
                let as_set: NodeSet = o.iter().copied().collect();
                if as_set.len() != o.len() || as_set != remaining {
                    return Err(Error::Precondition(format!(
                        "order must be a permutation of {}",
                        g.fmt_set(&remaining)
                    )));
                }
                o.to_vec()
            }
            None => remaining.iter().collect(),
        };

        let x = NodeSet::singleton(self.x);
        let y = NodeSet::singleton(self.y);
        let mut cur = start.clone();
        let mut steps = Vec::with_capacity(order.len());
        for &n in &order {
            let (gz, gw) = match mode {
                GuardMode::Running => (cur.z.union(&cur.w), cur.w.clone()),
                GuardMode::Literal => (start.z.union(&start.w), start.w.clone()),
            };
            let node = NodeSet::singleton(n);
            let reason = StepReason {
                z_valid: self.is_valid(&CondInstrumentSet::new(cur.z.with(n), cur.w.clone()))?,
                z_guard: !reach(g, &node, &gz).is_disjoint(&x),
                w_valid: self.is_valid(&CondInstrumentSet::new(cur.z.clone(), cur.w.with(n)))?,
                w_guard: !reach(&self.tilde, &node, &gw).is_disjoint(&y),
            };
            let action = reason.action();
            match action {
                Action::AddedToZ => {
                    cur.z.insert(n);
                }
                Action::AddedToW => {
                    cur.w.insert(n);
                }
                Action::Discarded => {}
            }
            steps.push(GreedyStep {
                node: n,
                node_name: g.name(n).to_string(),
                action,
                reason,
            });
        }
        Ok(GreedyTrace {
            start: start.clone(),
            order,
            mode,
            steps,
            result: cur,
        })
    }
}
