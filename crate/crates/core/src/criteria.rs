//! Validity of conditional instrumental sets and pairwise efficiency
//! comparison.
//!
//! A tuple `(Z, W)` is valid relative to `(X, Y)` iff
//!
//! 1. `Z ∪ W` contains no forbidden node,
//! 2. `Z` is m-connected to `X` given `W`, and
//! 3. `Z` is m-separated from `Y` given `W` in the graph with the first edges
//!    of all causal paths from `X` to `Y` removed.

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::graph::{Admg, NodeId, NodeSet};
use crate::msep::{m_separated, reach};

/// Default cap on the number of candidate nodes for brute-force enumeration.
pub const DEFAULT_ENUMERATION_CAP: usize = 20;

/// An instrumental set `z` paired with a conditioning set `w`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct CondInstrumentSet {
    pub z: NodeSet,
    pub w: NodeSet,
}

impl CondInstrumentSet {
    pub fn new(z: NodeSet, w: NodeSet) -> Self {
        CondInstrumentSet { z, w }
    }

    /// Resolves names in `g`.
    pub fn from_names<S: AsRef<str>>(g: &Admg, z: &[S], w: &[S]) -> Result<Self> {
        Ok(CondInstrumentSet::new(g.set(z)?, g.set(w)?))
    }

    pub fn nodes(&self) -> NodeSet {
        self.z.union(&self.w)
    }

    /// `Z=A,B;W=C` rendering, the same syntax the CLI accepts.
    pub fn label(&self, g: &Admg) -> String {
        format!("Z={};W={}", g.set_names(&self.z).join(","), g.set_names(&self.w).join(","))
    }

    /// `({A, B}, {C})` rendering.
    pub fn display(&self, g: &Admg) -> String {
        format!("({}, {})", g.fmt_set(&self.z), g.fmt_set(&self.w))
    }

    fn sort_key(&self) -> (usize, Vec<usize>, usize, Vec<usize>) {
        (self.z.len(), self.z.indices(), self.w.len(), self.w.indices())
    }
}

/// Parses `Z=A,B;W=C` (either part may be empty or omitted).
pub fn parse_tuple(g: &Admg, text: &str) -> Result<CondInstrumentSet> {
    let mut z = NodeSet::new();
    let mut w = NodeSet::new();
    for part in text.split(';').map(str::trim).filter(|p| !p.is_empty()) {
        let (key, val) = part
            .split_once('=')
            .ok_or_else(|| Error::Syntax { line: 1, message: format!("expected `Z=...` or `W=...`, got `{part}`") })?;
        let set = parse_node_list(g, val)?;
        match key.trim() {
            "Z" | "z" => z = set,
            "W" | "w" => w = set,
            other => {
                return Err(Error::Syntax { line: 1, message: format!("unknown tuple component `{other}`") })
            }
        }
    }
    Ok(CondInstrumentSet::new(z, w))
}

/// Comma-separated node names; the empty string is the empty set.
pub fn parse_node_list(g: &Admg, text: &str) -> Result<NodeSet> {
    text.split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|s| g.node(s))
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct ValidityReport {
    pub valid: bool,
    /// No forbidden node in `Z ∪ W`.
    pub cond_i: bool,
    /// `Z` is m-connected to `X` given `W`.
    pub cond_ii: bool,
    /// `Z` is m-separated from `Y` given `W` once causal out-edges of `X`
    /// are removed.
    pub cond_iii: bool,
}

/// Treatment/outcome pair bound to a graph, with the derived graph and
/// forbidden set computed once.
#[derive(Debug, Clone)]
pub struct Target<'g> {
    pub graph: &'g Admg,
    pub x: NodeId,
    pub y: NodeId,
    /// The graph without the first edges of causal paths from `x` to `y`.
    pub tilde: Admg,
    pub forbidden: NodeSet,
}

impl<'g> Target<'g> {
    pub fn new(graph: &'g Admg, x: NodeId, y: NodeId) -> Result<Self> {
        graph.check(&NodeSet::from_iter([x, y]))?;
        if x == y {
            return Err(Error::Precondition("treatment and outcome must differ".into()));
        }
        Ok(Target {
            graph,
            x,
            y,
            tilde: graph.remove_causal_out_edges(x, y),
            forbidden: graph.forbidden_nodes(x, y),
        })
    }

    pub fn from_names(graph: &'g Admg, x: &str, y: &str) -> Result<Self> {
        Target::new(graph, graph.node(x)?, graph.node(y)?)
    }

    fn check_tuple(&self, t: &CondInstrumentSet) -> Result<()> {
        self.graph.check(&t.z)?;
        self.graph.check(&t.w)?;
        if !t.z.is_disjoint(&t.w) {
            return Err(Error::Overlap(format!(
                "Z and W share {}",
                self.graph.fmt_set(&t.z.intersection(&t.w))
            )));
        }
        for n in [self.x, self.y] {
            if t.z.contains(n) || t.w.contains(n) {
                return Err(Error::Overlap(format!(
                    "tuple contains `{}`",
                    self.graph.name(n)
                )));
            }
        }
        Ok(())
    }

    /// Separation where overlapping left/right sets count as connected (a
    /// single-node path is open) and an empty side counts as separated.
    fn separated(&self, g: &Admg, s: &NodeSet, t: &NodeSet, w: &NodeSet) -> bool {
        if s.is_empty() || t.is_empty() {
            return true;
        }
        if !s.is_disjoint(t) {
            return false;
        }
        reach(g, s, w).is_disjoint(t)
    }

    pub fn validate(&self, t: &CondInstrumentSet) -> Result<ValidityReport> {
        self.check_tuple(t)?;
        Ok(self.report(t))
    }

    fn report(&self, t: &CondInstrumentSet) -> ValidityReport {
        let cond_i = t.nodes().is_disjoint(&self.forbidden);
        let x = NodeSet::singleton(self.x);
        let y = NodeSet::singleton(self.y);
        let cond_ii = !t.z.is_empty() && !self.separated(self.graph, &t.z, &x, &t.w);
        let cond_iii = self.separated(&self.tilde, &t.z, &y, &t.w);
        ValidityReport {
            valid: cond_i && cond_ii && cond_iii,
            cond_i,
            cond_ii,
            cond_iii,
        }
    }

    pub fn is_valid(&self, t: &CondInstrumentSet) -> Result<bool> {
        Ok(self.validate(t)?.valid)
    }

    fn require_valid(&self, t: &CondInstrumentSet) -> Result<()> {
        if self.is_valid(t)? {
            Ok(())
        } else {
            Err(Error::InvalidTuple(t.display(self.graph)))
        }
    }

    /// `w` avoids forbidden nodes and separates `x` from `y` once causal
    /// out-edges of `x` are removed.
    pub fn is_valid_adjustment(&self, w: &NodeSet) -> Result<bool> {
        self.graph.check(w)?;
        if w.contains(self.x) || w.contains(self.y) {
            return Err(Error::Overlap("adjustment set contains x or y".into()));
        }
        Ok(w.is_disjoint(&self.forbidden)
            && m_separated(&self.tilde, &NodeSet::singleton(self.x), &NodeSet::singleton(self.y), w)?)
    }

    /// All valid tuples over `candidates` (default: every node except `x`
    /// and `y`), ordered by `|Z|`, then `Z`, then `|W|`, then `W`.
    pub fn enumerate(&self, candidates: Option<&NodeSet>, cap: usize) -> Result<Vec<CondInstrumentSet>> {
        let all = self.graph.all_nodes().without(self.x).without(self.y);
        let candidates = match candidates {
            Some(c) => {
                self.graph.check(c)?;
                if c.contains(self.x) || c.contains(self.y) {
                    return Err(Error::Overlap("candidates contain x or y".into()));
                }
                c.clone()
            }
            None => all,
        };
        if candidates.len() > cap {
            return Err(Error::CapExceeded {
                candidates: candidates.len(),
                cap,
            });
        }
        // Forbidden candidates can never appear in a valid tuple.
        let usable: Vec<NodeId> = candidates.difference(&self.forbidden).iter().collect();
        let k = usable.len();
        let subset = |mask: u64| -> NodeSet {
            (0..k).filter(|i| mask >> i & 1 == 1).map(|i| usable[i]).collect()
        };

        let mut found: Vec<CondInstrumentSet> = (1u64..(1 << k))
            .into_par_iter()
            .flat_map_iter(|zmask| {
                let z = subset(zmask);
                let rest = !zmask & ((1u64 << k) - 1);
                // Iterate all submasks of `rest` (including 0).
                let mut out = Vec::new();
                let mut wmask = rest;
                loop {
                    let t = CondInstrumentSet::new(z.clone(), subset(wmask));
                    if self.report(&t).valid {
                        out.push(t);
                    }
                    if wmask == 0 {
                        break;
                    }
                    wmask = (wmask - 1) & rest;
                }
                out
            })
            .collect();
        found.sort_by_key(CondInstrumentSet::sort_key);
        Ok(found)
    }

    /// Evaluates the four graphical conditions (a)-(d) under which `t2`'s
    /// asymptotic variance is at most `t1`'s.
    pub fn comparison_conditions(&self, t1: &CondInstrumentSet, t2: &CondInstrumentSet) -> Result<[bool; 4]> {
        self.graph.require_reduced(self.x, self.y)?;
        self.require_valid(t1)?;
        self.require_valid(t2)?;
        Ok(self.conditions_unchecked(t1, t2))
    }

    fn conditions_unchecked(&self, t1: &CondInstrumentSet, t2: &CondInstrumentSet) -> [bool; 4] {
        let g = self.graph;
        let x = NodeSet::singleton(self.x);
        let y = NodeSet::singleton(self.y);
        let (z1, w1, z2, w2) = (&t1.z, &t1.w, &t2.z, &t2.w);
        let w12 = w1.difference(w2);
        let w21 = w2.difference(w1);

        let a = self.separated(&self.tilde, &w12, &y, w2);

        let b = self.separated(g, &w12, z2, w2)
            || self.separated(g, &w12.difference(z2), &x, &z2.union(w2));

        let w21_out = w21.difference(z1);
        let w21_in = w21.intersection(z1);
        let c = (self.separated(g, &w21_out, z1, w1)
            && self.separated(g, &w21_in, &x, &w1.union(&w21_out)))
            || self.separated(g, &w21, &x, w1);

        let z1_rest = z1.difference(&z2.union(&w21));
        let d = self.separated(g, &z1_rest, &x, &z2.union(w1).union(&w21));

        [a, b, c, d]
    }

    /// Graphical comparison of two valid tuples in a reduced graph.
    pub fn compare(&self, t1: &CondInstrumentSet, t2: &CondInstrumentSet) -> Result<Dominance> {
        let forward = self.comparison_conditions(t1, t2)?;
        let reverse = self.conditions_unchecked(t2, t1);
        let f = forward.iter().all(|&b| b);
        let r = reverse.iter().all(|&b| b);
        let verdict = match (f, r) {
            (true, true) => Verdict::Equal,
            (true, false) => Verdict::SecondAtMostFirst,
            (false, true) => Verdict::FirstAtMostSecond,
            (false, false) => Verdict::Inconclusive,
        };
        Ok(Dominance {
            verdict,
            forward,
            reverse,
        })
    }

    /// Given valid `(z, w ∪ s)`, reports whether `(z ∪ s, w)` is valid too,
    /// in which case moving `s` into the instruments cannot increase the
    /// asymptotic variance.
    pub fn prefers_instrument(&self, z: &NodeSet, w: &NodeSet, s: &NodeSet) -> Result<bool> {
        if !s.is_disjoint(z) || !s.is_disjoint(w) {
            return Err(Error::Overlap("S must be disjoint from Z and W".into()));
        }
        let conditioned = CondInstrumentSet::new(z.clone(), w.union(s));
        if !self.is_valid(&conditioned)? {
            return Err(Error::Precondition(format!(
                "{} is not a valid conditional instrumental set",
                conditioned.display(self.graph)
            )));
        }
        self.is_valid(&CondInstrumentSet::new(z.union(s), w.clone()))
    }

    /// Given valid `(z, w)`, reports whether `n` may be added to the
    /// conditioning set but not to the instruments, in which case
    /// conditioning on `n` cannot increase the asymptotic variance.
    pub fn conditioning_cannot_hurt(&self, z: &NodeSet, w: &NodeSet, n: NodeId) -> Result<bool> {
        if z.contains(n) || w.contains(n) {
            return Err(Error::Overlap(format!("`{}` already in the tuple", self.graph.name(n))));
        }
        let base = CondInstrumentSet::new(z.clone(), w.clone());
        if !self.is_valid(&base)? {
            return Err(Error::Precondition(format!(
                "{} is not a valid conditional instrumental set",
                base.display(self.graph)
            )));
        }
        let as_w = self.is_valid(&CondInstrumentSet::new(z.clone(), w.with(n)))?;
        let as_z = self.is_valid(&CondInstrumentSet::new(z.with(n), w.clone()))?;
        Ok(as_w && !as_z)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Verdict {
    /// The second tuple's asymptotic variance is at most the first's.
    SecondAtMostFirst,
    FirstAtMostSecond,
    Equal,
    Inconclusive,
}

/// Outcome of [`Target::compare`]. The ordering holds for every compatible
/// model in which the dominated tuple has nonzero instrument strength.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Dominance {
    pub verdict: Verdict,
    pub forward: [bool; 4],
    pub reverse: [bool; 4],
}
