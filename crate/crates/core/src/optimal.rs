//! District-based construction of an efficient conditional instrumental set.
//!
//! The conditioning set is every node reachable from `Y` through bidirected
//! edges after removing `X`, together with their parents. The instruments are
//! the same construction started from `X` after removing `Y`, minus the
//! conditioning set.

use serde::Serialize;

use crate::criteria::{CondInstrumentSet, Target};
use crate::error::{Error, Result};
use crate::graph::NodeSet;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OptimalResult {
    pub w_opt: NodeSet,
    pub z_opt: NodeSet,
    /// The instruments are nonempty, so the tuple is valid.
    pub is_valid: bool,
    /// An instrument is a parent or sibling of `X`; the tuple then has
    /// variance no larger than any valid tuple in every compatible model.
    pub optimality_certified: bool,
}

impl OptimalResult {
    pub fn tuple(&self) -> CondInstrumentSet {
        CondInstrumentSet::new(self.z_opt.clone(), self.w_opt.clone())
    }
}

#[derive(Debug, Serialize)]
pub struct OptimalJson {
    #[serde(rename = "Z_opt")]
    pub z_opt: Vec<String>,
    #[serde(rename = "W_opt")]
    pub w_opt: Vec<String>,
    pub valid: bool,
    pub certified: bool,
}

impl Target<'_> {
    pub fn optimal(&self) -> Result<OptimalResult> {
        let g = self.graph;
        if !g.descendants(&NodeSet::singleton(self.x)).contains(self.y) {
            return Err(Error::NoCausalPath {
                x: g.name(self.x).to_string(),
                y: g.name(self.y).to_string(),
            });
        }
        g.require_reduced(self.x, self.y)?;
        let xy = NodeSet::from_iter([self.x, self.y]);
        let w_opt = g.district_plus(self.y, &NodeSet::singleton(self.x))?.difference(&xy);
        let z_opt = g.district_plus(self.x, &NodeSet::singleton(self.y))?.difference(&xy.union(&w_opt));
        let x_neighbours = g.parents(&NodeSet::singleton(self.x)).union(&g.siblings(&NodeSet::singleton(self.x)));
        let is_valid = !z_opt.is_empty();
        let optimality_certified = is_valid && !z_opt.is_disjoint(&x_neighbours);
        Ok(OptimalResult {
            w_opt,
            z_opt,
            is_valid,
            optimality_certified,
        })
    }

    pub fn optimal_json(&self, r: &OptimalResult) -> OptimalJson {
        OptimalJson {
            z_opt: self.graph.set_names(&r.z_opt),
            w_opt: self.graph.set_names(&r.w_opt),
            valid: r.is_valid,
            certified: r.optimality_certified,
        }
    }
}
