//! Conditional instrumental variables in linear structural equation models
//! over acyclic directed mixed graphs: graphical validity, efficiency
//! comparison, greedy and optimal set construction, asymptotic variances
//! and two-stage least squares estimation.

pub mod avar;
pub mod cli;
pub mod criteria;
pub mod error;
pub mod estimator;
pub mod fixtures;
pub mod graph;
pub mod greedy;
pub mod msep;
pub mod optimal;
pub mod sem;
pub mod simulate;

pub use criteria::{CondInstrumentSet, Dominance, Target, ValidityReport, Verdict};
pub use error::{Error, Result};
pub use graph::{parse_graph, serialize_graph, Admg, EdgeKind, NodeId, NodeSet};
