//! Test-only graph generators and brute-force oracles. Nothing here calls
//! into the reachability search it is used to check.

#![allow(dead_code)]

use civ::{parse_graph, Admg, NodeId, NodeSet};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Edge lists over nodes `0..n` named `N0..`; directed edges go from lower to
/// higher index under a random permutation so node order is not topological.
#[derive(Debug, Clone)]
pub struct RawGraph {
    pub n: usize,
    pub directed: Vec<(usize, usize)>,
    pub bidirected: Vec<(usize, usize)>,
}

impl RawGraph {
    pub fn to_admg(&self) -> Admg {
        let mut text = String::from("node");
        for i in 0..self.n {
            text.push_str(&format!(" N{i}"));
        }
        text.push('\n');
        for (a, b) in &self.directed {
            text.push_str(&format!("N{a} -> N{b}\n"));
        }
        for (a, b) in &self.bidirected {
            text.push_str(&format!("N{a} <-> N{b}\n"));
        }
        parse_graph(&text).expect("generated graph is valid")
    }
}

pub fn random_raw(rng: &mut impl Rng, max_nodes: usize, p_dir: f64, p_bi: f64) -> RawGraph {
    let n = rng.random_range(2..=max_nodes);
    let mut perm: Vec<usize> = (0..n).collect();
    for i in (1..n).rev() {
        perm.swap(i, rng.random_range(0..=i));
    }
    let mut directed = Vec::new();
    let mut bidirected = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            if rng.random_bool(p_dir) {
                directed.push((perm[i], perm[j]));
            }
            if rng.random_bool(p_bi) {
                bidirected.push((perm[i], perm[j]));
            }
        }
    }
    RawGraph { n, directed, bidirected }
}

pub fn random_admg(seed: u64, max_nodes: usize) -> Admg {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let p_dir = rng.random_range(0.15..0.5);
    let p_bi = rng.random_range(0.0..0.35);
    random_raw(&mut rng, max_nodes, p_dir, p_bi).to_admg()
}

pub fn arb_admg(max_nodes: usize) -> impl Strategy<Value = Admg> {
    any::<u64>().prop_map(move |s| random_admg(s, max_nodes))
}

/// Random graph in which `X` (index 0) has `Y` (index 1) as its only
/// descendant, with `X -> Y` present.
pub fn random_reduced(seed: u64, max_nodes: usize) -> Admg {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = rng.random_range(3..=max_nodes);
    let mut text = String::from("node X Y");
    for i in 2..n {
        text.push_str(&format!(" V{i}"));
    }
    text.push_str("\nX -> Y\n");
    let name = |i: usize| match i {
        0 => "X".to_string(),
        1 => "Y".to_string(),
        k => format!("V{k}"),
    };
    // Covariates V2.. are ordered topologically, and X, Y come after all of
    // them, so nothing but Y descends from X.
    let p_dir = rng.random_range(0.2..0.6);
    let p_bi = rng.random_range(0.1..0.4);
    for i in 2..n {
        for j in i + 1..n {
            if rng.random_bool(p_dir) {
                text.push_str(&format!("{} -> {}\n", name(i), name(j)));
            }
            if rng.random_bool(p_bi) {
                text.push_str(&format!("{} <-> {}\n", name(i), name(j)));
            }
        }
        for t in [0, 1] {
            if rng.random_bool(p_dir) {
                text.push_str(&format!("{} -> {}\n", name(i), name(t)));
            }
            if rng.random_bool(p_bi) {
                text.push_str(&format!("{} <-> {}\n", name(i), name(t)));
            }
        }
    }
    if rng.random_bool(0.8) {
        text.push_str("X <-> Y\n");
    }
    parse_graph(&text).expect("generated reduced graph")
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Kind {
    /// tail at `from`, head at `to`
    Forward,
    /// head at `from`, tail at `to`
    Backward,
    Bi,
}

struct Oracle {
    adj: Vec<Vec<(usize, Kind)>>,
    parents: Vec<Vec<usize>>,
}

impl Oracle {
    fn new(g: &Admg) -> Self {
        let n = g.num_nodes();
        let mut adj = vec![Vec::new(); n];
        let mut parents = vec![Vec::new(); n];
        for (t, h) in g.directed_edges() {
            adj[t.index()].push((h.index(), Kind::Forward));
            adj[h.index()].push((t.index(), Kind::Backward));
            parents[h.index()].push(t.index());
        }
        for (a, b) in g.bidirected_edges() {
            adj[a.index()].push((b.index(), Kind::Bi));
            adj[b.index()].push((a.index(), Kind::Bi));
        }
        Oracle { adj, parents }
    }

    fn ancestors_of(&self, w: &[usize]) -> Vec<bool> {
        let mut an = vec![false; self.adj.len()];
        let mut stack = w.to_vec();
        while let Some(v) = stack.pop() {
            if !std::mem::replace(&mut an[v], true) {
                stack.extend(&self.parents[v]);
            }
        }
        an
    }
}

/// Path-based m-connection: some path (no repeated node) between `s` and `t`
/// on which every collider is an ancestor of `w` and every non-collider is
/// outside `w`.
pub fn brute_connected(g: &Admg, s: usize, t: usize, w: &[usize]) -> bool {
    let o = Oracle::new(g);
    let an_w = o.ancestors_of(w);
    let in_w: Vec<bool> = (0..g.num_nodes()).map(|i| w.contains(&i)).collect();
    let mut on_path = vec![false; g.num_nodes()];
    on_path[s] = true;
    // `arrow_in` records whether the edge used to enter `v` has an arrowhead
    // at `v`.
    fn go(
        o: &Oracle,
        v: usize,
        arrow_in: Option<bool>,
        t: usize,
        an_w: &[bool],
        in_w: &[bool],
        on_path: &mut Vec<bool>,
    ) -> bool {
        for &(u, kind) in &o.adj[v] {
            if on_path[u] {
                continue;
            }
            let arrow_out_at_v = matches!(kind, Kind::Backward | Kind::Bi);
            if let Some(head_in) = arrow_in {
                let collider = head_in && arrow_out_at_v;
                let ok = if collider { an_w[v] } else { !in_w[v] };
                if !ok {
                    continue;
                }
            }
            if u == t {
                return true;
            }
            let head_at_u = matches!(kind, Kind::Forward | Kind::Bi);
            on_path[u] = true;
            if go(o, u, Some(head_at_u), t, an_w, in_w, on_path) {
                return true;
            }
            on_path[u] = false;
        }
        false
    }
    go(&o, s, None, t, &an_w, &in_w, &mut on_path)
}

pub fn brute_separated(g: &Admg, s: &NodeSet, t: &NodeSet, w: &NodeSet) -> bool {
    let w: Vec<usize> = w.indices();
    !s.iter().any(|a| t.iter().any(|b| brute_connected(g, a.index(), b.index(), &w)))
}

/// Every subset of `nodes`, as bit masks over its positions.
pub fn subsets(nodes: &[NodeId]) -> Vec<NodeSet> {
    (0u32..(1 << nodes.len()))
        .map(|m| (0..nodes.len()).filter(|i| m >> i & 1 == 1).map(|i| nodes[i]).collect())
        .collect()
}

/// Sum over directed paths from `x` to `y` of coefficient products, with
/// `coef(tail, head)`.
pub fn path_sum(g: &Admg, x: NodeId, y: NodeId, coef: &dyn Fn(usize, usize) -> f64) -> f64 {
    if x == y {
        return 1.0;
    }
    g.directed_edges()
        .filter(|(t, _)| *t == x)
        .map(|(_, h)| coef(x.index(), h.index()) * path_sum(g, h, y, coef))
        .sum()
}

/// Asymptotic variance of each tuple under the marginal of `m`, `None` when
/// the instrument strength is numerically zero.
pub fn avars(m: &civ::sem::CanonicalSem, x: NodeId, y: NodeId, tuples: &[civ::CondInstrumentSet]) -> Vec<Option<f64>> {
    let lin = m.marginal();
    let cov = lin.implied_covariance();
    let tau = lin.total_effect(x, y);
    tuples
        .iter()
        .map(|t| civ::avar::AvarQuery { cov: &cov, tau, x, y, tuple: t }.avar_new_formula().ok())
        .collect()
}

/// `a <= b` up to a relative slack of 1e-9.
pub fn at_most(a: f64, b: f64) -> bool {
    a <= b + 1e-9 * b.abs().max(1.0)
}

pub fn close(a: f64, b: f64) -> bool {
    (a - b).abs() <= 1e-9 * a.abs().max(b.abs()).max(1.0)
}

pub fn tuple(g: &Admg, z: &[&str], w: &[&str]) -> civ::CondInstrumentSet {
    civ::CondInstrumentSet::from_names(g, z, w).unwrap()
}
