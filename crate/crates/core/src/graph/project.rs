use super::{Admg, NodeId, NodeSet};
use crate::error::{Error, Result};

/// Outcome of [`Admg::reduce_for_estimation`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Reduction {
    pub graph: Admg,
    /// Nodes projected out, named in the original graph.
    pub removed: Vec<String>,
    /// `y` is not a descendant of `x`, so the total effect is zero.
    pub zero_effect: bool,
}

impl Admg {
    /// Latent projection over `latent`.
    ///
    /// Retained nodes keep their relative order. `a -> b` is kept when some
    /// directed path from `a` to `b` has all interior nodes latent; `a <-> b`
    /// when some path between them has only latent non-collider interior
    /// nodes and arrowheads at both `a` and `b`.
    pub fn latent_projection(&self, latent: &NodeSet) -> Result<Admg> {
        self.check(latent)?;
        let n = self.num_nodes();
        let keep: Vec<usize> = (0..n).filter(|&i| !latent.contains(NodeId(i))).collect();
        let mut new_index = vec![usize::MAX; n];
        for (j, &i) in keep.iter().enumerate() {
            new_index[i] = j;
        }

        // Directed edges: search down through latent children.
        let mut directed = Vec::new();
        for &a in &keep {
            let mut seen = vec![false; n];
            let mut stack: Vec<usize> = self.children[a].clone();
            while let Some(v) = stack.pop() {
                if std::mem::replace(&mut seen[v], true) {
                    continue;
                }
                if latent.contains(NodeId(v)) {
                    stack.extend(self.children[v].iter().copied());
                } else {
                    directed.push((new_index[a], new_index[v]));
                }
            }
        }

        // For each retained node, the node itself plus all latent nodes with
        // a directed path into it through latent nodes only.
        let heads: Vec<Vec<bool>> = (0..n)
            .map(|a| {
                let mut mark = vec![false; n];
                if latent.contains(NodeId(a)) {
                    return mark;
                }
                mark[a] = true;
                let mut stack: Vec<usize> = self.parents[a]
                    .iter()
                    .copied()
                    .filter(|&p| latent.contains(NodeId(p)))
                    .collect();
                while let Some(v) = stack.pop() {
                    if std::mem::replace(&mut mark[v], true) {
                        continue;
                    }
                    stack.extend(
                        self.parents[v]
                            .iter()
                            .copied()
                            .filter(|&p| latent.contains(NodeId(p))),
                    );
                }
                mark
            })
            .collect();

        let mut bidirected = Vec::new();
        for (ia, &a) in keep.iter().enumerate() {
            for &b in &keep[ia + 1..] {
                let (ha, hb) = (&heads[a], &heads[b]);
                // a <- ... <- l -> ... -> b with l latent
                let common = (0..n).any(|l| l != a && l != b && ha[l] && hb[l]);
                // a <- ... <- u <-> v -> ... -> b
                let spouse = self
                    .bidirected
                    .iter()
                    .any(|&(u, v)| (ha[u] && hb[v]) || (ha[v] && hb[u]));
                if common || spouse {
                    bidirected.push((new_index[a], new_index[b]));
                }
            }
        }

        let names = keep.iter().map(|&i| self.names[i].clone()).collect();
        Admg::from_parts(names, &directed, &bidirected)
    }

    /// Projects out every forbidden node and every descendant of `x` other
    /// than `x` and `y`, leaving a graph with `de(x) = {x, y}`.
    ///
    /// Validity of any tuple over the retained nodes is unchanged. When `y`
    /// is not a descendant of `x` the projection is still computed and the
    /// result is flagged as a zero-effect case.
    pub fn reduce_for_estimation(&self, x: NodeId, y: NodeId) -> Result<Reduction> {
        self.check(&NodeSet::from_iter([x, y]))?;
        if x == y {
            return Err(Error::Precondition("x and y must differ".into()));
        }
        let de_x = self.descendants(&NodeSet::singleton(x));
        let zero_effect = !de_x.contains(y);
        let latent = self
            .forbidden_nodes(x, y)
            .union(&de_x)
            .without(x)
            .without(y);
        Ok(Reduction {
            graph: self.latent_projection(&latent)?,
            removed: self.set_names(&latent),
            zero_effect,
        })
    }

    /// Bidirected-connected component of `n` after deleting the nodes of
    /// `w`; always contains `n`.
    pub fn district(&self, n: NodeId, w: &NodeSet) -> Result<NodeSet> {
        self.check(&NodeSet::singleton(n))?;
        self.check(w)?;
        if w.contains(n) {
            return Err(Error::Overlap(format!(
                "district root `{}` lies in the removed set",
                self.name(n)
            )));
        }
        let mut comp = NodeSet::singleton(n);
        let mut stack = vec![n];
        while let Some(v) = stack.pop() {
            for u in self.spouses_of(v) {
                if !w.contains(u) && comp.insert(u) {
                    stack.push(u);
                }
            }
        }
        Ok(comp)
    }

    /// District of `n` given `w`, plus its parents, minus `w`.
    pub fn district_plus(&self, n: NodeId, w: &NodeSet) -> Result<NodeSet> {
        let d = self.district(n, w)?;
        Ok(d.union(&self.parents(&d)).difference(w))
    }
}
