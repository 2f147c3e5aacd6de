//! Linear structural equation models over an ADMG.
//!
//! `V = A V + e` with `A[i][j]` the coefficient of `Vj -> Vi` and
//! `cov(e) = Omega`, so `Sigma = (I - A)^-1 Omega (I - A)^-T` and the total
//! effect of `Vj` on `Vi` is entry `(i, j)` of `(I - A)^-1`.

use std::collections::BTreeMap;
use std::io::Read;

use nalgebra::{Cholesky, DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{Admg, NodeId, NodeSet};

/// Relative tolerance on the smallest eigenvalue for positive definiteness.
pub const PD_TOLERANCE: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq)]
pub struct LinearSem {
    pub graph: Admg,
    pub coeffs: DMatrix<f64>,
    pub err_cov: DMatrix<f64>,
}

impl LinearSem {
    /// Checks that the sparsity of both matrices matches `graph` and that
    /// `err_cov` is symmetric positive semidefinite.
    pub fn new(graph: Admg, coeffs: DMatrix<f64>, err_cov: DMatrix<f64>) -> Result<Self> {
        let p = graph.num_nodes();
        if coeffs.shape() != (p, p) || err_cov.shape() != (p, p) {
            return Err(Error::InvalidModel(format!("matrices must be {p}x{p}")));
        }
        for i in 0..p {
            for j in 0..p {
                let (vi, vj) = (NodeId(i), NodeId(j));
                if coeffs[(i, j)] != 0.0 && !graph.has_directed(vj, vi) {
                    return Err(Error::InvalidModel(format!(
                        "coefficient on missing edge {} -> {}",
                        graph.name(vj),
                        graph.name(vi)
                    )));
                }
                if i != j && err_cov[(i, j)] != 0.0 && !graph.has_bidirected(vi, vj) {
                    return Err(Error::InvalidModel(format!(
                        "error covariance on missing edge {} <-> {}",
                        graph.name(vi),
                        graph.name(vj)
                    )));
                }
                if (err_cov[(i, j)] - err_cov[(j, i)]).abs() > 1e-12 * (1.0 + err_cov[(i, j)].abs()) {
                    return Err(Error::InvalidModel("error covariance is not symmetric".into()));
                }
            }
        }
        let eig = err_cov.clone().symmetric_eigenvalues();
        let max = eig.max().max(0.0);
        if eig.min() < -PD_TOLERANCE * max.max(1.0) {
            return Err(Error::InvalidModel("error covariance is not positive semidefinite".into()));
        }
        Ok(LinearSem { graph, coeffs, err_cov })
    }

    /// `(I - A)^-1`, whose `(i, j)` entry is the total effect of `Vj` on `Vi`.
    pub fn total_effects(&self) -> DMatrix<f64> {
        let p = self.graph.num_nodes();
        let i_minus_a = DMatrix::identity(p, p) - &self.coeffs;
        i_minus_a.try_inverse().expect("I - A is invertible for acyclic graphs")
    }

    pub fn total_effect(&self, x: NodeId, y: NodeId) -> f64 {
        self.total_effects()[(y.index(), x.index())]
    }

    pub fn implied_covariance(&self) -> CovModel {
        let b = self.total_effects();
        let sigma = &b * &self.err_cov * b.transpose();
        CovModel {
            names: self.graph.names().to_vec(),
            sigma: symmetrize(sigma),
        }
    }

    /// Reads the JSON parameter format:
    /// `{"edges": [{"from", "to", "kind", "coef_or_cov"}], "error_var": {node: v}}`.
    /// Bidirected entries give error covariances, `error_var` the diagonal of
    /// the error covariance. Edges of `graph` not listed get zero.
    pub fn from_json(graph: &Admg, text: &str) -> Result<Self> {
        let spec: SemFile = serde_json::from_str(text).map_err(|e| Error::InvalidModel(e.to_string()))?;
        let p = graph.num_nodes();
        let mut a = DMatrix::zeros(p, p);
        let mut omega = DMatrix::zeros(p, p);
        for e in &spec.edges {
            let (f, t) = (graph.node(&e.from)?, graph.node(&e.to)?);
            match e.kind.as_str() {
                "directed" => {
                    if !graph.has_directed(f, t) {
                        return Err(Error::InvalidModel(format!("no edge {} -> {} in graph", e.from, e.to)));
                    }
                    a[(t.index(), f.index())] = e.coef_or_cov;
                }
                "bidirected" => {
                    if !graph.has_bidirected(f, t) {
                        return Err(Error::InvalidModel(format!("no edge {} <-> {} in graph", e.from, e.to)));
                    }
                    omega[(t.index(), f.index())] = e.coef_or_cov;
                    omega[(f.index(), t.index())] = e.coef_or_cov;
                }
                other => return Err(Error::InvalidModel(format!("unknown edge kind `{other}`"))),
            }
        }
        for n in graph.nodes() {
            let v = spec
                .error_var
                .get(graph.name(n))
                .ok_or_else(|| Error::InvalidModel(format!("missing error variance for `{}`", graph.name(n))))?;
            omega[(n.index(), n.index())] = *v;
        }
        LinearSem::new(graph.clone(), a, omega)
    }
}

#[derive(Debug, Deserialize)]
struct SemFile {
    edges: Vec<SemEdge>,
    error_var: BTreeMap<String, f64>,
}

#[derive(Debug, Deserialize)]
struct SemEdge {
    from: String,
    to: String,
    kind: String,
    coef_or_cov: f64,
}

fn symmetrize(m: DMatrix<f64>) -> DMatrix<f64> {
    (&m + m.transpose()) * 0.5
}

/// A covariance matrix with labelled rows; index `i` is node `NodeId(i)` of
/// the graph the model was built from.
#[derive(Debug, Clone, PartialEq)]
pub struct CovModel {
    pub names: Vec<String>,
    pub sigma: DMatrix<f64>,
}

impl CovModel {
    /// Checks symmetry and positive definiteness.
    pub fn new(names: Vec<String>, sigma: DMatrix<f64>) -> Result<Self> {
        if sigma.shape() != (names.len(), names.len()) {
            return Err(Error::InvalidModel("label count does not match matrix size".into()));
        }
        let sigma = symmetrize(sigma);
        let eig = sigma.clone().symmetric_eigenvalues();
        if !eig.is_empty() && eig.min() <= PD_TOLERANCE * eig.max() {
            return Err(Error::InvalidModel("covariance is not positive definite".into()));
        }
        Ok(CovModel { names, sigma })
    }

    /// Sample covariance (denominator `n`) of the columns of `data`.
    pub fn empirical(data: &DataMatrix) -> CovModel {
        let c = centered(&data.values);
        let n = c.nrows().max(1) as f64;
        CovModel {
            names: data.names.clone(),
            sigma: symmetrize(c.transpose() * &c / n),
        }
    }

    pub fn dim(&self) -> usize {
        self.names.len()
    }

    fn check(&self, s: &NodeSet) -> Result<()> {
        match s.iter().find(|n| n.index() >= self.dim()) {
            Some(n) => Err(Error::UnknownNode(format!("#{}", n.index()))),
            None => Ok(()),
        }
    }

    fn block(&self, rows: &[usize], cols: &[usize]) -> DMatrix<f64> {
        DMatrix::from_fn(rows.len(), cols.len(), |i, j| self.sigma[(rows[i], cols[j])])
    }

    /// `Sigma_st - Sigma_sw Sigma_ww^-1 Sigma_wt`. The sets may overlap.
    pub fn conditional_cov(&self, s: &NodeSet, t: &NodeSet, w: &NodeSet) -> Result<DMatrix<f64>> {
        for set in [s, t, w] {
            self.check(set)?;
        }
        self.conditional_block(&s.indices(), &t.indices(), &w.indices())
    }

    pub(crate) fn conditional_block(&self, s: &[usize], t: &[usize], w: &[usize]) -> Result<DMatrix<f64>> {
        let st = self.block(s, t);
        if w.is_empty() {
            return Ok(st);
        }
        let chol = spd(self.block(w, w), "conditioning block")?;
        let sw = self.block(s, w);
        let wt = self.block(w, t);
        Ok(st - sw * chol.solve(&wt))
    }

    /// Coefficients of `t` in the population regression of each `s` on
    /// `t ∪ w`, as an `|s| x |t|` matrix. `t` and `w` must be disjoint.
    pub fn regression_coef(&self, s: &NodeSet, t: &NodeSet, w: &NodeSet) -> Result<DMatrix<f64>> {
        for set in [s, t, w] {
            self.check(set)?;
        }
        if !t.is_disjoint(w) {
            return Err(Error::Overlap("regressors and conditioning set intersect".into()));
        }
        let design: Vec<usize> = t.indices().into_iter().chain(w.indices()).collect();
        let chol = spd(self.block(&design, &design), "regressor block")?;
        let beta = chol.solve(&self.block(&design, &s.indices())).transpose();
        Ok(beta.columns(0, t.len()).into_owned())
    }
}

/// Cholesky factor of a symmetric block, or `Degenerate`.
pub(crate) fn spd(m: DMatrix<f64>, what: &str) -> Result<Cholesky<f64, nalgebra::Dyn>> {
    let scale = m.diagonal().amax();
    let chol = Cholesky::new(m).ok_or_else(|| Error::Degenerate(format!("{what} is not positive definite")))?;
    let l = chol.l_dirty().diagonal();
    if l.iter().any(|&d| d * d <= PD_TOLERANCE * scale) {
        return Err(Error::Degenerate(format!("{what} is numerically singular")));
    }
    Ok(chol)
}

pub(crate) fn centered(m: &DMatrix<f64>) -> DMatrix<f64> {
    let mut c = m.clone();
    for mut col in c.column_iter_mut() {
        let mean = col.mean();
        col.add_scalar_mut(-mean);
    }
    c
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ErrorFamily {
    Gaussian,
    /// Centered uniform scaled to the node's error variance.
    Uniform,
}

impl ErrorFamily {
    pub fn as_str(self) -> &'static str {
        match self {
            ErrorFamily::Gaussian => "gaussian",
            ErrorFamily::Uniform => "uniform",
        }
    }
}

/// Model with one explicit latent parent per bidirected edge and
/// independent errors.
#[derive(Debug, Clone, PartialEq)]
pub struct CanonicalSem {
    pub base: Admg,
    /// `base` followed by one latent node per bidirected edge.
    pub expanded: Admg,
    /// Coefficients over the expanded graph.
    pub coeffs: DMatrix<f64>,
    /// Error variance of every expanded node.
    pub err_var: Vec<f64>,
    pub family: ErrorFamily,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RandomSemConfig {
    /// Coefficient magnitudes are uniform on `[min, max]` with a random sign.
    pub coef_abs: (f64, f64),
    pub var: (f64, f64),
    /// `None` draws Gaussian or uniform with equal probability.
    pub family: Option<ErrorFamily>,
}

impl Default for RandomSemConfig {
    fn default() -> Self {
        RandomSemConfig {
            coef_abs: (0.1, 2.0),
            var: (0.1, 1.0),
            family: None,
        }
    }
}

/// Names for latent nodes, distinct from every name in `g`.
fn latent_names(g: &Admg, count: usize) -> Vec<String> {
    let mut prefix = String::from("_L");
    while g.names().iter().any(|n| n.starts_with(&prefix)) {
        prefix.insert(0, '_');
    }
    (0..count).map(|k| format!("{prefix}{k}")).collect()
}

impl CanonicalSem {
    /// Builds the expanded graph; all parameters start at zero.
    fn skeleton(base: &Admg) -> (Admg, Vec<(NodeId, NodeId)>) {
        let bi: Vec<(NodeId, NodeId)> = base.bidirected_edges().collect();
        let p = base.num_nodes();
        let mut names = base.names().to_vec();
        names.extend(latent_names(base, bi.len()));
        let mut directed: Vec<(usize, usize)> = base.directed_edges().map(|(t, h)| (t.index(), h.index())).collect();
        for (k, &(a, b)) in bi.iter().enumerate() {
            directed.push((p + k, a.index()));
            directed.push((p + k, b.index()));
        }
        let expanded = Admg::from_parts(names, &directed, &[]).expect("latent expansion of a valid graph");
        (expanded, bi)
    }

    pub fn random(base: &Admg, rng: &mut impl Rng, cfg: &RandomSemConfig) -> CanonicalSem {
        let (expanded, _) = Self::skeleton(base);
        let q = expanded.num_nodes();
        let mut coeffs = DMatrix::zeros(q, q);
        for (t, h) in expanded.directed_edges() {
            let mag = rng.random_range(cfg.coef_abs.0..=cfg.coef_abs.1);
            let sign = if rng.random_bool(0.5) { 1.0 } else { -1.0 };
            coeffs[(h.index(), t.index())] = sign * mag;
        }
        let err_var = (0..q).map(|_| rng.random_range(cfg.var.0..=cfg.var.1)).collect();
        let family = cfg.family.unwrap_or_else(|| {
            if rng.random_bool(0.5) {
                ErrorFamily::Gaussian
            } else {
                ErrorFamily::Uniform
            }
        });
        CanonicalSem {
            base: base.clone(),
            expanded,
            coeffs,
            err_var,
            family,
        }
    }

    /// Every coefficient (latent loadings included) and every variance set to
    /// `coef` and `var`.
    pub fn uniform_parameters(base: &Admg, coef: f64, var: f64, family: ErrorFamily) -> CanonicalSem {
        let (expanded, _) = Self::skeleton(base);
        let q = expanded.num_nodes();
        let mut coeffs = DMatrix::zeros(q, q);
        for (t, h) in expanded.directed_edges() {
            coeffs[(h.index(), t.index())] = coef;
        }
        CanonicalSem {
            base: base.clone(),
            expanded,
            coeffs,
            err_var: vec![var; q],
            family,
        }
    }

    pub fn num_latents(&self) -> usize {
        self.expanded.num_nodes() - self.base.num_nodes()
    }

    /// The equivalent model on the base graph: each latent contributes
    /// `a_iL a_jL var(L)` to the error covariance of its two children.
    pub fn marginal(&self) -> LinearSem {
        let p = self.base.num_nodes();
        let coeffs = self.coeffs.view((0, 0), (p, p)).into_owned();
        let mut omega = DMatrix::from_diagonal(&DVector::from_column_slice(&self.err_var[..p]));
        for l in p..self.expanded.num_nodes() {
            let kids: Vec<usize> = self.expanded.children_of(NodeId(l)).map(NodeId::index).collect();
            for &i in &kids {
                for &j in &kids {
                    omega[(i, j)] += self.coeffs[(i, l)] * self.coeffs[(j, l)] * self.err_var[l];
                }
            }
        }
        LinearSem::new(self.base.clone(), coeffs, omega).expect("marginal of a canonical model is valid")
    }

    /// The model over the expanded graph with diagonal error covariance.
    pub fn expanded_sem(&self) -> LinearSem {
        let omega = DMatrix::from_diagonal(&DVector::from_vec(self.err_var.clone()));
        LinearSem::new(self.expanded.clone(), self.coeffs.clone(), omega).expect("valid expanded model")
    }

    /// `n` i.i.d. observations of the base nodes.
    pub fn sample(&self, n: usize, rng: &mut impl Rng) -> DataMatrix {
        let q = self.expanded.num_nodes();
        let p = self.base.num_nodes();
        let mut v = DMatrix::<f64>::zeros(n, q);
        for node in self.expanded.topological_order() {
            let i = node.index();
            let sd = self.err_var[i].sqrt();
            let mut col: DVector<f64> = match self.family {
                ErrorFamily::Gaussian => DVector::from_fn(n, |_, _| {
                    let z: f64 = StandardNormal.sample(rng);
                    sd * z
                }),
                ErrorFamily::Uniform => {
                    let h = 3f64.sqrt() * sd;
                    DVector::from_fn(n, |_, _| rng.random_range(-h..=h))
                }
            };
            for j in self.expanded.parents_of(node) {
                col.axpy(self.coeffs[(i, j.index())], &v.column(j.index()), 1.0);
            }
            v.set_column(i, &col);
        }
        DataMatrix {
            names: self.base.names().to_vec(),
            values: v.columns(0, p).into_owned(),
        }
    }
}

/// Deterministic generator for a `(base seed, purpose, model, dataset)`
/// coordinate; distinct coordinates give independent streams.
pub fn stream_rng(base_seed: u64, purpose: u64, model: u64, dataset: u64) -> ChaCha8Rng {
    let mut seed = [0u8; 32];
    for (k, v) in [base_seed, purpose, model, dataset].into_iter().enumerate() {
        seed[8 * k..8 * k + 8].copy_from_slice(&v.to_le_bytes());
    }
    ChaCha8Rng::from_seed(seed)
}

/// Random canonical model for `g` with the default parameter ranges.
pub fn random_sem(g: &Admg, seed: u64, cfg: &RandomSemConfig) -> CanonicalSem {
    CanonicalSem::random(g, &mut ChaCha8Rng::seed_from_u64(seed), cfg)
}

pub fn sample(m: &CanonicalSem, n: usize, seed: u64) -> DataMatrix {
    m.sample(n, &mut ChaCha8Rng::seed_from_u64(seed))
}

/// Observations in rows, one labelled column per variable.
#[derive(Debug, Clone, PartialEq)]
pub struct DataMatrix {
    pub names: Vec<String>,
    pub values: DMatrix<f64>,
}

impl DataMatrix {
    pub fn new(names: Vec<String>, values: DMatrix<f64>) -> Result<Self> {
        if names.len() != values.ncols() {
            return Err(Error::Data(format!("{} labels for {} columns", names.len(), values.ncols())));
        }
        if values.nrows() == 0 {
            return Err(Error::Data("no observations".into()));
        }
        Ok(DataMatrix { names, values })
    }

    pub fn nrows(&self) -> usize {
        self.values.nrows()
    }

    /// CSV with a header row of variable names.
    pub fn from_csv(reader: impl Read) -> Result<Self> {
        let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(reader);
        let names: Vec<String> = rdr
            .headers()
            .map_err(|e| Error::Data(e.to_string()))?
            .iter()
            .map(str::to_string)
            .collect();
        let mut flat = Vec::new();
        let mut rows = 0;
        for (k, rec) in rdr.records().enumerate() {
            let rec = rec.map_err(|e| Error::Data(e.to_string()))?;
            for field in rec.iter() {
                flat.push(
                    field
                        .parse::<f64>()
                        .map_err(|_| Error::Data(format!("row {}: not a number `{field}`", k + 2)))?,
                );
            }
            rows += 1;
        }
        DataMatrix::new(names.clone(), DMatrix::from_row_slice(rows, names.len(), &flat))
    }

    pub fn to_csv(&self) -> String {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(&self.names).expect("in-memory write");
        for r in self.values.row_iter() {
            w.write_record(r.iter().map(|v| v.to_string())).expect("in-memory write");
        }
        String::from_utf8(w.into_inner().expect("in-memory write")).expect("utf8")
    }

    /// Columns reordered to `g`'s node order, so column `i` is `NodeId(i)`.
    /// Extra columns are dropped.
    pub fn align(&self, g: &Admg) -> Result<DataMatrix> {
        let cols: Vec<usize> = g
            .names()
            .iter()
            .map(|n| {
                self.names
                    .iter()
                    .position(|m| m == n)
                    .ok_or_else(|| Error::Data(format!("no column for node `{n}`")))
            })
            .collect::<Result<_>>()?;
        Ok(DataMatrix {
            names: g.names().to_vec(),
            values: self.values.select_columns(&cols),
        })
    }
}
