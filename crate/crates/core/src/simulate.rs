//! Monte Carlo comparison of conditional instrumental sets.
//!
//! For each random model compatible with the graph, datasets of every sample
//! size are drawn, and every tuple (plus an unadjusted least squares
//! baseline) is evaluated on the same datasets. The root mean squared error
//! of each tuple is then compared to that of the district-based tuple.

use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::Serialize;

use crate::avar::AvarQuery;
use crate::criteria::{CondInstrumentSet, Target, DEFAULT_ENUMERATION_CAP};
use crate::error::{Error, Result};
use crate::estimator::{ols, tsls};
use crate::graph::{Admg, NodeId, NodeSet};
use crate::sem::{stream_rng, CanonicalSem, RandomSemConfig};

pub const OLS_LABEL: &str = "OLS";

const MODEL_STREAM: u64 = 0;
const DATA_STREAM: u64 = 1;

#[derive(Debug, Clone)]
pub struct StudyConfig {
    /// Name written to the `graph` column.
    pub graph_id: String,
    pub graph: Admg,
    pub x: NodeId,
    pub y: NodeId,
    pub n_models: usize,
    pub n_datasets: usize,
    pub sample_sizes: Vec<usize>,
    pub base_seed: u64,
    /// Defaults to every valid tuple of the graph.
    pub tuples: Option<Vec<CondInstrumentSet>>,
    pub include_ols: bool,
    pub sem: RandomSemConfig,
    /// Worker threads; 0 uses the rayon default.
    pub jobs: usize,
}

impl StudyConfig {
    pub fn new(graph_id: &str, graph: Admg, x: NodeId, y: NodeId) -> Self {
        StudyConfig {
            graph_id: graph_id.to_string(),
            graph,
            x,
            y,
            n_models: 100,
            n_datasets: 50,
            sample_sizes: vec![20, 500],
            base_seed: 0,
            tuples: None,
            include_ols: true,
            sem: RandomSemConfig::default(),
            jobs: 0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StudyRow {
    pub graph: String,
    pub model_id: usize,
    pub error_family: String,
    pub n: usize,
    pub tuple: String,
    /// `NaN` when every replicate was skipped.
    pub rmse: f64,
    /// `rmse(optimal) / rmse(tuple)`; below 1 means the optimal tuple won.
    pub ratio_to_optimal: f64,
    pub skipped: usize,
    /// Population asymptotic variance under the model (`None` for the
    /// baseline or a weak instrument).
    #[serde(skip)]
    pub avar: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SummaryRow {
    pub tuple: String,
    pub n: usize,
    pub geo_mean_ratio: f64,
    pub frac_ratio_lt_1: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct StudyResult {
    /// Label of the reference tuple.
    pub optimal: String,
    pub tuples: Vec<String>,
    pub rows: Vec<StudyRow>,
    pub summary: Vec<SummaryRow>,
}

impl StudyResult {
    pub fn to_csv(&self) -> String {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(["graph", "model_id", "error_family", "n", "tuple", "rmse", "ratio_to_optimal", "skipped"])
            .expect("in-memory write");
        for r in &self.rows {
            w.write_record([
                r.graph.clone(),
                r.model_id.to_string(),
                r.error_family.clone(),
                r.n.to_string(),
                r.tuple.clone(),
                r.rmse.to_string(),
                r.ratio_to_optimal.to_string(),
                r.skipped.to_string(),
            ])
            .expect("in-memory write");
        }
        String::from_utf8(w.into_inner().expect("in-memory write")).expect("utf8")
    }

    pub fn summary_json(&self) -> String {
        serde_json::to_string_pretty(&self.summary).expect("serializable summary")
    }

    pub fn summary_for(&self, tuple: &str, n: usize) -> Option<&SummaryRow> {
        self.summary.iter().find(|s| s.tuple == tuple && s.n == n)
    }

    pub fn rows_for(&self, tuple: &str, n: usize) -> impl Iterator<Item = &StudyRow> {
        let tuple = tuple.to_string();
        self.rows.iter().filter(move |r| r.tuple == tuple && r.n == n)
    }
}

#[derive(Clone)]
enum Arm {
    Iv(CondInstrumentSet),
    Ols,
}

pub fn run_study(cfg: &StudyConfig) -> Result<StudyResult> {
    if cfg.n_models == 0 || cfg.n_datasets == 0 || cfg.sample_sizes.is_empty() {
        return Err(Error::Precondition("model, dataset and sample size counts must be positive".into()));
    }
    let g = &cfg.graph;
    let target = Target::new(g, cfg.x, cfg.y)?;

    let reduction = g.reduce_for_estimation(cfg.x, cfg.y)?;
    if reduction.zero_effect {
        return Err(Error::NoCausalPath {
            x: g.name(cfg.x).to_string(),
            y: g.name(cfg.y).to_string(),
        });
    }
    let rg = &reduction.graph;
    let opt = Target::new(rg, rg.node(g.name(cfg.x))?, rg.node(g.name(cfg.y))?)?.optimal()?;
    if !opt.is_valid {
        return Err(Error::Precondition("the district-based tuple has no instruments".into()));
    }
    let optimal = CondInstrumentSet::new(opt.z_opt.translate(rg, g)?, opt.w_opt.translate(rg, g)?);

    let mut tuples = match &cfg.tuples {
        Some(t) => {
            for tuple in t {
                if !target.is_valid(tuple)? {
                    return Err(Error::InvalidTuple(tuple.display(g)));
                }
            }
            t.clone()
        }
        None => target.enumerate(None, DEFAULT_ENUMERATION_CAP)?,
    };
    if !tuples.contains(&optimal) {
        tuples.push(optimal.clone());
    }
    let mut arms: Vec<(String, Arm)> = tuples.iter().map(|t| (t.label(g), Arm::Iv(t.clone()))).collect();
    if cfg.include_ols {
        arms.push((OLS_LABEL.to_string(), Arm::Ols));
    }
    let opt_arm = arms.iter().position(|(l, _)| *l == optimal.label(g)).expect("optimal arm present");

    let run_model = |m: usize| -> Vec<StudyRow> {
        let sem = CanonicalSem::random(g, &mut stream_rng(cfg.base_seed, MODEL_STREAM, m as u64, 0), &cfg.sem);
        let lin = sem.marginal();
        let tau = lin.total_effect(cfg.x, cfg.y);
        let cov = lin.implied_covariance();
        let avars: Vec<Option<f64>> = arms
            .iter()
            .map(|(_, arm)| match arm {
                Arm::Iv(t) => AvarQuery { cov: &cov, tau, x: cfg.x, y: cfg.y, tuple: t }.avar_new_formula().ok(),
                Arm::Ols => None,
            })
            .collect();

        let mut rows = Vec::new();
        for (k, &n) in cfg.sample_sizes.iter().enumerate() {
            let mut sq = vec![0.0; arms.len()];
            let mut used = vec![0usize; arms.len()];
            for d in 0..cfg.n_datasets {
                let stream = DATA_STREAM + k as u64;
                let data = sem.sample(n, &mut stream_rng(cfg.base_seed, stream, m as u64, d as u64));
                for (a, (_, arm)) in arms.iter().enumerate() {
                    let est = match arm {
                        Arm::Iv(t) => tsls(&data, cfg.x, cfg.y, t),
                        Arm::Ols => ols(&data, cfg.x, cfg.y, &NodeSet::new()),
                    };
                    if let Ok(r) = est {
                        if r.estimate.is_finite() {
                            sq[a] += (r.estimate - tau).powi(2);
                            used[a] += 1;
                        }
                    }
                }
            }
            let rmse: Vec<f64> = sq
                .iter()
                .zip(&used)
                .map(|(&s, &u)| if u == 0 { f64::NAN } else { (s / u as f64).sqrt() })
                .collect();
            for (a, (label, _)) in arms.iter().enumerate() {
                rows.push(StudyRow {
                    graph: cfg.graph_id.clone(),
                    model_id: m,
                    error_family: sem.family.as_str().to_string(),
                    n,
                    tuple: label.clone(),
                    rmse: rmse[a],
                    ratio_to_optimal: rmse[opt_arm] / rmse[a],
                    skipped: cfg.n_datasets - used[a],
                    avar: avars[a],
                });
            }
        }
        rows
    };

    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(cfg.jobs)
        .build()
        .map_err(|e| Error::Precondition(e.to_string()))?;
    let per_model: Vec<Vec<StudyRow>> = pool.install(|| (0..cfg.n_models).into_par_iter().map(run_model).collect());
    let rows: Vec<StudyRow> = per_model.into_iter().flatten().collect();

    let mut groups: BTreeMap<(usize, usize), Vec<f64>> = BTreeMap::new();
    let order: BTreeMap<&str, usize> = arms.iter().enumerate().map(|(i, (l, _))| (l.as_str(), i)).collect();
    for r in &rows {
        groups.entry((r.n, order[r.tuple.as_str()])).or_default().push(r.ratio_to_optimal);
    }
    let summary = groups
        .into_iter()
        .map(|((n, a), ratios)| {
            let finite: Vec<f64> = ratios.into_iter().filter(|r| r.is_finite() && *r > 0.0).collect();
            let count = finite.len().max(1) as f64;
            SummaryRow {
                tuple: arms[a].0.clone(),
                n,
                geo_mean_ratio: (finite.iter().map(|r| r.ln()).sum::<f64>() / count).exp(),
                frac_ratio_lt_1: finite.iter().filter(|&&r| r < 1.0).count() as f64 / count,
            }
        })
        .collect();

    Ok(StudyResult {
        optimal: optimal.label(g),
        tuples: arms.into_iter().map(|(l, _)| l).collect(),
        rows,
        summary,
    })
}
