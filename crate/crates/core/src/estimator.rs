//! Two-stage least squares and ordinary least squares on centered data.

use nalgebra::{DMatrix, DVector};
use serde::Serialize;

use crate::criteria::CondInstrumentSet;
use crate::error::{Error, Result};
use crate::graph::{NodeId, NodeSet};
use crate::sem::{centered, DataMatrix};

/// Smallest singular value relative to the largest below which a design is
/// treated as rank deficient.
pub const RANK_TOLERANCE: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EstimateReport {
    pub estimate: f64,
    /// Plug-in `sigma_{xx.w} - sigma_{xx.zw}`; for least squares, the plug-in
    /// `sigma_{xx.w}`.
    pub sample_strength: f64,
    /// Plug-in variance of `Y - estimate * X` given `W`.
    pub sample_residual_var: f64,
    pub n: usize,
}

fn columns(c: &DMatrix<f64>, idx: &[usize]) -> DMatrix<f64> {
    c.select_columns(idx)
}

fn check_rank(m: &DMatrix<f64>, what: &str) -> Result<()> {
    let sv = m.singular_values();
    let (lo, hi) = (sv.min(), sv.max());
    if hi.is_nan() || hi <= 0.0 || lo <= RANK_TOLERANCE * hi {
        return Err(Error::RankDeficient(format!("{what} (singular values {lo:e}..{hi:e})")));
    }
    Ok(())
}

/// Residual of `v` after projection onto the column span of `q` (orthonormal).
fn residual(q: Option<&DMatrix<f64>>, v: &DVector<f64>) -> DVector<f64> {
    match q {
        Some(q) => v - q * (q.transpose() * v),
        None => v.clone(),
    }
}

/// Orthonormal basis of the columns of `m`, or `None` for zero columns.
fn basis(m: &DMatrix<f64>, what: &str) -> Result<Option<DMatrix<f64>>> {
    if m.ncols() == 0 {
        return Ok(None);
    }
    let qr = m.clone().qr();
    check_rank(&qr.r(), what)?;
    Ok(Some(qr.q()))
}

fn check_columns(data: &DataMatrix, nodes: &NodeSet) -> Result<()> {
    match nodes.iter().find(|n| n.index() >= data.values.ncols()) {
        Some(n) => Err(Error::Data(format!("no column #{}", n.index()))),
        None => Ok(()),
    }
}

/// Plug-in variance of `Y - tau X` given `W`, from centered columns.
fn residual_var(c: &DMatrix<f64>, x: usize, y: usize, w: &[usize], tau: f64) -> Result<f64> {
    let n = c.nrows() as f64;
    let ytilde = c.column(y) - c.column(x) * tau;
    let r = residual(basis(&columns(c, w), "conditioning columns")?.as_ref(), &ytilde);
    Ok(r.norm_squared() / n)
}

/// Basmann's two-stage least squares estimate of the effect of `x` on `y`
/// with instruments `t.z` and covariates `t.w`. `data` columns must be in
/// graph node order (see [`DataMatrix::align`]).
pub fn tsls(data: &DataMatrix, x: NodeId, y: NodeId, t: &CondInstrumentSet) -> Result<EstimateReport> {
    check_columns(data, &t.nodes().with(x).with(y))?;
    let n = data.nrows();
    let (z, w) = (t.z.indices(), t.w.indices());
    if z.is_empty() {
        return Err(Error::InvalidTuple("no instruments".into()));
    }
    if n <= z.len() + w.len() + 1 {
        return Err(Error::RankDeficient(format!("{n} observations for {} regressors", z.len() + w.len() + 1)));
    }
    let c = centered(&data.values);
    let s_idx: Vec<usize> = std::iter::once(x.index()).chain(w.iter().copied()).collect();
    let t_idx: Vec<usize> = z.iter().chain(&w).copied().collect();

    let q = basis(&columns(&c, &t_idx), "instrument design")?.expect("nonempty instruments");
    let qs = q.transpose() * columns(&c, &s_idx);
    check_rank(&qs, "projected regressors")?;
    let qy = q.transpose() * c.column(y.index());
    let gamma = qs
        .svd(true, true)
        .solve(&qy, 0.0)
        .map_err(|e| Error::RankDeficient(e.to_string()))?;
    let estimate = gamma[0];

    let nf = n as f64;
    let qw = basis(&columns(&c, &w), "conditioning columns")?;
    let x_w = residual(qw.as_ref(), &c.column(x.index()).into_owned());
    let x_zw = residual(Some(&q), &c.column(x.index()).into_owned());
    let sample_strength = (x_w.norm_squared() - x_zw.norm_squared()) / nf;

    Ok(EstimateReport {
        estimate,
        sample_strength,
        sample_residual_var: residual_var(&c, x.index(), y.index(), &w, estimate)?,
        n,
    })
}

/// Coefficient of `x` in the least squares regression of `y` on `x` and `w`.
pub fn ols(data: &DataMatrix, x: NodeId, y: NodeId, w: &NodeSet) -> Result<EstimateReport> {
    check_columns(data, &w.with(x).with(y))?;
    let n = data.nrows();
    if n <= w.len() + 1 {
        return Err(Error::RankDeficient(format!("{n} observations for {} regressors", w.len() + 1)));
    }
    let c = centered(&data.values);
    let s_idx: Vec<usize> = std::iter::once(x.index()).chain(w.indices()).collect();
    let s = columns(&c, &s_idx);
    let qr = s.qr();
    check_rank(&qr.r(), "regressors")?;
    let yv = c.column(y.index()).into_owned();
    let beta = qr
        .r()
        .solve_upper_triangular(&(qr.q().transpose() * &yv))
        .ok_or_else(|| Error::RankDeficient("regressors".into()))?;
    let estimate = beta[0];
    let w_idx = w.indices();
    let qw = basis(&columns(&c, &w_idx), "conditioning columns")?;
    let x_w = residual(qw.as_ref(), &c.column(x.index()).into_owned());
    Ok(EstimateReport {
        estimate,
        sample_strength: x_w.norm_squared() / n as f64,
        sample_residual_var: residual_var(&c, x.index(), y.index(), &w_idx, estimate)?,
        n,
    })
}
