//! Asymptotic variance of the two-stage least squares estimator from a
//! population covariance.
//!
//! For a valid tuple `(Z, W)` the variance factors into a residual variance
//! `sigma_{ỹỹ.w}` of `Ỹ = Y - tau X` given `W`, divided by the conditional
//! instrumental strength `sigma_{xx.w} - sigma_{xx.zw}`.

use nalgebra::{DMatrix, DVector};
use serde::Serialize;

use crate::criteria::CondInstrumentSet;
use crate::error::{Error, Result};
use crate::graph::{NodeId, NodeSet};
use crate::sem::{spd, CovModel};

/// Strength below this fraction of `sigma_xx` is reported as a weak or
/// invalid instrument.
pub const STRENGTH_TOLERANCE: f64 = 1e-12;

#[derive(Debug, Clone, Copy)]
pub struct AvarQuery<'a> {
    pub cov: &'a CovModel,
    /// Total effect of `x` on `y`.
    pub tau: f64,
    pub x: NodeId,
    pub y: NodeId,
    pub tuple: &'a CondInstrumentSet,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct AvarReport {
    pub residual_variance: f64,
    pub strength: f64,
    pub avar_new: f64,
    pub avar_traditional: f64,
}

impl AvarQuery<'_> {
    fn sigma(&self, i: usize, j: usize) -> f64 {
        self.cov.sigma[(i, j)]
    }

    /// `sigma_{ỹỹ.w}`.
    pub fn residual_variance(&self) -> Result<f64> {
        let (x, y, tau) = (self.x.index(), self.y.index(), self.tau);
        let w = self.tuple.w.indices();
        let s_yy = self.sigma(y, y) - 2.0 * tau * self.sigma(y, x) + tau * tau * self.sigma(x, x);
        if w.is_empty() {
            return Ok(s_yy);
        }
        let s_yw = DVector::from_iterator(w.len(), w.iter().map(|&k| self.sigma(y, k) - tau * self.sigma(x, k)));
        let chol = spd(DMatrix::from_fn(w.len(), w.len(), |i, j| self.sigma(w[i], w[j])), "conditioning block")?;
        Ok(s_yy - s_yw.dot(&chol.solve(&s_yw)))
    }

    /// `Sigma_{xz.w} Sigma_{zz.w}^-1 Sigma_{zx.w}`, which equals
    /// `sigma_{xx.w} - sigma_{xx.zw}`.
    pub fn instrument_strength(&self) -> Result<f64> {
        let (z, w) = (self.tuple.z.indices(), self.tuple.w.indices());
        if z.is_empty() {
            return Ok(0.0);
        }
        let x = [self.x.index()];
        let s_xz = self.cov.conditional_block(&x, &z, &w)?;
        let s_zz = self.cov.conditional_block(&z, &z, &w)?;
        let chol = spd(s_zz, "instrument block")?;
        let v = s_xz.transpose();
        Ok(v.dot(&chol.solve(&v)).max(0.0))
    }

    /// Residual variance divided by instrument strength.
    pub fn avar_new_formula(&self) -> Result<f64> {
        let strength = self.instrument_strength()?;
        if strength <= STRENGTH_TOLERANCE * self.sigma(self.x.index(), self.x.index()) {
            return Err(Error::WeakInstrument(strength));
        }
        Ok(self.residual_variance()? / strength)
    }

    /// The classical sandwich form over `S = (X, W)` and `T = (Z, W)`:
    /// `eta * (Sigma_st Sigma_tt^-1 Sigma_ts)^-1` at entry (1, 1), with `eta`
    /// the variance of `Y - gamma S` at the population 2SLS coefficients
    /// `gamma`.
    pub fn avar_traditional(&self) -> Result<f64> {
        let (x, y) = (self.x.index(), self.y.index());
        let s: Vec<usize> = std::iter::once(x).chain(self.tuple.w.indices()).collect();
        let t: Vec<usize> = self.tuple.z.indices().into_iter().chain(self.tuple.w.indices()).collect();
        let block = |r: &[usize], c: &[usize]| DMatrix::from_fn(r.len(), c.len(), |i, j| self.sigma(r[i], c[j]));
        let tt = spd(block(&t, &t), "instrument block")?;
        let s_st = block(&s, &t);
        let m = &s_st * tt.solve(&s_st.transpose());
        let m_inv = m
            .try_inverse()
            .filter(|inv| inv.iter().all(|v| v.is_finite()))
            .ok_or_else(|| Error::RankDeficient("first-stage moment matrix is singular".into()))?;
        let s_yt = block(&[y], &t);
        let gamma = s_yt * tt.solve(&s_st.transpose()) * &m_inv;
        let s_ss = block(&s, &s);
        let s_sy = block(&s, &[y]);
        let eta = self.sigma(y, y) - 2.0 * (&gamma * s_sy)[(0, 0)] + (&gamma * s_ss * gamma.transpose())[(0, 0)];
        Ok(eta * m_inv[(0, 0)])
    }

    pub fn report(&self) -> Result<AvarReport> {
        let residual_variance = self.residual_variance()?;
        let strength = self.instrument_strength()?;
        Ok(AvarReport {
            residual_variance,
            strength,
            avar_new: self.avar_new_formula()?,
            avar_traditional: self.avar_traditional()?,
        })
    }
}

/// Asymptotic variance of the least squares coefficient of `x` in the
/// regression of `y` on `x` and `w`: `sigma_{yy.xw} / sigma_{xx.w}`.
pub fn avar_ols(cov: &CovModel, x: NodeId, y: NodeId, w: &NodeSet) -> Result<f64> {
    let xs = NodeSet::singleton(x);
    let ys = NodeSet::singleton(y);
    let num = cov.conditional_cov(&ys, &ys, &w.with(x))?[(0, 0)];
    let den = cov.conditional_cov(&xs, &xs, w)?[(0, 0)];
    Ok(num / den)
}
