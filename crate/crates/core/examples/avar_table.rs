//! Population asymptotic variances of every valid tuple under one model.
use civ::avar::AvarQuery;
use civ::criteria::DEFAULT_ENUMERATION_CAP;
use civ::sem::{random_sem, RandomSemConfig};
use civ::{fixtures, Target};

fn main() -> civ::Result<()> {
    let g = fixtures::g2a();
    let t = Target::from_names(&g, "X", "Y")?;
    let m = random_sem(&g, 0, &RandomSemConfig::default()).marginal();
    let cov = m.implied_covariance();
    let tau = m.total_effect(t.x, t.y);
    println!("tau = {tau:.4}");
    let mut rows = Vec::new();
    for tuple in t.enumerate(None, DEFAULT_ENUMERATION_CAP)? {
        let q = AvarQuery { cov: &cov, tau, x: t.x, y: t.y, tuple: &tuple };
        if let Ok(v) = q.avar_new_formula() {
            rows.push((v, tuple.display(&g)));
        }
    }
    rows.sort_by(|a, b| a.0.total_cmp(&b.0));
    for (v, label) in rows {
        println!("{v:>10.4}  {label}");
    }
    Ok(())
}
