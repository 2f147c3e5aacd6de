//! Two-stage least squares on simulated data against the population value.
use civ::estimator::{ols, tsls};
use civ::sem::{random_sem, sample, RandomSemConfig};
use civ::{fixtures, CondInstrumentSet, Target};

fn main() -> civ::Result<()> {
    let g = fixtures::g2a();
    let t = Target::from_names(&g, "X", "Y")?;
    let m = random_sem(&g, 3, &RandomSemConfig::default());
    let tau = m.marginal().total_effect(t.x, t.y);
    let data = sample(&m, 5000, 1);
    let tuple = CondInstrumentSet::from_names(&g, &["B", "D"], &["C"])?;
    let iv = tsls(&data, t.x, t.y, &tuple)?;
    println!("true effect {tau:.4}");
    println!("2SLS        {:.4} (strength {:.4})", iv.estimate, iv.sample_strength);
    // Confounded by X <-> Y, so least squares is biased here.
    println!("OLS         {:.4}", ols(&data, t.x, t.y, &g.set(&["C"])?)?.estimate);
    Ok(())
}
