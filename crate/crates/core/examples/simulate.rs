//! Small Monte Carlo study. Ratios are RMSE of the optimal tuple over RMSE
//! of each comparator, so values below 1 favour the optimal tuple.
use civ::fixtures;
use civ::simulate::{run_study, StudyConfig};

fn main() -> civ::Result<()> {
    let g = fixtures::g2a();
    let (x, y) = (g.node("X")?, g.node("Y")?);
    let mut cfg = StudyConfig::new("g2a", g, x, y);
    cfg.n_models = 10;
    cfg.n_datasets = 20;
    cfg.sample_sizes = vec![500];
    let r = run_study(&cfg)?;
    println!("reference: {}", r.optimal);
    for s in &r.summary {
        println!("{:<20} n={:<4} geo-mean ratio {:.3}  share below 1 {:.2}", s.tuple, s.n, s.geo_mean_ratio, s.frac_ratio_lt_1);
    }
    Ok(())
}
