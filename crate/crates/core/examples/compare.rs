//! Graphical efficiency comparison of two tuples.
use civ::{fixtures, CondInstrumentSet, Target};

fn main() -> civ::Result<()> {
    let g = fixtures::g2a();
    let t = Target::from_names(&g, "X", "Y")?;
    let base = CondInstrumentSet::from_names(&g, &["D"], &[] as &[&str])?;
    for (z, w) in [(&["D"][..], &["A"][..]), (&["D"], &["C"])] {
        let other = CondInstrumentSet::from_names(&g, z, w)?;
        let d = t.compare(&base, &other)?;
        println!("{} vs {}: {:?} forward={:?}", base.display(&g), other.display(&g), d.verdict, d.forward);
    }
    Ok(())
}
