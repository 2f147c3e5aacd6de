//! Checks the three graphical conditions for a few tuples.
use civ::{fixtures, CondInstrumentSet, Target};

fn main() -> civ::Result<()> {
    let g = fixtures::g1b();
    let t = Target::from_names(&g, "X", "Y")?;
    println!("forbidden: {}", g.fmt_set(&t.forbidden));
    for (z, w) in [(&["B"][..], &["C"][..]), (&["B"], &[][..]), (&["C"], &["B"])] {
        let tuple = CondInstrumentSet::from_names(&g, z, w)?;
        let r = t.validate(&tuple)?;
        println!("{:<16} valid={} i={} ii={} iii={}", tuple.display(&g), r.valid, r.cond_i, r.cond_ii, r.cond_iii);
    }
    Ok(())
}
