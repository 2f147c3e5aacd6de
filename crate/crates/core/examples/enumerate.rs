//! Lists every valid conditional instrumental set.
use civ::criteria::DEFAULT_ENUMERATION_CAP;
use civ::{fixtures, Target};

fn main() -> civ::Result<()> {
    let g = fixtures::g2b();
    let t = Target::from_names(&g, "X", "Y")?;
    for tuple in t.enumerate(None, DEFAULT_ENUMERATION_CAP)? {
        println!("{}", tuple.display(&g));
    }
    Ok(())
}
