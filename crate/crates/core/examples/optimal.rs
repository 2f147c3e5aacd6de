//! Optimal tuple for each bundled graph, reducing it first where needed.
//! Graphs without an X/Y pair are skipped.
use civ::{fixtures, Target};

fn main() -> civ::Result<()> {
    for (name, g) in fixtures::all() {
        let (Ok(x), Ok(y)) = (g.node("X"), g.node("Y")) else { continue };
        let g = if g.is_reduced_for(x, y) { g } else { g.reduce_for_estimation(x, y)?.graph };
        let r = Target::from_names(&g, "X", "Y")?.optimal()?;
        println!("{name:<6} {:<20} valid={} certified={}", r.tuple().display(&g), r.is_valid, r.optimality_certified);
    }
    Ok(())
}
