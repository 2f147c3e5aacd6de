//! Greedy growth of a valid tuple; the result depends on the node order.
use civ::greedy::GuardMode;
use civ::{fixtures, CondInstrumentSet, Target};

fn main() -> civ::Result<()> {
    let g = fixtures::g1b();
    let t = Target::from_names(&g, "X", "Y")?;
    let start = CondInstrumentSet::from_names(&g, &["B"], &["C"])?;
    for order in [["A", "D"], ["D", "A"]] {
        let order: Vec<_> = order.iter().map(|n| g.node(n)).collect::<civ::Result<_>>()?;
        let tr = t.greedy_forward(&start, Some(&order), GuardMode::Running)?;
        for s in &tr.steps {
            println!("  {} {:?}", s.node_name, s.action);
        }
        println!("=> {}", tr.result.display(&g));
    }
    Ok(())
}
