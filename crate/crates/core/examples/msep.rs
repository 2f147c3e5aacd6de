//! m-separation queries on a small mixed graph.
use civ::msep::{m_separated, reachable};
use civ::parse_graph;

fn main() -> civ::Result<()> {
    let g = parse_graph("A -> B\nB -> C\nA <-> C\nD -> C\n")?;
    for (s, t, w) in [(&["A"][..], &["D"][..], &[][..]), (&["A"], &["D"], &["C"]), (&["B"], &["D"], &["C"])] {
        let sep = m_separated(&g, &g.set(s)?, &g.set(t)?, &g.set(w)?)?;
        println!("{s:?} _||_ {t:?} | {w:?}: {sep}");
    }
    let r = reachable(&g, &g.set(&["A"])?, &g.set(&["C"])?)?;
    println!("reachable from A given C: {}", g.fmt_set(&r));
    Ok(())
}
