//! Latent projection and the reduction used before estimation.
use civ::parse_graph;

fn main() -> civ::Result<()> {
    let g = parse_graph("A -> X\nX -> M\nM -> Y\nL -> X\nL -> Y\nM -> K\n")?;
    let proj = g.latent_projection(&g.set(&["L"])?)?;
    println!("L marginalized:\n{proj}");
    let red = g.reduce_for_estimation(g.node("X")?, g.node("Y")?)?;
    println!("removed {:?}\n{}", red.removed, red.graph);
    Ok(())
}
