//! Graphs and models shipped with the crate (also under `fixtures/`).

use crate::graph::{parse_graph, Admg};

pub const G1A: &str = include_str!("../fixtures/g1a");
pub const G1B: &str = include_str!("../fixtures/g1b");
pub const G2A: &str = include_str!("../fixtures/g2a");
pub const G2B: &str = include_str!("../fixtures/g2b");
pub const G4A: &str = include_str!("../fixtures/g4a");
pub const G4B: &str = include_str!("../fixtures/g4b");
pub const G3APP: &str = include_str!("../fixtures/g3app");

/// Unit-parameter model on `g2b`.
pub const M1_JSON: &str = include_str!("../fixtures/m1.json");
/// As `M1_JSON` but with a weak `A -> B` edge (0.1).
pub const M2_JSON: &str = include_str!("../fixtures/m2.json");

/// Mediated graph `X -> M -> Y` with confounding and four covariates.
pub fn g1a() -> Admg {
    parse_graph(G1A).expect("fixture g1a")
}

/// `g1a` with the mediator projected out.
pub fn g1b() -> Admg {
    parse_graph(G1B).expect("fixture g1b")
}

pub fn g2a() -> Admg {
    parse_graph(G2A).expect("fixture g2a")
}

/// Graph without an asymptotically optimal tuple.
pub fn g2b() -> Admg {
    parse_graph(G2B).expect("fixture g2b")
}

/// Graph where the district construction yields an empty instrument set.
pub fn g4a() -> Admg {
    parse_graph(G4A).expect("fixture g4a")
}

/// Graph where the constructed instrument is not adjacent to `X`.
pub fn g4b() -> Admg {
    parse_graph(G4B).expect("fixture g4b")
}

/// Seven-node chain graph on `V1..V7`, target `(V4, V6)`.
pub fn g3app() -> Admg {
    parse_graph(G3APP).expect("fixture g3app")
}

pub fn by_name(name: &str) -> Option<Admg> {
    all().into_iter().find(|(n, _)| *n == name).map(|(_, g)| g)
}

pub fn all() -> Vec<(&'static str, Admg)> {
    vec![
        ("g1a", g1a()),
        ("g1b", g1b()),
        ("g2a", g2a()),
        ("g2b", g2b()),
        ("g4a", g4a()),
        ("g4b", g4b()),
        ("g3app", g3app()),
    ]
}
