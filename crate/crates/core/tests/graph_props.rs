mod common;

use civ::fixtures;
use civ::msep::{m_separated, m_separated_nodes, reachable};
use civ::{parse_graph, serialize_graph, Admg, NodeId, NodeSet};
use common::{arb_admg, brute_connected, brute_separated, random_admg, subsets};
use proptest::prelude::*;

fn nodes(g: &Admg) -> Vec<NodeId> {
    g.nodes().collect()
}

#[test]
fn msep_matches_path_oracle_on_all_singletons() {
    for seed in 0..300u64 {
        let g = random_admg(seed, 7);
        let vs = nodes(&g);
        for &a in &vs {
            for &b in &vs {
                if a == b {
                    continue;
                }
                let rest: Vec<NodeId> = vs.iter().copied().filter(|&v| v != a && v != b).collect();
                for w in subsets(&rest) {
                    let fast = m_separated_nodes(&g, a, b, &w).unwrap();
                    let slow = !brute_connected(&g, a.index(), b.index(), &w.indices());
                    assert_eq!(fast, slow, "seed {seed}: {} vs {} given {}\n{g}", g.name(a), g.name(b), g.fmt_set(&w));
                }
            }
        }
    }
}

#[test]
fn fixture_separations() {
    let g = fixtures::g2a();
    let s = |n: &[&str]| g.set(n).unwrap();
    assert!(!m_separated(&g, &s(&["A"]), &s(&["X"]), &s(&[])).unwrap());
    assert!(m_separated(&g, &s(&["A"]), &s(&["X"]), &s(&["D"])).unwrap());
    assert!(m_separated(&g, &s(&["C"]), &s(&["X"]), &s(&[])).unwrap());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn msep_is_symmetric(g in arb_admg(7), pick in any::<u64>()) {
        let vs = nodes(&g);
        let n = vs.len();
        let s: NodeSet = (0..n).filter(|i| pick >> i & 1 == 1).map(|i| vs[i]).collect();
        let t: NodeSet = (0..n).filter(|i| pick >> (i + 8) & 1 == 1).map(|i| vs[i]).collect::<NodeSet>().difference(&s);
        let w: NodeSet = (0..n).filter(|i| pick >> (i + 16) & 1 == 1).map(|i| vs[i]).collect::<NodeSet>().difference(&s).difference(&t);
        prop_assume!(!s.is_empty() && !t.is_empty());
        let st = m_separated(&g, &s, &t, &w).unwrap();
        prop_assert_eq!(st, m_separated(&g, &t, &s, &w).unwrap());
        prop_assert_eq!(st, brute_separated(&g, &s, &t, &w));
    }

    #[test]
    fn reachable_excludes_conditioning_set(g in arb_admg(7), pick in any::<u64>()) {
        let vs = nodes(&g);
        let s = NodeSet::singleton(vs[(pick % vs.len() as u64) as usize]);
        let w: NodeSet = vs.iter().enumerate().filter(|(i, _)| pick >> (i + 8) & 1 == 1).map(|(_, &v)| v).collect::<NodeSet>().difference(&s);
        let r = reachable(&g, &s, &w).unwrap();
        prop_assert!(r.is_disjoint(&w));
    }

    #[test]
    fn text_format_round_trips(g in arb_admg(7)) {
        let text = serialize_graph(&g);
        let back = parse_graph(&text).unwrap();
        prop_assert_eq!(&back, &g);
        prop_assert_eq!(serialize_graph(&back), text);
    }

    /// m-separation among retained nodes is unchanged by projecting out the rest.
    #[test]
    fn projection_preserves_separation(g in arb_admg(7), pick in any::<u64>()) {
        let vs = nodes(&g);
        let latent: NodeSet = vs.iter().enumerate().filter(|(i, _)| pick >> i & 1 == 1).map(|(_, &v)| v).collect();
        let p = g.latent_projection(&latent).unwrap();
        let kept: Vec<NodeId> = vs.iter().copied().filter(|v| !latent.contains(*v)).collect();
        prop_assume!(kept.len() >= 2);
        for &a in &kept {
            for &b in &kept {
                if a >= b { continue; }
                let others: Vec<NodeId> = kept.iter().copied().filter(|&v| v != a && v != b).collect();
                for w in subsets(&others) {
                    let full = m_separated_nodes(&g, a, b, &w).unwrap();
                    let pa = p.node(g.name(a)).unwrap();
                    let pb = p.node(g.name(b)).unwrap();
                    let pw = w.translate(&g, &p).unwrap();
                    prop_assert_eq!(full, m_separated_nodes(&p, pa, pb, &pw).unwrap());
                }
            }
        }
    }

    /// Ancestral relations among retained nodes survive projection.
    #[test]
    fn projection_preserves_ancestry(g in arb_admg(7), pick in any::<u64>()) {
        let vs = nodes(&g);
        let latent: NodeSet = vs.iter().enumerate().filter(|(i, _)| pick >> i & 1 == 1).map(|(_, &v)| v).collect();
        let p = g.latent_projection(&latent).unwrap();
        for a in vs.iter().copied().filter(|v| !latent.contains(*v)) {
            let an_full = g.ancestors(&NodeSet::singleton(a)).difference(&latent);
            let pa = p.node(g.name(a)).unwrap();
            let an_proj = p.ancestors(&NodeSet::singleton(pa));
            prop_assert_eq!(g.set_names(&an_full), p.set_names(&an_proj));
        }
    }

    #[test]
    fn districts_are_symmetric(g in arb_admg(7), pick in any::<u64>()) {
        let vs = nodes(&g);
        let w: NodeSet = vs.iter().enumerate().filter(|(i, _)| pick >> i & 1 == 1).map(|(_, &v)| v).collect();
        for &a in vs.iter().filter(|v| !w.contains(**v)) {
            let da = g.district(a, &w).unwrap();
            prop_assert!(da.contains(a) && da.is_disjoint(&w));
            for b in da.iter() {
                prop_assert_eq!(&g.district(b, &w).unwrap(), &da);
            }
            let dp = g.district_plus(a, &w).unwrap();
            prop_assert!(da.is_subset(&dp) && dp.is_disjoint(&w));
        }
    }

    #[test]
    fn forbidden_set_structure(g in arb_admg(7), pick in any::<u64>()) {
        let vs = nodes(&g);
        let x = vs[(pick % vs.len() as u64) as usize];
        let y = vs[((pick >> 8) % vs.len() as u64) as usize];
        prop_assume!(x != y);
        let de_x = g.descendants(&NodeSet::singleton(x));
        let cn = g.causal_nodes(x, y);
        let forb = g.forbidden_nodes(x, y);
        prop_assert!(forb.contains(x));
        prop_assert!(cn.is_subset(&forb));
        prop_assert!(forb.is_subset(&de_x));
        prop_assert_eq!(cn.contains(y), de_x.contains(y));
        // Removing causal out-edges of x leaves no directed path x to y.
        let tilde = g.remove_causal_out_edges(x, y);
        prop_assert!(!tilde.descendants(&NodeSet::singleton(x)).contains(y));
    }

    #[test]
    fn reduction_isolates_treatment(g in arb_admg(7), pick in any::<u64>()) {
        let vs = nodes(&g);
        let x = vs[(pick % vs.len() as u64) as usize];
        let y = vs[((pick >> 8) % vs.len() as u64) as usize];
        prop_assume!(x != y);
        let r = g.reduce_for_estimation(x, y).unwrap();
        let (rx, ry) = (r.graph.node(g.name(x)).unwrap(), r.graph.node(g.name(y)).unwrap());
        prop_assert_eq!(r.zero_effect, !g.descendants(&NodeSet::singleton(x)).contains(y));
        if !r.zero_effect {
            prop_assert!(r.graph.is_reduced_for(rx, ry));
        }
    }
}
