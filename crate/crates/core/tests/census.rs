use std::collections::HashSet;

use tropcc::multigraph::{
    enumerate_category, named, stable_census_brute, weighted_stable_census, GraphAut,
};

#[test]
fn genus_four_counts() {
    let two = enumerate_category(4, true).unwrap();
    assert_eq!(two.representatives.len(), 17);
    let all = enumerate_category(4, false).unwrap();
    assert_eq!(all.representatives.len(), 111);
    for r in two.representatives.iter().chain(&all.representatives) {
        assert_eq!(r.graph.genus().unwrap(), 4);
        assert!(r.graph.is_stable());
    }
    assert!(two
        .representatives
        .iter()
        .all(|r| r.graph.is_two_connected()));
    assert!(two.diamond_violations().is_empty());
}

#[test]
fn genus_three_structure() {
    let cat = enumerate_category(3, true).unwrap();
    let reps = &cat.representatives;
    let idx = |name: &str| cat.by_name(name).unwrap();
    let arrows: HashSet<(&str, &str)> = cat
        .representatives
        .iter()
        .flat_map(|r| {
            r.a_edge_orbits
                .iter()
                .map(move |o| (r.name().unwrap(), reps[o.target].name().unwrap()))
        })
        .collect();
    let expected: HashSet<(&str, &str)> =
        [("can", "goggles"), ("K4", "goggles"), ("goggles", "banana")].into();
    assert_eq!(arrows, expected);
    let goggles = &cat.representatives[idx("goggles")];
    assert_eq!(goggles.contractions.len(), 1);
    let e = goggles.a_edge_orbits[0].representative;
    assert!(goggles.automorphisms.iter().all(|a| a.edge_perm[e] == e));
    let k4 = &cat.representatives[idx("K4")];
    assert_eq!(k4.a_edge_orbits.len(), 1);
    assert_eq!(k4.a_edge_orbits[0].members.len(), 6);
    // transporters really carry each member onto the representative
    for r in &cat.representatives {
        for o in &r.a_edge_orbits {
            for &(m, a) in &o.members {
                assert_eq!(r.automorphisms[a].edge_perm[m], o.representative);
            }
        }
    }
}

/// Every half-edge permutation that is an automorphism, for graphs with at
/// most six edges.
#[test]
fn automorphisms_match_brute_force() {
    use itertools::Itertools;
    for g in [named::theta(), named::banana(4), named::goggles()] {
        let brute = (0..g.num_half_edges())
            .permutations(g.num_half_edges())
            .filter(|p| GraphAut::new(&g, p.clone()).is_ok())
            .count();
        assert_eq!(g.automorphisms().unwrap().len(), brute);
    }
}

#[test]
fn weighted_census_counts_all_strata() {
    let counts: Vec<usize> = (2..=4)
        .map(|g| weighted_stable_census(g).unwrap())
        .collect();
    assert_eq!(counts, vec![7, 42, 379]);
}

#[test]
fn unweighted_small_genus_counts() {
    for g in 2..=4 {
        let fast = enumerate_category(g, false).unwrap().representatives.len();
        assert_eq!(fast, stable_census_brute(g, false).unwrap(), "g={g}");
    }
    assert_eq!(
        enumerate_category(2, false).unwrap().representatives.len(),
        3
    );
}
