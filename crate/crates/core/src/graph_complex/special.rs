//! Criteria under which a horizontal block is injective or surjective on
//! every term.
//!
//! For an A-edge e of G whose orbit is the only one contracting to G/e:
//! if every automorphism fixes e, the block is injective; otherwise if the
//! stabilizer of e is normal and its induced map to Aut(G/e) is onto, the
//! block is surjective.

use serde::{Deserialize, Serialize};

use crate::multigraph::{GraphAut, GraphCategory, GraphError, GraphMap};

use super::e1::BlockVerdict;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SpecialEdge {
    pub source_graph: String,
    pub edge: usize,
    pub target_graph: String,
    pub stabilizer_order: usize,
    pub aut_order: usize,
    pub verdict: Option<BlockVerdict>,
}

/// Classifies A-edge `e` of representative `g`.
pub fn special_edge_classify(
    cat: &GraphCategory,
    g: usize,
    e: usize,
) -> Result<SpecialEdge, GraphError> {
    let cg = &cat.representatives[g];
    let (cd, target) = cg.contractions.get(&e).ok_or(GraphError::NotAnAEdge(e))?;
    let orbit = cg
        .a_edge_orbits
        .iter()
        .find(|o| o.members.iter().any(|&(m, _)| m == e))
        .ok_or(GraphError::NotAnAEdge(e))?;
    let single_orbit = cg
        .a_edge_orbits
        .iter()
        .filter(|o| o.target == *target)
        .count()
        == 1;
    let stab: Vec<&GraphAut> = cg
        .automorphisms
        .iter()
        .filter(|a| a.edge_perm[e] == e)
        .collect();
    let mut out = SpecialEdge {
        source_graph: cg.label(),
        edge: e,
        target_graph: cat.representatives[*target].label(),
        stabilizer_order: stab.len(),
        aut_order: cg.aut_order(),
        verdict: None,
    };
    debug_assert_eq!(orbit.target, *target);
    if !single_orbit {
        return Ok(out);
    }
    if stab.len() == cg.aut_order() {
        out.verdict = Some(BlockVerdict::Injective);
        return Ok(out);
    }
    // normality: a s a^{-1} stays in the stabilizer
    let in_stab = |x: &GraphAut| x.edge_perm[e] == e;
    for a in &cg.automorphisms {
        let inv = a.inverse(&cg.graph)?;
        for s in &stab {
            let conj = a.compose(&cg.graph, s)?.compose(&cg.graph, &inv)?;
            if !in_stab(&conj) {
                return Ok(out);
            }
        }
    }
    // induced automorphisms of G/e: the unique a' with m ∘ s = a' ∘ m
    let tg = &cat.representatives[*target];
    let m = GraphMap::from_contraction(cd);
    let target_maps: Vec<GraphMap> = tg
        .automorphisms
        .iter()
        .map(|a| GraphMap::from_aut(&tg.graph, a))
        .collect();
    let mut hit = vec![false; target_maps.len()];
    for s in &stab {
        let lhs = GraphMap::from_aut(&cg.graph, s).then(&m);
        match target_maps.iter().position(|t| m.then(t) == lhs) {
            Some(k) => hit[k] = true,
            None => return Ok(out),
        }
    }
    if hit.iter().all(|&h| h) {
        out.verdict = Some(BlockVerdict::Surjective);
    }
    Ok(out)
}

/// Every A-edge orbit of the category whose block has a verdict, as
/// (source G', target G, p of G', verdict).
pub fn special_blocks(
    cat: &GraphCategory,
) -> Result<Vec<(usize, usize, usize, BlockVerdict)>, GraphError> {
    let mut out = Vec::new();
    for (g, cg) in cat.representatives.iter().enumerate() {
        for orbit in &cg.a_edge_orbits {
            let c = special_edge_classify(cat, g, orbit.representative)?;
            if let Some(v) = c.verdict {
                out.push((orbit.target, g, cat.representatives[orbit.target].p(), v));
            }
        }
    }
    Ok(out)
}
