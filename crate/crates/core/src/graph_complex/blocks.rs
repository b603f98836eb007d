//! Horizontal differential blocks d_{G'}^{G}: term(G', q) → term(G, q) for
//! an arrow G → G' = G/e, in orbit-sum coordinates.

use crate::config_complex::transport;
use crate::exact_linalg::RationalSparseMatrix;
use crate::multigraph::{GraphCategory, GraphMap};

use super::term::InvariantComplex;

/// Two ways to evaluate the same block. `AllEdges` sums e ∧ (pullback) over
/// every A-edge contracting to G'. `OrbitGrouped` evaluates only orbit
/// representatives and reaches the other members through their
/// transporting automorphisms.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BlockForm {
    OrbitGrouped,
    AllEdges,
}

/// Block from the term of `source` (G') to the term of `target` (G) in
/// vertical degree q. Rows index `target.terms[q]`, columns `source.terms[q]`.
pub fn horizontal_block(
    cat: &GraphCategory,
    source: &InvariantComplex,
    target: &InvariantComplex,
    q: usize,
    form: BlockForm,
) -> RationalSparseMatrix {
    let src = source.context.graph_index;
    let tg = target.context.graph_index;
    let cg = &cat.representatives[tg];
    let rows = &target.terms[q].basis;
    let mut triplets: Vec<(usize, usize, i64)> = Vec::new();
    for orbit in cg.a_edge_orbits.iter().filter(|o| o.target == src) {
        match form {
            BlockForm::AllEdges => {
                for &(e, _) in &orbit.members {
                    let cd = &cg.contractions[&e].0;
                    let m = GraphMap::from_contraction(cd);
                    let w = cd.wedge_sign();
                    for (r, t) in rows.iter().enumerate() {
                        if let Some((cbar, s)) = transport(t, &m) {
                            if let Some((j, coef)) = source.lookup(q, &cbar) {
                                triplets.push((r, j, w * s * coef));
                            }
                        }
                    }
                }
            }
            BlockForm::OrbitGrouped => {
                let cd = &cg.contractions[&orbit.representative].0;
                let m = GraphMap::from_contraction(cd);
                let w = cd.wedge_sign();
                for &(_, a) in &orbit.members {
                    let (am, edge_sign) = &target.context.aut_maps()[a];
                    for (r, t) in rows.iter().enumerate() {
                        let (u, sa) = transport(t, am).expect("automorphisms are bijective");
                        if let Some((cbar, s)) = transport(&u, &m) {
                            if let Some((j, coef)) = source.lookup(q, &cbar) {
                                triplets.push((r, j, edge_sign * sa * w * s * coef));
                            }
                        }
                    }
                }
            }
        }
    }
    RationalSparseMatrix::from_int_triplets(rows.len(), source.terms[q].dim(), triplets)
}
