//! S_n-characters of the terms (C^q ⊗ det E)^{Aut(G)}, by counting fixed
//! cells rather than building the terms.
//!
//! A cell is a shape (occupied vertices, points per edge) plus a bijection
//! from positions to labels. An automorphism a fixing a shape permutes its
//! positions by π with a label-independent frame sign s; the pair (σ, a)
//! fixes z_μ labelings when π and σ both have cycle type μ. Hence
//! χ(μ) = |Aut|^{-1} Σ_a sgn_E(a) Σ_{shapes fixed by a, type π = μ} s·z_μ.

use std::collections::BTreeMap;

use itertools::Itertools;
use num_bigint::BigInt;
use num_traits::Zero;

use crate::config_complex::{
    aut_action, build_cc, sn_action, transport, CellMap, CochainComplexCc, ConfCell, EMPTY,
};
use crate::exact_linalg::{Rational, RationalSparseMatrix, Subquotient};
use crate::multigraph::{CategoryGraph, GraphMap};
use crate::sym_rep::{cycle_type, partitions, Character, Partition};

use super::term::compositions;

pub fn term_character(cg: &CategoryGraph, n: usize, q: usize) -> Character {
    let g = &cg.graph;
    let (v, e) = (g.num_vertices(), g.num_edges());
    let mut sums: BTreeMap<Partition, i128> = BTreeMap::new();
    let maps: Vec<(GraphMap, i64)> = cg
        .automorphisms
        .iter()
        .map(|a| (GraphMap::from_aut(g, a), a.edge_sign()))
        .collect();
    if q <= n && n - q <= v {
        for occupied in (0..v).combinations(n - q) {
            for lens in compositions(q, e) {
                let mut vl = vec![EMPTY; v];
                for (k, &x) in occupied.iter().enumerate() {
                    vl[x] = k as u8;
                }
                let mut next = occupied.len() as u8;
                let words: Vec<Vec<u8>> = lens
                    .iter()
                    .map(|&len| {
                        let w: Vec<u8> = (next..next + len as u8).collect();
                        next += len as u8;
                        w
                    })
                    .collect();
                let cell = ConfCell::from_parts(&vl, &words);
                let shape = cell.map_labels(|_| 0);
                for (m, edge_sign) in &maps {
                    let (img, s) = transport(&cell, m).expect("automorphisms are bijective");
                    if img.map_labels(|_| 0) != shape {
                        continue;
                    }
                    let order = img.labels_in_order();
                    let mut pi = vec![0usize; n];
                    for (pos, &l) in order.iter().enumerate() {
                        pi[l as usize] = pos;
                    }
                    let mu = cycle_type(&pi);
                    let z = mu.z() as i128;
                    *sums.entry(mu).or_default() += i128::from(s * edge_sign) * z;
                }
            }
        }
    }
    let order = cg.aut_order() as i128;
    let mut chi = Character::zero(n);
    for mu in partitions(n) {
        let total = sums.get(&mu).copied().unwrap_or(0);
        chi.values
            .insert(mu, Rational::new(BigInt::from(total), BigInt::from(order)));
    }
    chi
}

/// Characters of (H_c^q(Conf_n(G)) ⊗ det E)^{Aut G} for every q, from
/// traces of the symmetry actions on the full cochain complex. Independent
/// of the orbit-sum machinery; practical for small n only.
pub fn vertical_cohomology_characters(cg: &CategoryGraph, n: usize) -> Vec<Character> {
    let cc = build_cc(&cg.graph, n);
    let auts: Vec<(CellMap, i64)> = cg
        .automorphisms
        .iter()
        .map(|a| {
            (
                aut_action(&cg.graph, a, &cc).expect("automorphism"),
                a.edge_sign(),
            )
        })
        .collect();
    averaged_characters(&cc, &auts)
}

/// S_n-characters of H_c^q(Conf_n(G)) for every q.
pub fn configuration_characters(cc: &CochainComplexCc) -> Vec<Character> {
    let identity = CellMap {
        per_degree: cc
            .basis_by_degree
            .iter()
            .map(|b| RationalSparseMatrix::identity(b.len()))
            .collect(),
    };
    averaged_characters(cc, &[(identity, 1)])
}

fn averaged_characters(cc: &CochainComplexCc, group: &[(CellMap, i64)]) -> Vec<Character> {
    let n = cc.n;
    let subs: Vec<Subquotient> = (0..=n)
        .map(|q| {
            let incoming = (q > 0).then(|| &cc.delta[q - 1]);
            let outgoing = (q < n).then(|| &cc.delta[q]);
            Subquotient::new(cc.basis_by_degree[q].len(), incoming, outgoing)
        })
        .collect();
    let order = Rational::from_integer(BigInt::from(group.len()));
    let mut chars = vec![Character::zero(n); n + 1];
    for mu in partitions(n) {
        let relabel = sn_action(&permutation_of_type(&mu), cc);
        for q in 0..=n {
            let mut total = Rational::zero();
            for (a, sign) in group {
                for (i, z) in subs[q].section().iter().enumerate() {
                    let image = relabel.per_degree[q].mul_vec(&a.per_degree[q].mul_vec(z));
                    let coords = subs[q].retract(&image).expect("actions preserve cocycles");
                    if let Some(v) = coords.get(i) {
                        total += v * Rational::from_integer(BigInt::from(*sign));
                    }
                }
            }
            chars[q].values.insert(mu.clone(), total / &order);
        }
    }
    chars
}

/// A permutation with consecutive cycles of the given lengths.
pub fn permutation_of_type(mu: &Partition) -> Vec<usize> {
    let mut perm = Vec::with_capacity(mu.size());
    let mut start = 0;
    for &len in mu.parts() {
        perm.extend((0..len).map(|k| start + (k + 1) % len));
        start += len;
    }
    perm
}
