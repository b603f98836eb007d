//! Invariant terms (C^q ⊗ det E)^{Aut(G)} restricted to a Young-subgroup
//! twist, realized by signed orbit sums of cells.
//!
//! The group K = Aut(G) × S_μ acts on labeled cells with frame signs. For a
//! character χ(a, σ) = sgn_E(a)·τ(σ) (τ trivial or sign), the χ-isotypic
//! vectors have a basis of orbit sums v_O = Σ_{c ∈ O} coef(c)·c, one for
//! each orbit whose stabilizer acts on its cells through χ. Every orbit has
//! a canonical representative: labels within a color block increase in
//! position order, and the colored code is minimal over Aut(G).

use std::collections::HashMap;

use itertools::Itertools;

use crate::config_complex::{faces, transport, ConfCell, EMPTY};
use crate::exact_linalg::RationalSparseMatrix;
use crate::multigraph::{CategoryGraph, GraphAut, GraphMap, HalfEdgeGraph};
use crate::sym_rep::{permutation_sign, Twist, YoungFunctional};

/// Graph, automorphisms and coloring shared by all terms of one graph.
#[derive(Clone, Debug)]
pub struct TermContext {
    pub graph_index: usize,
    pub graph_key: String,
    pub graph: HalfEdgeGraph,
    pub p: usize,
    pub n: usize,
    pub functional: YoungFunctional,
    pub automorphisms: Vec<GraphAut>,
    colors: Vec<u8>,
    color_start: Vec<u8>,
    maps: Vec<(GraphMap, i64)>,
}

impl TermContext {
    pub fn new(graph_index: usize, cg: &CategoryGraph, functional: &YoungFunctional) -> Self {
        let n = functional.shape.size();
        let mut colors = Vec::with_capacity(n);
        let mut color_start = Vec::new();
        for (c, &len) in functional.shape.parts().iter().enumerate() {
            color_start.push(colors.len() as u8);
            colors.extend(std::iter::repeat_n(c as u8, len));
        }
        let maps = cg
            .automorphisms
            .iter()
            .map(|a| (GraphMap::from_aut(&cg.graph, a), a.edge_sign()))
            .collect();
        Self {
            graph_index,
            graph_key: cg.key.clone(),
            graph: cg.graph.clone(),
            p: cg.p(),
            n,
            functional: functional.clone(),
            automorphisms: cg.automorphisms.clone(),
            colors,
            color_start,
            maps,
        }
    }

    pub fn aut_maps(&self) -> &[(GraphMap, i64)] {
        &self.maps
    }

    fn colored(&self, c: &ConfCell) -> ConfCell {
        c.map_labels(|l| self.colors[l as usize])
    }

    /// Relabels within color blocks so labels increase in position order;
    /// returns the relabeled cell and τ of the relabeling.
    fn sort_labels(&self, c: &ConfCell) -> (ConfCell, i64) {
        let mut next = self.color_start.clone();
        let mut sigma = vec![0usize; self.n];
        for l in c.labels_in_order() {
            let col = self.colors[l as usize] as usize;
            sigma[l as usize] = next[col] as usize;
            next[col] += 1;
        }
        let tau = match self.functional.twist {
            Twist::Trivial => 1,
            Twist::Sign => permutation_sign(&sigma),
        };
        (c.map_labels(|l| sigma[l as usize] as u8), tau)
    }

    /// Canonical representative of the orbit of `c` and the coefficient of
    /// `c` in that orbit's basis vector.
    pub fn canonicalize(&self, c: &ConfCell) -> (ConfCell, i64) {
        let mut best: Option<(ConfCell, ConfCell, i64)> = None;
        for (m, edge_sign) in &self.maps {
            let (img, s) = transport(c, m).expect("automorphisms are bijective");
            let col = self.colored(&img);
            if best.as_ref().is_none_or(|b| col < b.0) {
                best = Some((col, img, s * edge_sign));
            }
        }
        let (_, img, s) = best.expect("identity automorphism");
        let (rep, tau) = self.sort_labels(&img);
        (rep, s * tau)
    }

    /// Whether the stabilizer of a representative acts on it through χ.
    pub fn is_good(&self, rep: &ConfCell) -> bool {
        let col = self.colored(rep);
        self.maps.iter().all(|(m, edge_sign)| {
            let (img, s) = transport(rep, m).expect("bijective");
            if self.colored(&img) != col {
                return true;
            }
            let (back, tau) = self.sort_labels(&img);
            debug_assert_eq!(&back, rep);
            s * edge_sign * tau == 1
        })
    }

    /// Canonical representatives of good orbits in degree q, sorted.
    pub fn enumerate_reps(&self, q: usize) -> Vec<ConfCell> {
        let mut out = Vec::new();
        for rep in sorted_configurations(&self.graph, &self.functional, q) {
            if self.canonicalize(&rep).0 == rep && self.is_good(&rep) {
                out.push(rep);
            }
        }
        out.sort();
        out.dedup();
        out
    }
}

/// One cell per colored configuration with q edge-resident points (color c
/// used μ_c times), labeled so that labels of each color block increase in
/// position order.
pub fn sorted_configurations(g: &HalfEdgeGraph, f: &YoungFunctional, q: usize) -> Vec<ConfCell> {
    let n = f.shape.size();
    let (v, e) = (g.num_vertices(), g.num_edges());
    if q > n || n - q > v {
        return Vec::new();
    }
    let mut out = Vec::new();
    let counts: Vec<usize> = f.shape.parts().to_vec();
    let starts: Vec<u8> = counts
        .iter()
        .scan(0u8, |acc, &c| {
            let s = *acc;
            *acc += c as u8;
            Some(s)
        })
        .collect();
    for occupied in (0..v).combinations(n - q) {
        for lens in compositions(q, e) {
            let mut remaining = counts.clone();
            let mut seq = Vec::with_capacity(n);
            fill_colors(&mut remaining, n, &mut seq, &mut |colors: &[u8]| {
                let mut next = starts.clone();
                let seq: Vec<u8> = colors
                    .iter()
                    .map(|&c| {
                        next[c as usize] += 1;
                        next[c as usize] - 1
                    })
                    .collect();
                let mut vl = vec![EMPTY; v];
                for (k, &x) in occupied.iter().enumerate() {
                    vl[x] = seq[k];
                }
                let mut pos = occupied.len();
                let words: Vec<Vec<u8>> = lens
                    .iter()
                    .map(|&len| {
                        let w = seq[pos..pos + len].to_vec();
                        pos += len;
                        w
                    })
                    .collect();
                out.push(ConfCell::from_parts(&vl, &words));
            });
        }
    }
    out
}

/// Ordered ways to write q as a sum of `parts` nonnegative integers.
pub fn compositions(q: usize, parts: usize) -> Vec<Vec<usize>> {
    fn go(left: usize, parts: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() + 1 == parts {
            cur.push(left);
            out.push(cur.clone());
            cur.pop();
            return;
        }
        for x in 0..=left {
            cur.push(x);
            go(left - x, parts, cur, out);
            cur.pop();
        }
    }
    if parts == 0 {
        return if q == 0 { vec![Vec::new()] } else { Vec::new() };
    }
    let mut out = Vec::new();
    go(q, parts, &mut Vec::new(), &mut out);
    out
}

fn fill_colors(remaining: &mut [usize], n: usize, seq: &mut Vec<u8>, emit: &mut dyn FnMut(&[u8])) {
    if seq.len() == n {
        emit(seq);
        return;
    }
    for c in 0..remaining.len() {
        if remaining[c] > 0 {
            remaining[c] -= 1;
            seq.push(c as u8);
            fill_colors(remaining, n, seq, emit);
            seq.pop();
            remaining[c] += 1;
        }
    }
}

/// Basis of one invariant term: orbit representatives in degree q.
#[derive(Clone, Debug)]
pub struct ComplexTerm {
    pub graph_key: String,
    pub p: usize,
    pub q: usize,
    pub functional: YoungFunctional,
    pub basis: Vec<ConfCell>,
    index: HashMap<ConfCell, usize>,
}

impl ComplexTerm {
    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn position(&self, rep: &ConfCell) -> Option<usize> {
        self.index.get(rep).copied()
    }
}

/// The vertical complex of one graph in orbit-sum coordinates.
#[derive(Clone, Debug)]
pub struct InvariantComplex {
    pub context: TermContext,
    pub terms: Vec<ComplexTerm>,
    /// `delta[q]` maps term q to term q + 1.
    pub delta: Vec<RationalSparseMatrix>,
}

impl InvariantComplex {
    pub fn build(ctx: TermContext) -> Self {
        let terms: Vec<ComplexTerm> = (0..=ctx.n)
            .map(|q| {
                let basis = ctx.enumerate_reps(q);
                let index = basis
                    .iter()
                    .cloned()
                    .enumerate()
                    .map(|(i, c)| (c, i))
                    .collect();
                ComplexTerm {
                    graph_key: ctx.graph_key.clone(),
                    p: ctx.p,
                    q,
                    functional: ctx.functional.clone(),
                    basis,
                    index,
                }
            })
            .collect();
        let delta = (0..ctx.n)
            .map(|q| {
                let mut triplets = Vec::new();
                for (r, t) in terms[q + 1].basis.iter().enumerate() {
                    for (c, eps) in faces(&ctx.graph, t) {
                        if let Some((j, coef)) = lookup(&ctx, &terms[q], &c) {
                            triplets.push((r, j, coef * eps));
                        }
                    }
                }
                RationalSparseMatrix::from_int_triplets(
                    terms[q + 1].dim(),
                    terms[q].dim(),
                    triplets,
                )
            })
            .collect();
        Self {
            context: ctx,
            terms,
            delta,
        }
    }

    pub fn dims(&self) -> Vec<usize> {
        self.terms.iter().map(ComplexTerm::dim).collect()
    }

    /// Index of the orbit of `c` in term q with the coefficient of `c` in
    /// that orbit's basis vector; `None` when the orbit carries no invariant.
    pub fn lookup(&self, q: usize, c: &ConfCell) -> Option<(usize, i64)> {
        lookup(&self.context, &self.terms[q], c)
    }
}

fn lookup(ctx: &TermContext, term: &ComplexTerm, c: &ConfCell) -> Option<(usize, i64)> {
    let (rep, coef) = ctx.canonicalize(c);
    term.position(&rep).map(|j| (j, coef))
}
