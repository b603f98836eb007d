//! Cellular cochain model for compactly supported cohomology of
//! configuration spaces of labeled points on a graph.
//!
//! A cell places each label either on a vertex (at most one label per
//! vertex) or somewhere along an edge; labels on one edge are ordered along
//! the edge orientation. Degree = number of edge-resident labels. A cell is
//! oriented by its edge-resident coordinates listed by (edge id, slot).

use std::collections::HashMap;
use std::fmt;

use itertools::Itertools;
use rayon::prelude::*;

use crate::exact_linalg::{rank, RationalSparseMatrix, Subquotient};
use crate::multigraph::{ContractionData, GraphAut, GraphError, GraphMap, HalfEdgeGraph};

pub const EMPTY: u8 = u8::MAX;

#[derive(Debug, thiserror::Error)]
pub enum ConfError {
    #[error("configuration cohomology is nonzero in degree {degree} (dimension {dim}), outside {{n-1, n}}")]
    ModelViolation { degree: usize, dim: usize },
    #[error("map is not a chain map in degree {0}")]
    NotAChainMap(usize),
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error(transparent)]
    Linalg(#[from] crate::exact_linalg::LinalgError),
}

/// Compact cell encoding: `[V, E, vertex labels..., (len, word...) per edge]`.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ConfCell(Box<[u8]>);

impl ConfCell {
    pub fn from_parts(vertex_labels: &[u8], words: &[Vec<u8>]) -> Self {
        let mut code = Vec::with_capacity(2 + vertex_labels.len() + words.len() + 16);
        code.push(vertex_labels.len() as u8);
        code.push(words.len() as u8);
        code.extend_from_slice(vertex_labels);
        for w in words {
            code.push(w.len() as u8);
            code.extend_from_slice(w);
        }
        Self(code.into_boxed_slice())
    }

    /// The single cell with no labels.
    pub fn empty(g: &HalfEdgeGraph) -> Self {
        Self::from_parts(
            &vec![EMPTY; g.num_vertices()],
            &vec![Vec::new(); g.num_edges()],
        )
    }

    pub fn code(&self) -> &[u8] {
        &self.0
    }

    pub fn num_vertices(&self) -> usize {
        self.0[0] as usize
    }

    pub fn num_edges(&self) -> usize {
        self.0[1] as usize
    }

    pub fn vertex_labels(&self) -> &[u8] {
        &self.0[2..2 + self.num_vertices()]
    }

    pub fn words(&self) -> Vec<&[u8]> {
        let mut out = Vec::with_capacity(self.num_edges());
        let mut k = 2 + self.num_vertices();
        for _ in 0..self.num_edges() {
            let len = self.0[k] as usize;
            out.push(&self.0[k + 1..k + 1 + len]);
            k += 1 + len;
        }
        out
    }

    pub fn degree(&self) -> usize {
        self.0.len() - 2 - self.num_vertices() - self.num_edges()
    }

    pub fn num_labels(&self) -> usize {
        self.degree() + self.vertex_labels().iter().filter(|&&l| l != EMPTY).count()
    }

    /// Labels in position order: vertices by id, then edges by id and slot.
    pub fn labels_in_order(&self) -> Vec<u8> {
        let mut out: Vec<u8> = self
            .vertex_labels()
            .iter()
            .copied()
            .filter(|&l| l != EMPTY)
            .collect();
        for w in self.words() {
            out.extend_from_slice(w);
        }
        out
    }

    /// Applies `f` to every label.
    pub fn map_labels(&self, f: impl Fn(u8) -> u8) -> Self {
        let v = self.num_vertices();
        let mut code = self.0.to_vec();
        for l in &mut code[2..2 + v] {
            if *l != EMPTY {
                *l = f(*l);
            }
        }
        let mut k = 2 + v;
        for _ in 0..self.num_edges() {
            let len = code[k] as usize;
            for l in &mut code[k + 1..k + 1 + len] {
                *l = f(*l);
            }
            k += 1 + len;
        }
        Self(code.into_boxed_slice())
    }
}

impl fmt::Debug for ConfCell {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let vs = self
            .vertex_labels()
            .iter()
            .map(|&l| {
                if l == EMPTY {
                    "-".into()
                } else {
                    l.to_string()
                }
            })
            .join(",");
        let ws = self.words().iter().map(|w| w.iter().join(".")).join("|");
        write!(f, "[{vs} ; {ws}]")
    }
}

fn parity(positions: &[usize]) -> i64 {
    let inversions = positions
        .iter()
        .tuple_combinations()
        .filter(|(a, b)| a > b)
        .count();
    if inversions % 2 == 0 {
        1
    } else {
        -1
    }
}

fn sign_pow(p: usize) -> i64 {
    if p.is_multiple_of(2) {
        1
    } else {
        -1
    }
}

/// Terms of δ(cell): each vertex label slides onto an incident edge at that
/// end. With p edge coordinates preceding the new one, the sign is (−1)^p
/// at a target end and −(−1)^p at a source end.
pub fn coboundary(g: &HalfEdgeGraph, cell: &ConfCell) -> Vec<(ConfCell, i64)> {
    let words = cell.words();
    let vl = cell.vertex_labels();
    let mut out: HashMap<ConfCell, i64> = HashMap::new();
    for (x, &l) in vl.iter().enumerate() {
        if l == EMPTY {
            continue;
        }
        let mut nvl = vl.to_vec();
        nvl[x] = EMPTY;
        for h in g.half_edges_at(x) {
            let f = g.edge_of(h);
            let before: usize = words[..f].iter().map(|w| w.len()).sum();
            let mut nw: Vec<Vec<u8>> = words.iter().map(|w| w.to_vec()).collect();
            let sign = if g.is_source_half(h) {
                nw[f].insert(0, l);
                -sign_pow(before)
            } else {
                nw[f].push(l);
                sign_pow(before + words[f].len())
            };
            *out.entry(ConfCell::from_parts(&nvl, &nw)).or_default() += sign;
        }
    }
    let mut v: Vec<(ConfCell, i64)> = out.into_iter().filter(|(_, s)| *s != 0).collect();
    v.sort();
    v
}

/// Cells `c` with nonzero coefficient of `cell` in δ(c), with that
/// coefficient (transpose of [`coboundary`]).
pub fn faces(g: &HalfEdgeGraph, cell: &ConfCell) -> Vec<(ConfCell, i64)> {
    let words = cell.words();
    let vl = cell.vertex_labels();
    let mut out: HashMap<ConfCell, i64> = HashMap::new();
    let mut before = 0usize;
    for (f, w) in words.iter().enumerate() {
        if !w.is_empty() {
            let (s, t) = g.ends(f);
            // first label back to the source vertex
            if vl[s] == EMPTY {
                let mut nvl = vl.to_vec();
                nvl[s] = w[0];
                let mut nw: Vec<Vec<u8>> = words.iter().map(|w| w.to_vec()).collect();
                nw[f].remove(0);
                *out.entry(ConfCell::from_parts(&nvl, &nw)).or_default() -= sign_pow(before);
            }
            if vl[t] == EMPTY {
                let mut nvl = vl.to_vec();
                nvl[t] = w[w.len() - 1];
                let mut nw: Vec<Vec<u8>> = words.iter().map(|w| w.to_vec()).collect();
                nw[f].pop();
                *out.entry(ConfCell::from_parts(&nvl, &nw)).or_default() +=
                    sign_pow(before + w.len() - 1);
            }
        }
        before += w.len();
    }
    let mut v: Vec<(ConfCell, i64)> = out.into_iter().filter(|(_, s)| *s != 0).collect();
    v.sort();
    v
}

/// Pushes a cell along a graph map. Returns `None` when a label sits on a
/// collapsed edge or two vertex labels collide. The sign compares the
/// source frame with the image frame; each reversed coordinate t ↦ 1 − t
/// contributes −1.
pub fn transport(cell: &ConfCell, m: &GraphMap) -> Option<(ConfCell, i64)> {
    let mut vl = vec![EMPTY; m.target_vertices];
    for (x, &l) in cell.vertex_labels().iter().enumerate() {
        if l != EMPTY {
            let y = m.vertex_map[x];
            if vl[y] != EMPTY {
                return None;
            }
            vl[y] = l;
        }
    }
    let words = cell.words();
    let mut nw: Vec<Vec<u8>> = vec![Vec::new(); m.target_edges];
    let mut flipped_coords = 0;
    for (f, w) in words.iter().enumerate() {
        if w.is_empty() {
            continue;
        }
        let (f2, flip) = m.edge_map[f]?;
        nw[f2] = if flip {
            flipped_coords += w.len();
            w.iter().rev().copied().collect()
        } else {
            w.to_vec()
        };
    }
    let mut offset = vec![0; m.target_edges + 1];
    for j in 0..m.target_edges {
        offset[j + 1] = offset[j] + nw[j].len();
    }
    let mut positions = Vec::with_capacity(cell.degree());
    for (f, w) in words.iter().enumerate() {
        if let Some((f2, flip)) = m.edge_map[f] {
            let k = w.len();
            positions.extend((0..k).map(|i| offset[f2] + if flip { k - 1 - i } else { i }));
        }
    }
    let sign = parity(&positions) * sign_pow(flipped_coords);
    Some((ConfCell::from_parts(&vl, &nw), sign))
}

/// All cells of Conf_n(G), bucketed by degree and sorted.
pub fn enumerate_cells(g: &HalfEdgeGraph, n: usize) -> Vec<Vec<ConfCell>> {
    fn go(l: u8, n: usize, vl: &mut Vec<u8>, w: &mut Vec<Vec<u8>>, out: &mut Vec<Vec<ConfCell>>) {
        if l as usize == n {
            let c = ConfCell::from_parts(vl, w);
            out[c.degree()].push(c);
            return;
        }
        for x in 0..vl.len() {
            if vl[x] == EMPTY {
                vl[x] = l;
                go(l + 1, n, vl, w, out);
                vl[x] = EMPTY;
            }
        }
        for f in 0..w.len() {
            for pos in 0..=w[f].len() {
                w[f].insert(pos, l);
                go(l + 1, n, vl, w, out);
                w[f].remove(pos);
            }
        }
    }
    let mut out = vec![Vec::new(); n + 1];
    go(
        0,
        n,
        &mut vec![EMPTY; g.num_vertices()],
        &mut vec![Vec::new(); g.num_edges()],
        &mut out,
    );
    for bucket in &mut out {
        bucket.sort();
    }
    out
}

/// The cochain complex of one graph; `delta[q]` maps degree q to q + 1.
#[derive(Clone, Debug)]
pub struct CochainComplexCc {
    pub graph: HalfEdgeGraph,
    pub n: usize,
    pub basis_by_degree: Vec<Vec<ConfCell>>,
    pub index: Vec<HashMap<ConfCell, usize>>,
    pub delta: Vec<RationalSparseMatrix>,
}

impl CochainComplexCc {
    pub fn dims(&self) -> Vec<usize> {
        self.basis_by_degree.iter().map(Vec::len).collect()
    }

    pub fn euler_characteristic(&self) -> i64 {
        self.dims()
            .iter()
            .enumerate()
            .map(|(q, &d)| sign_pow(q) * d as i64)
            .sum()
    }

    pub fn position(&self, cell: &ConfCell) -> Option<usize> {
        self.index.get(cell.degree())?.get(cell).copied()
    }

    /// Cohomology dimension in every degree from exact ranks.
    pub fn cohomology_dims(&self) -> Vec<usize> {
        let ranks: Vec<usize> = self.delta.iter().map(rank).collect();
        (0..=self.n)
            .map(|q| {
                let out = ranks.get(q).copied().unwrap_or(0);
                let inc = if q == 0 { 0 } else { ranks[q - 1] };
                self.basis_by_degree[q].len() - out - inc
            })
            .collect()
    }
}

pub fn build_cc(g: &HalfEdgeGraph, n: usize) -> CochainComplexCc {
    let basis = enumerate_cells(g, n);
    let index: Vec<HashMap<ConfCell, usize>> = basis
        .iter()
        .map(|b| b.iter().cloned().enumerate().map(|(i, c)| (c, i)).collect())
        .collect();
    let delta = (0..n)
        .into_par_iter()
        .map(|q| {
            let index = &index;
            let triplets = basis[q + 1].iter().enumerate().flat_map(|(r, t)| {
                faces(g, t)
                    .into_iter()
                    .map(move |(c, s)| (r, index[q][&c], s))
                    .collect::<Vec<_>>()
            });
            RationalSparseMatrix::from_int_triplets(basis[q + 1].len(), basis[q].len(), triplets)
        })
        .collect();
    CochainComplexCc {
        graph: g.clone(),
        n,
        basis_by_degree: basis,
        index,
        delta,
    }
}

/// Cohomology in degrees n − 1 and n with sections and retractions.
#[derive(Clone, Debug)]
pub struct CcCohomology {
    /// `rows[0]` is degree n − 1 (absent for n = 0), `rows[1]` degree n.
    pub lower: Option<Subquotient>,
    pub top: Subquotient,
}

impl CcCohomology {
    pub fn dims(&self) -> (usize, usize) {
        (
            self.lower.as_ref().map_or(0, Subquotient::dim),
            self.top.dim(),
        )
    }
}

/// Certifies vanishing outside degrees n − 1 and n, then builds explicit
/// subquotients in those two degrees.
pub fn cohomology(c: &CochainComplexCc) -> Result<CcCohomology, ConfError> {
    let dims = c.cohomology_dims();
    for (q, &d) in dims.iter().enumerate() {
        if d != 0 && q + 1 < c.n {
            return Err(ConfError::ModelViolation { degree: q, dim: d });
        }
    }
    let n = c.n;
    let spot = |q: usize| {
        let incoming = if q == 0 { None } else { Some(&c.delta[q - 1]) };
        Subquotient::new(c.basis_by_degree[q].len(), incoming, c.delta.get(q))
    };
    Ok(CcCohomology {
        lower: (n >= 1).then(|| spot(n - 1)),
        top: spot(n),
    })
}

/// Per-degree matrices of a cellular map (rows index target cells).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CellMap {
    pub per_degree: Vec<RationalSparseMatrix>,
}

impl CellMap {
    /// Checks `self ∘ δ_source = δ_target ∘ self` in every degree.
    pub fn is_chain_map(
        &self,
        source: &CochainComplexCc,
        target: &CochainComplexCc,
    ) -> Result<(), ConfError> {
        for q in 0..source.n {
            let lhs = self.per_degree[q + 1].mul(&source.delta[q])?;
            let rhs = target.delta[q].mul(&self.per_degree[q])?;
            if lhs != rhs {
                return Err(ConfError::NotAChainMap(q));
            }
        }
        Ok(())
    }

    pub fn compose(&self, first: &CellMap) -> Result<CellMap, ConfError> {
        let per_degree = self
            .per_degree
            .iter()
            .zip(&first.per_degree)
            .map(|(a, b)| a.mul(b))
            .collect::<Result<_, _>>()?;
        Ok(CellMap { per_degree })
    }
}

/// Pushforward of cells along a bijective graph map from `source` to `target`.
fn pushforward(m: &GraphMap, source: &CochainComplexCc, target: &CochainComplexCc) -> CellMap {
    let per_degree = (0..=source.n)
        .map(|q| {
            let triplets = source.basis_by_degree[q]
                .iter()
                .enumerate()
                .filter_map(|(j, c)| {
                    let (img, s) = transport(c, m)?;
                    Some((target.index[q][&img], j, s))
                });
            RationalSparseMatrix::from_int_triplets(
                target.basis_by_degree[q].len(),
                source.basis_by_degree[q].len(),
                triplets.collect::<Vec<_>>(),
            )
        })
        .collect();
    CellMap { per_degree }
}

pub fn aut_action(
    g: &HalfEdgeGraph,
    a: &GraphAut,
    c: &CochainComplexCc,
) -> Result<CellMap, ConfError> {
    let a = GraphAut::new(g, a.half_edge_perm.clone())?;
    Ok(pushforward(&GraphMap::from_aut(g, &a), c, c))
}

/// Relabels every cell by σ (`sigma[l]` is the new label of l). No signs.
pub fn sn_action(sigma: &[usize], c: &CochainComplexCc) -> CellMap {
    let per_degree = (0..=c.n)
        .map(|q| {
            let triplets: Vec<(usize, usize, i64)> = c.basis_by_degree[q]
                .iter()
                .enumerate()
                .map(|(j, cell)| {
                    (
                        c.index[q][&cell.map_labels(|l| sigma[l as usize] as u8)],
                        j,
                        1,
                    )
                })
                .collect();
            let d = c.basis_by_degree[q].len();
            RationalSparseMatrix::from_int_triplets(d, d, triplets)
        })
        .collect();
    CellMap { per_degree }
}

/// Pullback along a (possibly collapsing) graph map `m: G → T`: a cell of T
/// goes to the signed sum of the cells of G that map onto it.
pub fn pullback(m: &GraphMap, source_g: &CochainComplexCc, target_t: &CochainComplexCc) -> CellMap {
    let per_degree = (0..=source_g.n)
        .map(|q| {
            let triplets: Vec<(usize, usize, i64)> = source_g.basis_by_degree[q]
                .iter()
                .enumerate()
                .filter_map(|(r, t)| {
                    let (img, s) = transport(t, m)?;
                    Some((r, target_t.index[q][&img], s))
                })
                .collect();
            RationalSparseMatrix::from_int_triplets(
                source_g.basis_by_degree[q].len(),
                target_t.basis_by_degree[q].len(),
                triplets,
            )
        })
        .collect();
    CellMap { per_degree }
}

/// C(G/e) → C(G) for a contraction, built from `cd.source` and `cd.target`
/// complexes with the same n.
pub fn contraction_pullback(
    cd: &ContractionData,
    source: &CochainComplexCc,
    target: &CochainComplexCc,
) -> Result<CellMap, ConfError> {
    if cd.source.is_loop(cd.contracted_edge) {
        return Err(GraphError::LoopContraction(cd.contracted_edge).into());
    }
    Ok(pullback(&GraphMap::from_contraction(cd), source, target))
}

/// Whether the two orders of contracting disjoint edges e, f give the same
/// pullback once the two identifications of G/{e,f} are matched by an
/// automorphism.
pub fn compose_check(
    cd1: &ContractionData,
    cd2: &ContractionData,
    n: usize,
) -> Result<bool, ConfError> {
    let g = &cd1.source;
    let (e, f) = (cd1.contracted_edge, cd2.contracted_edge);
    let second =
        |cd: &ContractionData, other: usize| -> Result<Option<ContractionData>, ConfError> {
            let (h, _) = g.half_edges(other);
            let img = cd.half_edge_map[h].expect("distinct edges");
            let e2 = cd.target.edge_of(img);
            if cd.target.is_loop(e2) {
                return Ok(None);
            }
            Ok(Some(cd.target.contract(e2)?))
        };
    let (Some(a2), Some(b2)) = (second(cd1, f)?, second(cd2, e)?) else {
        return Ok(true);
    };
    if a2.target != b2.target {
        return Ok(false);
    }
    let t = &a2.target;
    let m1 = GraphMap::from_contraction(cd1).then(&GraphMap::from_contraction(&a2));
    let m2 = GraphMap::from_contraction(cd2).then(&GraphMap::from_contraction(&b2));
    let cg = build_cc(g, n);
    let ct = build_cc(t, n);
    let c1 = build_cc(&cd1.target, n);
    let c2 = build_cc(&cd2.target, n);
    // stepwise composites must agree with direct pullbacks along composites
    let p1 = contraction_pullback(cd1, &cg, &c1)?.compose(&contraction_pullback(&a2, &c1, &ct)?)?;
    let p2 = contraction_pullback(cd2, &cg, &c2)?.compose(&contraction_pullback(&b2, &c2, &ct)?)?;
    if p1 != pullback(&m1, &cg, &ct) || p2 != pullback(&m2, &cg, &ct) {
        return Ok(false);
    }
    for tau in t.automorphisms()? {
        let m = GraphMap::from_aut(t, &tau);
        if m1.then(&m) == m2 {
            // p2 = p1 ∘ τ^{-1}
            let inv = aut_action(t, &tau.inverse(t)?, &ct)?;
            return Ok(p2 == p1.compose(&inv)?);
        }
    }
    Ok(false)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact_linalg::rank;
    use crate::multigraph::named::*;

    #[test]
    fn theta_two_points() {
        let c = build_cc(&theta(), 2);
        assert_eq!(c.dims(), vec![2, 12, 12]);
        assert_eq!(rank(&c.delta[0]), 2);
        assert!(c.delta[1].mul(&c.delta[0]).unwrap().is_zero());
        assert_eq!(c.euler_characteristic(), 2);
    }

    #[test]
    fn empty_configuration() {
        let c = build_cc(&k4(), 0);
        assert_eq!(c.dims(), vec![1]);
        assert!(c.delta.is_empty());
        assert_eq!(c.cohomology_dims(), vec![1]);
    }

    #[test]
    fn one_point_is_the_graph() {
        let c = build_cc(&theta(), 1);
        assert_eq!(c.dims(), vec![2, 3]);
        assert_eq!(cohomology(&c).unwrap().dims(), (1, 2));
        assert_eq!(cohomology(&build_cc(&k4(), 1)).unwrap().dims(), (1, 3));
    }

    #[test]
    fn faces_transpose_coboundary() {
        for g in [theta(), goggles(), rose(2)] {
            let cells = enumerate_cells(&g, 3);
            for q in 0..3 {
                for c in &cells[q] {
                    for (t, s) in coboundary(&g, c) {
                        assert!(faces(&g, &t).contains(&(c.clone(), s)));
                    }
                }
                for t in &cells[q + 1] {
                    for (c, s) in faces(&g, t) {
                        assert!(coboundary(&g, &c).contains(&(t.clone(), s)));
                    }
                }
            }
        }
    }

    #[test]
    fn loops_contribute_nothing_to_single_label_coboundary() {
        let c = build_cc(&rose(2), 1);
        assert!(c.delta[0].is_zero());
        assert_eq!(c.cohomology_dims(), vec![1, 2]);
    }

    #[test]
    fn theta_reversal_sign() {
        let g = theta();
        let auts = g.automorphisms().unwrap();
        // the automorphism swapping the vertices and fixing each edge
        let a = auts
            .iter()
            .find(|a| a.vertex_perm == vec![1, 0] && a.edge_perm == vec![0, 1, 2])
            .unwrap();
        let cell = ConfCell::from_parts(&[EMPTY, EMPTY], &[vec![0, 1], vec![], vec![]]);
        let (img, s) = transport(&cell, &GraphMap::from_aut(&g, a)).unwrap();
        assert_eq!(
            img,
            ConfCell::from_parts(&[EMPTY, EMPTY], &[vec![1, 0], vec![], vec![]])
        );
        assert_eq!(s, -1);
        // swapping two parallel edges fixes a cell living on the third
        let b = auts
            .iter()
            .find(|a| a.vertex_perm == vec![0, 1] && a.edge_perm == vec![1, 0, 2])
            .unwrap();
        let cell = ConfCell::from_parts(&[EMPTY, EMPTY], &[vec![], vec![], vec![1, 0]]);
        assert_eq!(
            transport(&cell, &GraphMap::from_aut(&g, b)).unwrap(),
            (cell, 1)
        );
    }

    #[test]
    fn actions_are_chain_maps_and_homomorphisms() {
        let g = goggles();
        let c = build_cc(&g, 2);
        let auts = g.automorphisms().unwrap();
        let id = aut_action(&g, &auts[0], &c).unwrap();
        assert!(id
            .per_degree
            .iter()
            .all(|m| *m == RationalSparseMatrix::identity(m.rows())));
        for a in &auts {
            let ma = aut_action(&g, a, &c).unwrap();
            ma.is_chain_map(&c, &c).unwrap();
            for b in &auts {
                let mb = aut_action(&g, b, &c).unwrap();
                let ab = aut_action(&g, &a.compose(&g, b).unwrap(), &c).unwrap();
                assert_eq!(ab, ma.compose(&mb).unwrap());
            }
        }
        let s = sn_action(&[1, 0], &c);
        s.is_chain_map(&c, &c).unwrap();
        assert_eq!(s.compose(&s).unwrap(), sn_action(&[0, 1], &c));
    }

    #[test]
    fn three_cycle_has_order_three() {
        let c = build_cc(&goggles(), 3);
        let s = sn_action(&[1, 2, 0], &c);
        let s3 = s.compose(&s).unwrap().compose(&s).unwrap();
        assert_eq!(s3, sn_action(&[0, 1, 2], &c));
        assert_ne!(s, sn_action(&[0, 1, 2], &c));
    }

    #[test]
    fn pullback_goggles_to_banana() {
        let g = goggles();
        let e = (0..5).find(|&e| g.ends(e) == (0, 1)).unwrap();
        let cd = g.contract(e).unwrap();
        let n0 = contraction_pullback(&cd, &build_cc(&g, 0), &build_cc(&cd.target, 0)).unwrap();
        assert_eq!(n0.per_degree[0], RationalSparseMatrix::identity(1));
        let (cg, cb) = (build_cc(&g, 1), build_cc(&cd.target, 1));
        let p = contraction_pullback(&cd, &cg, &cb).unwrap();
        assert_eq!(p.per_degree[0].shape(), (3, 2));
        assert_eq!(p.per_degree[0].nnz(), 3);
        p.is_chain_map(&cb, &cg).unwrap();
    }

    #[test]
    fn double_contractions_commute() {
        let g = k4();
        let (e, f) = (0, 5);
        assert_eq!(g.ends(e), (0, 1));
        assert_eq!(g.ends(f), (2, 3));
        for n in 0..=1 {
            assert!(compose_check(&g.contract(e).unwrap(), &g.contract(f).unwrap(), n).unwrap());
        }
    }
}
