//! Half-edge multigraphs: contraction, canonical labeling, automorphism
//! groups and enumeration of stable (2-connected) graphs of fixed genus.

use std::collections::{BTreeMap, HashMap, HashSet};
use std::fmt;

use itertools::Itertools;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::sym_rep::permutation_sign;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum GraphError {
    #[error("pairing is not a fixed-point-free involution")]
    InvalidPairing,
    #[error("half-edge {half_edge} points at vertex {vertex} but the graph has {count} vertices")]
    VertexOutOfRange {
        half_edge: usize,
        vertex: usize,
        count: usize,
    },
    #[error("vertex {0} has no half-edges")]
    IsolatedVertex(usize),
    #[error("graph is disconnected")]
    Disconnected,
    #[error("edge {0} is a loop and cannot be contracted")]
    LoopContraction(usize),
    #[error("edge {0} does not exist")]
    EdgeOutOfRange(usize),
    #[error("genus {0} is not supported (need g >= 2)")]
    UnsupportedGenus(usize),
    #[error("half-edge permutation is not an automorphism")]
    NotAnAutomorphism,
    #[error("edge {0} is not an A-edge")]
    NotAnAEdge(usize),
}

#[derive(Serialize, Deserialize)]
struct GraphRecord {
    v: usize,
    pairing: Vec<usize>,
    at_vertex: Vec<usize>,
}

/// Multigraph as a fixed-point-free involution on half-edges plus a map from
/// half-edges to vertices. Edges are numbered by their smaller half-edge and
/// oriented from it (the source end) to its partner.
#[derive(Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "GraphRecord", into = "GraphRecord")]
pub struct HalfEdgeGraph {
    v: usize,
    pairing: Vec<usize>,
    at_vertex: Vec<usize>,
    edges: Vec<[usize; 2]>,
    edge_of: Vec<usize>,
}

impl TryFrom<GraphRecord> for HalfEdgeGraph {
    type Error = GraphError;
    fn try_from(r: GraphRecord) -> Result<Self, GraphError> {
        Self::new(r.v, r.pairing, r.at_vertex)
    }
}

impl From<HalfEdgeGraph> for GraphRecord {
    fn from(g: HalfEdgeGraph) -> Self {
        GraphRecord {
            v: g.v,
            pairing: g.pairing,
            at_vertex: g.at_vertex,
        }
    }
}

impl fmt::Debug for HalfEdgeGraph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let ends = self
            .edges
            .iter()
            .map(|[a, b]| format!("{}-{}", self.at_vertex[*a], self.at_vertex[*b]))
            .join(" ");
        write!(f, "Graph(v={}; {ends})", self.v)
    }
}

impl HalfEdgeGraph {
    pub fn new(v: usize, pairing: Vec<usize>, at_vertex: Vec<usize>) -> Result<Self, GraphError> {
        let h = pairing.len();
        if at_vertex.len() != h || !h.is_multiple_of(2) {
            return Err(GraphError::InvalidPairing);
        }
        for (i, &p) in pairing.iter().enumerate() {
            if p >= h || p == i || pairing[p] != i {
                return Err(GraphError::InvalidPairing);
            }
        }
        let mut seen = vec![false; v];
        for (i, &x) in at_vertex.iter().enumerate() {
            if x >= v {
                return Err(GraphError::VertexOutOfRange {
                    half_edge: i,
                    vertex: x,
                    count: v,
                });
            }
            seen[x] = true;
        }
        if let Some(x) = seen.iter().position(|s| !s) {
            return Err(GraphError::IsolatedVertex(x));
        }
        let edges: Vec<[usize; 2]> = (0..h)
            .filter(|&i| i < pairing[i])
            .map(|i| [i, pairing[i]])
            .collect();
        let mut edge_of = vec![0; h];
        for (e, [a, b]) in edges.iter().enumerate() {
            edge_of[*a] = e;
            edge_of[*b] = e;
        }
        Ok(Self {
            v,
            pairing,
            at_vertex,
            edges,
            edge_of,
        })
    }

    /// Edge i joins half-edge 2i (at `ends[i].0`) to 2i+1 (at `ends[i].1`).
    pub fn from_edges(v: usize, ends: &[(usize, usize)]) -> Result<Self, GraphError> {
        let pairing = (0..2 * ends.len()).map(|h| h ^ 1).collect();
        let at_vertex = ends.iter().flat_map(|&(a, b)| [a, b]).collect();
        Self::new(v, pairing, at_vertex)
    }

    pub fn num_vertices(&self) -> usize {
        self.v
    }

    pub fn num_edges(&self) -> usize {
        self.edges.len()
    }

    pub fn num_half_edges(&self) -> usize {
        self.pairing.len()
    }

    pub fn pairing(&self) -> &[usize] {
        &self.pairing
    }

    pub fn at_vertex(&self) -> &[usize] {
        &self.at_vertex
    }

    pub fn partner(&self, h: usize) -> usize {
        self.pairing[h]
    }

    pub fn vertex_of(&self, h: usize) -> usize {
        self.at_vertex[h]
    }

    pub fn edge_of(&self, h: usize) -> usize {
        self.edge_of[h]
    }

    /// (source half-edge, target half-edge).
    pub fn half_edges(&self, e: usize) -> (usize, usize) {
        let [a, b] = self.edges[e];
        (a, b)
    }

    /// (source vertex, target vertex).
    pub fn ends(&self, e: usize) -> (usize, usize) {
        let [a, b] = self.edges[e];
        (self.at_vertex[a], self.at_vertex[b])
    }

    pub fn is_source_half(&self, h: usize) -> bool {
        h < self.pairing[h]
    }

    pub fn is_loop(&self, e: usize) -> bool {
        let (a, b) = self.ends(e);
        a == b
    }

    pub fn valence(&self, x: usize) -> usize {
        self.at_vertex.iter().filter(|&&y| y == x).count()
    }

    pub fn half_edges_at(&self, x: usize) -> impl Iterator<Item = usize> + '_ {
        (0..self.pairing.len()).filter(move |&h| self.at_vertex[h] == x)
    }

    /// Symmetric multiplicity matrix; the diagonal counts loops.
    pub fn multiplicities(&self) -> Vec<Vec<usize>> {
        let mut m = vec![vec![0; self.v]; self.v];
        for e in 0..self.num_edges() {
            let (a, b) = self.ends(e);
            m[a][b] += 1;
            if a != b {
                m[b][a] += 1;
            }
        }
        m
    }

    fn connected_without(&self, removed: Option<usize>) -> bool {
        let keep: Vec<usize> = (0..self.v).filter(|&x| Some(x) != removed).collect();
        let Some(&start) = keep.first() else {
            return true;
        };
        let mut seen = vec![false; self.v];
        let mut stack = vec![start];
        seen[start] = true;
        while let Some(x) = stack.pop() {
            for e in 0..self.num_edges() {
                let (a, b) = self.ends(e);
                for (p, q) in [(a, b), (b, a)] {
                    if p == x && Some(q) != removed && !seen[q] {
                        seen[q] = true;
                        stack.push(q);
                    }
                }
            }
        }
        keep.iter().all(|&x| seen[x])
    }

    pub fn is_connected(&self) -> bool {
        self.connected_without(None)
    }

    pub fn genus(&self) -> Result<usize, GraphError> {
        if !self.is_connected() {
            return Err(GraphError::Disconnected);
        }
        Ok(self.num_edges() + 1 - self.v)
    }

    pub fn is_stable(&self) -> bool {
        (0..self.v).all(|x| self.valence(x) >= 3)
    }

    /// Loopless, at least two vertices, and no cut vertex.
    pub fn is_two_connected(&self) -> bool {
        self.v >= 2
            && (0..self.num_edges()).all(|e| !self.is_loop(e))
            && (0..self.v).all(|x| self.connected_without(Some(x)))
    }

    /// Relabels vertices and half-edges; `vertex_map[old] = new`,
    /// `half_edge_map[old] = new`.
    pub fn relabel(
        &self,
        vertex_map: &[usize],
        half_edge_map: &[usize],
    ) -> Result<Self, GraphError> {
        let h = self.num_half_edges();
        let mut pairing = vec![0; h];
        let mut at_vertex = vec![0; h];
        for old in 0..h {
            pairing[half_edge_map[old]] = half_edge_map[self.pairing[old]];
            at_vertex[half_edge_map[old]] = vertex_map[self.at_vertex[old]];
        }
        Self::new(self.v, pairing, at_vertex)
    }

    /// Collapses non-loop edge `e` and canonicalizes the result.
    pub fn contract(&self, e: usize) -> Result<ContractionData, GraphError> {
        if e >= self.num_edges() {
            return Err(GraphError::EdgeOutOfRange(e));
        }
        if self.is_loop(e) {
            return Err(GraphError::LoopContraction(e));
        }
        let (hs, ht) = self.half_edges(e);
        let (u, w) = self.ends(e);
        let merge = |x: usize| {
            let x = if x == w { u } else { x };
            x - usize::from(x > w)
        };
        let kept: Vec<usize> = (0..self.num_half_edges())
            .filter(|&h| h != hs && h != ht)
            .collect();
        let mut raw_id = vec![usize::MAX; self.num_half_edges()];
        for (k, &h) in kept.iter().enumerate() {
            raw_id[h] = k;
        }
        let raw = Self::new(
            self.v - 1,
            kept.iter().map(|&h| raw_id[self.pairing[h]]).collect(),
            kept.iter().map(|&h| merge(self.at_vertex[h])).collect(),
        )?;
        let (target, relabeling) = raw.canonical_form()?;
        let half_edge_map: Vec<Option<usize>> = (0..self.num_half_edges())
            .map(|h| (raw_id[h] != usize::MAX).then(|| relabeling.half_edge_map[raw_id[h]]))
            .collect();
        let vertex_correspondence = (0..self.v)
            .map(|x| relabeling.vertex_map[merge(x)])
            .collect();
        let mut edge_correspondence = vec![0; target.num_edges()];
        let mut edge_flipped = vec![false; target.num_edges()];
        for f in (0..self.num_edges()).filter(|&f| f != e) {
            let (src, _) = self.half_edges(f);
            let image = half_edge_map[src].expect("kept half-edge");
            let j = target.edge_of(image);
            edge_correspondence[j] = f;
            edge_flipped[j] = !target.is_source_half(image);
        }
        Ok(ContractionData {
            source: self.clone(),
            contracted_edge: e,
            target,
            edge_correspondence,
            edge_flipped,
            vertex_correspondence,
            merged_endpoints: (u, w),
            half_edge_map,
        })
    }

    /// Canonical representative and the relabeling that produces it.
    pub fn canonical_form(&self) -> Result<(HalfEdgeGraph, Relabeling), GraphError> {
        if !self.is_connected() {
            return Err(GraphError::Disconnected);
        }
        let orders = optimal_orders(self);
        let relabeling = self.relabeling_for(&orders[0]);
        let canon = self.relabel(&relabeling.vertex_map, &relabeling.half_edge_map)?;
        Ok((canon, relabeling))
    }

    /// Byte encoding of the graph; equal for isomorphic canonical forms.
    pub fn encode(&self) -> Vec<u8> {
        let mut out = vec![self.v as u8];
        out.extend(self.pairing.iter().map(|&x| x as u8));
        out.extend(self.at_vertex.iter().map(|&x| x as u8));
        out
    }

    fn relabeling_for(&self, order: &[usize]) -> Relabeling {
        let mut vertex_map = vec![0; self.v];
        for (i, &x) in order.iter().enumerate() {
            vertex_map[x] = i;
        }
        let mut keyed: Vec<(usize, usize, usize)> = (0..self.num_edges())
            .map(|e| {
                let (a, b) = self.ends(e);
                let (a, b) = (vertex_map[a], vertex_map[b]);
                (a.min(b), a.max(b), e)
            })
            .collect();
        keyed.sort_unstable();
        let mut half_edge_map = vec![0; self.num_half_edges()];
        for (k, &(lo, _, e)) in keyed.iter().enumerate() {
            let (hs, ht) = self.half_edges(e);
            if vertex_map[self.at_vertex[hs]] == lo {
                half_edge_map[hs] = 2 * k;
                half_edge_map[ht] = 2 * k + 1;
            } else {
                half_edge_map[ht] = 2 * k;
                half_edge_map[hs] = 2 * k + 1;
            }
        }
        Relabeling {
            vertex_map,
            half_edge_map,
        }
    }

    /// Full automorphism group as half-edge permutations. The identity
    /// comes first.
    pub fn automorphisms(&self) -> Result<Vec<GraphAut>, GraphError> {
        if !self.is_connected() {
            return Err(GraphError::Disconnected);
        }
        let orders = optimal_orders(self);
        let base = &orders[0];
        let mut classes: BTreeMap<(usize, usize), Vec<usize>> = BTreeMap::new();
        for e in 0..self.num_edges() {
            let (a, b) = self.ends(e);
            classes.entry((a.min(b), a.max(b))).or_default().push(e);
        }
        let mut out = Vec::new();
        for order in &orders {
            let mut alpha = vec![0; self.v];
            for (i, &x) in base.iter().enumerate() {
                alpha[x] = order[i];
            }
            // per parallel class, every way to send its edges onto the image class
            let options: Vec<Vec<Vec<(usize, usize)>>> = classes
                .iter()
                .map(|(&(a, b), edges)| {
                    let (ia, ib) = (alpha[a], alpha[b]);
                    let image = &classes[&(ia.min(ib), ia.max(ib))];
                    let mut opts = Vec::new();
                    for perm in image.iter().permutations(image.len()) {
                        if a == b {
                            for flips in 0..(1usize << edges.len()) {
                                let mut m = Vec::new();
                                for (k, (&e, &f)) in edges.iter().zip(&perm).enumerate() {
                                    let (s, t) = self.half_edges(e);
                                    let (fs, ft) = self.half_edges(*f);
                                    if flips >> k & 1 == 1 {
                                        m.extend([(s, ft), (t, fs)]);
                                    } else {
                                        m.extend([(s, fs), (t, ft)]);
                                    }
                                }
                                opts.push(m);
                            }
                        } else {
                            let mut m = Vec::new();
                            for (&e, &f) in edges.iter().zip(&perm) {
                                let (s, t) = self.half_edges(e);
                                let (fs, ft) = self.half_edges(*f);
                                // the half at a must land at alpha(a)
                                if self.at_vertex[fs] == alpha[self.at_vertex[s]] {
                                    m.extend([(s, fs), (t, ft)]);
                                } else {
                                    m.extend([(s, ft), (t, fs)]);
                                }
                            }
                            opts.push(m);
                        }
                    }
                    opts
                })
                .collect();
            for choice in options.iter().multi_cartesian_product() {
                let mut perm = vec![0; self.num_half_edges()];
                for (h, k) in choice.into_iter().flatten() {
                    perm[*h] = *k;
                }
                out.push(GraphAut::new(self, perm)?);
            }
            if classes.is_empty() {
                out.push(GraphAut::new(self, Vec::new())?);
            }
        }
        let id = out
            .iter()
            .position(GraphAut::is_identity)
            .expect("identity is an automorphism");
        out.swap(0, id);
        Ok(out)
    }
}

/// All vertex orderings that lexicographically minimize the adjacency code.
fn optimal_orders(g: &HalfEdgeGraph) -> Vec<Vec<usize>> {
    struct Search {
        n: usize,
        mult: Vec<Vec<usize>>,
        valence: Vec<usize>,
        best: Option<Vec<usize>>,
        orders: Vec<Vec<usize>>,
    }
    impl Search {
        fn chunk(&self, placed: &[usize], x: usize) -> Vec<usize> {
            let mut c = Vec::with_capacity(placed.len() + 2);
            c.push(self.valence[x]);
            c.push(self.mult[x][x]);
            c.extend(placed.iter().map(|&y| self.mult[y][x]));
            c
        }
        fn go(&mut self, placed: &mut Vec<usize>, code: &mut Vec<usize>, used: &mut [bool]) {
            if let Some(best) = &self.best {
                match code.as_slice().cmp(&best[..code.len()]) {
                    std::cmp::Ordering::Greater => return,
                    std::cmp::Ordering::Less if placed.len() == self.n => {}
                    _ => {}
                }
            }
            if placed.len() == self.n {
                match &self.best {
                    Some(b) if b == code => self.orders.push(placed.clone()),
                    _ => {
                        self.best = Some(code.clone());
                        self.orders = vec![placed.clone()];
                    }
                }
                return;
            }
            let candidates: Vec<(Vec<usize>, usize)> = (0..self.n)
                .filter(|&x| !used[x])
                .map(|x| (self.chunk(placed, x), x))
                .collect();
            let min = candidates
                .iter()
                .map(|c| &c.0)
                .min()
                .expect("unplaced vertex")
                .clone();
            for (c, x) in candidates {
                if c != min {
                    continue;
                }
                let len = code.len();
                code.extend(&c);
                placed.push(x);
                used[x] = true;
                self.go(placed, code, used);
                used[x] = false;
                placed.pop();
                code.truncate(len);
            }
        }
    }
    let valence = (0..g.num_vertices()).map(|x| g.valence(x)).collect();
    let mut s = Search {
        n: g.num_vertices(),
        mult: g.multiplicities(),
        valence,
        best: None,
        orders: Vec::new(),
    };
    s.go(
        &mut Vec::new(),
        &mut Vec::new(),
        &mut vec![false; g.num_vertices()],
    );
    s.orders
}

/// Vertex and half-edge relabeling (old id -> new id).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Relabeling {
    pub vertex_map: Vec<usize>,
    pub half_edge_map: Vec<usize>,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct GraphAut {
    pub half_edge_perm: Vec<usize>,
    pub vertex_perm: Vec<usize>,
    pub edge_perm: Vec<usize>,
    pub orientation_flips: Vec<bool>,
}

impl GraphAut {
    pub fn new(g: &HalfEdgeGraph, half_edge_perm: Vec<usize>) -> Result<Self, GraphError> {
        let h = g.num_half_edges();
        if half_edge_perm.len() != h {
            return Err(GraphError::NotAnAutomorphism);
        }
        let mut hit = vec![false; h];
        for &x in &half_edge_perm {
            if x >= h || std::mem::replace(&mut hit[x], true) {
                return Err(GraphError::NotAnAutomorphism);
            }
        }
        let mut vertex_perm = vec![usize::MAX; g.num_vertices()];
        for i in 0..h {
            if half_edge_perm[g.partner(i)] != g.partner(half_edge_perm[i]) {
                return Err(GraphError::NotAnAutomorphism);
            }
            let (x, y) = (g.vertex_of(i), g.vertex_of(half_edge_perm[i]));
            if vertex_perm[x] != usize::MAX && vertex_perm[x] != y {
                return Err(GraphError::NotAnAutomorphism);
            }
            vertex_perm[x] = y;
        }
        let mut edge_perm = vec![0; g.num_edges()];
        let mut orientation_flips = vec![false; g.num_edges()];
        for e in 0..g.num_edges() {
            let (s, _) = g.half_edges(e);
            let image = half_edge_perm[s];
            edge_perm[e] = g.edge_of(image);
            orientation_flips[e] = !g.is_source_half(image);
        }
        Ok(Self {
            half_edge_perm,
            vertex_perm,
            edge_perm,
            orientation_flips,
        })
    }

    pub fn is_identity(&self) -> bool {
        self.half_edge_perm.iter().enumerate().all(|(i, &x)| i == x)
    }

    /// `self ∘ other`: apply `other` first.
    pub fn compose(&self, g: &HalfEdgeGraph, other: &GraphAut) -> Result<GraphAut, GraphError> {
        Self::new(
            g,
            other
                .half_edge_perm
                .iter()
                .map(|&h| self.half_edge_perm[h])
                .collect(),
        )
    }

    pub fn inverse(&self, g: &HalfEdgeGraph) -> Result<GraphAut, GraphError> {
        Self::new(g, crate::sym_rep::inverse_permutation(&self.half_edge_perm))
    }

    /// Action on det(E): the sign of the induced edge permutation.
    pub fn edge_sign(&self) -> i64 {
        permutation_sign(&self.edge_perm)
    }
}

/// How vertices and edges of one graph land in another, either bijectively
/// (isomorphisms) or with one collapsed edge (contractions). `edge_map[e]`
/// is `(image edge, orientation reversed)` or `None` for a collapsed edge.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GraphMap {
    pub vertex_map: Vec<usize>,
    pub edge_map: Vec<Option<(usize, bool)>>,
    pub target_vertices: usize,
    pub target_edges: usize,
}

impl GraphMap {
    pub fn from_aut(g: &HalfEdgeGraph, a: &GraphAut) -> Self {
        Self {
            vertex_map: a.vertex_perm.clone(),
            edge_map: a
                .edge_perm
                .iter()
                .zip(&a.orientation_flips)
                .map(|(&e, &f)| Some((e, f)))
                .collect(),
            target_vertices: g.num_vertices(),
            target_edges: g.num_edges(),
        }
    }

    pub fn from_contraction(cd: &ContractionData) -> Self {
        let mut edge_map = vec![None; cd.source.num_edges()];
        for (j, &f) in cd.edge_correspondence.iter().enumerate() {
            edge_map[f] = Some((j, cd.edge_flipped[j]));
        }
        Self {
            vertex_map: cd.vertex_correspondence.clone(),
            edge_map,
            target_vertices: cd.target.num_vertices(),
            target_edges: cd.target.num_edges(),
        }
    }

    /// `other ∘ self`.
    pub fn then(&self, other: &GraphMap) -> GraphMap {
        GraphMap {
            vertex_map: self
                .vertex_map
                .iter()
                .map(|&x| other.vertex_map[x])
                .collect(),
            edge_map: self
                .edge_map
                .iter()
                .map(|m| m.and_then(|(e, f)| other.edge_map[e].map(|(e2, f2)| (e2, f ^ f2))))
                .collect(),
            target_vertices: other.target_vertices,
            target_edges: other.target_edges,
        }
    }
}

/// Result of collapsing one edge; the target is in canonical form.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ContractionData {
    pub source: HalfEdgeGraph,
    pub contracted_edge: usize,
    pub target: HalfEdgeGraph,
    /// Target edge id -> source edge id.
    pub edge_correspondence: Vec<usize>,
    /// Whether the target edge runs against its source edge's orientation.
    pub edge_flipped: Vec<bool>,
    /// Source vertex -> target vertex.
    pub vertex_correspondence: Vec<usize>,
    pub merged_endpoints: (usize, usize),
    /// Source half-edge -> target half-edge (`None` for the collapsed edge).
    pub half_edge_map: Vec<Option<usize>>,
}

impl ContractionData {
    /// Sign of the bijection E(G) ≅ {e} ⊔ E(G/e) used for e ∧ (−): the
    /// parity of sorting the sequence (e, φ(0), φ(1), ...).
    pub fn wedge_sign(&self) -> i64 {
        let mut seq = vec![self.contracted_edge];
        seq.extend(&self.edge_correspondence);
        permutation_sign(&seq)
    }

    pub fn merged_vertex(&self) -> usize {
        self.vertex_correspondence[self.merged_endpoints.0]
    }
}

/// A-edge orbit under Aut(G): representative edge, target representative
/// and, for each member edge, an automorphism carrying it to the
/// representative.
#[derive(Clone, Debug)]
pub struct AEdgeOrbit {
    pub representative: usize,
    pub target: usize,
    pub members: Vec<(usize, usize)>,
}

#[derive(Clone, Debug)]
pub struct CategoryGraph {
    pub key: String,
    pub graph: HalfEdgeGraph,
    pub automorphisms: Vec<GraphAut>,
    pub a_edge_orbits: Vec<AEdgeOrbit>,
    /// Contraction data for every A-edge, keyed by edge id, with the index
    /// of the target representative.
    pub contractions: BTreeMap<usize, (ContractionData, usize)>,
}

impl CategoryGraph {
    pub fn p(&self) -> usize {
        self.graph.num_edges() - 1
    }

    pub fn name(&self) -> Option<&'static str> {
        named::identify(&self.graph)
    }

    pub fn label(&self) -> String {
        match self.name() {
            Some(n) => format!("{} ({n})", self.key),
            None => self.key.clone(),
        }
    }

    pub fn aut_order(&self) -> usize {
        self.automorphisms.len()
    }

    pub fn is_a_edge(&self, e: usize) -> bool {
        self.contractions.contains_key(&e)
    }
}

#[derive(Clone, Debug)]
pub struct GraphCategory {
    pub genus: usize,
    pub two_connected: bool,
    pub representatives: Vec<CategoryGraph>,
}

impl GraphCategory {
    pub fn index_of(&self, g: &HalfEdgeGraph) -> Option<usize> {
        let (canon, _) = g.canonical_form().ok()?;
        self.representatives.iter().position(|r| r.graph == canon)
    }

    pub fn by_name(&self, name: &str) -> Option<usize> {
        self.representatives
            .iter()
            .position(|r| r.name() == Some(name) || r.key == name)
    }

    pub fn counts_by_edges(&self) -> BTreeMap<usize, usize> {
        self.representatives
            .iter()
            .map(|r| r.graph.num_edges())
            .counts()
            .into_iter()
            .collect()
    }

    /// Orbit decomposition of the A-edges of representative `i`.
    pub fn a_edges(&self, i: usize) -> &[AEdgeOrbit] {
        &self.representatives[i].a_edge_orbits
    }

    /// Pairs (e, f) of A-edges from distinct orbits for which exactly one of
    /// the two contraction orders stays in the category, or the two double
    /// contractions disagree.
    pub fn diamond_violations(&self) -> Vec<(usize, usize, usize)> {
        let mut bad = Vec::new();
        for (i, rep) in self.representatives.iter().enumerate() {
            let orbit_of: HashMap<usize, usize> = rep
                .a_edge_orbits
                .iter()
                .enumerate()
                .flat_map(|(k, o)| o.members.iter().map(move |(e, _)| (*e, k)))
                .collect();
            for e in 0..rep.graph.num_edges() {
                for f in 0..rep.graph.num_edges() {
                    if e == f || rep.graph.is_loop(e) || rep.graph.is_loop(f) {
                        continue;
                    }
                    if let (Some(oe), Some(of)) = (orbit_of.get(&e), orbit_of.get(&f)) {
                        if oe == of {
                            continue;
                        }
                    }
                    let Some(both) = double_contraction(&rep.graph, e, f) else {
                        continue;
                    };
                    if self.index_of(&both).is_none() {
                        continue;
                    }
                    let other = double_contraction(&rep.graph, f, e);
                    let ok = rep.is_a_edge(e)
                        && rep.is_a_edge(f)
                        && other.and_then(|o| o.canonical_form().ok()).map(|c| c.0)
                            == both.canonical_form().ok().map(|c| c.0);
                    if !ok {
                        bad.push((i, e, f));
                    }
                }
            }
        }
        bad
    }
}

/// `(G/e)/f` with `f` tracked through the first contraction; `None` when
/// `f` becomes a loop.
fn double_contraction(g: &HalfEdgeGraph, e: usize, f: usize) -> Option<HalfEdgeGraph> {
    let cd = g.contract(e).ok()?;
    let (fs, _) = g.half_edges(f);
    let f2 = cd.target.edge_of(cd.half_edge_map[fs]?);
    Some(cd.target.contract(f2).ok()?.target)
}

/// Every connected stable genus-g graph, optionally only 2-connected ones,
/// with automorphism groups and A-edge orbits.
pub fn enumerate_category(g: usize, two_connected: bool) -> Result<GraphCategory, GraphError> {
    if g < 2 {
        return Err(GraphError::UnsupportedGenus(g));
    }
    let per_v: Vec<Vec<HalfEdgeGraph>> = (1..=2 * g - 2)
        .into_par_iter()
        .map(|v| graphs_with(v, v + g - 1, two_connected))
        .collect();
    let mut graphs: Vec<HalfEdgeGraph> = per_v.into_iter().flatten().collect();
    graphs.sort_by_key(|gr| (gr.num_edges(), gr.encode()));

    let mut per_edges: BTreeMap<usize, usize> = BTreeMap::new();
    let keys: Vec<String> = graphs
        .iter()
        .map(|gr| {
            let c = per_edges.entry(gr.num_edges()).or_default();
            *c += 1;
            format!("g{g}_e{}_i{}", gr.num_edges(), *c - 1)
        })
        .collect();
    let lookup: HashMap<&HalfEdgeGraph, usize> =
        graphs.iter().enumerate().map(|(i, gr)| (gr, i)).collect();

    let reps: Vec<CategoryGraph> = graphs
        .par_iter()
        .zip(keys.par_iter())
        .map(|(gr, key)| {
            let automorphisms = gr.automorphisms()?;
            let mut contractions = BTreeMap::new();
            for e in (0..gr.num_edges()).filter(|&e| !gr.is_loop(e)) {
                let cd = gr.contract(e)?;
                if let Some(&t) = lookup.get(&cd.target) {
                    contractions.insert(e, (cd, t));
                }
            }
            let mut a_edge_orbits: Vec<AEdgeOrbit> = Vec::new();
            let mut assigned = HashSet::new();
            for (&e, (_, t)) in &contractions {
                if assigned.contains(&e) {
                    continue;
                }
                // transporter for e' is an automorphism sending e' to e
                let mut members: BTreeMap<usize, usize> = BTreeMap::new();
                for (k, a) in automorphisms.iter().enumerate() {
                    let inv_target = a.edge_perm.iter().position(|&x| x == e).expect("bijection");
                    members.entry(inv_target).or_insert(k);
                }
                assigned.extend(members.keys().copied());
                a_edge_orbits.push(AEdgeOrbit {
                    representative: e,
                    target: *t,
                    members: members.into_iter().collect(),
                });
            }
            Ok(CategoryGraph {
                key: key.clone(),
                graph: gr.clone(),
                automorphisms,
                a_edge_orbits,
                contractions,
            })
        })
        .collect::<Result<_, GraphError>>()?;
    Ok(GraphCategory {
        genus: g,
        two_connected,
        representatives: reps,
    })
}

/// Canonical forms of all connected stable graphs with `v` vertices and `e`
/// edges, deduplicated.
fn graphs_with(v: usize, e: usize, two_connected: bool) -> Vec<HalfEdgeGraph> {
    // fill the upper triangle (diagonal = loops) row by row
    let cells: Vec<(usize, usize)> = (0..v).flat_map(|i| (i..v).map(move |j| (i, j))).collect();
    let mut found: HashSet<HalfEdgeGraph> = HashSet::new();
    let mut m = vec![vec![0usize; v]; v];
    fn valence(m: &[Vec<usize>], i: usize) -> usize {
        (0..m.len())
            .map(|j| {
                if i == j {
                    2 * m[i][i]
                } else {
                    m[i.min(j)][i.max(j)]
                }
            })
            .sum()
    }
    #[allow(clippy::too_many_arguments)]
    fn go(
        k: usize,
        left: usize,
        cells: &[(usize, usize)],
        m: &mut Vec<Vec<usize>>,
        v: usize,
        two_connected: bool,
        found: &mut HashSet<HalfEdgeGraph>,
    ) {
        if k == cells.len() {
            if left != 0 {
                return;
            }
            let ends: Vec<(usize, usize)> = cells
                .iter()
                .flat_map(|&(i, j)| std::iter::repeat_n((i, j), m[i][j]))
                .collect();
            let Ok(g) = HalfEdgeGraph::from_edges(v, &ends) else {
                return;
            };
            if !g.is_connected() || !g.is_stable() || (two_connected && !g.is_two_connected()) {
                return;
            }
            if let Ok((c, _)) = g.canonical_form() {
                found.insert(c);
            }
            return;
        }
        let (i, j) = cells[k];
        if two_connected && i == j {
            m[i][j] = 0;
            go(k + 1, left, cells, m, v, two_connected, found);
            return;
        }
        for x in 0..=left {
            m[i][j] = x;
            // row i is complete once its last cell is placed
            if j == v - 1 {
                let val = valence(m, i);
                if val < 3 || (i > 0 && valence(m, i - 1) < val) {
                    continue;
                }
            }
            go(k + 1, left - x, cells, m, v, two_connected, found);
        }
        m[i][j] = 0;
    }
    go(0, e, &cells, &mut m, v, two_connected, &mut found);
    found.into_iter().collect()
}

/// Number of isomorphism classes of connected stable graphs of genus `g`
/// whose vertices carry genus weights w ≥ 0 (stability: 2w − 2 + valence > 0,
/// total genus b1 + Σw). This counts all cells of the tropical moduli space,
/// before restricting to the unweighted 2-connected ones.
pub fn weighted_stable_census(g: usize) -> Result<usize, GraphError> {
    stable_census_brute(g, true)
}

/// Brute-force count of stable graphs, optionally allowing vertex weights.
/// Independent of the canonical labeling used by [`enumerate_category`]:
/// classes are separated by minimizing over all vertex permutations.
pub fn stable_census_brute(g: usize, allow_weights: bool) -> Result<usize, GraphError> {
    if g < 2 {
        return Err(GraphError::UnsupportedGenus(g));
    }
    let mut keys: HashSet<Vec<usize>> = HashSet::new();
    for v in 1..=2 * g - 2 {
        let cells: Vec<(usize, usize)> = (0..v).flat_map(|i| (i..v).map(move |j| (i, j))).collect();
        for e in v - 1..=v + g - 1 {
            let mut m = vec![vec![0usize; v]; v];
            weighted_fill(0, e, &cells, &mut m, &mut keys, g, allow_weights);
        }
    }
    Ok(keys.len())
}

fn weighted_fill(
    k: usize,
    left: usize,
    cells: &[(usize, usize)],
    m: &mut Vec<Vec<usize>>,
    keys: &mut HashSet<Vec<usize>>,
    g: usize,
    allow_weights: bool,
) {
    let v = m.len();
    if k == cells.len() {
        if left != 0 {
            return;
        }
        let edges: usize = cells.iter().map(|&(i, j)| m[i][j]).sum();
        let b1 = edges + 1 - v;
        let ends: Vec<(usize, usize)> = cells
            .iter()
            .flat_map(|&(i, j)| std::iter::repeat_n((i, j), m[i][j]))
            .collect();
        let connected =
            v == 1 || HalfEdgeGraph::from_edges(v, &ends).is_ok_and(|gr| gr.is_connected());
        if !connected || b1 > g {
            return;
        }
        let valence: Vec<usize> = (0..v)
            .map(|i| {
                (0..v)
                    .map(|j| {
                        if i == j {
                            2 * m[i][i]
                        } else {
                            m[i.min(j)][i.max(j)]
                        }
                    })
                    .sum()
            })
            .collect();
        if allow_weights || b1 == g {
            let mut w = vec![0; v];
            distribute(0, g - b1, &valence, &mut w, m, keys);
        }
        return;
    }
    let (i, j) = cells[k];
    for x in 0..=left {
        m[i][j] = x;
        weighted_fill(k + 1, left - x, cells, m, keys, g, allow_weights);
    }
    m[i][j] = 0;
}

fn distribute(
    i: usize,
    left: usize,
    valence: &[usize],
    w: &mut Vec<usize>,
    m: &[Vec<usize>],
    keys: &mut HashSet<Vec<usize>>,
) {
    let v = valence.len();
    if i == v {
        if left == 0 && (0..v).all(|x| 2 * w[x] + valence[x] >= 3) {
            // canonical key: lexicographically least relabeled encoding
            let key = (0..v)
                .permutations(v)
                .map(|p| {
                    let mut code: Vec<usize> = p.iter().map(|&x| w[x]).collect();
                    for a in 0..v {
                        for b in a..v {
                            let (x, y) = (p[a].min(p[b]), p[a].max(p[b]));
                            code.push(m[x][y]);
                        }
                    }
                    code
                })
                .min()
                .expect("nonempty");
            keys.insert(key);
        }
        return;
    }
    for x in 0..=left {
        w[i] = x;
        distribute(i + 1, left - x, valence, w, m, keys);
    }
    w[i] = 0;
}

/// Small named graphs used throughout the genus-2 and genus-3 examples.
pub mod named {
    use super::HalfEdgeGraph;

    pub fn theta() -> HalfEdgeGraph {
        banana(3)
    }

    pub fn banana(k: usize) -> HalfEdgeGraph {
        HalfEdgeGraph::from_edges(2, &vec![(0, 1); k]).expect("valid")
    }

    pub fn rose(k: usize) -> HalfEdgeGraph {
        HalfEdgeGraph::from_edges(1, &vec![(0, 0); k]).expect("valid")
    }

    pub fn k4() -> HalfEdgeGraph {
        HalfEdgeGraph::from_edges(4, &[(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)])
            .expect("valid")
    }

    /// Two doubled edges meeting at a middle vertex, outer vertices joined
    /// by a single edge.
    pub fn goggles() -> HalfEdgeGraph {
        HalfEdgeGraph::from_edges(3, &[(0, 1), (0, 2), (0, 2), (1, 2), (1, 2)]).expect("valid")
    }

    /// A 4-cycle with two opposite edges doubled.
    pub fn can() -> HalfEdgeGraph {
        HalfEdgeGraph::from_edges(4, &[(0, 1), (0, 1), (2, 3), (2, 3), (0, 2), (1, 3)])
            .expect("valid")
    }

    pub fn identify(g: &HalfEdgeGraph) -> Option<&'static str> {
        let canon = g.canonical_form().ok()?.0;
        let table: [(&str, HalfEdgeGraph); 5] = [
            ("theta", theta()),
            ("banana", banana(4)),
            ("goggles", goggles()),
            ("can", can()),
            ("K4", k4()),
        ];
        table
            .into_iter()
            .find(|(_, h)| h.canonical_form().map(|c| c.0).as_ref() == Ok(&canon))
            .map(|(n, _)| n)
    }

    pub fn by_name(name: &str) -> Option<HalfEdgeGraph> {
        Some(match name {
            "theta" => theta(),
            "banana" => banana(4),
            "goggles" => goggles(),
            "can" => can(),
            "K4" | "k4" => k4(),
            _ => return None,
        })
    }
}
