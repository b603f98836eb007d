//! The E1 page of the column filtration: vertical cohomology of every graph,
//! the induced horizontal differential d1, and Gaussian elimination of
//! blocks known to be injective or surjective.

use std::collections::BTreeMap;

use rayon::prelude::*;

use crate::exact_linalg::{
    rank_with, Echelon, RankStrategy, RationalSparseMatrix, SparseVector, Subquotient,
};

use super::total::DoubleComplex;
use super::GraphComplexError;

/// One row of the E1 page: a cochain complex in p whose coordinates are
/// labeled (graph index, class index).
#[derive(Clone, Debug)]
pub struct RowComplex {
    pub q: usize,
    pub labels: BTreeMap<usize, Vec<(usize, usize)>>,
    /// `d[p]` maps degree p to p + 1.
    pub d: BTreeMap<usize, RationalSparseMatrix>,
}

impl RowComplex {
    pub fn dim(&self, p: usize) -> usize {
        self.labels.get(&p).map_or(0, Vec::len)
    }

    fn map(&self, p: usize) -> RationalSparseMatrix {
        self.d
            .get(&p)
            .cloned()
            .unwrap_or_else(|| RationalSparseMatrix::zeros(self.dim(p + 1), self.dim(p)))
    }

    pub fn check_square(&self) -> Result<(), GraphComplexError> {
        for (&p, d) in &self.d {
            if let Some(next) = self.d.get(&(p + 1)) {
                if !next.mul(d)?.is_zero() {
                    return Err(GraphComplexError::SquareNonzero(format!(
                        "d1 in row q={} at p={p}",
                        self.q
                    )));
                }
            }
        }
        Ok(())
    }

    /// Dimensions of the row cohomology GH^{p,q}.
    pub fn cohomology(&self, strategy: RankStrategy) -> BTreeMap<usize, usize> {
        let ps: Vec<usize> = self.labels.keys().copied().collect();
        let rank = |p: usize| self.d.get(&p).map_or(0, |d| rank_with(d, strategy));
        ps.iter()
            .map(|&p| {
                let before = if p > 0 { rank(p - 1) } else { 0 };
                (p, self.dim(p) - rank(p) - before)
            })
            .collect()
    }

    /// Coordinates (within degree p) belonging to one graph.
    pub fn coordinates_of(&self, p: usize, graph: usize) -> Vec<usize> {
        self.labels
            .get(&p)
            .map(|l| {
                l.iter()
                    .enumerate()
                    .filter(|(_, (g, _))| *g == graph)
                    .map(|(i, _)| i)
                    .collect()
            })
            .unwrap_or_default()
    }

    /// Removes coordinates `a` of degree p and `c` of degree p + 1, where the
    /// block d[c, a] is invertible, leaving a quasi-isomorphic complex.
    pub fn eliminate(
        &self,
        p: usize,
        a: &[usize],
        c: &[usize],
    ) -> Result<RowComplex, GraphComplexError> {
        let d = self.map(p);
        let b: Vec<usize> = (0..self.dim(p)).filter(|i| !a.contains(i)).collect();
        let dd: Vec<usize> = (0..self.dim(p + 1)).filter(|i| !c.contains(i)).collect();
        let phi = d.select_rows(c).select_cols(a);
        let delta = d.select_rows(c).select_cols(&b);
        let gamma = d.select_rows(&dd).select_cols(a);
        let eps = d.select_rows(&dd).select_cols(&b);
        let mut ech = Echelon::new(c.len());
        for col in phi.columns() {
            if !ech.insert(&col) {
                return Err(GraphComplexError::Pruning(format!(
                    "block at p={p} is not invertible"
                )));
            }
        }
        if ech.rank() != c.len() {
            return Err(GraphComplexError::Pruning(format!(
                "block at p={p} is not square"
            )));
        }
        let x: Vec<SparseVector> = delta
            .columns()
            .iter()
            .map(|v| ech.coordinates(v).expect("invertible block"))
            .collect();
        let x = RationalSparseMatrix::from_columns(a.len(), &x);
        let reduced = eps.add(&gamma.mul(&x)?.scale(&crate::exact_linalg::rational(-1)))?;
        let mut out = self.clone();
        let keep =
            |labels: &Vec<(usize, usize)>, idx: &[usize]| idx.iter().map(|&i| labels[i]).collect();
        out.labels.insert(p, keep(&self.labels[&p], &b));
        out.labels.insert(p + 1, keep(&self.labels[&(p + 1)], &dd));
        out.d.insert(p, reduced);
        if p > 0 {
            if let Some(prev) = self.d.get(&(p - 1)) {
                out.d.insert(p - 1, prev.select_rows(&b));
            }
        }
        if let Some(next) = self.d.get(&(p + 1)) {
            out.d.insert(p + 1, next.select_cols(&dd));
        }
        Ok(out)
    }
}

/// How a special block is known to behave.
#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BlockVerdict {
    Injective,
    Surjective,
}

/// E1 page restricted to the rows where vertical cohomology can live.
#[derive(Clone, Debug)]
pub struct E1Page {
    pub rows: BTreeMap<usize, RowComplex>,
    /// Vertical cohomology of every graph in every row.
    pub vertical: BTreeMap<(usize, usize), Subquotient>,
}

impl E1Page {
    pub fn build(dc: &DoubleComplex) -> Result<Self, GraphComplexError> {
        let n = dc.n;
        let rows_q: Vec<usize> = if n == 0 { vec![0] } else { vec![n - 1, n] };
        let mut vertical = BTreeMap::new();
        let spots: Vec<(usize, usize)> = (0..dc.columns.len())
            .flat_map(|g| (0..=n).map(move |q| (g, q)))
            .collect();
        let subs: Vec<((usize, usize), Subquotient)> = spots
            .par_iter()
            .map(|&(g, q)| {
                let c = &dc.columns[g];
                let incoming = (q > 0).then(|| &c.delta[q - 1]);
                let outgoing = (q < n).then(|| &c.delta[q]);
                (
                    (g, q),
                    Subquotient::new(c.terms[q].dim(), incoming, outgoing),
                )
            })
            .collect();
        for ((g, q), sub) in subs {
            if !rows_q.contains(&q) {
                if sub.dim() != 0 {
                    return Err(GraphComplexError::Degeneration(format!(
                        "vertical cohomology of {} is {}-dimensional in degree {q}",
                        dc.columns[g].context.graph_key,
                        sub.dim()
                    )));
                }
                continue;
            }
            vertical.insert((g, q), sub);
        }
        let mut rows = BTreeMap::new();
        for &q in &rows_q {
            let mut labels: BTreeMap<usize, Vec<(usize, usize)>> = BTreeMap::new();
            let mut offset: BTreeMap<usize, usize> = BTreeMap::new();
            for (g, c) in dc.columns.iter().enumerate() {
                let entry = labels.entry(c.context.p).or_default();
                offset.insert(g, entry.len());
                entry.extend((0..vertical[&(g, q)].dim()).map(|k| (g, k)));
            }
            let mut triplets: BTreeMap<usize, Vec<(usize, usize, crate::exact_linalg::Rational)>> =
                BTreeMap::new();
            for (&(s, t), per_q) in &dc.blocks {
                let (hs, ht) = (&vertical[&(s, q)], &vertical[&(t, q)]);
                let p = dc.columns[s].context.p;
                for (j, z) in hs.section().iter().enumerate() {
                    let image = per_q[q].mul_vec(z);
                    let coords = ht.retract(&image).ok_or_else(|| {
                        GraphComplexError::SquareNonzero(format!(
                            "block {} -> {} does not carry cocycles to cocycles",
                            dc.columns[s].context.graph_key, dc.columns[t].context.graph_key
                        ))
                    })?;
                    for (i, v) in coords.entries() {
                        triplets.entry(p).or_default().push((
                            offset[&t] + i,
                            offset[&s] + j,
                            v.clone(),
                        ));
                    }
                }
            }
            let d = labels
                .keys()
                .map(|&p| {
                    let rows = labels.get(&(p + 1)).map_or(0, Vec::len);
                    let t = triplets.remove(&p).unwrap_or_default();
                    (
                        p,
                        RationalSparseMatrix::from_triplets(rows, labels[&p].len(), t),
                    )
                })
                .collect();
            let row = RowComplex { q, labels, d };
            row.check_square()?;
            rows.insert(q, row);
        }
        Ok(Self { rows, vertical })
    }

    /// Block of d1 from graph `source` to graph `target` in row q. A graph
    /// whose term vanishes in this row contributes an empty side; `None`
    /// means the row is missing.
    pub fn block(&self, q: usize, source: usize, target: usize) -> Option<RationalSparseMatrix> {
        let row = self.rows.get(&q)?;
        let find = |graph: usize| {
            row.labels
                .iter()
                .find(|(_, l)| l.iter().any(|(g, _)| *g == graph))
                .map(|(&p, _)| p)
        };
        match (find(source), find(target)) {
            (Some(p), _) => {
                let cols = row.coordinates_of(p, source);
                let rows = row.coordinates_of(p + 1, target);
                Some(row.map(p).select_rows(&rows).select_cols(&cols))
            }
            (None, Some(p)) => Some(RationalSparseMatrix::zeros(
                row.coordinates_of(p, target).len(),
                0,
            )),
            (None, None) => Some(RationalSparseMatrix::zeros(0, 0)),
        }
    }
}

/// Eliminates special blocks, in increasing p, from every row.
/// `special` lists (source G', target G, p of G', verdict).
pub fn prune(
    row: &RowComplex,
    special: &[(usize, usize, usize, BlockVerdict)],
) -> Result<RowComplex, GraphComplexError> {
    let mut specials = special.to_vec();
    specials.sort_by_key(|s| s.2);
    let mut cur = row.clone();
    for (s, t, p, verdict) in specials {
        let cols = cur.coordinates_of(p, s);
        let rows = cur.coordinates_of(p + 1, t);
        let block = cur.map(p).select_rows(&rows).select_cols(&cols);
        let (a, c) = match verdict {
            BlockVerdict::Injective => {
                let mut ech = Echelon::new(cols.len());
                let picked: Vec<usize> = (0..rows.len())
                    .filter(|&i| ech.insert(block.row(i)))
                    .collect();
                if picked.len() != cols.len() {
                    return Err(GraphComplexError::Pruning(format!(
                        "block expected injective has rank {} < {} in row q={}",
                        picked.len(),
                        cols.len(),
                        row.q
                    )));
                }
                (
                    cols.clone(),
                    picked.iter().map(|&i| rows[i]).collect::<Vec<_>>(),
                )
            }
            BlockVerdict::Surjective => {
                let mut ech = Echelon::new(rows.len());
                let columns = block.columns();
                let picked: Vec<usize> = (0..cols.len())
                    .filter(|&j| ech.insert(&columns[j]))
                    .collect();
                if picked.len() != rows.len() {
                    return Err(GraphComplexError::Pruning(format!(
                        "block expected surjective has rank {} < {} in row q={}",
                        picked.len(),
                        rows.len(),
                        row.q
                    )));
                }
                (
                    picked.iter().map(|&j| cols[j]).collect::<Vec<_>>(),
                    rows.clone(),
                )
            }
        };
        cur = cur.eliminate(p, &a, &c)?;
    }
    cur.check_square()?;
    Ok(cur)
}
