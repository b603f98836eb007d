//! The double complex ⊕_G term(G, q) with d = d_h + (−1)^p d_v and its
//! total cohomology.

use std::collections::BTreeMap;

use rayon::prelude::*;

use crate::exact_linalg::{rank_with, rational, RankStrategy, RationalSparseMatrix};
use crate::multigraph::GraphCategory;
use crate::sym_rep::YoungFunctional;

use super::blocks::{horizontal_block, BlockForm};
use super::term::{InvariantComplex, TermContext};
use super::GraphComplexError;

#[derive(Clone, Debug)]
pub struct DoubleComplex {
    pub genus: usize,
    pub n: usize,
    pub functional: YoungFunctional,
    /// One vertical complex per category representative, same indexing.
    pub columns: Vec<InvariantComplex>,
    /// `(source G', target G)` to the block in each vertical degree.
    pub blocks: BTreeMap<(usize, usize), Vec<RationalSparseMatrix>>,
}

impl DoubleComplex {
    pub fn assemble(cat: &GraphCategory, functional: &YoungFunctional, form: BlockForm) -> Self {
        let n = functional.shape.size();
        let columns: Vec<InvariantComplex> = cat
            .representatives
            .par_iter()
            .enumerate()
            .map(|(i, cg)| InvariantComplex::build(TermContext::new(i, cg, functional)))
            .collect();
        let arrows: Vec<(usize, usize)> = cat
            .representatives
            .iter()
            .enumerate()
            .flat_map(|(g, cg)| cg.a_edge_orbits.iter().map(move |o| (o.target, g)))
            .collect::<std::collections::BTreeSet<_>>()
            .into_iter()
            .collect();
        let blocks = arrows
            .par_iter()
            .map(|&(s, t)| {
                let per_q = (0..=n)
                    .map(|q| horizontal_block(cat, &columns[s], &columns[t], q, form))
                    .collect();
                ((s, t), per_q)
            })
            .collect();
        Self {
            genus: cat.genus,
            n,
            functional: functional.clone(),
            columns,
            blocks,
        }
    }

    /// Summands (graph index, q) of total degree k, in a fixed order.
    pub fn summands(&self, k: usize) -> Vec<(usize, usize)> {
        self.columns
            .iter()
            .enumerate()
            .filter_map(|(i, c)| {
                let p = c.context.p;
                (k >= p && k - p <= self.n).then(|| (i, k - p))
            })
            .collect()
    }

    fn dim_of(&self, (i, q): (usize, usize)) -> usize {
        self.columns[i].terms[q].dim()
    }

    pub fn degree_range(&self) -> std::ops::RangeInclusive<usize> {
        let pmin = self.columns.iter().map(|c| c.context.p).min().unwrap_or(0);
        let pmax = self.columns.iter().map(|c| c.context.p).max().unwrap_or(0);
        pmin..=pmax + self.n
    }

    pub fn total_dims(&self) -> BTreeMap<usize, usize> {
        self.degree_range()
            .map(|k| (k, self.summands(k).iter().map(|&s| self.dim_of(s)).sum()))
            .collect()
    }

    /// Total differential C^k → C^{k+1}.
    pub fn total_differential(&self, k: usize) -> RationalSparseMatrix {
        let src = self.summands(k);
        let tgt = self.summands(k + 1);
        let col_sizes: Vec<usize> = src.iter().map(|&s| self.dim_of(s)).collect();
        let row_sizes: Vec<usize> = tgt.iter().map(|&s| self.dim_of(s)).collect();
        let mut owned: Vec<(usize, usize, RationalSparseMatrix)> = Vec::new();
        for (bj, &(g, q)) in src.iter().enumerate() {
            let p = self.columns[g].context.p;
            if q < self.n {
                if let Some(bi) = tgt.iter().position(|&t| t == (g, q + 1)) {
                    let sign = if p.is_multiple_of(2) { 1 } else { -1 };
                    owned.push((bi, bj, self.columns[g].delta[q].scale(&rational(sign))));
                }
            }
            for (bi, &(h, q2)) in tgt.iter().enumerate() {
                if q2 == q {
                    if let Some(b) = self.blocks.get(&(g, h)) {
                        owned.push((bi, bj, b[q].clone()));
                    }
                }
            }
        }
        RationalSparseMatrix::from_blocks(
            &row_sizes,
            &col_sizes,
            owned.iter().map(|(i, j, m)| (*i, *j, m)),
        )
    }

    /// Checks δ² = 0 in every column, that each block commutes with δ, and
    /// that the total differential squares to zero.
    pub fn check_squares(&self) -> Result<(), GraphComplexError> {
        for c in &self.columns {
            for q in 1..self.n {
                if !c.delta[q].mul(&c.delta[q - 1])?.is_zero() {
                    return Err(GraphComplexError::SquareNonzero(format!(
                        "vertical differential of {} in degree {}",
                        c.context.graph_key,
                        q - 1
                    )));
                }
            }
        }
        for (&(s, t), per_q) in &self.blocks {
            for q in 0..self.n {
                let lhs = per_q[q + 1].mul(&self.columns[s].delta[q])?;
                let rhs = self.columns[t].delta[q].mul(&per_q[q])?;
                if lhs != rhs {
                    return Err(GraphComplexError::SquareNonzero(format!(
                        "block {} -> {} does not commute with the vertical differential in degree {q}",
                        self.columns[s].context.graph_key, self.columns[t].context.graph_key
                    )));
                }
            }
        }
        let range = self.degree_range();
        for k in *range.start()..*range.end() {
            if !self
                .total_differential(k + 1)
                .mul(&self.total_differential(k))?
                .is_zero()
            {
                return Err(GraphComplexError::SquareNonzero(format!(
                    "total differential in degree {k}"
                )));
            }
        }
        Ok(())
    }

    /// Dimensions of total cohomology in every degree.
    pub fn total_cohomology(&self, strategy: RankStrategy) -> BTreeMap<usize, usize> {
        let dims = self.total_dims();
        let range: Vec<usize> = self.degree_range().collect();
        let ranks: BTreeMap<usize, usize> = range
            .par_iter()
            .map(|&k| (k, rank_with(&self.total_differential(k), strategy)))
            .collect();
        range
            .iter()
            .map(|&k| {
                let before = if k > 0 {
                    ranks.get(&(k - 1)).copied().unwrap_or(0)
                } else {
                    0
                };
                (k, dims[&k] - ranks[&k] - before)
            })
            .collect()
    }
}
