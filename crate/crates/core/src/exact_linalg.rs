//! Exact sparse linear algebra over the rationals.
//!
//! Everything here is deterministic: row reductions always pivot on the
//! leftmost available column, so bases produced twice from the same input
//! are identical.

use std::collections::{BTreeMap, HashMap};
use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

pub type Rational = BigRational;

#[derive(Debug, thiserror::Error)]
pub enum LinalgError {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("group average is not idempotent; the matrices do not form a signed action")]
    ActionViolation,
    #[error("image of domain vector {index} escapes the span of the codomain basis")]
    Inconsistent { index: usize },
    #[error("malformed matrix record: {0}")]
    Malformed(String),
}

pub fn rational(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

pub fn format_rational(q: &Rational) -> String {
    format!("{}/{}", q.numer(), q.denom())
}

pub fn parse_rational(s: &str) -> Result<Rational, LinalgError> {
    let bad = || LinalgError::Malformed(format!("bad rational {s:?}"));
    let (n, d) = match s.split_once('/') {
        Some((n, d)) => (n, d),
        None => (s, "1"),
    };
    let n: BigInt = n.trim().parse().map_err(|_| bad())?;
    let d: BigInt = d.trim().parse().map_err(|_| bad())?;
    if d.is_zero() {
        return Err(bad());
    }
    Ok(Rational::new(n, d))
}

/// Sparse vector with sorted indices and no stored zeros.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct SparseVector {
    entries: Vec<(usize, Rational)>,
}

impl SparseVector {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn unit(i: usize) -> Self {
        Self {
            entries: vec![(i, Rational::one())],
        }
    }

    /// Builds a vector from unsorted entries, summing duplicates.
    pub fn from_entries<I: IntoIterator<Item = (usize, Rational)>>(iter: I) -> Self {
        let mut map: BTreeMap<usize, Rational> = BTreeMap::new();
        for (i, v) in iter {
            *map.entry(i).or_insert_with(Rational::zero) += v;
        }
        Self {
            entries: map.into_iter().filter(|(_, v)| !v.is_zero()).collect(),
        }
    }

    pub fn from_ints<I: IntoIterator<Item = (usize, i64)>>(iter: I) -> Self {
        Self::from_entries(iter.into_iter().map(|(i, v)| (i, rational(v))))
    }

    /// Trusts the caller that entries are sorted, unique and nonzero.
    fn from_sorted(entries: Vec<(usize, Rational)>) -> Self {
        debug_assert!(entries.windows(2).all(|w| w[0].0 < w[1].0));
        debug_assert!(entries.iter().all(|(_, v)| !v.is_zero()));
        Self { entries }
    }

    pub fn entries(&self) -> &[(usize, Rational)] {
        &self.entries
    }

    pub fn nnz(&self) -> usize {
        self.entries.len()
    }

    pub fn is_zero(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn get(&self, i: usize) -> Option<&Rational> {
        self.entries
            .binary_search_by_key(&i, |e| e.0)
            .ok()
            .map(|k| &self.entries[k].1)
    }

    pub fn leading(&self) -> Option<(usize, &Rational)> {
        self.entries.first().map(|(i, v)| (*i, v))
    }

    pub fn max_index(&self) -> Option<usize> {
        self.entries.last().map(|e| e.0)
    }

    pub fn scaled(&self, c: &Rational) -> Self {
        if c.is_zero() {
            return Self::new();
        }
        Self::from_sorted(self.entries.iter().map(|(i, v)| (*i, v * c)).collect())
    }

    /// `self + c * other`.
    pub fn add_scaled(&self, c: &Rational, other: &SparseVector) -> Self {
        if c.is_zero() {
            return self.clone();
        }
        let mut out = Vec::with_capacity(self.entries.len() + other.entries.len());
        let (mut a, mut b) = (
            self.entries.iter().peekable(),
            other.entries.iter().peekable(),
        );
        loop {
            match (a.peek(), b.peek()) {
                (Some(&&(i, ref x)), Some(&&(j, ref y))) => {
                    if i < j {
                        out.push((i, x.clone()));
                        a.next();
                    } else if j < i {
                        out.push((j, y * c));
                        b.next();
                    } else {
                        let s = x + y * c;
                        if !s.is_zero() {
                            out.push((i, s));
                        }
                        a.next();
                        b.next();
                    }
                }
                (Some(&&(i, ref x)), None) => {
                    out.push((i, x.clone()));
                    a.next();
                }
                (None, Some(&&(j, ref y))) => {
                    out.push((j, y * c));
                    b.next();
                }
                (None, None) => break,
            }
        }
        Self::from_sorted(out)
    }

    pub fn dot(&self, other: &SparseVector) -> Rational {
        let mut acc = Rational::zero();
        let (mut i, mut j) = (0, 0);
        while i < self.entries.len() && j < other.entries.len() {
            let (a, b) = (self.entries[i].0, other.entries[j].0);
            if a < b {
                i += 1;
            } else if b < a {
                j += 1;
            } else {
                acc += &self.entries[i].1 * &other.entries[j].1;
                i += 1;
                j += 1;
            }
        }
        acc
    }

    pub fn to_dense(&self, len: usize) -> Vec<Rational> {
        let mut out = vec![Rational::zero(); len];
        for (i, v) in &self.entries {
            out[*i] = v.clone();
        }
        out
    }

    /// Reindexes through `map`; entries mapped to `None` are dropped.
    pub fn reindex(&self, map: impl Fn(usize) -> Option<usize>) -> Self {
        Self::from_entries(
            self.entries
                .iter()
                .filter_map(|(i, v)| map(*i).map(|j| (j, v.clone()))),
        )
    }
}

/// Exact sparse matrix stored row-major.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RationalSparseMatrix {
    rows: usize,
    cols: usize,
    data: Vec<SparseVector>,
}

impl RationalSparseMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![SparseVector::new(); rows],
        }
    }

    pub fn identity(n: usize) -> Self {
        Self {
            rows: n,
            cols: n,
            data: (0..n).map(SparseVector::unit).collect(),
        }
    }

    /// Sums duplicate entries. Panics on out-of-range indices.
    pub fn from_triplets<I>(rows: usize, cols: usize, triplets: I) -> Self
    where
        I: IntoIterator<Item = (usize, usize, Rational)>,
    {
        let mut buckets: Vec<Vec<(usize, Rational)>> = vec![Vec::new(); rows];
        for (r, c, v) in triplets {
            assert!(
                r < rows && c < cols,
                "entry ({r},{c}) outside {rows}x{cols}"
            );
            buckets[r].push((c, v));
        }
        Self {
            rows,
            cols,
            data: buckets
                .into_iter()
                .map(SparseVector::from_entries)
                .collect(),
        }
    }

    pub fn from_int_triplets<I>(rows: usize, cols: usize, triplets: I) -> Self
    where
        I: IntoIterator<Item = (usize, usize, i64)>,
    {
        Self::from_triplets(
            rows,
            cols,
            triplets.into_iter().map(|(r, c, v)| (r, c, rational(v))),
        )
    }

    pub fn from_rows(cols: usize, rows: Vec<SparseVector>) -> Self {
        assert!(rows.iter().all(|r| r.max_index().is_none_or(|m| m < cols)));
        Self {
            rows: rows.len(),
            cols,
            data: rows,
        }
    }

    /// Matrix whose columns are the given vectors.
    pub fn from_columns(rows: usize, columns: &[SparseVector]) -> Self {
        let triplets = columns
            .iter()
            .enumerate()
            .flat_map(|(c, v)| v.entries().iter().map(move |(r, x)| (*r, c, x.clone())));
        Self::from_triplets(rows, columns.len(), triplets)
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    pub fn nnz(&self) -> usize {
        self.data.iter().map(SparseVector::nnz).sum()
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(SparseVector::is_zero)
    }

    pub fn row(&self, r: usize) -> &SparseVector {
        &self.data[r]
    }

    pub fn row_vectors(&self) -> &[SparseVector] {
        &self.data
    }

    pub fn get(&self, r: usize, c: usize) -> Rational {
        self.data[r].get(c).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn triplets(&self) -> impl Iterator<Item = (usize, usize, &Rational)> + '_ {
        self.data
            .iter()
            .enumerate()
            .flat_map(|(r, row)| row.entries().iter().map(move |(c, v)| (r, *c, v)))
    }

    pub fn transpose(&self) -> Self {
        let mut buckets: Vec<Vec<(usize, Rational)>> = vec![Vec::new(); self.cols];
        for (r, c, v) in self.triplets() {
            buckets[c].push((r, v.clone()));
        }
        Self {
            rows: self.cols,
            cols: self.rows,
            data: buckets.into_iter().map(SparseVector::from_sorted).collect(),
        }
    }

    pub fn columns(&self) -> Vec<SparseVector> {
        self.transpose().data
    }

    pub fn mul(&self, other: &Self) -> Result<Self, LinalgError> {
        if self.cols != other.rows {
            return Err(LinalgError::DimensionMismatch(format!(
                "{}x{} times {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let data = self
            .data
            .iter()
            .map(|row| {
                let mut acc: BTreeMap<usize, Rational> = BTreeMap::new();
                for (k, a) in row.entries() {
                    for (c, b) in other.data[*k].entries() {
                        *acc.entry(*c).or_insert_with(Rational::zero) += a * b;
                    }
                }
                SparseVector::from_sorted(acc.into_iter().filter(|(_, v)| !v.is_zero()).collect())
            })
            .collect();
        Ok(Self {
            rows: self.rows,
            cols: other.cols,
            data,
        })
    }

    /// `M v` for a column vector `v`.
    pub fn mul_vec(&self, v: &SparseVector) -> SparseVector {
        SparseVector::from_sorted(
            self.data
                .iter()
                .enumerate()
                .filter_map(|(r, row)| {
                    let x = row.dot(v);
                    (!x.is_zero()).then_some((r, x))
                })
                .collect(),
        )
    }

    pub fn add(&self, other: &Self) -> Result<Self, LinalgError> {
        if self.shape() != other.shape() {
            return Err(LinalgError::DimensionMismatch(format!(
                "{:?} plus {:?}",
                self.shape(),
                other.shape()
            )));
        }
        let one = Rational::one();
        let data = self
            .data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| a.add_scaled(&one, b))
            .collect();
        Ok(Self {
            rows: self.rows,
            cols: self.cols,
            data,
        })
    }

    pub fn scale(&self, c: &Rational) -> Self {
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|r| r.scaled(c)).collect(),
        }
    }

    pub fn select_rows(&self, rows: &[usize]) -> Self {
        Self {
            rows: rows.len(),
            cols: self.cols,
            data: rows.iter().map(|&r| self.data[r].clone()).collect(),
        }
    }

    pub fn select_cols(&self, cols: &[usize]) -> Self {
        let mut pos = vec![None; self.cols];
        for (k, &c) in cols.iter().enumerate() {
            pos[c] = Some(k);
        }
        let data = self.data.iter().map(|r| r.reindex(|c| pos[c])).collect();
        Self {
            rows: self.rows,
            cols: cols.len(),
            data,
        }
    }

    /// Assembles a block matrix from blocks placed at (block row, block col).
    pub fn from_blocks<'a, I>(row_sizes: &[usize], col_sizes: &[usize], blocks: I) -> Self
    where
        I: IntoIterator<Item = (usize, usize, &'a RationalSparseMatrix)>,
    {
        let offsets = |sizes: &[usize]| {
            let mut acc = 0;
            sizes
                .iter()
                .map(|s| {
                    let o = acc;
                    acc += s;
                    o
                })
                .collect::<Vec<_>>()
        };
        let (ro, co) = (offsets(row_sizes), offsets(col_sizes));
        let mut triplets = Vec::new();
        for (bi, bj, m) in blocks {
            assert_eq!(
                m.shape(),
                (row_sizes[bi], col_sizes[bj]),
                "block ({bi},{bj}) has wrong shape"
            );
            triplets.extend(
                m.triplets()
                    .map(|(r, c, v)| (ro[bi] + r, co[bj] + c, v.clone())),
            );
        }
        Self::from_triplets(row_sizes.iter().sum(), col_sizes.iter().sum(), triplets)
    }

    pub fn to_record(&self) -> MatrixRecord {
        MatrixRecord {
            rows: self.rows,
            cols: self.cols,
            entries: self
                .triplets()
                .map(|(r, c, v)| (r, c, format_rational(v)))
                .collect(),
        }
    }

    pub fn from_record(rec: &MatrixRecord) -> Result<Self, LinalgError> {
        let mut triplets = Vec::with_capacity(rec.entries.len());
        for (r, c, s) in &rec.entries {
            if *r >= rec.rows || *c >= rec.cols {
                return Err(LinalgError::Malformed(format!(
                    "entry ({r},{c}) out of range"
                )));
            }
            triplets.push((*r, *c, parse_rational(s)?));
        }
        Ok(Self::from_triplets(rec.rows, rec.cols, triplets))
    }
}

impl fmt::Display for RationalSparseMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for r in 0..self.rows {
            let line: Vec<String> = (0..self.cols).map(|c| self.get(r, c).to_string()).collect();
            writeln!(f, "[{}]", line.join(" "))?;
        }
        Ok(())
    }
}

/// COO serialization with rationals written as "p/q".
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MatrixRecord {
    pub rows: usize,
    pub cols: usize,
    pub entries: Vec<(usize, usize, String)>,
}

// ---------------------------------------------------------------------------
// Rank

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub enum RankStrategy {
    /// Fraction-free integer elimination only.
    #[default]
    Exact,
    /// Ranks modulo a few large primes; exact elimination runs when they
    /// disagree or when `certify` is set.
    Modular { certify: bool },
}

const PRIMES: [u64; 3] = [2_147_483_647, 2_147_483_629, 2_147_483_587];

/// Rows scaled to primitive integer vectors (rank is unchanged).
fn integer_rows(m: &RationalSparseMatrix) -> Vec<Vec<(usize, BigInt)>> {
    m.data
        .iter()
        .filter(|r| !r.is_zero())
        .map(|row| {
            let l = row
                .entries()
                .iter()
                .fold(BigInt::one(), |acc, (_, v)| acc.lcm(v.denom()));
            row.entries()
                .iter()
                .map(|(c, v)| (*c, v.numer() * (&l / v.denom())))
                .collect()
        })
        .collect()
}

pub fn rank(m: &RationalSparseMatrix) -> usize {
    let rows = integer_rows(m);
    let small: Option<Vec<Vec<(usize, i64)>>> = rows
        .iter()
        .map(|r| r.iter().map(|(c, v)| v.to_i64().map(|x| (*c, x))).collect())
        .collect();
    if let Some(small) = small {
        if let Some(r) = rank_i64(small) {
            return r;
        }
    }
    rank_bigint(rows)
}

pub fn rank_with(m: &RationalSparseMatrix, strategy: RankStrategy) -> usize {
    match strategy {
        RankStrategy::Exact => rank(m),
        RankStrategy::Modular { certify } => {
            let ranks: Vec<usize> = PRIMES.iter().map(|&p| rank_mod_p(m, p)).collect();
            let agree = ranks.windows(2).all(|w| w[0] == w[1]);
            if certify || !agree {
                let exact = rank(m);
                if exact != ranks[0] {
                    log::debug!("modular rank {} differs from exact rank {exact}", ranks[0]);
                }
                exact
            } else {
                ranks[0]
            }
        }
    }
}

fn sort_for_elimination<T>(rows: &mut [Vec<(usize, T)>]) {
    rows.sort_by_key(|r| (r.first().map(|e| e.0), r.len()));
}

fn rank_i64(mut rows: Vec<Vec<(usize, i64)>>) -> Option<usize> {
    sort_for_elimination(&mut rows);
    let mut pivots: HashMap<usize, usize> = HashMap::new();
    let mut basis: Vec<Vec<(usize, i64)>> = Vec::new();
    for mut r in rows {
        while let Some(&(c, a)) = r.first() {
            match pivots.get(&c) {
                Some(&pi) => r = eliminate_i64(&r, a, &basis[pi])?,
                None => {
                    pivots.insert(c, basis.len());
                    basis.push(r);
                    break;
                }
            }
        }
    }
    Some(basis.len())
}

fn gcd_i64(a: i64, b: i64) -> i64 {
    let (mut a, mut b) = (a.unsigned_abs(), b.unsigned_abs());
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a as i64
}

/// `(b/g) r - (a/g) p` where `a`, `b` are the leading entries of `r`, `p`,
/// followed by content normalization. `None` on overflow.
fn eliminate_i64(r: &[(usize, i64)], a: i64, p: &[(usize, i64)]) -> Option<Vec<(usize, i64)>> {
    let b = p[0].1;
    let g = gcd_i64(a, b);
    let (fr, fp) = (b / g, a / g);
    let mut out = Vec::with_capacity(r.len() + p.len());
    let (mut i, mut j) = (1, 1);
    while i < r.len() || j < p.len() {
        let ci = r.get(i).map_or(usize::MAX, |e| e.0);
        let cj = p.get(j).map_or(usize::MAX, |e| e.0);
        if ci < cj {
            out.push((ci, r[i].1.checked_mul(fr)?));
            i += 1;
        } else if cj < ci {
            out.push((cj, p[j].1.checked_mul(fp)?.checked_neg()?));
            j += 1;
        } else {
            let v = r[i]
                .1
                .checked_mul(fr)?
                .checked_sub(p[j].1.checked_mul(fp)?)?;
            if v != 0 {
                out.push((ci, v));
            }
            i += 1;
            j += 1;
        }
    }
    let content = out.iter().fold(0, |g, e| gcd_i64(g, e.1));
    if content > 1 {
        for e in &mut out {
            e.1 /= content;
        }
    }
    Some(out)
}

fn rank_bigint(mut rows: Vec<Vec<(usize, BigInt)>>) -> usize {
    sort_for_elimination(&mut rows);
    let mut pivots: HashMap<usize, usize> = HashMap::new();
    let mut basis: Vec<Vec<(usize, BigInt)>> = Vec::new();
    for mut r in rows {
        while let Some((c, a)) = r.first().cloned() {
            match pivots.get(&c) {
                Some(&pi) => {
                    let p = &basis[pi];
                    let b = &p[0].1;
                    let g = a.gcd(b);
                    let (fr, fp) = (b / &g, &a / &g);
                    let mut acc: BTreeMap<usize, BigInt> = BTreeMap::new();
                    for (col, v) in r.iter().skip(1) {
                        *acc.entry(*col).or_default() += v * &fr;
                    }
                    for (col, v) in p.iter().skip(1) {
                        *acc.entry(*col).or_default() -= v * &fp;
                    }
                    let mut out: Vec<(usize, BigInt)> =
                        acc.into_iter().filter(|(_, v)| !v.is_zero()).collect();
                    let content = out.iter().fold(BigInt::zero(), |g, e| g.gcd(&e.1));
                    if content > BigInt::one() {
                        for e in &mut out {
                            e.1 /= &content;
                        }
                    }
                    r = out;
                }
                None => {
                    pivots.insert(c, basis.len());
                    basis.push(r);
                    break;
                }
            }
        }
    }
    basis.len()
}

fn mod_inverse(a: u64, p: u64) -> u64 {
    let mut result = 1u64;
    let (mut base, mut exp) = (a % p, p - 2);
    while exp > 0 {
        if exp & 1 == 1 {
            result = result * base % p;
        }
        base = base * base % p;
        exp >>= 1;
    }
    result
}

/// Rank over F_p. Rows whose denominators vanish mod p are scaled to
/// integers first, so this is a lower bound for the rational rank.
pub fn rank_mod_p(m: &RationalSparseMatrix, p: u64) -> usize {
    let pb = BigInt::from(p);
    let mut rows: Vec<Vec<(usize, u64)>> = integer_rows(m)
        .into_iter()
        .map(|r| {
            r.into_iter()
                .filter_map(|(c, v)| {
                    let x = v.mod_floor(&pb).to_u64().expect("residue fits");
                    (x != 0).then_some((c, x))
                })
                .collect::<Vec<_>>()
        })
        .filter(|r| !r.is_empty())
        .collect();
    sort_for_elimination(&mut rows);
    let mut pivots: HashMap<usize, usize> = HashMap::new();
    let mut basis: Vec<Vec<(usize, u64)>> = Vec::new();
    for mut r in rows {
        while let Some(&(c, a)) = r.first() {
            match pivots.get(&c) {
                Some(&pi) => {
                    // pivot rows are monic, so r - a * p clears column c
                    let prow = &basis[pi];
                    let mut out = Vec::with_capacity(r.len() + prow.len());
                    let (mut i, mut j) = (1, 1);
                    while i < r.len() || j < prow.len() {
                        let ci = r.get(i).map_or(usize::MAX, |e| e.0);
                        let cj = prow.get(j).map_or(usize::MAX, |e| e.0);
                        if ci < cj {
                            out.push(r[i]);
                            i += 1;
                        } else if cj < ci {
                            out.push((cj, (p - a * prow[j].1 % p) % p));
                            j += 1;
                        } else {
                            let v = (r[i].1 + p - a * prow[j].1 % p) % p;
                            if v != 0 {
                                out.push((ci, v));
                            }
                            i += 1;
                            j += 1;
                        }
                    }
                    r = out;
                }
                None => {
                    let inv = mod_inverse(a, p);
                    for e in &mut r {
                        e.1 = e.1 * inv % p;
                    }
                    pivots.insert(c, basis.len());
                    basis.push(r);
                    break;
                }
            }
        }
    }
    basis.len()
}

// ---------------------------------------------------------------------------
// Row echelon machinery

/// Incrementally built echelon basis of a subspace of Q^dim.
///
/// Rows are monic at their pivot and have zeros at every earlier pivot
/// column. Each row optionally tracks its expression in the inserted
/// vectors so coordinates with respect to those vectors can be recovered.
#[derive(Clone, Debug)]
pub struct Echelon {
    dim: usize,
    rows: Vec<SparseVector>,
    combos: Vec<SparseVector>,
    pivot_of: HashMap<usize, usize>,
    inserted: usize,
}

impl Echelon {
    pub fn new(dim: usize) -> Self {
        Self {
            dim,
            rows: Vec::new(),
            combos: Vec::new(),
            pivot_of: HashMap::new(),
            inserted: 0,
        }
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn pivots(&self) -> Vec<usize> {
        self.rows
            .iter()
            .map(|r| r.leading().expect("nonzero row").0)
            .collect()
    }

    /// Reduces `v` modulo the span, returning the residual and the
    /// combination of inserted vectors that was subtracted.
    fn reduce_tracked(&self, v: &SparseVector) -> (SparseVector, SparseVector) {
        let mut r = v.clone();
        let mut combo = SparseVector::new();
        let mut start = 0usize;
        loop {
            let hit = r
                .entries()
                .iter()
                .filter(|(c, _)| *c >= start)
                .find_map(|(c, x)| self.pivot_of.get(c).map(|&k| (*c, k, x.clone())));
            let Some((c, k, x)) = hit else { break };
            let neg = -x;
            r = r.add_scaled(&neg, &self.rows[k]);
            combo = combo.add_scaled(&(-&neg), &self.combos[k]);
            start = c + 1;
        }
        (r, combo)
    }

    pub fn reduce(&self, v: &SparseVector) -> SparseVector {
        self.reduce_tracked(v).0
    }

    pub fn contains(&self, v: &SparseVector) -> bool {
        self.reduce(v).is_zero()
    }

    /// Inserts `v`; returns whether the span grew. Every call counts as an
    /// inserted vector for coordinate tracking, even a dependent one.
    pub fn insert(&mut self, v: &SparseVector) -> bool {
        let id = self.inserted;
        self.inserted += 1;
        let (r, combo) = self.reduce_tracked(v);
        let Some((_, lead)) = r.leading() else {
            return false;
        };
        let inv = lead.recip();
        // r = v - combo·inserted, so r/lead = (e_id - combo)/lead
        let row_combo = SparseVector::unit(id)
            .add_scaled(&-Rational::one(), &combo)
            .scaled(&inv);
        let row = r.scaled(&inv);
        self.pivot_of
            .insert(row.leading().expect("nonzero").0, self.rows.len());
        self.rows.push(row);
        self.combos.push(row_combo);
        true
    }

    /// Coordinates of `v` in terms of the inserted vectors, or `None` when
    /// `v` is outside the span.
    pub fn coordinates(&self, v: &SparseVector) -> Option<SparseVector> {
        let (r, combo) = self.reduce_tracked(v);
        r.is_zero().then_some(combo)
    }

    /// Reduced row echelon basis, sorted by pivot.
    pub fn rref(&self) -> Vec<SparseVector> {
        let mut order: Vec<usize> = (0..self.rows.len()).collect();
        order.sort_by_key(|&k| self.rows[k].leading().expect("nonzero").0);
        let mut out: Vec<SparseVector> = order.iter().map(|&k| self.rows[k].clone()).collect();
        for i in (0..out.len()).rev() {
            let p = out[i].leading().expect("nonzero").0;
            for j in 0..i {
                if let Some(x) = out[j].get(p).cloned() {
                    out[j] = out[j].add_scaled(&-x, &out[i]);
                }
            }
        }
        out
    }
}

/// Basis of the null space `{x : M x = 0}`, one vector per free column in
/// increasing order.
pub fn kernel_basis(m: &RationalSparseMatrix) -> Vec<SparseVector> {
    let mut ech = Echelon::new(m.cols());
    for row in m.row_vectors() {
        ech.insert(row);
    }
    let rref = ech.rref();
    let pivots: Vec<usize> = rref
        .iter()
        .map(|r| r.leading().expect("nonzero").0)
        .collect();
    let is_pivot: std::collections::HashSet<usize> = pivots.iter().copied().collect();
    (0..m.cols())
        .filter(|c| !is_pivot.contains(c))
        .map(|f| {
            let mut entries = vec![(f, Rational::one())];
            for (row, &p) in rref.iter().zip(&pivots) {
                if let Some(x) = row.get(f) {
                    entries.push((p, -x));
                }
            }
            SparseVector::from_entries(entries)
        })
        .collect()
}

/// RREF basis of the column space of `M`.
pub fn image_basis(m: &RationalSparseMatrix) -> Vec<SparseVector> {
    let mut ech = Echelon::new(m.rows());
    for col in m.columns() {
        ech.insert(&col);
    }
    ech.rref()
}

/// Matrix of `M` restricted to `span(domain)` in the coordinates of the
/// (linearly independent) `codomain` vectors.
pub fn restrict_map(
    m: &RationalSparseMatrix,
    domain: &[SparseVector],
    codomain: &[SparseVector],
) -> Result<RationalSparseMatrix, LinalgError> {
    let mut ech = Echelon::new(m.rows());
    for v in codomain {
        if !ech.insert(v) {
            return Err(LinalgError::DimensionMismatch(
                "codomain basis is dependent".into(),
            ));
        }
    }
    let mut triplets = Vec::new();
    for (j, v) in domain.iter().enumerate() {
        let image = m.mul_vec(v);
        let coords = ech
            .coordinates(&image)
            .ok_or(LinalgError::Inconsistent { index: j })?;
        triplets.extend(coords.entries().iter().map(|(i, x)| (*i, j, x.clone())));
    }
    Ok(RationalSparseMatrix::from_triplets(
        codomain.len(),
        domain.len(),
        triplets,
    ))
}

/// Signed group average `P = (1/|A|) Σ sign(a) M_a` and an RREF basis of its
/// image.
pub fn reynolds_project(
    action: &[RationalSparseMatrix],
    signs: &[Rational],
) -> Result<(RationalSparseMatrix, Vec<SparseVector>), LinalgError> {
    if action.is_empty() || action.len() != signs.len() {
        return Err(LinalgError::DimensionMismatch(
            "need one sign per group element".into(),
        ));
    }
    let (n, _) = action[0].shape();
    let mut acc = RationalSparseMatrix::zeros(n, n);
    for (m, s) in action.iter().zip(signs) {
        if m.shape() != (n, n) {
            return Err(LinalgError::DimensionMismatch(
                "action matrices must be square".into(),
            ));
        }
        acc = acc.add(&m.scale(s))?;
    }
    let p = acc.scale(&Rational::new(BigInt::one(), BigInt::from(action.len())));
    if p.mul(&p)? != p {
        return Err(LinalgError::ActionViolation);
    }
    let basis = image_basis(&p);
    Ok((p, basis))
}

/// A chosen complement of boundaries inside cocycles at one spot of a
/// complex `C^{q-1} -> C^q -> C^{q+1}`.
#[derive(Clone, Debug)]
pub struct Subquotient {
    boundaries: Echelon,
    classes: Echelon,
    section: Vec<SparseVector>,
}

impl Subquotient {
    /// `incoming` maps into this spot, `outgoing` leaves it; either may be
    /// absent (zero map). `ambient` is the dimension of the spot.
    pub fn new(
        ambient: usize,
        incoming: Option<&RationalSparseMatrix>,
        outgoing: Option<&RationalSparseMatrix>,
    ) -> Self {
        let mut boundaries = Echelon::new(ambient);
        if let Some(d) = incoming {
            for v in image_basis(d) {
                boundaries.insert(&v);
            }
        }
        let cocycles = match outgoing {
            Some(d) => kernel_basis(d),
            None => (0..ambient).map(SparseVector::unit).collect(),
        };
        let mut classes = Echelon::new(ambient);
        let mut section = Vec::new();
        for z in cocycles {
            let r = boundaries.reduce(&z);
            if classes.insert(&r) {
                section.push(r);
            } else {
                // keep coordinates indexed by section position
                classes.inserted -= 1;
            }
        }
        Self {
            boundaries,
            classes,
            section,
        }
    }

    pub fn dim(&self) -> usize {
        self.section.len()
    }

    /// Cocycle representatives of a basis of cohomology.
    pub fn section(&self) -> &[SparseVector] {
        &self.section
    }

    /// Class of a cocycle in section coordinates; `None` if `z` is not a
    /// cocycle of the expected kind.
    pub fn retract(&self, z: &SparseVector) -> Option<SparseVector> {
        self.classes.coordinates(&self.boundaries.reduce(z))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn m(rows: usize, cols: usize, t: &[(usize, usize, i64)]) -> RationalSparseMatrix {
        RationalSparseMatrix::from_int_triplets(rows, cols, t.iter().copied())
    }

    #[test]
    fn rank_basics() {
        assert_eq!(rank(&RationalSparseMatrix::identity(5)), 5);
        assert_eq!(rank(&RationalSparseMatrix::zeros(4, 7)), 0);
        let a = m(
            3,
            3,
            &[(0, 0, 1), (0, 1, 2), (1, 0, 2), (1, 1, 4), (2, 2, 3)],
        );
        assert_eq!(rank(&a), 2);
        assert_eq!(rank_mod_p(&a, 7), 2);
    }

    #[test]
    fn rank_switches_to_bigints_on_overflow() {
        let big = i64::MAX / 3;
        let a = m(
            2,
            2,
            &[
                (0, 0, big),
                (0, 1, big - 1),
                (1, 0, big - 2),
                (1, 1, big - 7),
            ],
        );
        assert_eq!(rank(&a), 2);
        let b = m(
            2,
            2,
            &[
                (0, 0, big),
                (0, 1, big - 1),
                (1, 0, 2 * (big / 2)),
                (1, 1, 2 * ((big - 1) / 2)),
            ],
        );
        assert_eq!(rank(&b), 2);
    }

    #[test]
    fn kernel_of_row_of_ones() {
        let a = m(1, 2, &[(0, 0, 1), (0, 1, 1)]);
        let k = kernel_basis(&a);
        assert_eq!(k, vec![SparseVector::from_ints([(0, -1), (1, 1)])]);
        assert!(kernel_basis(&RationalSparseMatrix::identity(4)).is_empty());
    }

    #[test]
    fn kernel_and_rank_add_up() {
        let a = m(
            3,
            5,
            &[
                (0, 0, 1),
                (0, 3, 2),
                (1, 1, 1),
                (1, 3, -1),
                (2, 0, 2),
                (2, 1, 2),
                (2, 3, 2),
            ],
        );
        let k = kernel_basis(&a);
        assert_eq!(k.len() + rank(&a), 5);
        for v in &k {
            assert!(a.mul_vec(v).is_zero());
        }
    }

    #[test]
    fn image_basis_is_rref() {
        let a = m(3, 2, &[(0, 0, 2), (1, 0, 2), (0, 1, 1), (2, 1, 1)]);
        let b = image_basis(&a);
        assert_eq!(b.len(), 2);
        assert_eq!(b[0].leading().unwrap().0, 0);
        assert_eq!(b[1].leading().unwrap().0, 1);
        assert!(b[0].get(1).is_none());
    }

    #[test]
    fn reynolds_sign_swap() {
        let swap = m(2, 2, &[(0, 1, 1), (1, 0, 1)]);
        let (p, basis) = reynolds_project(
            &[RationalSparseMatrix::identity(2), swap],
            &[rational(1), rational(-1)],
        )
        .unwrap();
        assert_eq!(basis.len(), 1);
        assert_eq!(
            basis[0].scaled(&basis[0].get(0).unwrap().recip()),
            SparseVector::from_ints([(0, 1), (1, -1)])
        );
        assert_eq!(p.mul(&p).unwrap(), p);
        let (q, b) =
            reynolds_project(&[RationalSparseMatrix::identity(3)], &[rational(1)]).unwrap();
        assert_eq!(q, RationalSparseMatrix::identity(3));
        assert_eq!(b.len(), 3);
    }

    #[test]
    fn reynolds_rejects_non_actions() {
        let a = m(2, 2, &[(0, 0, 2)]);
        let err = reynolds_project(
            &[RationalSparseMatrix::identity(2), a],
            &[rational(1), rational(1)],
        );
        assert!(matches!(err, Err(LinalgError::ActionViolation)));
    }

    #[test]
    fn restrict_identity_and_escape() {
        let basis = vec![
            SparseVector::from_ints([(0, 1), (1, 1)]),
            SparseVector::from_ints([(2, 1)]),
        ];
        let r = restrict_map(&RationalSparseMatrix::identity(3), &basis, &basis).unwrap();
        assert_eq!(r, RationalSparseMatrix::identity(2));
        let z = restrict_map(&RationalSparseMatrix::zeros(3, 3), &basis, &basis).unwrap();
        assert!(z.is_zero());
        let proj = m(3, 3, &[(0, 0, 1)]);
        assert!(matches!(
            restrict_map(&proj, &basis, &basis),
            Err(LinalgError::Inconsistent { index: 0 })
        ));
    }

    #[test]
    fn subquotient_of_small_complex() {
        // Q -> Q^2 -> Q with d0 = (1,1)^T and d1 = (1,-1): exact in the middle
        let d0 = m(2, 1, &[(0, 0, 1), (1, 0, 1)]);
        let d1 = m(1, 2, &[(0, 0, 1), (0, 1, -1)]);
        assert_eq!(Subquotient::new(2, Some(&d0), Some(&d1)).dim(), 0);
        let sq = Subquotient::new(2, Some(&d0), None);
        assert_eq!(sq.dim(), 1);
        let c = sq
            .retract(&SparseVector::from_ints([(0, 1), (1, 1)]))
            .unwrap();
        assert!(c.is_zero());
        let c = sq.retract(&sq.section()[0]).unwrap();
        assert_eq!(c, SparseVector::unit(0));
    }

    #[test]
    fn coo_round_trip() {
        let a = RationalSparseMatrix::from_triplets(
            2,
            2,
            [(0, 1, Rational::new(3.into(), (-6).into()))],
        );
        let rec = a.to_record();
        assert_eq!(rec.entries[0].2, "-1/2");
        assert_eq!(RationalSparseMatrix::from_record(&rec).unwrap(), a);
    }
}
