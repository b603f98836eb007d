//! Graph complexes with coefficients in configuration-space cochains: the
//! double complex ⊕_G (C^q(Conf_n(G)) ⊗ det E)^{Aut G}, its total
//! cohomology, and the E1 shortcut for genus at most 3.
//!
//! Everything is computed one Young functional at a time: restricting to
//! vectors on which a Young subgroup S_μ acts by its trivial or sign
//! character computes the functional's value on cohomology, and full
//! characters are solved from those values.

pub mod blocks;
pub mod character;
pub mod e1;
pub mod special;
pub mod term;
pub mod total;

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use log::debug;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::exact_linalg::{LinalgError, RankStrategy, Rational};
use crate::multigraph::{GraphCategory, GraphError};
use crate::sym_rep::{
    choose_functionals, decompose, evaluate_functional, partitions, solve_multiplicities,
    Character, Partition, SymRepError, YoungFunctional,
};

pub use blocks::BlockForm;
pub use character::{configuration_characters, term_character, vertical_cohomology_characters};
pub use e1::{prune, BlockVerdict, E1Page, RowComplex};
pub use special::{special_blocks, special_edge_classify, SpecialEdge};
pub use term::{ComplexTerm, InvariantComplex, TermContext};
pub use total::DoubleComplex;

#[derive(Debug, thiserror::Error)]
pub enum GraphComplexError {
    #[error("differential does not square to zero: {0}")]
    SquareNonzero(String),
    #[error("degeneration violated: {0}")]
    Degeneration(String),
    #[error("pruning failed: {0}")]
    Pruning(String),
    #[error("euler characteristic mismatch: {0}")]
    Euler(String),
    #[error("multiplicity is not a nonnegative integer: {0}")]
    NonIntegral(String),
    #[error("term dimension disagrees with its character: {0}")]
    TermDimension(String),
    #[error("unsupported request: {0}")]
    Unsupported(String),
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error(transparent)]
    Linalg(#[from] LinalgError),
    #[error(transparent)]
    SymRep(#[from] SymRepError),
    #[error(transparent)]
    Conf(#[from] crate::config_complex::ConfError),
}

impl GraphComplexError {
    /// Errors that signal a broken mathematical invariant rather than a
    /// request the program declines.
    pub fn is_invariant_breach(&self) -> bool {
        !matches!(self, Self::Unsupported(_))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Route {
    Total,
    E1,
    E1Pruned,
}

impl fmt::Display for Route {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Route::Total => "total",
            Route::E1 => "e1",
            Route::E1Pruned => "e1-pruned",
        })
    }
}

impl FromStr for Route {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "total" => Ok(Route::Total),
            "e1" => Ok(Route::E1),
            "e1-pruned" => Ok(Route::E1Pruned),
            _ => Err(format!(
                "unknown route {s:?} (expected total, e1 or e1-pruned)"
            )),
        }
    }
}

/// Which irreducible multiplicities to compute.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum IsotypicScope {
    All,
    Trivial,
    Sign,
    Explicit(Vec<Partition>),
}

impl IsotypicScope {
    pub fn targets(&self, n: usize) -> Vec<Partition> {
        match self {
            IsotypicScope::All => partitions(n),
            IsotypicScope::Trivial => vec![Partition::row(n)],
            IsotypicScope::Sign => vec![Partition::column(n)],
            IsotypicScope::Explicit(l) => l.clone(),
        }
    }

    pub fn functionals(&self, n: usize) -> Vec<YoungFunctional> {
        match self {
            IsotypicScope::Trivial => vec![YoungFunctional::trivial(n)],
            IsotypicScope::Sign => vec![YoungFunctional::sign(n)],
            _ => choose_functionals(n, &self.targets(n)),
        }
    }
}

impl fmt::Display for IsotypicScope {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            IsotypicScope::All => f.write_str("all"),
            IsotypicScope::Trivial => f.write_str("trivial"),
            IsotypicScope::Sign => f.write_str("sign"),
            IsotypicScope::Explicit(l) => {
                let parts: Vec<String> = l.iter().map(|p| p.to_string()).collect();
                f.write_str(&parts.join(";"))
            }
        }
    }
}

impl FromStr for IsotypicScope {
    type Err = String;

    /// `all`, `trivial`, `sign`, or partitions separated by `;` such as
    /// `2,2;3,1` (parentheses optional).
    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "all" => return Ok(IsotypicScope::All),
            "trivial" => return Ok(IsotypicScope::Trivial),
            "sign" => return Ok(IsotypicScope::Sign),
            _ => {}
        }
        let mut out = Vec::new();
        for chunk in s.split(';').map(str::trim).filter(|c| !c.is_empty()) {
            let inner = chunk.trim_start_matches('(').trim_end_matches(')');
            let parts: Result<Vec<usize>, _> = inner
                .split(',')
                .map(|x| x.trim().parse::<usize>())
                .collect();
            let parts = parts.map_err(|_| format!("cannot parse partition {chunk:?}"))?;
            if parts.is_empty() || parts.contains(&0) || parts.windows(2).any(|w| w[0] < w[1]) {
                return Err(format!(
                    "{chunk:?} is not a partition (parts must be positive and weakly decreasing)"
                ));
            }
            out.push(Partition::new(parts));
        }
        if out.is_empty() {
            return Err(format!("unknown isotypic scope {s:?}"));
        }
        let n = out[0].size();
        if out.iter().any(|p| p.size() != n) {
            return Err("partitions in an explicit scope must have the same size".into());
        }
        Ok(IsotypicScope::Explicit(out))
    }
}

#[derive(Clone, Debug)]
pub struct ComputeOptions {
    pub route: Route,
    pub scope: IsotypicScope,
    pub rank: RankStrategy,
    pub block_form: BlockForm,
    /// Verify d² = 0 and block commutation on the assembled complex.
    pub check_squares: bool,
}

impl Default for ComputeOptions {
    fn default() -> Self {
        Self {
            route: Route::E1Pruned,
            scope: IsotypicScope::All,
            rank: RankStrategy::Exact,
            block_form: BlockForm::OrbitGrouped,
            check_squares: true,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Multiplicity {
    pub partition: Partition,
    pub mult: i64,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GraphCohomologyEntry {
    pub p: usize,
    pub q: usize,
    pub characters: Vec<Multiplicity>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct HgcDegree {
    pub degree: usize,
    pub i: i64,
    pub m: i64,
    #[serde(rename = "N")]
    pub big_n: i64,
    pub t: i64,
    pub d: usize,
}

/// Decomposed characters of H̃^k(Δ_{g,n}) with provenance.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ResultTable {
    pub g: usize,
    pub n: usize,
    /// Nonzero multiplicities per cohomological degree k.
    pub degrees: BTreeMap<usize, Vec<Multiplicity>>,
    pub route: Route,
    pub pruning: bool,
    pub scope: String,
    pub functionals: Vec<String>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub graph_cohomology: Vec<GraphCohomologyEntry>,
    pub euler_check: String,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub hgc: Vec<HgcDegree>,
}

impl ResultTable {
    pub fn multiplicity(&self, k: usize, lambda: &Partition) -> i64 {
        self.degrees
            .get(&k)
            .and_then(|v| v.iter().find(|m| &m.partition == lambda))
            .map_or(0, |m| m.mult)
    }

    /// Top degree 3g − 4 + n of Δ_{g,n}; rows are indexed by i = top − k.
    pub fn top_degree(&self) -> usize {
        3 * self.g + self.n - 4
    }

    pub fn i_index(&self, k: usize) -> i64 {
        self.top_degree() as i64 - k as i64
    }

    /// Same cohomology, ignoring provenance.
    pub fn same_cohomology(&self, other: &ResultTable) -> bool {
        self.g == other.g && self.n == other.n && self.degrees == other.degrees
    }

    /// Human-readable rows in the (n, i) convention.
    pub fn to_table(&self) -> String {
        let mut out = format!(
            "g={} n={} route={} scope={} euler={}\n{:>3} {:>4} {:>6}  {}\n",
            self.g, self.n, self.route, self.scope, self.euler_check, "i", "k", "H_c", "character"
        );
        for k in (0..=self.top_degree()).rev() {
            let Some(ms) = self.degrees.get(&k) else {
                continue;
            };
            out.push_str(&format!(
                "{:>3} {:>4} {:>6}  {}\n",
                self.i_index(k),
                k,
                k + 1,
                format_character(ms)
            ));
        }
        if self.degrees.is_empty() {
            out.push_str("  (all degrees vanish)\n");
        }
        for h in &self.hgc {
            out.push_str(&format!(
                "  i={} matches hairy graph homology H_{}(HGC_{{{},{}}}) in loop order {}, excess {}\n",
                h.i, h.t, h.m, h.big_n, self.g, h.d
            ));
        }
        out
    }
}

/// `2V(3,1) + V(4)`, or `0` when empty.
pub fn format_character(ms: &[Multiplicity]) -> String {
    if ms.is_empty() {
        return "0".into();
    }
    ms.iter()
        .map(|m| {
            if m.mult == 1 {
                format!("V{}", m.partition)
            } else {
                format!("{}V{}", m.mult, m.partition)
            }
        })
        .collect::<Vec<_>>()
        .join(" + ")
}

/// Degree t of the hairy graph homology class matching row i, for
/// m odd and N even (trivial column) or both even (sign column).
pub fn hgc_degree(
    g: usize,
    n: usize,
    i: i64,
    m: i64,
    big_n: i64,
) -> Result<(i64, usize), GraphComplexError> {
    if big_n % 2 != 0 {
        return Err(GraphComplexError::Unsupported(format!(
            "hairy graph annotation needs N even (got m={m}, N={big_n})"
        )));
    }
    let (g, n) = (g as i64, n as i64);
    let t = -m * n + (i + n) * (big_n - 1) - (i - g + 1) * big_n;
    Ok((t, (3 * g - 3 + n) as usize))
}

struct FunctionalOutcome {
    total: BTreeMap<usize, usize>,
    graph_cohomology: BTreeMap<(usize, usize), usize>,
}

fn run_functional(
    cat: &GraphCategory,
    f: &YoungFunctional,
    opts: &ComputeOptions,
    term_chars: &BTreeMap<(usize, usize), Character>,
    specials: &[(usize, usize, usize, BlockVerdict)],
) -> Result<FunctionalOutcome, GraphComplexError> {
    let dc = DoubleComplex::assemble(cat, f, opts.block_form);
    debug!("assembled {f}: total dims {:?}", dc.total_dims());
    for (g, col) in dc.columns.iter().enumerate() {
        for (q, term) in col.terms.iter().enumerate() {
            let mults = decompose(&term_chars[&(g, q)]).multiplicities;
            let expected = evaluate_functional(f, &mults);
            if expected != Rational::from_integer(term.dim().into()) {
                return Err(GraphComplexError::TermDimension(format!(
                    "{} q={q} under {f}: {} orbit vectors, character predicts {expected}",
                    col.context.graph_key,
                    term.dim()
                )));
            }
        }
    }
    if opts.check_squares {
        dc.check_squares()?;
    }
    match opts.route {
        Route::Total => Ok(FunctionalOutcome {
            total: dc.total_cohomology(opts.rank),
            graph_cohomology: BTreeMap::new(),
        }),
        Route::E1 | Route::E1Pruned => {
            let page = E1Page::build(&dc)?;
            let mut gh = BTreeMap::new();
            for (&q, row) in &page.rows {
                let row = if opts.route == Route::E1Pruned {
                    prune(row, specials)?
                } else {
                    row.clone()
                };
                for (p, d) in row.cohomology(opts.rank) {
                    gh.insert((p, q), d);
                }
            }
            let total = assemble_from_rows(cat.genus, &gh)?;
            Ok(FunctionalOutcome {
                total,
                graph_cohomology: gh,
            })
        }
    }
}

/// Total cohomology from the rows of the E1 page. For genus 3 the column
/// p = 3 must vanish, which leaves no room for higher differentials.
pub fn assemble_from_rows(
    genus: usize,
    gh: &BTreeMap<(usize, usize), usize>,
) -> Result<BTreeMap<usize, usize>, GraphComplexError> {
    if genus == 3 {
        for (&(p, q), &d) in gh {
            if p == 3 && d != 0 {
                return Err(GraphComplexError::Degeneration(format!(
                    "GH^{{3,{q}}} has dimension {d}"
                )));
            }
        }
    }
    if genus > 3 {
        return Err(GraphComplexError::Unsupported(format!(
            "the E1 shortcut is only justified for genus <= 3 (got {genus}); use the total route"
        )));
    }
    let mut out: BTreeMap<usize, usize> = BTreeMap::new();
    for (&(p, q), &d) in gh {
        *out.entry(p + q).or_default() += d;
    }
    Ok(out)
}

fn to_multiplicities(
    what: &str,
    functionals: &[YoungFunctional],
    values: &[i64],
    targets: &[Partition],
) -> Result<Vec<Multiplicity>, GraphComplexError> {
    let solved = solve_multiplicities(functionals, values, targets)?;
    let mut out = Vec::new();
    for (lambda, m) in solved {
        if !m.is_integer() || m < Rational::from_integer(0.into()) {
            return Err(GraphComplexError::NonIntegral(format!(
                "{what}: multiplicity of V{lambda} is {m}"
            )));
        }
        let m: i64 = m
            .to_integer()
            .try_into()
            .map_err(|_| GraphComplexError::NonIntegral(format!("{what}: overflow")))?;
        if m != 0 {
            out.push(Multiplicity {
                partition: lambda,
                mult: m,
            });
        }
    }
    Ok(out)
}

/// Characters of every term C^{p,q}, keyed by (graph index, q).
pub fn term_characters(cat: &GraphCategory, n: usize) -> BTreeMap<(usize, usize), Character> {
    let spots: Vec<(usize, usize)> = (0..cat.representatives.len())
        .flat_map(|g| (0..=n).map(move |q| (g, q)))
        .collect();
    spots
        .par_iter()
        .map(|&(g, q)| ((g, q), term_character(&cat.representatives[g], n, q)))
        .collect()
}

/// H̃^*(Δ_{g,n}) restricted to the requested irreducibles.
pub fn compute(
    cat: &GraphCategory,
    n: usize,
    opts: &ComputeOptions,
) -> Result<ResultTable, GraphComplexError> {
    let g = cat.genus;
    if opts.route != Route::Total && g > 3 {
        return Err(GraphComplexError::Unsupported(format!(
            "route {} requires g <= 3; use --route total for genus {g}",
            opts.route
        )));
    }
    if !cat.two_connected {
        return Err(GraphComplexError::Unsupported(
            "graph complexes use the 2-connected category".into(),
        ));
    }
    let targets = opts.scope.targets(n);
    if targets.iter().any(|t| t.size() != n) {
        return Err(GraphComplexError::Unsupported(format!(
            "isotypic scope {} does not match n={n}",
            opts.scope
        )));
    }
    let functionals = opts.scope.functionals(n);
    let term_chars = term_characters(cat, n);
    let specials = if opts.route == Route::E1Pruned {
        special_blocks(cat)?
    } else {
        Vec::new()
    };
    let outcomes: Vec<FunctionalOutcome> = functionals
        .par_iter()
        .map(|f| run_functional(cat, f, opts, &term_chars, &specials))
        .collect::<Result<_, _>>()?;

    let mut degrees = BTreeMap::new();
    let all_k: std::collections::BTreeSet<usize> = outcomes
        .iter()
        .flat_map(|o| o.total.keys().copied())
        .collect();
    for &k in &all_k {
        let values: Vec<i64> = outcomes
            .iter()
            .map(|o| o.total.get(&k).copied().unwrap_or(0) as i64)
            .collect();
        let ms = to_multiplicities(&format!("degree {k}"), &functionals, &values, &targets)?;
        if !ms.is_empty() {
            degrees.insert(k, ms);
        }
    }
    let mut graph_cohomology = Vec::new();
    let spots: std::collections::BTreeSet<(usize, usize)> = outcomes
        .iter()
        .flat_map(|o| o.graph_cohomology.keys().copied())
        .collect();
    for &(p, q) in &spots {
        let values: Vec<i64> = outcomes
            .iter()
            .map(|o| o.graph_cohomology.get(&(p, q)).copied().unwrap_or(0) as i64)
            .collect();
        let characters =
            to_multiplicities(&format!("GH^{{{p},{q}}}"), &functionals, &values, &targets)?;
        graph_cohomology.push(GraphCohomologyEntry { p, q, characters });
    }

    // Euler consistency on the targets
    for lambda in &targets {
        let mut expected = Rational::from_integer(0.into());
        for (&(gi, q), chi) in &term_chars {
            let p = cat.representatives[gi].p();
            let m = decompose(chi)
                .multiplicities
                .get(lambda)
                .cloned()
                .unwrap_or_default();
            if (p + q).is_multiple_of(2) {
                expected += m;
            } else {
                expected -= m;
            }
        }
        let actual: i64 = degrees
            .iter()
            .map(|(&k, ms)| {
                let m = ms
                    .iter()
                    .find(|m| &m.partition == lambda)
                    .map_or(0, |m| m.mult);
                if k % 2 == 0 {
                    m
                } else {
                    -m
                }
            })
            .sum();
        if expected != Rational::from_integer(actual.into()) {
            return Err(GraphComplexError::Euler(format!(
                "V{lambda}: cohomology gives {actual}, terms give {expected}"
            )));
        }
    }

    Ok(ResultTable {
        g,
        n,
        degrees,
        route: opts.route,
        pruning: opts.route == Route::E1Pruned,
        scope: opts.scope.to_string(),
        functionals: functionals.iter().map(|f| f.to_string()).collect(),
        graph_cohomology,
        euler_check: "pass".into(),
        hgc: Vec::new(),
    })
}

/// Adds hairy graph degree annotations for every nonzero degree.
pub fn annotate_hgc(table: &mut ResultTable, m: i64, big_n: i64) -> Result<(), GraphComplexError> {
    // reject bad parameters even when every degree vanishes
    hgc_degree(table.g, table.n, 0, m, big_n)?;
    let mut out = Vec::new();
    for &k in table.degrees.keys() {
        let i = table.i_index(k);
        let (t, d) = hgc_degree(table.g, table.n, i, m, big_n)?;
        out.push(HgcDegree {
            degree: k,
            i,
            m,
            big_n,
            t,
            d,
        });
    }
    table.hgc = out;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn scope_parsing() {
        assert_eq!("all".parse::<IsotypicScope>().unwrap(), IsotypicScope::All);
        let s: IsotypicScope = "(2,2);3,1".parse().unwrap();
        assert_eq!(
            s,
            IsotypicScope::Explicit(vec![Partition::new(vec![2, 2]), Partition::new(vec![3, 1])])
        );
        assert!("2,3".parse::<IsotypicScope>().is_err());
        assert!("2,2;3".parse::<IsotypicScope>().is_err());
        assert_eq!(s.to_string().parse::<IsotypicScope>().unwrap(), s);
    }

    #[test]
    fn route_round_trip() {
        for r in [Route::Total, Route::E1, Route::E1Pruned] {
            assert_eq!(r.to_string().parse::<Route>().unwrap(), r);
            assert_eq!(serde_json::to_string(&r).unwrap(), format!("\"{r}\""));
        }
    }

    #[test]
    fn hgc_formula() {
        // i = g, n = 0 gives g(N-1) - N
        for (m, big_n) in [(1, 2), (3, 4), (2, 2), (4, 6)] {
            assert_eq!(
                hgc_degree(3, 0, 3, m, big_n).unwrap().0,
                3 * (big_n - 1) - big_n
            );
        }
        // slope -1 in i
        let a = hgc_degree(3, 8, 2, 1, 2).unwrap().0;
        let b = hgc_degree(3, 8, 3, 1, 2).unwrap().0;
        assert_eq!(b - a, -1);
        assert_eq!(hgc_degree(3, 8, 2, 1, 2).unwrap().1, 14);
        assert!(hgc_degree(3, 8, 2, 1, 3).is_err());
        assert!(hgc_degree(3, 8, 2, 2, 3).is_err());
    }
}
