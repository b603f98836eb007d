//! Orchestration behind the command-line tool: census, configuration-space
//! reports, cached cohomology jobs and verification against golden data.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::str::FromStr;

use log::{info, warn};
use serde::{Deserialize, Serialize};

use crate::cache::{Cache, CacheError};
use crate::config_complex::{build_cc, cohomology, ConfError};
use crate::exact_linalg::RankStrategy;
use crate::golden::{self, GoldenError, Mismatch};
use crate::graph_complex::{
    compute, configuration_characters, format_character, ComputeOptions, GraphComplexError,
    IsotypicScope, Multiplicity, ResultTable, Route,
};
use crate::multigraph::{
    enumerate_category, named, weighted_stable_census, GraphCategory, GraphError,
};
use crate::sym_rep::{decompose, Twist};

pub const EXIT_OK: i32 = 0;
pub const EXIT_GOLDEN_MISMATCH: i32 = 1;
pub const EXIT_BAD_ARGUMENTS: i32 = 2;
pub const EXIT_INVARIANT_BREACH: i32 = 3;
pub const EXIT_CACHE_CORRUPTION: i32 = 4;

#[derive(Debug, thiserror::Error)]
pub enum PipelineError {
    #[error("{0}")]
    BadArguments(String),
    #[error(transparent)]
    Compute(#[from] GraphComplexError),
    #[error(transparent)]
    Conf(#[from] ConfError),
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error(transparent)]
    Cache(#[from] CacheError),
    #[error(transparent)]
    Golden(#[from] GoldenError),
    #[error("invariant breach: {0}")]
    Invariant(String),
}

impl PipelineError {
    pub fn exit_code(&self) -> i32 {
        match self {
            PipelineError::BadArguments(_) => EXIT_BAD_ARGUMENTS,
            PipelineError::Compute(e) if !e.is_invariant_breach() => EXIT_BAD_ARGUMENTS,
            PipelineError::Graph(GraphError::UnsupportedGenus(_)) => EXIT_BAD_ARGUMENTS,
            PipelineError::Cache(_) | PipelineError::Golden(_) => EXIT_CACHE_CORRUPTION,
            _ => EXIT_INVARIANT_BREACH,
        }
    }
}

/// Largest n run without `--force`, by scope. Cell counts grow like
/// n!·g^n, so these keep default runs within minutes.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Limits {
    pub max_n_all: usize,
    pub max_n_isotypic: usize,
    pub max_n_conf: usize,
    pub max_n_genus_four: usize,
    pub max_genus: usize,
}

impl Default for Limits {
    fn default() -> Self {
        Self {
            max_n_all: 6,
            max_n_isotypic: 13,
            max_n_conf: 4,
            max_n_genus_four: 2,
            max_genus: 4,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct JobSpec {
    pub g: usize,
    pub ns: Vec<usize>,
    pub route: Route,
    pub scope: IsotypicScope,
    pub certify: bool,
    pub force: bool,
}

impl JobSpec {
    pub fn rank_strategy(&self) -> RankStrategy {
        RankStrategy::Modular {
            certify: self.certify,
        }
    }

    pub fn validate(&self, limits: &Limits) -> Result<(), PipelineError> {
        let bad = |m: String| Err(PipelineError::BadArguments(m));
        if self.g < 2 {
            return bad(format!("genus must be at least 2 (got {})", self.g));
        }
        if self.route != Route::Total && self.g > 3 {
            return bad(format!(
                "route {} requires g <= 3; use --route total",
                self.route
            ));
        }
        if self.ns.is_empty() {
            return bad("no n requested".into());
        }
        if let IsotypicScope::Explicit(list) = &self.scope {
            if self.ns.iter().any(|&n| list.iter().any(|p| p.size() != n)) {
                return bad("explicit partitions must have size n".into());
            }
        }
        if self.force {
            return Ok(());
        }
        if self.g > limits.max_genus {
            return bad(format!(
                "genus {} exceeds the feasibility limit {}; pass --force",
                self.g, limits.max_genus
            ));
        }
        let max_n = match (&self.scope, self.g) {
            (_, g) if g >= 4 => limits.max_n_genus_four,
            (IsotypicScope::Trivial | IsotypicScope::Sign, _) => limits.max_n_isotypic,
            _ => limits.max_n_all,
        };
        if let Some(&n) = self.ns.iter().find(|&&n| n > max_n) {
            return bad(format!(
                "n={n} exceeds the feasibility limit {max_n} for g={} with scope {}; pass --force",
                self.g, self.scope
            ));
        }
        Ok(())
    }
}

/// Parses `5`, `1..5`, `1..=5` or `1-5`.
pub fn parse_n_range(s: &str) -> Result<Vec<usize>, String> {
    let s = s.trim();
    let parse = |x: &str| {
        x.trim()
            .parse::<usize>()
            .map_err(|_| format!("cannot parse {x:?} as n"))
    };
    for sep in ["..=", "..", "-"] {
        if let Some((a, b)) = s.split_once(sep) {
            let (a, b) = (parse(a)?, parse(b)?);
            if a > b {
                return Err(format!("empty range {s}"));
            }
            return Ok((a..=b).collect());
        }
    }
    Ok(vec![parse(s)?])
}

pub fn category(g: usize, two_connected: bool) -> Result<GraphCategory, PipelineError> {
    Ok(enumerate_category(g, two_connected)?)
}

// ---------------------------------------------------------------------------
// census

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CensusGraph {
    pub key: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    pub vertices: usize,
    pub edges: usize,
    pub aut_order: usize,
    /// (representative edge, orbit size, target key)
    pub a_edge_orbits: Vec<(usize, usize, String)>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CensusReport {
    pub genus: usize,
    pub two_connected: bool,
    pub classes: usize,
    pub by_edges: BTreeMap<usize, usize>,
    pub graphs: Vec<CensusGraph>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub weighted_stable: Option<usize>,
}

pub fn cmd_census(g: usize, two_connected: bool) -> Result<CensusReport, PipelineError> {
    if g < 2 {
        return Err(PipelineError::BadArguments(format!(
            "genus must be at least 2 (got {g})"
        )));
    }
    let cat = category(g, two_connected)?;
    let graphs = cat
        .representatives
        .iter()
        .map(|r| CensusGraph {
            key: r.key.clone(),
            name: r.name().map(str::to_string),
            vertices: r.graph.num_vertices(),
            edges: r.graph.num_edges(),
            aut_order: r.aut_order(),
            a_edge_orbits: r
                .a_edge_orbits
                .iter()
                .map(|o| {
                    (
                        o.representative,
                        o.members.len(),
                        cat.representatives[o.target].key.clone(),
                    )
                })
                .collect(),
        })
        .collect();
    let weighted_stable = if two_connected {
        None
    } else {
        Some(weighted_stable_census(g)?)
    };
    Ok(CensusReport {
        genus: g,
        two_connected,
        classes: cat.representatives.len(),
        by_edges: cat.counts_by_edges(),
        graphs,
        weighted_stable,
    })
}

impl CensusReport {
    pub fn to_table(&self) -> String {
        let mut out = format!(
            "genus {} ({}): {} classes\n",
            self.genus,
            if self.two_connected {
                "2-connected"
            } else {
                "all stable, unweighted"
            },
            self.classes
        );
        if let Some(w) = self.weighted_stable {
            let _ = writeln!(out, "stable graphs with vertex weights: {w}");
        }
        let _ = writeln!(
            out,
            "{:<18} {:>3} {:>3} {:>5}  contractions",
            "class", "V", "E", "|Aut|"
        );
        for gr in &self.graphs {
            let label = match &gr.name {
                Some(n) => format!("{} {n}", gr.key),
                None => gr.key.clone(),
            };
            let arrows: Vec<String> = gr
                .a_edge_orbits
                .iter()
                .map(|(e, size, t)| format!("e{e}x{size}->{t}"))
                .collect();
            let _ = writeln!(
                out,
                "{label:<18} {:>3} {:>3} {:>5}  {}",
                gr.vertices,
                gr.edges,
                gr.aut_order,
                arrows.join(" ")
            );
        }
        out
    }
}

// ---------------------------------------------------------------------------
// configuration spaces

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConfReport {
    pub graph: String,
    pub n: usize,
    pub cell_counts: Vec<usize>,
    pub euler_characteristic: i64,
    /// dim H_c^q for q = n-1 and n (the only nonzero degrees).
    pub dims: BTreeMap<usize, usize>,
    pub characters: BTreeMap<usize, Vec<Multiplicity>>,
}

pub fn cmd_conf(
    g: usize,
    n: usize,
    graph: Option<&str>,
    cache: &Cache,
    limits: &Limits,
    force: bool,
) -> Result<Vec<ConfReport>, PipelineError> {
    if n > limits.max_n_conf && !force {
        return Err(PipelineError::BadArguments(format!(
            "n={n} exceeds the configuration-space limit {}; pass --force",
            limits.max_n_conf
        )));
    }
    if g < 2 || (g > limits.max_genus && !force) {
        return Err(PipelineError::BadArguments(format!(
            "unsupported genus {g}"
        )));
    }
    let cat = category(g, true)?;
    let chosen: Vec<usize> = match graph {
        Some(name) => {
            let idx = match named::by_name(name) {
                Some(gr) => cat.index_of(&gr),
                None => cat.by_name(name),
            };
            vec![idx.ok_or_else(|| {
                PipelineError::BadArguments(format!("no genus-{g} graph named {name:?}"))
            })?]
        }
        None => (0..cat.representatives.len()).collect(),
    };
    chosen
        .into_iter()
        .map(|i| {
            let cg = &cat.representatives[i];
            let request = ("conf", hex::encode(cg.graph.encode()), n);
            cache.get_or_compute("conf", &request, false, || {
                conf_report(&cg.label(), &cg.graph, n)
            })
        })
        .collect()
}

fn conf_report(
    label: &str,
    graph: &crate::multigraph::HalfEdgeGraph,
    n: usize,
) -> Result<ConfReport, PipelineError> {
    let cc = build_cc(graph, n);
    let coh = cohomology(&cc)?;
    let (lower, top) = coh.dims();
    let mut dims = BTreeMap::new();
    if n > 0 {
        dims.insert(n - 1, lower);
    }
    dims.insert(n, top);
    let alternating: i64 = dims
        .iter()
        .map(|(&q, &d)| if q % 2 == 0 { d as i64 } else { -(d as i64) })
        .sum();
    if alternating != cc.euler_characteristic() {
        return Err(PipelineError::Invariant(format!(
            "{label}, n={n}: cohomology gives Euler characteristic {alternating}, cells give {}",
            cc.euler_characteristic()
        )));
    }
    let chars = configuration_characters(&cc);
    let mut characters = BTreeMap::new();
    for &q in dims.keys() {
        let dec = decompose(&chars[q]);
        let mults = dec
            .integer_multiplicities()
            .filter(|_| dec.is_genuine())
            .ok_or_else(|| {
                PipelineError::Invariant(format!(
                    "{label}, n={n}: H_c^{q} character is not genuine"
                ))
            })?;
        characters.insert(
            q,
            mults
                .into_iter()
                .map(|(partition, mult)| Multiplicity { partition, mult })
                .collect(),
        );
    }
    Ok(ConfReport {
        graph: label.to_string(),
        n,
        cell_counts: cc.dims(),
        euler_characteristic: cc.euler_characteristic(),
        dims,
        characters,
    })
}

impl ConfReport {
    pub fn to_table(&self) -> String {
        let mut out = format!(
            "{} n={}: cells {:?}, euler characteristic {}\n",
            self.graph, self.n, self.cell_counts, self.euler_characteristic
        );
        for (q, d) in &self.dims {
            let _ = writeln!(
                out,
                "  H_c^{q}: dim {d} = {}",
                format_character(&self.characters[q])
            );
        }
        out
    }
}

// ---------------------------------------------------------------------------
// cohomology

#[derive(Serialize)]
struct ResultRequest<'a> {
    g: usize,
    n: usize,
    route: Route,
    scope: &'a IsotypicScope,
    certified: bool,
}

pub fn cmd_compute(
    job: &JobSpec,
    cache: &Cache,
    limits: &Limits,
) -> Result<Vec<ResultTable>, PipelineError> {
    job.validate(limits)?;
    if job.g >= 4 {
        warn!(
            "no reference values exist for genus {}; results are covered by internal checks only",
            job.g
        );
    }
    let cat = category(job.g, true)?;
    job.ns
        .iter()
        .map(|&n| {
            let request = ResultRequest {
                g: job.g,
                n,
                route: job.route,
                scope: &job.scope,
                certified: job.certify,
            };
            cache.get_or_compute("result", &request, false, || {
                info!(
                    "computing g={} n={n} route={} scope={}",
                    job.g, job.route, job.scope
                );
                let opts = ComputeOptions {
                    route: job.route,
                    scope: job.scope.clone(),
                    rank: job.rank_strategy(),
                    ..Default::default()
                };
                Ok::<_, PipelineError>(compute(&cat, n, &opts)?)
            })
        })
        .collect()
}

// ---------------------------------------------------------------------------
// verification

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum VerifyScope {
    Census,
    Full { max_n: usize },
    Trivial { max_n: usize },
    Sign { max_n: usize },
}

impl FromStr for VerifyScope {
    type Err = String;

    /// `census`, `g3-full-n<=N`, `g3-trivial-n<=N` or `g3-sign-n<=N`.
    fn from_str(s: &str) -> Result<Self, String> {
        if s == "census" {
            return Ok(VerifyScope::Census);
        }
        let s2 = s.replace('≤', "<=");
        let rest = s2
            .strip_prefix("g3-")
            .ok_or_else(|| format!("unknown verify scope {s:?}"))?;
        let (kind, bound) = rest
            .split_once("-n<=")
            .ok_or_else(|| format!("unknown verify scope {s:?}"))?;
        let max_n: usize = bound
            .parse()
            .map_err(|_| format!("cannot parse bound in {s:?}"))?;
        if max_n == 0 {
            return Err("bound must be at least 1".into());
        }
        match kind {
            "full" => Ok(VerifyScope::Full { max_n }),
            "trivial" => Ok(VerifyScope::Trivial { max_n }),
            "sign" => Ok(VerifyScope::Sign { max_n }),
            _ => Err(format!("unknown verify scope {s:?}")),
        }
    }
}

impl std::fmt::Display for VerifyScope {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            VerifyScope::Census => write!(f, "census"),
            VerifyScope::Full { max_n } => write!(f, "g3-full-n<={max_n}"),
            VerifyScope::Trivial { max_n } => write!(f, "g3-trivial-n<={max_n}"),
            VerifyScope::Sign { max_n } => write!(f, "g3-sign-n<={max_n}"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct VerifyCheck {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct VerifyReport {
    pub scope: String,
    pub passed: bool,
    pub checks: Vec<VerifyCheck>,
    pub mismatches: Vec<Mismatch>,
}

impl VerifyReport {
    pub fn to_table(&self) -> String {
        let mut out = format!(
            "verify {}: {}\n",
            self.scope,
            if self.passed { "PASS" } else { "FAIL" }
        );
        for c in &self.checks {
            let _ = writeln!(
                out,
                "  [{}] {} {}",
                if c.passed { "ok" } else { "FAIL" },
                c.name,
                c.detail
            );
        }
        for m in &self.mismatches {
            let _ = writeln!(
                out,
                "  mismatch n={} i={} V{}: expected {}, computed {}",
                m.n, m.i, m.partition, m.expected, m.computed
            );
        }
        out
    }
}

pub fn cmd_verify(
    scope: &VerifyScope,
    route: Route,
    certify: bool,
    force: bool,
    cache: &Cache,
    limits: &Limits,
) -> Result<VerifyReport, PipelineError> {
    let golden = golden::load()?;
    let mut checks = Vec::new();
    let mut mismatches = Vec::new();
    match scope {
        VerifyScope::Census => {
            for (g, &expected) in &golden.census.two_connected {
                let g: usize = g
                    .parse()
                    .map_err(|_| PipelineError::Invariant("golden census key".into()))?;
                let found = category(g, true)?.representatives.len();
                checks.push(VerifyCheck {
                    name: format!("2-connected genus {g}"),
                    passed: found == expected,
                    detail: format!("expected {expected}, found {found}"),
                });
            }
            for (g, &expected) in &golden.census.weighted_stable {
                let g: usize = g
                    .parse()
                    .map_err(|_| PipelineError::Invariant("golden census key".into()))?;
                let found = weighted_stable_census(g)?;
                checks.push(VerifyCheck {
                    name: format!("weighted stable genus {g}"),
                    passed: found == expected,
                    detail: format!("expected {expected}, found {found}"),
                });
            }
        }
        VerifyScope::Full { max_n }
        | VerifyScope::Trivial { max_n }
        | VerifyScope::Sign { max_n } => {
            let (iso, twist, available) = match scope {
                VerifyScope::Full { .. } => (IsotypicScope::All, None, golden.max_full_n()),
                VerifyScope::Trivial { .. } => (
                    IsotypicScope::Trivial,
                    Some(Twist::Trivial),
                    golden.max_isotypic_n(Twist::Trivial),
                ),
                _ => (
                    IsotypicScope::Sign,
                    Some(Twist::Sign),
                    golden.max_isotypic_n(Twist::Sign),
                ),
            };
            if *max_n > available {
                return Err(PipelineError::BadArguments(format!(
                    "golden data covers n <= {available} for this scope"
                )));
            }
            let job = JobSpec {
                g: 3,
                ns: (1..=*max_n).collect(),
                route,
                scope: iso,
                certify,
                force,
            };
            for table in cmd_compute(&job, cache, limits)? {
                let diff = match twist {
                    None => golden.diff_full(&table),
                    Some(t) => golden.diff_isotypic(&table, t),
                };
                checks.push(VerifyCheck {
                    name: format!("n={}", table.n),
                    passed: diff.is_empty(),
                    detail: format!("{} mismatches, euler {}", diff.len(), table.euler_check),
                });
                mismatches.extend(diff);
            }
        }
    }
    let passed = checks.iter().all(|c| c.passed) && mismatches.is_empty();
    Ok(VerifyReport {
        scope: scope.to_string(),
        passed,
        checks,
        mismatches,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn n_ranges() {
        assert_eq!(parse_n_range("4").unwrap(), vec![4]);
        assert_eq!(parse_n_range("1..3").unwrap(), vec![1, 2, 3]);
        assert_eq!(parse_n_range("1..=3").unwrap(), vec![1, 2, 3]);
        assert_eq!(parse_n_range("2-4").unwrap(), vec![2, 3, 4]);
        assert!(parse_n_range("4..2").is_err());
        assert!(parse_n_range("x").is_err());
    }

    #[test]
    fn verify_scopes() {
        assert_eq!(
            "census".parse::<VerifyScope>().unwrap(),
            VerifyScope::Census
        );
        assert_eq!(
            "g3-full-n<=5".parse::<VerifyScope>().unwrap(),
            VerifyScope::Full { max_n: 5 }
        );
        assert_eq!(
            "g3-sign-n≤9".parse::<VerifyScope>().unwrap(),
            VerifyScope::Sign { max_n: 9 }
        );
        assert_eq!(
            "g3-trivial-n<=8"
                .parse::<VerifyScope>()
                .unwrap()
                .to_string(),
            "g3-trivial-n<=8"
        );
        assert!("g4-full-n<=2".parse::<VerifyScope>().is_err());
        assert!("g3-full-n<=0".parse::<VerifyScope>().is_err());
    }

    #[test]
    fn job_validation() {
        let limits = Limits::default();
        let job = |g, n, route, scope, force| JobSpec {
            g,
            ns: vec![n],
            route,
            scope,
            certify: false,
            force,
        };
        assert!(job(3, 4, Route::E1Pruned, IsotypicScope::All, false)
            .validate(&limits)
            .is_ok());
        assert!(job(4, 1, Route::E1, IsotypicScope::All, true)
            .validate(&limits)
            .is_err());
        assert!(job(1, 1, Route::Total, IsotypicScope::All, true)
            .validate(&limits)
            .is_err());
        assert!(job(3, 12, Route::E1Pruned, IsotypicScope::All, false)
            .validate(&limits)
            .is_err());
        assert!(job(3, 12, Route::E1Pruned, IsotypicScope::All, true)
            .validate(&limits)
            .is_ok());
        let err = job(3, 12, Route::E1Pruned, IsotypicScope::All, false)
            .validate(&limits)
            .unwrap_err();
        assert_eq!(err.exit_code(), EXIT_BAD_ARGUMENTS);
    }

    #[test]
    fn exit_codes() {
        assert_eq!(
            PipelineError::Invariant("x".into()).exit_code(),
            EXIT_INVARIANT_BREACH
        );
        let corrupt = CacheError::Corrupt {
            path: "p".into(),
            reason: "r".into(),
        };
        assert_eq!(
            PipelineError::Cache(corrupt).exit_code(),
            EXIT_CACHE_CORRUPTION
        );
        assert_eq!(
            PipelineError::Compute(GraphComplexError::Unsupported("x".into())).exit_code(),
            EXIT_BAD_ARGUMENTS
        );
        assert_eq!(
            PipelineError::Compute(GraphComplexError::Degeneration("x".into())).exit_code(),
            EXIT_INVARIANT_BREACH
        );
    }
}
