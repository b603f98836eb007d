//! End-to-end acceptance checks. Prints one PASS/FAIL line per criterion
//! and exits nonzero if any fails.

use std::collections::BTreeMap;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::time::Instant;

use tropcc::cache::Cache;
use tropcc::config_complex::{
    aut_action, build_cc, cohomology, contraction_pullback, sn_action, CochainComplexCc,
};
use tropcc::exact_linalg::{
    rank, rational, reynolds_project, RankStrategy, RationalSparseMatrix, Subquotient,
};
use tropcc::graph_complex::{
    compute, special_edge_classify, vertical_cohomology_characters, BlockForm, BlockVerdict,
    ComputeOptions, DoubleComplex, E1Page, IsotypicScope, ResultTable, Route,
};
use tropcc::multigraph::{enumerate_category, weighted_stable_census, GraphCategory};
use tropcc::pipeline::{cmd_compute, cmd_verify, JobSpec, Limits, VerifyScope};
use tropcc::sym_rep::{
    decompose, isotypic_projector, partitions, Partition, Twist, YoungFunctional,
};

type Check = Result<String, String>;
type Criterion = (&'static str, fn() -> Check);

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn cat(g: usize) -> GraphCategory {
    enumerate_category(g, true).expect("category enumerates")
}

/// The whole representation: invariants of the trivial Young subgroup.
fn full_functional(n: usize) -> YoungFunctional {
    YoungFunctional {
        shape: Partition::column(n),
        twist: Twist::Trivial,
    }
}

fn exact(route: Route, scope: IsotypicScope) -> ComputeOptions {
    ComputeOptions {
        route,
        scope,
        rank: RankStrategy::Exact,
        ..Default::default()
    }
}

fn census() -> Check {
    let two: Vec<usize> = (2..=4).map(|g| cat(g).representatives.len()).collect();
    ensure(two == [1, 4, 17], || format!("2-connected counts {two:?}"))?;
    let weighted = weighted_stable_census(4).map_err(|e| e.to_string())?;
    ensure(weighted == 379, || {
        format!("weighted stable genus 4: {weighted}")
    })?;
    let unweighted = enumerate_category(4, false)
        .map_err(|e| e.to_string())?
        .representatives
        .len();
    Ok(format!(
        "2-connected g=2,3,4: {two:?}; all stable g=4: {weighted} with vertex weights ({unweighted} without)"
    ))
}

fn genus_three_structure() -> Check {
    let c = cat(3);
    let mut edges: Vec<usize> = c
        .representatives
        .iter()
        .map(|r| r.graph.num_edges())
        .collect();
    edges.sort();
    ensure(edges == [4, 5, 6, 6], || format!("edge counts {edges:?}"))?;
    let mut named: Vec<(&str, &str)> = c
        .representatives
        .iter()
        .flat_map(|r| {
            r.a_edge_orbits.iter().map(|o| {
                (
                    r.name().unwrap_or("?"),
                    c.representatives[o.target].name().unwrap_or("?"),
                )
            })
        })
        .collect();
    named.sort();
    named.dedup();
    ensure(
        named == [("K4", "goggles"), ("can", "goggles"), ("goggles", "banana")],
        || format!("arrows {named:?}"),
    )?;
    let goggles = &c.representatives[c.by_name("goggles").ok_or("no goggles")?];
    let a_edges: Vec<usize> = (0..goggles.graph.num_edges())
        .filter(|&e| goggles.is_a_edge(e))
        .collect();
    ensure(a_edges.len() == 1, || {
        format!("goggles A-edges {a_edges:?}")
    })?;
    let e = a_edges[0];
    ensure(
        goggles.automorphisms.iter().all(|a| a.edge_perm[e] == e),
        || "goggles A-edge is moved".into(),
    )?;
    Ok(format!(
        "edges {edges:?}, arrows {named:?}, goggles A-edge e{e} fixed by all {} automorphisms",
        goggles.aut_order()
    ))
}

fn concentration() -> Check {
    let mut checked = 0;
    for g in 2..=3 {
        for two_connected in [true, false] {
            let c = enumerate_category(g, two_connected).map_err(|e| e.to_string())?;
            for r in &c.representatives {
                for n in 0..=4 {
                    let cc = build_cc(&r.graph, n);
                    let dims = cc.cohomology_dims();
                    for (q, &d) in dims.iter().enumerate() {
                        ensure(d == 0 || q + 1 == n || q == n, || {
                            format!("{} n={n}: H^{q} has dimension {d}", r.label())
                        })?;
                    }
                    cohomology(&cc).map_err(|e| format!("{} n={n}: {e}", r.label()))?;
                    checked += 1;
                }
            }
        }
    }
    Ok(format!(
        "{checked} (graph, n) pairs over all stable graphs of genus 2 and 3, n <= 4"
    ))
}

fn is_injective(m: &RationalSparseMatrix) -> bool {
    rank(m) == m.cols()
}

fn is_surjective(m: &RationalSparseMatrix) -> bool {
    rank(m) == m.rows()
}

fn special_verdicts() -> Check {
    let c = cat(3);
    let idx = |name: &str| c.by_name(name).ok_or(format!("no {name}"));
    let (banana, goggles, can) = (idx("banana")?, idx("goggles")?, idx("can")?);
    let verdict = |g: usize| -> Result<Option<BlockVerdict>, String> {
        let e = c.representatives[g].a_edge_orbits[0].representative;
        Ok(special_edge_classify(&c, g, e)
            .map_err(|e| e.to_string())?
            .verdict)
    };
    ensure(verdict(goggles)? == Some(BlockVerdict::Injective), || {
        "goggles verdict".into()
    })?;
    ensure(verdict(can)? == Some(BlockVerdict::Surjective), || {
        "can verdict".into()
    })?;
    let mut shapes = Vec::new();
    for n in 0..=5 {
        let dc = DoubleComplex::assemble(&c, &full_functional(n), BlockForm::OrbitGrouped);
        let page = E1Page::build(&dc).map_err(|e| e.to_string())?;
        for &q in page.rows.keys() {
            let inj = page
                .block(q, banana, goggles)
                .ok_or("missing banana block")?;
            let sur = page.block(q, goggles, can).ok_or("missing goggles block")?;
            ensure(is_injective(&inj), || {
                format!("banana->goggles not injective at n={n} q={q}")
            })?;
            ensure(is_surjective(&sur), || {
                format!("goggles->can not surjective at n={n} q={q}")
            })?;
            shapes.push(format!("n{n}q{q}:{:?}/{:?}", inj.shape(), sur.shape()));
        }
    }
    Ok(format!(
        "verdicts injective/surjective; blocks {}",
        shapes.join(" ")
    ))
}

fn verify(scope: VerifyScope) -> Check {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let cache = Cache::new(dir.path());
    let report = cmd_verify(
        &scope,
        Route::E1Pruned,
        true,
        false,
        &cache,
        &Limits::default(),
    )
    .map_err(|e| e.to_string())?;
    ensure(report.passed, || report.to_table())?;
    Ok(format!(
        "{scope}: {} checks, 0 mismatches",
        report.checks.len()
    ))
}

fn table_one() -> Check {
    verify(VerifyScope::Full { max_n: 5 })
}

fn table_three() -> Check {
    let t = verify(VerifyScope::Trivial { max_n: 8 })?;
    let s = verify(VerifyScope::Sign { max_n: 8 })?;
    Ok(format!("{t}; {s}"))
}

fn route_agreement() -> Check {
    let c3 = cat(3);
    for n in 0..=4 {
        let run =
            |route| compute(&c3, n, &exact(route, IsotypicScope::All)).map_err(|e| e.to_string());
        let (total, e1, pruned) = (run(Route::Total)?, run(Route::E1)?, run(Route::E1Pruned)?);
        ensure(
            total.same_cohomology(&e1) && total.same_cohomology(&pruned),
            || {
                format!(
                    "g=3 n={n}: total {:?}, e1 {:?}, pruned {:?}",
                    total.degrees, e1.degrees, pruned.degrees
                )
            },
        )?;
    }
    let c2 = cat(2);
    let theta = &c2.representatives[0];
    for n in 0..=5 {
        let table =
            compute(&c2, n, &exact(Route::Total, IsotypicScope::All)).map_err(|e| e.to_string())?;
        let mut expected: BTreeMap<usize, BTreeMap<Partition, i64>> = BTreeMap::new();
        for (q, chi) in vertical_cohomology_characters(theta, n).iter().enumerate() {
            let mults = decompose(chi)
                .integer_multiplicities()
                .ok_or(format!("n={n} q={q}: fractional"))?;
            let nonzero: BTreeMap<Partition, i64> =
                mults.into_iter().filter(|(_, m)| *m != 0).collect();
            if !nonzero.is_empty() {
                expected.insert(theta.p() + q, nonzero);
            }
        }
        let computed: BTreeMap<usize, BTreeMap<Partition, i64>> = table
            .degrees
            .iter()
            .map(|(&k, ms)| {
                (
                    k,
                    ms.iter().map(|m| (m.partition.clone(), m.mult)).collect(),
                )
            })
            .collect();
        ensure(computed == expected, || {
            format!("g=2 n={n}: computed {computed:?}, invariants {expected:?}")
        })?;
    }
    Ok("g=3 n<=4 total = e1 = e1-pruned; g=2 n<=5 total = invariants of the single term".into())
}

fn induced_map(
    p: &RationalSparseMatrix,
    from: &Subquotient,
    to: &Subquotient,
) -> Result<RationalSparseMatrix, String> {
    let cols = from
        .section()
        .iter()
        .map(|z| {
            to.retract(&p.mul_vec(z))
                .ok_or("image is not a cocycle".to_string())
        })
        .collect::<Result<Vec<_>, _>>()?;
    Ok(RationalSparseMatrix::from_columns(to.dim(), &cols))
}

fn spot(cc: &CochainComplexCc, q: usize) -> Subquotient {
    let incoming = (q > 0).then(|| &cc.delta[q - 1]);
    Subquotient::new(cc.basis_by_degree[q].len(), incoming, cc.delta.get(q))
}

fn properties() -> Check {
    let c3 = cat(3);
    let mut notes = Vec::new();

    // d² = 0 on assembled double complexes, and both block constructions agree
    for n in 0..=3 {
        let f = full_functional(n);
        let grouped = DoubleComplex::assemble(&c3, &f, BlockForm::OrbitGrouped);
        let all = DoubleComplex::assemble(&c3, &f, BlockForm::AllEdges);
        grouped.check_squares().map_err(|e| format!("n={n}: {e}"))?;
        ensure(grouped.blocks == all.blocks, || {
            format!("n={n}: orbit-grouped and all-edge blocks differ")
        })?;
    }
    for n in 4..=5 {
        for f in [YoungFunctional::trivial(n), YoungFunctional::sign(n)] {
            DoubleComplex::assemble(&c3, &f, BlockForm::OrbitGrouped)
                .check_squares()
                .map_err(|e| format!("n={n} {f}: {e}"))?;
        }
    }
    let c4 = cat(4);
    for n in 0..=1 {
        DoubleComplex::assemble(&c4, &full_functional(n), BlockForm::OrbitGrouped)
            .check_squares()
            .map_err(|e| format!("g=4 n={n}: {e}"))?;
    }
    notes.push("d^2=0 and block forms agree");

    // symmetry actions on the cochain model
    for r in &c3.representatives {
        for n in 0..=3 {
            let cc = build_cc(&r.graph, n);
            for q in 0..n.saturating_sub(1) {
                ensure(cc.delta[q + 1].mul(&cc.delta[q]).unwrap().is_zero(), || {
                    format!("{} n={n}: delta^2 != 0 at q={q}", r.label())
                })?;
            }
            let actions: Vec<_> = r
                .automorphisms
                .iter()
                .map(|a| aut_action(&r.graph, a, &cc).map_err(|e| e.to_string()))
                .collect::<Result<_, _>>()?;
            let gens: Vec<Vec<usize>> = match n {
                0 | 1 => vec![],
                2 => vec![vec![1, 0]],
                _ => vec![vec![1, 0, 2], vec![1, 2, 0]],
            };
            let sn: Vec<_> = gens.iter().map(|s| sn_action(s, &cc)).collect();
            for (i, a) in r.automorphisms.iter().enumerate() {
                actions[i]
                    .is_chain_map(&cc, &cc)
                    .map_err(|e| e.to_string())?;
                for s in &sn {
                    ensure(
                        actions[i].compose(s).unwrap() == s.compose(&actions[i]).unwrap(),
                        || {
                            format!(
                                "{} n={n}: automorphism and relabeling do not commute",
                                r.label()
                            )
                        },
                    )?;
                }
                for (j, b) in r.automorphisms.iter().enumerate() {
                    let ab = a.compose(&r.graph, b).unwrap();
                    let k = r
                        .automorphisms
                        .iter()
                        .position(|x| x.half_edge_perm == ab.half_edge_perm)
                        .unwrap();
                    ensure(
                        actions[k] == actions[i].compose(&actions[j]).unwrap(),
                        || format!("{} n={n}: action is not a homomorphism", r.label()),
                    )?;
                }
            }
            for s in &sn {
                s.is_chain_map(&cc, &cc).map_err(|e| e.to_string())?;
            }
        }
    }
    notes.push("automorphism actions are homomorphisms, chain maps and commute with relabeling");

    // contraction pullbacks are quasi-isomorphisms
    for r in &c3.representatives {
        for (&e, (cd, _)) in &r.contractions {
            for n in 0..=3 {
                let (cg, ct) = (build_cc(&r.graph, n), build_cc(&cd.target, n));
                let p = contraction_pullback(cd, &cg, &ct).map_err(|e| e.to_string())?;
                p.is_chain_map(&ct, &cg)
                    .map_err(|err| format!("{} e{e} n={n}: {err}", r.label()))?;
                for q in [n.saturating_sub(1), n] {
                    let m = induced_map(&p.per_degree[q], &spot(&ct, q), &spot(&cg, q))?;
                    ensure(m.rows() == m.cols() && rank(&m) == m.rows(), || {
                        format!(
                            "{} e{e} n={n}: H^{q} map {:?} is not invertible",
                            r.label(),
                            m.shape()
                        )
                    })?;
                }
            }
        }
    }
    notes.push("contraction pullbacks are quasi-isomorphisms");

    // projectors
    let goggles = &c3.representatives[c3.by_name("goggles").unwrap()];
    let cc = build_cc(&goggles.graph, 3);
    for q in 0..=3 {
        let dim = cc.basis_by_degree[q].len();
        let proj: Vec<RationalSparseMatrix> = partitions(3)
            .iter()
            .map(|l| {
                isotypic_projector(l, |s| sn_action(s, &cc).per_degree[q].clone())
                    .map_err(|e| e.to_string())
            })
            .collect::<Result<_, _>>()?;
        let mut sum = RationalSparseMatrix::zeros(dim, dim);
        for (i, a) in proj.iter().enumerate() {
            ensure(a.mul(a).unwrap() == *a, || {
                format!("isotypic projector {i} not idempotent")
            })?;
            for (j, b) in proj.iter().enumerate() {
                ensure(i == j || a.mul(b).unwrap().is_zero(), || {
                    format!("projectors {i},{j} not orthogonal")
                })?;
            }
            sum = sum.add(a).unwrap();
        }
        ensure(sum == RationalSparseMatrix::identity(dim), || {
            "isotypic projectors do not sum to 1".into()
        })?;
    }
    let actions: Vec<_> = goggles
        .automorphisms
        .iter()
        .map(|a| aut_action(&goggles.graph, a, &cc).unwrap())
        .collect();
    let signs: Vec<_> = goggles
        .automorphisms
        .iter()
        .map(|a| rational(a.edge_sign()))
        .collect();
    let reynolds: Vec<RationalSparseMatrix> = (0..=3)
        .map(|q| {
            let mats: Vec<_> = actions.iter().map(|a| a.per_degree[q].clone()).collect();
            reynolds_project(&mats, &signs)
                .map(|(p, _)| p)
                .map_err(|e| e.to_string())
        })
        .collect::<Result<_, _>>()?;
    for q in 0..3 {
        ensure(
            reynolds[q + 1].mul(&cc.delta[q]).unwrap() == cc.delta[q].mul(&reynolds[q]).unwrap(),
            || format!("Reynolds projector does not commute with delta at q={q}"),
        )?;
    }
    notes.push("Reynolds and isotypic projectors idempotent, orthogonal, complete");

    // every reported table passes Euler checks and has nonnegative integer multiplicities
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let cache = Cache::new(dir.path());
    let mut tables: Vec<ResultTable> = Vec::new();
    for (g, ns, route) in [
        (2, 0..=5, Route::Total),
        (3, 0..=5, Route::E1Pruned),
        (4, 0..=1, Route::Total),
    ] {
        let job = JobSpec {
            g,
            ns: ns.collect(),
            route,
            scope: IsotypicScope::All,
            certify: true,
            force: false,
        };
        tables.extend(cmd_compute(&job, &cache, &Limits::default()).map_err(|e| e.to_string())?);
    }
    for t in &tables {
        ensure(t.euler_check == "pass", || {
            format!("g={} n={}: euler {}", t.g, t.n, t.euler_check)
        })?;
        ensure(t.degrees.values().flatten().all(|m| m.mult > 0), || {
            format!("g={} n={}: bad multiplicity", t.g, t.n)
        })?;
    }
    notes.push("Euler consistency and nonnegative integer multiplicities on every table");
    Ok(notes.join("; "))
}

fn main() {
    let criteria: [Criterion; 8] = [
        ("graph census", census),
        ("genus-3 structure", genus_three_structure),
        ("concentration in degrees n-1 and n", concentration),
        ("special edge verdicts and blocks, n<=5", special_verdicts),
        ("full characters, g=3, n<=5", table_one),
        ("trivial and sign multiplicities, g=3, n<=8", table_three),
        ("route agreement", route_agreement),
        ("property suites", properties),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = catch_unwind(AssertUnwindSafe(check)).unwrap_or_else(|p| {
            let msg = p
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()));
            Err(format!("panicked: {}", msg.unwrap_or_default()))
        });
        let secs = start.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("criterion {} PASS {name} ({secs:.1}s): {detail}", i + 1),
            Err(detail) => {
                failed += 1;
                println!("criterion {} FAIL {name} ({secs:.1}s): {detail}", i + 1);
            }
        }
    }
    println!(
        "acceptance: {} passed, {failed} failed",
        criteria.len() - failed
    );
    if failed > 0 {
        std::process::exit(1);
    }
}
