use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use tropcc::cache::Cache;
use tropcc::graph_complex::{annotate_hgc, IsotypicScope, Route};
use tropcc::pipeline::{
    cmd_census, cmd_compute, cmd_conf, cmd_verify, parse_n_range, JobSpec, Limits, PipelineError,
    VerifyScope, EXIT_GOLDEN_MISMATCH, EXIT_OK,
};

#[derive(Parser)]
#[command(
    name = "tropcc",
    version,
    about = "Equivariant weight-zero cohomology of moduli of curves"
)]
struct Cli {
    #[command(flatten)]
    common: Common,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Common {
    /// Directory for cached results.
    #[arg(
        long,
        global = true,
        env = "TROPCC_CACHE",
        default_value = "./.tropcc-cache"
    )]
    cache_dir: PathBuf,
    /// Worker threads (defaults to all cores).
    #[arg(long, global = true)]
    jobs: Option<usize>,
    /// Confirm modular ranks with exact rational elimination.
    #[arg(long, global = true)]
    certify: bool,
    /// Run past the feasibility limits.
    #[arg(long, global = true)]
    force: bool,
    #[arg(long, global = true, value_enum, default_value_t = Format::Table)]
    format: Format,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Table,
}

#[derive(Subcommand)]
enum Command {
    /// List the graph category of a genus.
    Census {
        #[arg(long)]
        g: usize,
        /// Include graphs with bridges and report the weighted stable count.
        #[arg(long)]
        all_stable: bool,
    },
    /// Compactly supported cohomology of configuration spaces of graphs.
    Conf {
        #[arg(long)]
        g: usize,
        #[arg(long)]
        n: usize,
        /// Restrict to one graph, by name or key.
        #[arg(long)]
        graph: Option<String>,
    },
    /// S_n-equivariant cohomology for each requested n.
    Compute {
        #[arg(long)]
        g: usize,
        /// A single n or a range such as 1..5.
        #[arg(long, value_parser = parse_n_range)]
        n: std::vec::Vec<usize>,
        #[arg(long, default_value = "e1-pruned")]
        route: Route,
        /// all, trivial, sign, or partitions such as "3,1;2,2".
        #[arg(long, default_value = "all")]
        isotypic: IsotypicScope,
        /// Also report hairy graph complex degrees for parameters M,N.
        #[arg(long, value_parser = parse_hgc)]
        hgc: Option<(i64, i64)>,
    },
    /// Compare against bundled reference values.
    Verify {
        /// census, g3-full-n<=N, g3-trivial-n<=N or g3-sign-n<=N.
        scope: VerifyScope,
        #[arg(long, default_value = "e1-pruned")]
        route: Route,
    },
}

fn parse_hgc(s: &str) -> Result<(i64, i64), String> {
    let (m, n) = s.split_once(',').ok_or("expected M,N")?;
    let parse = |x: &str| x.trim().parse::<i64>().map_err(|e| e.to_string());
    Ok((parse(m)?, parse(n)?))
}

fn emit<T: Serialize>(format: Format, value: &T, table: impl FnOnce(&T) -> String) {
    let text = match format {
        Format::Json => serde_json::to_string_pretty(value).expect("reports serialize") + "\n",
        Format::Table => table(value),
    };
    // a closed pipe (e.g. `| head`) is not an error
    let _ = std::io::stdout().lock().write_all(text.as_bytes());
}

fn run(cli: Cli) -> Result<i32, PipelineError> {
    let common = &cli.common;
    if let Some(jobs) = common.jobs {
        if jobs == 0 {
            return Err(PipelineError::BadArguments(
                "--jobs must be positive".into(),
            ));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(jobs)
            .build_global()
            .map_err(|e| PipelineError::BadArguments(e.to_string()))?;
    }
    let cache = Cache::new(&common.cache_dir);
    let limits = Limits::default();
    match cli.command {
        Command::Census { g, all_stable } => {
            let report = cmd_census(g, !all_stable)?;
            emit(common.format, &report, |r| r.to_table());
        }
        Command::Conf { g, n, graph } => {
            let reports = cmd_conf(g, n, graph.as_deref(), &cache, &limits, common.force)?;
            emit(common.format, &reports, |rs| {
                rs.iter().map(|r| r.to_table()).collect()
            });
        }
        Command::Compute {
            g,
            n,
            route,
            isotypic,
            hgc,
        } => {
            let job = JobSpec {
                g,
                ns: n,
                route,
                scope: isotypic,
                certify: common.certify,
                force: common.force,
            };
            let mut tables = cmd_compute(&job, &cache, &limits)?;
            if let Some((m, big_n)) = hgc {
                for t in &mut tables {
                    annotate_hgc(t, m, big_n)?;
                }
            }
            emit(common.format, &tables, |ts| {
                ts.iter().map(|t| t.to_table()).collect()
            });
        }
        Command::Verify { scope, route } => {
            let report = cmd_verify(&scope, route, common.certify, common.force, &cache, &limits)?;
            emit(common.format, &report, |r| r.to_table());
            if !report.passed {
                return Ok(EXIT_GOLDEN_MISMATCH);
            }
        }
    }
    Ok(EXIT_OK)
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    let code = match run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    };
    ExitCode::from(code as u8)
}
