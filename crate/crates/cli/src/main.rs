//! `gccm`: solve, approximate, reduce, benchmark and generate instances of
//! group closeness maximization.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Duration;

use clap::{Args, Parser, Subcommand, ValueEnum};
use gccm_core::exact::{branch_and_bound, brute_force, Status};
use gccm_core::generators::{gen_counterexample, gen_named, gen_random_connected, NamedGraph};
use gccm_core::graph::{Graph, VertexSet};
use gccm_core::heuristics::{approx_pipeline, greedy, local_search_random_start};
use gccm_core::ilp::{builtin_backend_solve, import_solution, parse_lp, solve_iteratively, var_name, BackendChoice, Mode, SolveConfig};
use gccm_core::io::{load_graph, write_edge_list, Format};
use gccm_core::reductions::{dominated_with_stats, reduce, ReductionResult};
use gccm_core::report::{ReportStatus, SolveReport};
use serde::Serialize;

mod bench;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error(transparent)]
    Core(#[from] gccm_core::Error),
    #[error("{0}")]
    Usage(String),
    #[error("cannot access {path}: {source}")]
    File { path: PathBuf, source: std::io::Error },
    #[error("cannot write output: {0}")]
    Output(String),
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Core(gccm_core::Error::Internal(_) | gccm_core::Error::Backend(_)) => 3,
            CliError::Output(_) => 3,
            _ => 1,
        }
    }
}

pub type CliResult<T> = Result<T, CliError>;

#[derive(Parser)]
#[command(name = "gccm", version, about = "Group closeness centrality maximization")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Exact solve; prints a JSON report.
    Solve(SolveArgs),
    /// Heuristic solve; prints a JSON report with status "approx".
    Approx(ApproxArgs),
    /// Dominated and absorbed vertex counts as JSON.
    Reduce(ReduceArgs),
    /// Sweep graphs, k values and modes into a CSV file.
    Bench(bench::BenchArgs),
    /// Write a generated graph as an edge list plus a JSON sidecar.
    Gen(GenArgs),
    /// Solve an LP file with the builtin backend and write a solution file.
    #[command(hide = true)]
    LpSolve(LpSolveArgs),
}

#[derive(Args)]
struct GraphArgs {
    #[arg(long)]
    graph: PathBuf,
    #[arg(long, default_value = "edgelist")]
    format: Format,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum SolveMode {
    Grover,
    Ilpind,
    Bb,
    Brute,
}

impl SolveMode {
    pub fn name(self) -> &'static str {
        match self {
            SolveMode::Grover => "grover",
            SolveMode::Ilpind => "ilpind",
            SolveMode::Bb => "bb",
            SolveMode::Brute => "brute",
        }
    }
}

#[derive(Args)]
struct SolveArgs {
    #[command(flatten)]
    input: GraphArgs,
    #[arg(long)]
    k: usize,
    #[arg(long, value_enum, default_value = "grover")]
    mode: SolveMode,
    /// `builtin` or `cmd:<template>` with `{lp}` and `{sol}` placeholders.
    #[arg(long, default_value = "builtin")]
    backend: BackendChoice,
    /// Seconds.
    #[arg(long, default_value_t = 600.0)]
    time_limit: f64,
    /// Accepted for harness compatibility; all exact modes are deterministic.
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Algo {
    Greedy,
    Ls,
    GreedyLs,
}

#[derive(Args)]
struct ApproxArgs {
    #[command(flatten)]
    input: GraphArgs,
    #[arg(long)]
    k: usize,
    #[arg(long, value_enum, default_value = "greedy-ls")]
    algo: Algo,
    /// Restrict local search to non-dominated vertices.
    #[arg(long, default_value_t = true, action = clap::ArgAction::Set)]
    use_dominated: bool,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Args)]
struct ReduceArgs {
    #[command(flatten)]
    input: GraphArgs,
    #[arg(long)]
    k: usize,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum GenKind {
    Counterexample,
    Gnp,
    Path,
    Star,
    Cycle,
    Complete,
    Grid,
    Spider,
}

#[derive(Args)]
struct GenArgs {
    #[arg(long, value_enum)]
    kind: GenKind,
    /// Vertices (gnp, path, cycle, complete) or leaves (star).
    #[arg(long)]
    n: Option<usize>,
    /// Edge probability (gnp).
    #[arg(long)]
    p: Option<f64>,
    /// Flower size (counterexample).
    #[arg(long)]
    r: Option<usize>,
    /// Number of flowers (counterexample).
    #[arg(long, default_value_t = 2)]
    k: usize,
    #[arg(long)]
    rows: Option<usize>,
    #[arg(long)]
    cols: Option<usize>,
    #[arg(long)]
    arms: Option<usize>,
    #[arg(long)]
    length: Option<usize>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Edge list path; the sidecar goes to `<out>.json`.
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct LpSolveArgs {
    #[arg(long)]
    lp: PathBuf,
    #[arg(long)]
    sol: PathBuf,
}

pub fn read_file(path: &Path) -> CliResult<String> {
    fs::read_to_string(path).map_err(|source| CliError::File {
        path: path.to_path_buf(),
        source,
    })
}

fn write_file(path: &Path, text: &str) -> CliResult<()> {
    fs::write(path, text).map_err(|source| CliError::File {
        path: path.to_path_buf(),
        source,
    })
}

pub fn graph_name(path: &Path) -> String {
    path.file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| path.display().to_string())
}

fn load(args: &GraphArgs) -> CliResult<Graph> {
    Ok(load_graph(&read_file(&args.graph)?, args.format)?)
}

pub fn check_k(k: usize, g: &Graph) -> CliResult<()> {
    if k == 0 || k > g.n() {
        return Err(CliError::Usage(format!("--k must be between 1 and {}, got {k}", g.n())));
    }
    Ok(())
}

fn time_limit(secs: f64) -> CliResult<Duration> {
    Duration::try_from_secs_f64(secs).map_err(|_| CliError::Usage(format!("invalid --time-limit {secs}")))
}

/// Runs one exact mode and builds its report. Timeouts carry no set.
pub fn run_mode(name: &str, g: &Graph, k: usize, mode: SolveMode, backend: &BackendChoice, limit: Duration) -> CliResult<SolveReport> {
    let report = match mode {
        SolveMode::Grover | SolveMode::Ilpind => {
            let config = SolveConfig {
                mode: if mode == SolveMode::Grover { Mode::Grover } else { Mode::IlpInd },
                backend: backend.clone(),
                time_limit: limit,
            };
            let out = solve_iteratively(g, k, &config)?;
            SolveReport::from_outcome(name, g, k, &out)?
        }
        SolveMode::Bb => {
            let start = std::time::Instant::now();
            let res = branch_and_bound(g, k, &VertexSet::full(g.n()), Some(limit))?;
            let optimal = res.status == Status::Optimal;
            let (status, set) = if optimal {
                (ReportStatus::Optimal, Some(&res.set))
            } else {
                (ReportStatus::Timeout, None)
            };
            let mut r = SolveReport::new(name, g, k, mode.name(), status, set, optimal.then_some(res.farness))?;
            r.timings.total_ms = start.elapsed().as_secs_f64() * 1e3;
            r
        }
        SolveMode::Brute => {
            let start = std::time::Instant::now();
            let (set, f) = brute_force(g, k, &VertexSet::full(g.n()))?;
            let mut r = SolveReport::new(name, g, k, mode.name(), ReportStatus::Optimal, Some(&set), Some(f))?;
            r.timings.total_ms = start.elapsed().as_secs_f64() * 1e3;
            r
        }
    };
    Ok(report)
}

fn print_json<T: Serialize>(value: &T) -> CliResult<()> {
    let text = serde_json::to_string_pretty(value).map_err(|e| CliError::Output(e.to_string()))?;
    println!("{text}");
    Ok(())
}

fn cmd_solve(args: SolveArgs) -> CliResult<u8> {
    let g = load(&args.input)?;
    check_k(args.k, &g)?;
    let limit = time_limit(args.time_limit)?;
    let report = run_mode(&graph_name(&args.input.graph), &g, args.k, args.mode, &args.backend, limit)?;
    print_json(&report)?;
    Ok(match report.status {
        ReportStatus::Timeout => 2,
        _ => 0,
    })
}

fn cmd_approx(args: ApproxArgs) -> CliResult<u8> {
    let g = load(&args.input)?;
    check_k(args.k, &g)?;
    let start = std::time::Instant::now();
    let red = if args.use_dominated {
        reduce(&g, args.k)
    } else {
        ReductionResult::none(g.n())
    };
    let sol = match args.algo {
        Algo::Greedy => greedy(&g, args.k)?,
        Algo::Ls => local_search_random_start(&g, args.k, &red.centers(), args.seed)?,
        Algo::GreedyLs => approx_pipeline(&g, args.k, &red)?,
    };
    let algo = match args.algo {
        Algo::Greedy => "greedy",
        Algo::Ls => "ls",
        Algo::GreedyLs => "greedy-ls",
    };
    let mut r = SolveReport::new(
        &graph_name(&args.input.graph),
        &g,
        args.k,
        algo,
        ReportStatus::Approx,
        Some(&sol.set),
        Some(sol.farness),
    )?;
    r.reduction_stats.dominated = red.dominated.len();
    r.reduction_stats.absorbed = red.absorbed.len();
    r.timings.total_ms = start.elapsed().as_secs_f64() * 1e3;
    print_json(&r)?;
    Ok(0)
}

#[derive(Serialize)]
#[serde(rename_all = "camelCase")]
struct ReduceReport {
    graph_name: String,
    n: usize,
    m: usize,
    k: usize,
    dom: usize,
    abs: usize,
    cut_vertices: usize,
    domination_checks: u64,
    ms: f64,
}

fn cmd_reduce(args: ReduceArgs) -> CliResult<u8> {
    let g = load(&args.input)?;
    check_k(args.k, &g)?;
    let start = std::time::Instant::now();
    let red = reduce(&g, args.k);
    let ms = start.elapsed().as_secs_f64() * 1e3;
    let (_, _, checks) = dominated_with_stats(&g, args.k);
    print_json(&ReduceReport {
        graph_name: graph_name(&args.input.graph),
        n: g.n(),
        m: g.m(),
        k: args.k,
        dom: red.dominated.len(),
        abs: red.absorbed.len(),
        cut_vertices: gccm_core::reductions::cut_vertices(&g).len(),
        domination_checks: checks,
        ms,
    })?;
    Ok(0)
}

#[derive(Serialize)]
struct GenSidecar {
    kind: String,
    seed: u64,
    n: usize,
    m: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    params: Option<serde_json::Value>,
    #[serde(skip_serializing_if = "Option::is_none")]
    landmarks: Option<gccm_core::generators::Landmarks>,
}

fn need<T>(v: Option<T>, flag: &str, kind: &str) -> CliResult<T> {
    v.ok_or_else(|| CliError::Usage(format!("--{flag} is required for --kind {kind}")))
}

fn cmd_gen(args: GenArgs) -> CliResult<u8> {
    let named = |shape: NamedGraph| -> CliResult<(Graph, Option<serde_json::Value>)> {
        let params = serde_json::to_value(shape).map_err(|e| CliError::Output(e.to_string()))?;
        Ok((gen_named(shape)?, Some(params)))
    };
    let mut landmarks = None;
    let (g, params, kind) = match args.kind {
        GenKind::Counterexample => {
            let r = need(args.r, "r", "counterexample")?;
            if r < 2 || args.k < 2 {
                return Err(CliError::Usage("counterexample needs --r >= 2 and --k >= 2".into()));
            }
            let (g, marks) = gen_counterexample(r, args.k);
            landmarks = Some(marks);
            (g, None, "counterexample")
        }
        GenKind::Gnp => {
            let n = need(args.n, "n", "gnp")?;
            let p = need(args.p, "p", "gnp")?;
            if n == 0 || !(0.0..=1.0).contains(&p) {
                return Err(CliError::Usage("gnp needs --n >= 1 and --p in [0, 1]".into()));
            }
            let params = serde_json::json!({ "n": n, "p": p });
            (gen_random_connected(n, p, args.seed), Some(params), "gnp")
        }
        GenKind::Path => {
            let (g, p) = named(NamedGraph::Path { n: need(args.n, "n", "path")? })?;
            (g, p, "path")
        }
        GenKind::Star => {
            let (g, p) = named(NamedGraph::Star { leaves: need(args.n, "n", "star")? })?;
            (g, p, "star")
        }
        GenKind::Cycle => {
            let (g, p) = named(NamedGraph::Cycle { n: need(args.n, "n", "cycle")? })?;
            (g, p, "cycle")
        }
        GenKind::Complete => {
            let (g, p) = named(NamedGraph::Complete { n: need(args.n, "n", "complete")? })?;
            (g, p, "complete")
        }
        GenKind::Grid => {
            let (g, p) = named(NamedGraph::Grid {
                rows: need(args.rows, "rows", "grid")?,
                cols: need(args.cols, "cols", "grid")?,
            })?;
            (g, p, "grid")
        }
        GenKind::Spider => {
            let (g, p) = named(NamedGraph::Spider {
                arms: need(args.arms, "arms", "spider")?,
                length: need(args.length, "length", "spider")?,
            })?;
            (g, p, "spider")
        }
    };
    write_file(&args.out, &write_edge_list(&g))?;
    let sidecar = GenSidecar {
        kind: kind.into(),
        seed: args.seed,
        n: g.n(),
        m: g.m(),
        params,
        landmarks,
    };
    let mut side = args.out.clone().into_os_string();
    side.push(".json");
    let text = serde_json::to_string_pretty(&sidecar).map_err(|e| CliError::Output(e.to_string()))?;
    write_file(Path::new(&side), &(text + "\n"))?;
    Ok(0)
}

fn cmd_lp_solve(args: LpSolveArgs) -> CliResult<u8> {
    let model = parse_lp(&read_file(&args.lp)?)?;
    let res = builtin_backend_solve(&model, None)?;
    let mut text = String::new();
    for r in &model.rows {
        for i in r.levels() {
            let v = u8::from(res.assignment.is_one(r.vertex, i));
            text.push_str(&format!("{} {v}\n", var_name(r.vertex, i)));
        }
    }
    // Guard against writing something the importer would reject.
    import_solution(&text, &model)?;
    write_file(&args.sol, &text)?;
    Ok(0)
}

fn run(cli: Cli) -> CliResult<u8> {
    match cli.command {
        Command::Solve(a) => cmd_solve(a),
        Command::Approx(a) => cmd_approx(a),
        Command::Reduce(a) => cmd_reduce(a),
        Command::Bench(a) => bench::cmd_bench(a),
        Command::Gen(a) => cmd_gen(a),
        Command::LpSolve(a) => cmd_lp_solve(a),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
