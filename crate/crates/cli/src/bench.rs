//! `gccm bench`: sweep every graph in a directory over a range of k and a
//! list of modes, one CSV row per run.

use std::path::{Path, PathBuf};
use std::time::Duration;

use clap::Args;
use gccm_core::graph::Graph;
use gccm_core::ilp::BackendChoice;
use gccm_core::io::{load_graph, Format};
use gccm_core::report::ReportStatus;
use rayon::prelude::*;
use serde::Serialize;

use crate::{graph_name, read_file, run_mode, CliError, CliResult, SolveMode};

#[derive(Args)]
pub struct BenchArgs {
    /// Directory of graph files; `.metis` and `.graph` files are read as
    /// METIS, everything else as edge lists.
    #[arg(long)]
    graphs: PathBuf,
    #[arg(long, default_value_t = 2)]
    k_min: usize,
    #[arg(long, default_value_t = 20)]
    k_max: usize,
    #[arg(long, value_enum, value_delimiter = ',', default_value = "grover,ilpind")]
    modes: Vec<SolveMode>,
    #[arg(long, default_value = "builtin")]
    backend: BackendChoice,
    /// Seconds per run.
    #[arg(long, default_value_t = 600.0)]
    time_limit: f64,
    #[arg(long, default_value_t = 5)]
    repeats: usize,
    /// Worker threads; rows are written in the same order regardless.
    #[arg(long, default_value_t = 1)]
    jobs: usize,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Debug, Serialize)]
struct Row {
    graph: String,
    k: usize,
    mode: &'static str,
    repeat: usize,
    status: &'static str,
    farness: Option<u64>,
    iterations: Option<usize>,
    total_ms: Option<f64>,
}

fn format_for(path: &Path) -> Format {
    match path.extension().and_then(|e| e.to_str()) {
        Some("metis" | "graph") => Format::Metis,
        _ => Format::EdgeList,
    }
}

fn load_dir(dir: &Path) -> CliResult<Vec<(String, Graph)>> {
    let entries = std::fs::read_dir(dir).map_err(|source| CliError::File {
        path: dir.to_path_buf(),
        source,
    })?;
    let mut paths: Vec<PathBuf> = entries
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.is_file() && p.extension().is_none_or(|e| e != "json"))
        .collect();
    paths.sort();
    let mut out = Vec::new();
    for p in paths {
        let g = load_graph(&read_file(&p)?, format_for(&p))
            .map_err(|e| CliError::Usage(format!("{}: {e}", p.display())))?;
        out.push((graph_name(&p), g));
    }
    Ok(out)
}

pub fn cmd_bench(args: BenchArgs) -> CliResult<u8> {
    if args.k_min == 0 || args.k_min > args.k_max {
        return Err(CliError::Usage("need 1 <= --k-min <= --k-max".into()));
    }
    if args.jobs == 0 || args.repeats == 0 {
        return Err(CliError::Usage("--jobs and --repeats must be positive".into()));
    }
    let limit = Duration::try_from_secs_f64(args.time_limit)
        .map_err(|_| CliError::Usage(format!("invalid --time-limit {}", args.time_limit)))?;
    let graphs = load_dir(&args.graphs)?;
    let mut tasks = Vec::new();
    for (gi, (_, g)) in graphs.iter().enumerate() {
        for k in args.k_min..=args.k_max.min(g.n()) {
            for &mode in &args.modes {
                for repeat in 0..args.repeats {
                    tasks.push((gi, k, mode, repeat));
                }
            }
        }
    }
    let run = |&(gi, k, mode, repeat): &(usize, usize, SolveMode, usize)| -> CliResult<Row> {
        let (name, g) = &graphs[gi];
        let mut row = Row {
            graph: name.clone(),
            k,
            mode: mode.name(),
            repeat,
            status: "error",
            farness: None,
            iterations: None,
            total_ms: None,
        };
        match run_mode(name, g, k, mode, &args.backend, limit) {
            Ok(r) => {
                row.status = match r.status {
                    ReportStatus::Optimal => "optimal",
                    ReportStatus::Timeout => "timeout",
                    ReportStatus::Approx => "approx",
                };
                row.farness = r.farness;
                row.iterations = Some(r.iterations);
                row.total_ms = Some(r.timings.total_ms);
            }
            // A failed instance is recorded; internal errors abort the sweep.
            Err(e) if e.exit_code() == 1 => eprintln!("{name} k={k} {}: {e}", mode.name()),
            Err(e) => return Err(e),
        }
        Ok(row)
    };
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(args.jobs)
        .build()
        .map_err(|e| CliError::Output(e.to_string()))?;
    let rows: Vec<Row> = pool.install(|| tasks.par_iter().map(run).collect::<CliResult<_>>())?;

    let mut w = csv::Writer::from_path(&args.out).map_err(|e| CliError::Output(e.to_string()))?;
    for row in &rows {
        w.serialize(row).map_err(|e| CliError::Output(e.to_string()))?;
    }
    if rows.is_empty() {
        w.write_record(["graph", "k", "mode", "repeat", "status", "farness", "iterations", "total_ms"])
            .map_err(|e| CliError::Output(e.to_string()))?;
    }
    w.flush().map_err(|e| CliError::Output(e.to_string()))?;
    eprintln!("wrote {} rows to {}", rows.len(), args.out.display());
    Ok(0)
}
