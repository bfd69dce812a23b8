use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand};
use serde_json::{json, Value};

use clt_core::bench::{csv_string, routes_json, run_bench, BenchConfig};
use clt_core::ingest::{grid_to_graph, parse_movingai_map, read_graph, write_graph, Connectivity};
use clt_core::relaxations::{xr_export_lp, DEFAULT_NODE_BUDGET};
use clt_core::solve::{preprocess, solve, Answer, LeafRemoval, Outcome, SolveOptions, Status};
use clt_core::{Algorithm, Instance, VertexId};

const EXIT_INFEASIBLE: u8 = 2;
const EXIT_BUDGET: u8 = 3;

/// Constrained least-cost tours and cycles.
#[derive(Parser)]
#[command(name = "clt", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Solve one instance and print the result as JSON.
    Solve(SolveArgs),
    /// Run a benchmark described by a TOML config and write CSV.
    Bench {
        #[arg(long)]
        config: PathBuf,
        /// CSV destination; standard output when omitted.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Convert a Moving-AI map into a graph file (.json or edge list).
    IngestMap {
        #[arg(long)]
        map: PathBuf,
        #[arg(long)]
        out: PathBuf,
        #[arg(long, default_value = "4", value_parser = ["4", "8"])]
        connectivity: String,
    },
    /// Write the connectivity-relaxed cycle model as an LP file.
    ExportLp {
        #[command(flatten)]
        instance: InstanceArgs,
        #[arg(long)]
        out: PathBuf,
    },
}

#[derive(Args)]
struct InstanceArgs {
    /// Edge list, or a graph document when the name ends in .json.
    #[arg(long)]
    graph: PathBuf,
    #[arg(long)]
    origin: VertexId,
    #[arg(long)]
    w1: u64,
    #[arg(long)]
    w2: u64,
}

impl InstanceArgs {
    fn load(&self) -> Result<Instance> {
        let graph = read_graph(&self.graph)
            .with_context(|| format!("reading graph {}", self.graph.display()))?;
        Ok(Instance::new(graph, self.origin, self.w1, self.w2)?)
    }
}

#[derive(Args)]
struct SolveArgs {
    #[command(flatten)]
    instance: InstanceArgs,
    #[arg(long)]
    algorithm: Algorithm,
    #[arg(long)]
    no_prune: bool,
    #[arg(long)]
    no_leaf_removal: bool,
    #[arg(long, default_value_t = DEFAULT_NODE_BUDGET)]
    xr_node_budget: u64,
    /// Write the solution (route, coordinates where known) as JSON.
    #[arg(long)]
    route_out: Option<PathBuf>,
}

fn describe(outcome: &Outcome, instance: &Instance) -> Value {
    let status = match outcome.status {
        Status::Solved => "solved",
        Status::Infeasible => "infeasible",
        Status::BudgetExceeded => "budget-exceeded",
    };
    let mut v = json!({
        "algorithm": outcome.algorithm,
        "status": status,
        "origin": instance.origin(),
        "w1": instance.w1(),
        "w2": instance.w2(),
        "total_cost": outcome.cost(),
        "total_weight": outcome.weight(),
        "vertex_count": outcome.vertex_count(instance),
        "elapsed_seconds": outcome.elapsed.as_secs_f64(),
    });
    let graph = instance.graph();
    let endpoints = |e: usize| [graph.edge(e).u, graph.edge(e).v];
    match &outcome.answer {
        Some(Answer::Tour(t)) => {
            v["vertices"] = json!(t.vertices());
            if graph.has_coords() {
                let coords: Vec<_> = t
                    .vertices()
                    .iter()
                    .map(|&x| graph.coords(x).map(|p| [p.x, p.y]))
                    .collect();
                v["coords"] = json!(coords);
            }
        }
        Some(Answer::Relaxed(s)) => {
            v["access_path"] = json!(s.access_path);
            v["head_edge"] = json!(s.head_edge.map(endpoints));
            v["head_multiplicity"] = json!(s.head_multiplicity);
        }
        Some(Answer::Selection { edges, .. }) => {
            let list: Vec<_> = edges.iter().map(|&e| endpoints(e)).collect();
            v["edges"] = json!(list);
        }
        None => {}
    }
    v
}

fn run_solve(args: &SolveArgs) -> Result<u8> {
    let instance = args.instance.load()?;
    let options = SolveOptions {
        prune: !args.no_prune,
        leaf_removal: if args.no_leaf_removal {
            LeafRemoval::Never
        } else {
            LeafRemoval::Default
        },
        xr_node_budget: args.xr_node_budget,
    };
    let reduced = preprocess(&instance, args.algorithm, &options);
    let outcome = solve(args.algorithm, &reduced, &options);
    let report = describe(&outcome, &reduced);
    println!("{}", serde_json::to_string_pretty(&report)?);
    if let Some(path) = &args.route_out {
        fs::write(path, serde_json::to_string_pretty(&report)?)
            .with_context(|| format!("writing {}", path.display()))?;
    }
    Ok(match outcome.status {
        Status::Solved => 0,
        Status::Infeasible => EXIT_INFEASIBLE,
        Status::BudgetExceeded => EXIT_BUDGET,
    })
}

fn run(cli: Cli) -> Result<u8> {
    match cli.command {
        Command::Solve(args) => run_solve(&args),
        Command::Bench { config, out } => {
            let config = BenchConfig::load(&config)?;
            let output = run_bench(&config)?;
            let csv = csv_string(&output.records);
            match out {
                Some(path) => {
                    fs::write(&path, csv).with_context(|| format!("writing {}", path.display()))?
                }
                None => print!("{csv}"),
            }
            if let Some(path) = &config.routes {
                fs::write(path, routes_json(&output.routes))
                    .with_context(|| format!("writing {}", path.display()))?;
            }
            Ok(0)
        }
        Command::IngestMap {
            map,
            out,
            connectivity,
        } => {
            let connectivity: Connectivity = connectivity.parse().map_err(anyhow::Error::msg)?;
            let text = fs::read(&map).with_context(|| format!("reading {}", map.display()))?;
            let grid = parse_movingai_map(text.as_slice())
                .with_context(|| format!("parsing {}", map.display()))?;
            let graph = grid_to_graph(&grid, connectivity);
            write_graph(&graph, &out).with_context(|| format!("writing {}", out.display()))?;
            eprintln!(
                "{} vertices, {} edges",
                graph.vertex_count(),
                graph.edge_count()
            );
            Ok(0)
        }
        Command::ExportLp { instance, out } => {
            let instance = instance.load()?;
            xr_export_lp(&instance, &out).with_context(|| format!("writing {}", out.display()))?;
            Ok(0)
        }
    }
}

fn main() -> ExitCode {
    // Usage errors exit with 1; clap's default of 2 means "infeasible" here.
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
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}
