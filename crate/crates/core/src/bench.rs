//! Benchmark harness: run a set of algorithms over origins and a ladder of
//! weight thresholds, and tabulate cost, overshoot and margin of error
//! against the matching lower bound.
//!
//! Configuration (TOML):
//!
//! ```toml
//! graph = "city.txt"            # relative to the config file
//! algorithms = ["djv", "cr", "sh", "ah", "xr"]
//! origin_count = 10             # or: origins = [0, 17]
//! thresholds = [10, 20, 30]     # w1 values
//! gap = 5                       # w2 = w1 + gap
//! seed = 1
//! # optional
//! xr_node_budget = 10000000
//! prune = true
//! leaf_removal = "default"      # "always" | "never"
//! timing = true                 # false leaves elapsed_seconds blank
//! threads = 0                   # 0 = one per core
//! routes = "routes.json"
//! ```

use std::collections::BTreeMap;
use std::io;
use std::path::{Path, PathBuf};

use rand::seq::IndexedRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::graph::{Graph, Instance, VertexId};
use crate::ingest::{read_graph, IngestError};
use crate::preprocess::remove_leaves;
use crate::relaxations::DEFAULT_NODE_BUDGET;
use crate::solve::{preprocess, solve, LeafRemoval, Outcome, SolveOptions, Status};
use crate::Algorithm;

#[derive(Debug, Error)]
pub enum BenchError {
    #[error("reading {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: io::Error,
    },
    #[error("config: {0}")]
    Config(String),
    #[error("graph {path}: {source}")]
    Graph {
        path: PathBuf,
        #[source]
        source: IngestError,
    },
    #[error("origin {0} is not a vertex of the graph")]
    UnknownOrigin(VertexId),
    #[error("invalid threshold ladder: {0}")]
    Thresholds(String),
    #[error(transparent)]
    Csv(#[from] csv::Error),
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum LeafPolicy {
    #[default]
    Default,
    Always,
    Never,
}

fn default_true() -> bool {
    true
}

fn default_budget() -> u64 {
    DEFAULT_NODE_BUDGET
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BenchConfig {
    pub graph: PathBuf,
    pub algorithms: Vec<Algorithm>,
    #[serde(default)]
    pub origins: Option<Vec<VertexId>>,
    #[serde(default)]
    pub origin_count: Option<usize>,
    pub thresholds: Vec<u64>,
    pub gap: u64,
    pub seed: u64,
    #[serde(default = "default_budget")]
    pub xr_node_budget: u64,
    #[serde(default = "default_true")]
    pub prune: bool,
    #[serde(default)]
    pub leaf_removal: LeafPolicy,
    #[serde(default = "default_true")]
    pub timing: bool,
    #[serde(default)]
    pub threads: usize,
    #[serde(default)]
    pub routes: Option<PathBuf>,
}

impl BenchConfig {
    pub fn from_toml(text: &str) -> Result<Self, BenchError> {
        toml::from_str(text).map_err(|e| BenchError::Config(e.to_string()))
    }

    /// Reads a config file; relative paths inside it are resolved against
    /// the file's directory.
    pub fn load(path: &Path) -> Result<Self, BenchError> {
        let text = std::fs::read_to_string(path).map_err(|source| BenchError::Io {
            path: path.to_path_buf(),
            source,
        })?;
        let mut config = Self::from_toml(&text)?;
        let base = path.parent().unwrap_or(Path::new("."));
        config.graph = base.join(&config.graph);
        config.routes = config.routes.map(|r| base.join(r));
        Ok(config)
    }

    fn solve_options(&self) -> SolveOptions {
        SolveOptions {
            prune: self.prune,
            leaf_removal: match self.leaf_removal {
                LeafPolicy::Default => LeafRemoval::Default,
                LeafPolicy::Always => LeafRemoval::Always,
                LeafPolicy::Never => LeafRemoval::Never,
            },
            xr_node_budget: self.xr_node_budget,
        }
    }
}

/// `tour_weight - w1`, or `None` when the tour falls short of `w1`.
pub fn overshoot(tour_weight: u64, w1: u64) -> Option<u64> {
    tour_weight.checked_sub(w1)
}

/// `100 * (heuristic - relaxation) / relaxation`. Zero against zero is 0;
/// anything else against zero is undefined.
pub fn margin_of_error(heuristic_cost: f64, relaxation_cost: f64) -> Option<f64> {
    if relaxation_cost == 0.0 {
        (heuristic_cost == 0.0).then_some(0.0)
    } else {
        Some(100.0 * (heuristic_cost - relaxation_cost) / relaxation_cost)
    }
}

/// The lower bound each algorithm is measured against.
pub fn relaxation_for(algorithm: Algorithm) -> Option<Algorithm> {
    match algorithm {
        Algorithm::Djv | Algorithm::ExactClt => Some(Algorithm::Cr),
        Algorithm::Sh | Algorithm::Ah | Algorithm::ExactClc => Some(Algorithm::Xr),
        Algorithm::Cr | Algorithm::Xr => None,
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BenchRecord {
    pub algorithm: Algorithm,
    pub origin: VertexId,
    pub w1: u64,
    pub w2: u64,
    pub total_weight: Option<u64>,
    pub total_cost: Option<f64>,
    pub vertex_count: Option<usize>,
    pub overshoot: Option<u64>,
    pub margin_of_error_pct: Option<f64>,
    pub preprocessed_vertices: usize,
    pub preprocessed_edges: usize,
    pub elapsed_seconds: Option<f64>,
    pub optimal: bool,
    pub feasible: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RouteDump {
    pub algorithm: Algorithm,
    pub origin: VertexId,
    pub w1: u64,
    pub w2: u64,
    pub vertices: Vec<VertexId>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub coords: Option<Vec<[f64; 2]>>,
}

#[derive(Clone, Debug, Default)]
pub struct BenchOutput {
    pub records: Vec<BenchRecord>,
    pub routes: Vec<RouteDump>,
}

/// Vertices on some cycle, used as the pool for random origins. Falls back
/// to every vertex when the graph is a forest.
fn origin_pool(graph: &Graph) -> Vec<VertexId> {
    let core = remove_leaves(graph, usize::MAX);
    let pool: Vec<VertexId> = core.vertices().collect();
    if pool.is_empty() {
        graph.vertices().collect()
    } else {
        pool
    }
}

pub fn choose_origins(graph: &Graph, config: &BenchConfig) -> Result<Vec<VertexId>, BenchError> {
    if let Some(origins) = &config.origins {
        if let Some(&bad) = origins.iter().find(|&&o| !graph.contains(o)) {
            return Err(BenchError::UnknownOrigin(bad));
        }
        return Ok(origins.clone());
    }
    let count = config
        .origin_count
        .ok_or_else(|| BenchError::Config("set either `origins` or `origin_count`".into()))?;
    let pool = origin_pool(graph);
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let mut chosen: Vec<VertexId> = pool.choose_multiple(&mut rng, count).copied().collect();
    chosen.sort_unstable();
    Ok(chosen)
}

fn check_thresholds(config: &BenchConfig) -> Result<(), BenchError> {
    if config.thresholds.is_empty() {
        return Err(BenchError::Thresholds("no thresholds".into()));
    }
    if config.thresholds.windows(2).any(|w| w[0] >= w[1]) {
        return Err(BenchError::Thresholds(
            "thresholds must be strictly increasing".into(),
        ));
    }
    if config
        .thresholds
        .iter()
        .any(|&t| t.checked_add(config.gap).is_none())
    {
        return Err(BenchError::Thresholds("w1 + gap overflows".into()));
    }
    Ok(())
}

pub fn run_bench(config: &BenchConfig) -> Result<BenchOutput, BenchError> {
    let graph = read_graph(&config.graph).map_err(|source| BenchError::Graph {
        path: config.graph.clone(),
        source,
    })?;
    run_bench_on(&graph, config)
}

struct Cell {
    origin: VertexId,
    w1: u64,
    w2: u64,
    runs: BTreeMap<Algorithm, (Outcome, Instance)>,
}

/// Runs every (origin, threshold) cell, in parallel when `threads` allows.
/// The output does not depend on scheduling.
pub fn run_bench_on(graph: &Graph, config: &BenchConfig) -> Result<BenchOutput, BenchError> {
    if config.algorithms.is_empty() {
        return Ok(BenchOutput::default());
    }
    check_thresholds(config)?;
    let origins = choose_origins(graph, config)?;
    let options = config.solve_options();

    let mut needed: Vec<Algorithm> = config.algorithms.clone();
    needed.extend(config.algorithms.iter().filter_map(|&a| relaxation_for(a)));
    needed.sort();
    needed.dedup();

    let cells: Vec<(VertexId, u64)> = origins
        .iter()
        .flat_map(|&o| config.thresholds.iter().map(move |&w1| (o, w1)))
        .collect();
    let run_cell = |&(origin, w1): &(VertexId, u64)| {
        let w2 = w1 + config.gap;
        let instance = Instance::new(graph.clone(), origin, w1, w2).expect("origin checked");
        let runs = needed
            .iter()
            .map(|&a| {
                let reduced = preprocess(&instance, a, &options);
                (a, (solve(a, &reduced, &options), reduced))
            })
            .collect();
        Cell {
            origin,
            w1,
            w2,
            runs,
        }
    };
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(config.threads)
        .build()
        .map_err(|e| BenchError::Config(e.to_string()))?;
    let cells: Vec<Cell> = pool.install(|| cells.par_iter().map(run_cell).collect());

    let mut out = BenchOutput::default();
    for cell in &cells {
        for &a in &config.algorithms {
            let (outcome, reduced) = &cell.runs[&a];
            let margin = relaxation_for(a).and_then(|r| {
                let (relax, _) = &cell.runs[&r];
                let (h, b) = (outcome.cost()?, relax.cost()?);
                if !outcome.is_feasible() || relax.status != Status::Solved || b <= 0.0 {
                    return None;
                }
                margin_of_error(h, b)
            });
            let feasible = outcome.is_feasible();
            out.records.push(BenchRecord {
                algorithm: a,
                origin: cell.origin,
                w1: cell.w1,
                w2: cell.w2,
                total_weight: outcome.weight(),
                total_cost: outcome.cost(),
                vertex_count: outcome.vertex_count(reduced),
                overshoot: outcome
                    .weight()
                    .filter(|_| feasible)
                    .and_then(|w| overshoot(w, cell.w1)),
                margin_of_error_pct: margin,
                preprocessed_vertices: reduced.graph().vertex_count(),
                preprocessed_edges: reduced.graph().edge_count(),
                elapsed_seconds: config.timing.then_some(outcome.elapsed.as_secs_f64()),
                optimal: outcome.status != Status::BudgetExceeded,
                feasible,
            });
            if let Some(route) = outcome.route() {
                let coords = graph.has_coords().then(|| {
                    route
                        .iter()
                        .map(|&v| graph.coords(v).map_or([f64::NAN; 2], |p| [p.x, p.y]))
                        .collect()
                });
                out.routes.push(RouteDump {
                    algorithm: a,
                    origin: cell.origin,
                    w1: cell.w1,
                    w2: cell.w2,
                    vertices: route.to_vec(),
                    coords,
                });
            }
        }
    }
    out.records.sort_by_key(|r| (r.algorithm, r.origin, r.w1));
    out.routes.sort_by_key(|r| (r.algorithm, r.origin, r.w1));
    Ok(out)
}

pub const CSV_HEADER: [&str; 14] = [
    "algorithm",
    "origin",
    "w1",
    "w2",
    "total_weight",
    "total_cost",
    "vertex_count",
    "overshoot",
    "margin_of_error_pct",
    "preprocessed_vertices",
    "preprocessed_edges",
    "elapsed_seconds",
    "optimal",
    "feasible",
];

fn opt<T: ToString>(v: Option<T>) -> String {
    v.map_or_else(String::new, |v| v.to_string())
}

/// CSV with a header row. Missing values are empty, except an undefined
/// margin of error, which is written as `NA` when the algorithm has a
/// matching relaxation.
pub fn write_csv<W: io::Write>(records: &[BenchRecord], out: W) -> Result<(), BenchError> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(CSV_HEADER)?;
    for r in records {
        let margin = match (r.margin_of_error_pct, relaxation_for(r.algorithm)) {
            (Some(m), _) => m.to_string(),
            (None, Some(_)) => "NA".to_string(),
            (None, None) => String::new(),
        };
        w.write_record([
            r.algorithm.to_string(),
            r.origin.to_string(),
            r.w1.to_string(),
            r.w2.to_string(),
            opt(r.total_weight),
            opt(r.total_cost),
            opt(r.vertex_count),
            opt(r.overshoot),
            margin,
            r.preprocessed_vertices.to_string(),
            r.preprocessed_edges.to_string(),
            opt(r.elapsed_seconds),
            r.optimal.to_string(),
            r.feasible.to_string(),
        ])?;
    }
    w.flush().map_err(csv::Error::from)?;
    Ok(())
}

pub fn csv_string(records: &[BenchRecord]) -> String {
    let mut buf = Vec::new();
    write_csv(records, &mut buf).expect("writing to memory");
    String::from_utf8(buf).expect("csv is utf-8")
}

pub fn routes_json(routes: &[RouteDump]) -> String {
    serde_json::to_string_pretty(routes).expect("plain data")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::fixtures::triangle;

    fn config(algorithms: Vec<Algorithm>) -> BenchConfig {
        BenchConfig {
            graph: PathBuf::from("unused"),
            algorithms,
            origins: Some(vec![0]),
            origin_count: None,
            thresholds: vec![3],
            gap: 0,
            seed: 1,
            xr_node_budget: DEFAULT_NODE_BUDGET,
            prune: true,
            leaf_removal: LeafPolicy::Default,
            timing: false,
            threads: 1,
            routes: None,
        }
    }

    #[test]
    fn overshoot_examples() {
        assert_eq!(overshoot(1164, 1164), Some(0));
        assert_eq!(overshoot(6, 5), Some(1));
        assert_eq!(overshoot(4, 5), None);
    }

    #[test]
    fn margin_examples() {
        assert_eq!(margin_of_error(103.0, 100.0), Some(3.0));
        assert_eq!(margin_of_error(7.5, 7.5), Some(0.0));
        assert_eq!(margin_of_error(6.0, 3.0), Some(100.0));
        assert_eq!(margin_of_error(0.0, 0.0), Some(0.0));
        assert_eq!(margin_of_error(1.0, 0.0), None);
    }

    #[test]
    fn triangle_bench() {
        let algos = vec![
            Algorithm::Djv,
            Algorithm::Cr,
            Algorithm::Sh,
            Algorithm::Ah,
            Algorithm::Xr,
            Algorithm::ExactClc,
        ];
        let out = run_bench_on(&triangle(), &config(algos)).unwrap();
        assert_eq!(out.records.len(), 6);
        let cost = |a| {
            out.records
                .iter()
                .find(|r| r.algorithm == a)
                .unwrap()
                .total_cost
        };
        assert_eq!(cost(Algorithm::Cr), Some(3.0));
        assert_eq!(cost(Algorithm::Xr), Some(6.0));
        assert_eq!(cost(Algorithm::Sh), Some(6.0));
        assert_eq!(cost(Algorithm::Ah), Some(6.0));
        let djv = &out.records[0];
        assert_eq!(djv.algorithm, Algorithm::Djv);
        assert!(!djv.feasible);
        let sh = out
            .records
            .iter()
            .find(|r| r.algorithm == Algorithm::Sh)
            .unwrap();
        assert_eq!(sh.margin_of_error_pct, Some(0.0));
        assert_eq!(sh.overshoot, Some(0));
    }

    #[test]
    fn djv_margin_against_cr() {
        let mut c = config(vec![Algorithm::Djv]);
        c.thresholds = vec![5];
        c.gap = 1;
        let out = run_bench_on(&triangle(), &c).unwrap();
        assert_eq!(out.records.len(), 1);
        assert_eq!(out.records[0].total_cost, Some(6.0));
        assert_eq!(out.records[0].margin_of_error_pct, Some(20.0));
    }

    #[test]
    fn empty_algorithm_set() {
        assert!(run_bench_on(&triangle(), &config(vec![]))
            .unwrap()
            .records
            .is_empty());
    }

    #[test]
    fn bad_inputs() {
        let mut c = config(vec![Algorithm::Djv]);
        c.origins = Some(vec![9]);
        assert!(matches!(
            run_bench_on(&triangle(), &c),
            Err(BenchError::UnknownOrigin(9))
        ));
        let mut c = config(vec![Algorithm::Djv]);
        c.thresholds = vec![4, 4];
        assert!(matches!(
            run_bench_on(&triangle(), &c),
            Err(BenchError::Thresholds(_))
        ));
        c.thresholds = vec![];
        assert!(matches!(
            run_bench_on(&triangle(), &c),
            Err(BenchError::Thresholds(_))
        ));
    }

    #[test]
    fn toml_config() {
        let c = BenchConfig::from_toml(
            "graph = \"g.txt\"\nalgorithms = [\"djv\", \"exact-clc\"]\norigin_count = 3\n\
             thresholds = [4, 8]\ngap = 2\nseed = 9\nleaf_removal = \"never\"\n",
        )
        .unwrap();
        assert_eq!(c.algorithms, vec![Algorithm::Djv, Algorithm::ExactClc]);
        assert_eq!(c.leaf_removal, LeafPolicy::Never);
        assert!(c.timing && c.prune);
        assert!(BenchConfig::from_toml("graph = 1").is_err());
    }

    #[test]
    fn csv_is_stable() {
        let out = run_bench_on(&triangle(), &config(Algorithm::ALL.to_vec())).unwrap();
        let a = csv_string(&out.records);
        assert!(a.starts_with("algorithm,origin,w1,w2,total_weight"));
        assert_eq!(a.lines().count(), 8);
        assert_eq!(
            a,
            csv_string(
                &run_bench_on(&triangle(), &config(Algorithm::ALL.to_vec()))
                    .unwrap()
                    .records
            )
        );
        assert!(a.contains("djv,0,3,3,,,,,NA,"));
    }
}
