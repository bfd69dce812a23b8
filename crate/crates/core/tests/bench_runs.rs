use std::fs;

use clt_core::bench::{csv_string, routes_json, run_bench, run_bench_on, BenchConfig, BenchError};
use clt_core::generate::synthetic_map;
use clt_core::ingest::{grid_to_graph, write_graph, Connectivity};
use clt_core::Algorithm;

const TRIANGLE: &str = "0 1 1 1\n1 2 1 2\n2 0 1 3\n";

#[test]
fn config_file_with_relative_graph_path() {
    let dir = tempfile::tempdir().unwrap();
    fs::write(dir.path().join("tri.txt"), TRIANGLE).unwrap();
    let cfg = dir.path().join("bench.toml");
    fs::write(
        &cfg,
        "graph = \"tri.txt\"\n\
         algorithms = [\"djv\", \"cr\", \"sh\", \"ah\", \"xr\", \"exact-clt\"]\n\
         origins = [0]\nthresholds = [3]\ngap = 0\nseed = 1\ntiming = false\n\
         routes = \"routes.json\"\n",
    )
    .unwrap();
    let config = BenchConfig::load(&cfg).unwrap();
    let out = run_bench(&config).unwrap();
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
    assert_eq!(cost(Algorithm::ExactClt), Some(6.0));
    // exact-clt measured against cr: (6 - 3) / 3.
    let clt = out
        .records
        .iter()
        .find(|r| r.algorithm == Algorithm::ExactClt)
        .unwrap();
    assert_eq!(clt.margin_of_error_pct, Some(100.0));
    let routes = routes_json(&out.routes);
    assert!(routes.contains("\"algorithm\": \"sh\""));
    assert!(csv_string(&out.records).lines().all(|l| !l.contains("NaN")));
}

#[test]
fn missing_graph_file_is_reported() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("bench.toml");
    fs::write(
        &cfg,
        "graph = \"nope.txt\"\nalgorithms = [\"djv\"]\norigins = [0]\nthresholds = [3]\ngap = 0\nseed = 1\n",
    )
    .unwrap();
    let config = BenchConfig::load(&cfg).unwrap();
    assert!(matches!(run_bench(&config), Err(BenchError::Graph { .. })));
}

#[test]
fn grid_bench_invariants() {
    let dir = tempfile::tempdir().unwrap();
    let graph = grid_to_graph(&synthetic_map(24, 24, 11), Connectivity::Four);
    let path = dir.path().join("grid.json");
    write_graph(&graph, &path).unwrap();
    let config = BenchConfig::from_toml(&format!(
        "graph = {:?}\nalgorithms = [\"djv\", \"cr\", \"sh\", \"ah\", \"xr\"]\n\
         origin_count = 3\nthresholds = [6, 10, 14]\ngap = 2\nseed = 5\n\
         xr_node_budget = 200000\ntiming = false\n",
        path.to_str().unwrap()
    ))
    .unwrap();
    let out = run_bench(&config).unwrap();
    assert_eq!(out.records.len(), 5 * 3 * 3);
    assert_eq!(out.records, run_bench_on(&graph, &config).unwrap().records);

    let sorted = out
        .records
        .windows(2)
        .all(|w| (w[0].algorithm, w[0].origin, w[0].w1) <= (w[1].algorithm, w[1].origin, w[1].w1));
    assert!(sorted);
    for r in &out.records {
        if r.algorithm == Algorithm::Cr && r.feasible {
            assert_eq!(r.overshoot, Some(0));
        }
        if let Some(m) = r.margin_of_error_pct {
            assert!(m >= -1e-7, "{r:?}");
        }
        if r.feasible {
            assert!(r.total_weight.unwrap() >= r.w1 && r.total_weight.unwrap() <= r.w2);
        }
    }
    for sh in out.records.iter().filter(|r| r.algorithm == Algorithm::Sh) {
        let ah = out
            .records
            .iter()
            .find(|r| r.algorithm == Algorithm::Ah && r.origin == sh.origin && r.w1 == sh.w1)
            .unwrap();
        if let (Some(a), Some(s)) = (ah.margin_of_error_pct, sh.margin_of_error_pct) {
            assert!(a <= s + 1e-7);
        }
    }
}
