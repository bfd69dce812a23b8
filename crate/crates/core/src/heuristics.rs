//! Polynomial-time heuristics.
//!
//! * Déjà Vu (DjV), for tours: walk the least-cost tree path to an edge,
//!   bounce on that edge an even number of times, walk back.
//! * Suurballe's heuristic (SH), for simple cycles: every shortest
//!   vertex-disjoint pair from the origin closes into a candidate cycle.
//! * Adaptive heuristic (AH): the same, but from every source vertex, keeping
//!   the cycles that pass through the origin.
//!
//! All three return `None` when no weight-feasible candidate exists.

use std::cmp::Ordering;
use std::collections::btree_map::Entry;
use std::collections::BTreeMap;
use std::time::{Duration, Instant};

use rayon::prelude::*;

use crate::float::min_by_cost_then;
use crate::graph::{evaluate_tour, least_cost_tree, CycleSolution, Instance, Tour, VertexId};
use crate::suurballe::DisjointPairs;
use crate::Algorithm;

#[derive(Clone, Debug)]
pub struct HeuristicResult {
    pub algorithm: Algorithm,
    pub tour: Tour,
    /// Number of distinct weight-feasible candidates considered.
    pub candidate_count: usize,
    pub elapsed: Duration,
}

/// Smallest positive even integer not below `x`.
pub fn round_up_even(x: f64) -> u64 {
    let r = 2.0 * (x / 2.0).ceil();
    if r.is_nan() || r < 2.0 {
        2
    } else {
        r as u64
    }
}

/// `round_up_even(num / den)` for integers, without going through floats.
fn even_multiplicity(num: i128, den: u64) -> u64 {
    if num <= 0 {
        return 2;
    }
    let den2 = 2 * den as i128;
    let half = (num + den2 - 1) / den2;
    (2 * half).max(2) as u64
}

/// Order used to break exact cost ties between candidate tours.
fn fewer_vertices_then_lexicographic(a: &[VertexId], b: &[VertexId]) -> Ordering {
    a.len().cmp(&b.len()).then_with(|| a.cmp(b))
}

pub fn djv_solve(instance: &Instance) -> Option<HeuristicResult> {
    let started = Instant::now();
    let graph = instance.graph();
    let origin = instance.origin();
    let tree = least_cost_tree(graph, origin);

    let mut candidates = Vec::new();
    for edge in graph.edges() {
        let (Some(lu), Some(lv)) = (tree.cost(edge.u), tree.cost(edge.v)) else {
            continue;
        };
        let (x, y) = match lu.total_cmp(&lv) {
            Ordering::Less => (edge.u, edge.v),
            Ordering::Greater => (edge.v, edge.u),
            Ordering::Equal => (edge.u.min(edge.v), edge.u.max(edge.v)),
        };
        let access = tree.weight(x).expect("reachable");
        if 2 * access + 2 * edge.weight > instance.w2() {
            continue;
        }
        let phi = if edge.weight == 0 {
            if !instance.accepts_weight(2 * access) {
                continue;
            }
            2
        } else {
            even_multiplicity(instance.w1() as i128 - 2 * access as i128, edge.weight)
        };
        if !instance.accepts_weight(2 * access + phi * edge.weight) {
            continue;
        }
        let path = tree.path_to(x).expect("reachable");
        let mut seq = path.clone();
        for i in 0..phi {
            seq.push(if i % 2 == 0 { y } else { x });
        }
        seq.extend(path.iter().rev().skip(1));
        candidates.push(evaluate_tour(graph, seq).expect("tree paths and edges are adjacent"));
    }

    let candidate_count = candidates.len();
    let tour = min_by_cost_then(candidates, Tour::total_cost, |a, b| {
        fewer_vertices_then_lexicographic(a.vertices(), b.vertices())
    })?;
    Some(HeuristicResult {
        algorithm: Algorithm::Djv,
        tour,
        candidate_count,
        elapsed: started.elapsed(),
    })
}

/// Feasible cycles through the origin produced by pairs from `source`, keyed
/// by canonical vertex sequence.
fn cycles_from(
    pairs: &DisjointPairs<'_>,
    instance: &Instance,
    source: VertexId,
) -> BTreeMap<Vec<VertexId>, Tour> {
    let graph = instance.graph();
    let mut out = BTreeMap::new();
    for pair in pairs.from_source(source).into_values() {
        if !instance.accepts_weight(pair.total_weight) {
            continue;
        }
        let cycle = pair.to_cycle(graph);
        let Some(seq) = CycleSolution::canonical_sequence(cycle.vertices(), instance.origin())
        else {
            continue;
        };
        if let Entry::Vacant(slot) = out.entry(seq) {
            let tour = evaluate_tour(graph, slot.key().clone()).expect("rotation of a cycle");
            slot.insert(tour);
        }
    }
    out
}

fn best_cycle(
    algorithm: Algorithm,
    candidates: BTreeMap<Vec<VertexId>, Tour>,
    started: Instant,
) -> Option<HeuristicResult> {
    let candidate_count = candidates.len();
    let tour = min_by_cost_then(candidates.into_values(), Tour::total_cost, |a, b| {
        fewer_vertices_then_lexicographic(a.vertices(), b.vertices())
    })?;
    Some(HeuristicResult {
        algorithm,
        tour,
        candidate_count,
        elapsed: started.elapsed(),
    })
}

pub fn sh_solve(instance: &Instance) -> Option<HeuristicResult> {
    let started = Instant::now();
    let pairs = DisjointPairs::new(instance.graph());
    let candidates = cycles_from(&pairs, instance, instance.origin());
    best_cycle(Algorithm::Sh, candidates, started)
}

/// Runs one shortest-pair search per source vertex on the current rayon
/// pool. The merged candidate set, and hence the answer, does not depend on
/// scheduling.
pub fn ah_solve(instance: &Instance) -> Option<HeuristicResult> {
    let started = Instant::now();
    let graph = instance.graph();
    let pairs = DisjointPairs::new(graph);
    let sources: Vec<VertexId> = graph.vertices().collect();
    let candidates = sources
        .par_iter()
        .map(|&u| cycles_from(&pairs, instance, u))
        .reduce(BTreeMap::new, |mut a, b| {
            for (k, v) in b {
                a.entry(k).or_insert(v);
            }
            a
        });
    best_cycle(Algorithm::Ah, candidates, started)
}
