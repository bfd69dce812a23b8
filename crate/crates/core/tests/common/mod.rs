//! Brute-force oracles shared by the integration tests. Each one enumerates
//! the raw search space directly and shares no code with the solvers beyond
//! the graph container.
#![allow(dead_code)]

use std::collections::{BTreeMap, BTreeSet};

use clt_core::{Graph, Instance, VertexId};

pub fn rel_le(a: f64, b: f64) -> bool {
    a <= b || (a - b).abs() <= 1e-9 * a.abs().max(b.abs())
}

pub fn rel_eq(a: f64, b: f64) -> bool {
    (a - b).abs() <= 1e-9 * a.abs().max(b.abs())
}

fn edge_data(graph: &Graph, u: VertexId, v: VertexId) -> (u64, f64) {
    let e = graph.edge(graph.edge_between(u, v).expect("adjacent"));
    (e.weight, e.cost)
}

/// Every simple path from `s` to `t`, with its cost.
pub fn simple_paths(graph: &Graph, s: VertexId, t: VertexId) -> Vec<(Vec<VertexId>, f64)> {
    fn go(
        graph: &Graph,
        t: VertexId,
        path: &mut Vec<VertexId>,
        cost: f64,
        out: &mut Vec<(Vec<VertexId>, f64)>,
    ) {
        let last = *path.last().unwrap();
        if last == t {
            out.push((path.clone(), cost));
            return;
        }
        let next: Vec<VertexId> = graph.neighbors(last).map(|(v, _)| v).collect();
        for v in next {
            if !path.contains(&v) {
                let (_, c) = edge_data(graph, last, v);
                path.push(v);
                go(graph, t, path, cost + c, out);
                path.pop();
            }
        }
    }
    let mut out = Vec::new();
    go(graph, t, &mut vec![s], 0.0, &mut out);
    out
}

/// Least total cost of two distinct `s`-`t` paths sharing no interior vertex.
pub fn brute_pair_cost(graph: &Graph, s: VertexId, t: VertexId) -> Option<f64> {
    let paths = simple_paths(graph, s, t);
    let interiors: Vec<BTreeSet<VertexId>> = paths
        .iter()
        .map(|(p, _)| p[1..p.len() - 1].iter().copied().collect())
        .collect();
    let mut best: Option<f64> = None;
    for i in 0..paths.len() {
        for j in i + 1..paths.len() {
            if interiors[i].is_disjoint(&interiors[j]) {
                let c = paths[i].1 + paths[j].1;
                best = Some(best.map_or(c, |b| b.min(c)));
            }
        }
    }
    best
}

/// Least cost of any closed walk from the origin with weight in the window.
/// Needs positive weights so that the enumeration terminates.
pub fn brute_tour_cost(instance: &Instance) -> Option<f64> {
    let graph = instance.graph();
    assert!(graph.edges().iter().all(|e| e.weight > 0));
    fn go(
        graph: &Graph,
        instance: &Instance,
        at: VertexId,
        weight: u64,
        cost: f64,
        best: &mut Option<f64>,
    ) {
        if at == instance.origin() && instance.accepts_weight(weight) {
            *best = Some(best.map_or(cost, |b: f64| b.min(cost)));
        }
        let next: Vec<VertexId> = graph.neighbors(at).map(|(v, _)| v).collect();
        for v in next {
            let (w, c) = edge_data(graph, at, v);
            if weight + w <= instance.w2() {
                go(graph, instance, v, weight + w, cost + c, best);
            }
        }
    }
    let mut best = None;
    go(graph, instance, instance.origin(), 0, 0.0, &mut best);
    best
}

/// Least cost over every edge subset where the origin has degree two, every
/// other vertex degree zero or two, and the weight is in the window.
pub fn brute_degree_selection(instance: &Instance) -> Option<f64> {
    let graph = instance.graph();
    let m = graph.edge_count();
    assert!(m <= 20, "too many edges to enumerate");
    let mut best: Option<f64> = None;
    for mask in 0u32..(1 << m) {
        let mut degree: BTreeMap<VertexId, usize> = BTreeMap::new();
        let (mut w, mut c) = (0u64, 0.0);
        for (i, e) in graph.edges().iter().enumerate() {
            if mask >> i & 1 == 1 {
                *degree.entry(e.u).or_default() += 1;
                *degree.entry(e.v).or_default() += 1;
                w += e.weight;
                c += e.cost;
            }
        }
        let ok = degree.get(&instance.origin()) == Some(&2)
            && degree.values().all(|&d| d == 2)
            && instance.accepts_weight(w);
        if ok {
            best = Some(best.map_or(c, |b| b.min(c)));
        }
    }
    best
}

/// A parsed CPLEX-LP model restricted to what the exporter writes: linear
/// rows, binary variables.
#[derive(Debug, Default)]
pub struct LpModel {
    pub objective: Vec<(f64, String)>,
    pub rows: Vec<LpRow>,
    pub binaries: Vec<String>,
}

#[derive(Debug)]
pub struct LpRow {
    pub name: String,
    pub terms: Vec<(f64, String)>,
    pub sense: String,
    pub rhs: f64,
}

fn parse_terms(tokens: &[&str]) -> Vec<(f64, String)> {
    let mut terms = Vec::new();
    let mut sign = 1.0;
    let mut i = 0;
    while i < tokens.len() {
        match tokens[i] {
            "+" => sign = 1.0,
            "-" => sign = -1.0,
            tok => {
                let coef: f64 = tok.parse().expect("coefficient");
                terms.push((sign * coef, tokens[i + 1].to_string()));
                sign = 1.0;
                i += 1;
            }
        }
        i += 1;
    }
    terms
}

pub fn parse_lp(text: &str) -> LpModel {
    let mut model = LpModel::default();
    let mut section = "";
    let mut statements: Vec<(String, String)> = Vec::new();
    for line in text.lines() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('\\') {
            continue;
        }
        match line {
            "Minimize" | "Subject To" | "Bounds" | "Binary" | "End" => {
                section = match line {
                    "Minimize" => "min",
                    "Subject To" => "st",
                    "Bounds" => "bounds",
                    "Binary" => "bin",
                    _ => "end",
                };
                continue;
            }
            _ => {}
        }
        match section {
            "min" | "st" => {
                if line.contains(':') {
                    statements.push((section.to_string(), line.to_string()));
                } else {
                    let last = statements.last_mut().expect("continuation line");
                    last.1.push(' ');
                    last.1.push_str(line);
                }
            }
            "bin" => model
                .binaries
                .extend(line.split_whitespace().map(String::from)),
            _ => {}
        }
    }
    for (section, stmt) in statements {
        let (name, body) = stmt.split_once(':').unwrap();
        let tokens: Vec<&str> = body.split_whitespace().collect();
        if section == "min" {
            model.objective = parse_terms(&tokens);
        } else {
            let k = tokens
                .iter()
                .position(|t| matches!(*t, "<=" | ">=" | "="))
                .expect("row sense");
            model.rows.push(LpRow {
                name: name.trim().to_string(),
                terms: parse_terms(&tokens[..k]),
                sense: tokens[k].to_string(),
                rhs: tokens[k + 1].parse().unwrap(),
            });
        }
    }
    model
}

fn row_holds(sense: &str, lhs: f64, rhs: f64) -> bool {
    match sense {
        "<=" => lhs <= rhs,
        ">=" => lhs >= rhs,
        _ => lhs == rhs,
    }
}

/// Minimum objective by enumerating every 0/1 assignment of the `x_`
/// variables. Each `y_` variable may appear with a non-zero coefficient in
/// a single row, so it is solved for directly from that row.
pub fn solve_lp_by_enumeration(model: &LpModel) -> Option<f64> {
    let xs: Vec<&String> = model
        .binaries
        .iter()
        .filter(|v| v.starts_with("x_"))
        .collect();
    assert!(xs.len() <= 20, "too many variables to enumerate");
    let index: BTreeMap<&str, usize> = xs
        .iter()
        .enumerate()
        .map(|(i, v)| (v.as_str(), i))
        .collect();
    let mut y_rows: BTreeMap<&str, usize> = BTreeMap::new();
    for (r, row) in model.rows.iter().enumerate() {
        for (c, v) in &row.terms {
            if v.starts_with("y_") && *c != 0.0 {
                assert!(y_rows.insert(v, r).is_none(), "{v} in two rows");
            }
        }
    }
    let mut best: Option<f64> = None;
    for mask in 0u32..(1 << xs.len()) {
        let x = |v: &str| index.get(v).map_or(0.0, |&i| (mask >> i & 1) as f64);
        let feasible = model.rows.iter().all(|row| {
            let lhs: f64 = row
                .terms
                .iter()
                .filter(|(_, v)| v.starts_with("x_"))
                .map(|(c, v)| c * x(v))
                .sum();
            let ys: Vec<&(f64, String)> = row
                .terms
                .iter()
                .filter(|(c, v)| v.starts_with("y_") && *c != 0.0)
                .collect();
            match ys.as_slice() {
                [] => row_holds(&row.sense, lhs, row.rhs),
                [(c, _)] => [0.0, 1.0]
                    .iter()
                    .any(|y| row_holds(&row.sense, lhs + c * y, row.rhs)),
                _ => panic!("row {} couples several y variables", row.name),
            }
        });
        if feasible {
            let obj: f64 = model.objective.iter().map(|(c, v)| c * x(v)).sum();
            best = Some(best.map_or(obj, |b| b.min(obj)));
        }
    }
    best
}

/// Brute-force unbounded subset sum by enumerating coefficient vectors.
pub fn brute_subset_sum(items: &[u64], target: u64) -> bool {
    fn go(items: &[u64], left: u64) -> bool {
        match items.split_first() {
            None => left == 0,
            Some((&f, rest)) => (0..=left / f).any(|k| go(rest, left - k * f)),
        }
    }
    go(items, target)
}
