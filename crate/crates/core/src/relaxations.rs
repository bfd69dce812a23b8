//! Lower bounds on the optimal tour and cycle costs.
//!
//! **Continuous relaxation (CR).** Edge multiplicities may be any
//! non-negative real, so the weight target `w1` can be hit exactly. An
//! optimal relaxed tour walks a path from the origin and back and spends the
//! rest of the weight bouncing on a single *head* edge at the end of that
//! path.
//!
//! Enumerating heads only at the end of least-cost-tree paths is not enough:
//! when a cheap-per-weight head sits behind an expensive access path, a
//! heavier but more weight-efficient route to it can win. For head ratio
//! `r = c(e)/w(e)` the relaxed cost of "path P to an endpoint of e, then e"
//! is `r * w1 + 2 * sum over P of (c - r*w)`, so the best access path is a
//! shortest path under the reduced cost `c - r*w`. Edges cheaper per unit of
//! weight than the head are excluded from that search (they would make a
//! better head themselves). When the chosen path is already heavier than
//! `w1 / 2` it is cut where it crosses the half-way weight and the crossing
//! edge becomes the head, which never costs more.
//!
//! **Connectivity relaxation (XR).** The 0/1 cycle model without subtour
//! elimination: pick edges so the origin has degree two, every other vertex
//! degree zero or two, and the total weight lies in the window. The result
//! may be a union of disjoint cycles. Solved here by branch-and-bound, and
//! exportable as an LP file for external MILP solvers.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;
use std::io;
use std::path::Path;

use crate::float::{cost_lt, min_by_cost_then};
use crate::graph::{shortest_tree, EdgeId, Graph, Instance, VertexId};

/// A relaxed tour: `access_path` out and back, plus `head_multiplicity`
/// traversals of `head_edge` at the anchor (the last vertex of the path).
#[derive(Clone, Debug, PartialEq)]
pub struct CrSolution {
    pub lower_bound_cost: f64,
    /// `None` only for the empty tour (`w1 = 0`).
    pub head_edge: Option<EdgeId>,
    pub head_multiplicity: f64,
    /// `head_multiplicity * w(head)`, kept exactly.
    pub head_weight: u64,
    pub anchor_vertex: VertexId,
    /// Origin to anchor.
    pub access_path: Vec<VertexId>,
    /// Always `w1`.
    pub achieved_weight: u64,
}

fn ratio(cost: f64, weight: u64) -> f64 {
    cost / weight as f64
}

pub fn cr_solve(instance: &Instance) -> Option<CrSolution> {
    let graph = instance.graph();
    let origin = instance.origin();
    let w1 = instance.w1();
    if w1 == 0 {
        return Some(CrSolution {
            lower_bound_cost: 0.0,
            head_edge: None,
            head_multiplicity: 0.0,
            head_weight: 0,
            anchor_vertex: origin,
            access_path: vec![origin],
            achieved_weight: 0,
        });
    }

    let mut by_ratio: BTreeMap<u64, Vec<EdgeId>> = BTreeMap::new();
    for (id, e) in graph.edges().iter().enumerate() {
        if e.weight > 0 {
            by_ratio
                .entry(ratio(e.cost, e.weight).to_bits())
                .or_default()
                .push(id);
        }
    }

    let mut candidates = Vec::new();
    for (bits, heads) in by_ratio {
        let r = f64::from_bits(bits);
        let (tree, _) = shortest_tree(graph, origin, |_, f| {
            (f.weight == 0 || ratio(f.cost, f.weight) >= r)
                .then(|| (f.cost - r * f.weight as f64).max(0.0))
        });
        for &e in &heads {
            let edge = graph.edge(e);
            for end in [edge.u, edge.v] {
                if let Some(path) = tree.path_to(end) {
                    candidates.push(realize(graph, w1, path, e));
                }
            }
        }
    }

    min_by_cost_then(
        candidates,
        |s| s.lower_bound_cost,
        |a, b| {
            a.access_path
                .len()
                .cmp(&b.access_path.len())
                .then(a.head_edge.cmp(&b.head_edge))
                .then(a.access_path.cmp(&b.access_path))
        },
    )
}

/// Builds the relaxed tour "walk `path`, bounce on `head`", cutting the path
/// short when it alone would exceed `w1`.
fn realize(graph: &Graph, w1: u64, mut path: Vec<VertexId>, head: EdgeId) -> CrSolution {
    let mut head = head;
    let mut access_weight = 0u64;
    let mut access_cost = 0.0;
    for k in 0..path.len() - 1 {
        let e = graph.edge_between(path[k], path[k + 1]).expect("tree path");
        let edge = graph.edge(e);
        if 2 * (access_weight + edge.weight) > w1 {
            head = e;
            path.truncate(k + 1);
            break;
        }
        access_weight += edge.weight;
        access_cost += edge.cost;
    }
    let edge = graph.edge(head);
    let head_weight = w1 - 2 * access_weight;
    let m = head_weight as f64 / edge.weight as f64;
    CrSolution {
        lower_bound_cost: 2.0 * access_cost + m * edge.cost,
        head_edge: Some(head),
        head_multiplicity: m,
        head_weight,
        anchor_vertex: *path.last().expect("path starts at the origin"),
        access_path: path,
        achieved_weight: 2 * access_weight + head_weight,
    }
}

/// A 0/1 edge selection in which the origin has degree two and every other
/// vertex degree zero or two.
#[derive(Clone, Debug, PartialEq)]
pub struct EdgeSelection {
    pub selected: BTreeSet<EdgeId>,
    pub total_cost: f64,
    pub total_weight: u64,
}

#[derive(Clone, Debug, PartialEq)]
pub enum XrOutcome {
    Optimal(EdgeSelection),
    Infeasible,
    /// The search hit its node budget; `incumbent` is the best selection
    /// found so far and is not known to be optimal.
    BudgetExceeded {
        incumbent: Option<EdgeSelection>,
    },
}

impl XrOutcome {
    /// The selection carried by the outcome, optimal or not.
    pub fn selection(&self) -> Option<&EdgeSelection> {
        match self {
            XrOutcome::Optimal(s) => Some(s),
            XrOutcome::BudgetExceeded { incumbent } => incumbent.as_ref(),
            XrOutcome::Infeasible => None,
        }
    }

    pub fn is_optimal(&self) -> bool {
        matches!(self, XrOutcome::Optimal(_))
    }
}

pub const DEFAULT_NODE_BUDGET: u64 = 10_000_000;

pub fn xr_solve_exact(instance: &Instance) -> XrOutcome {
    xr_solve_with_budget(instance, DEFAULT_NODE_BUDGET)
}

pub fn xr_solve_with_budget(instance: &Instance, node_budget: u64) -> XrOutcome {
    let graph = instance.graph();
    let mut order: Vec<EdgeId> = (0..graph.edge_count()).collect();
    order.sort_by_key(|&e| {
        let edge = graph.edge(e);
        (edge.u.min(edge.v), edge.u.max(edge.v))
    });
    let mut suffix_weight = vec![0u64; order.len() + 1];
    for k in (0..order.len()).rev() {
        suffix_weight[k] = suffix_weight[k + 1] + graph.edge(order[k]).weight;
    }
    let n = graph.vertex_bound();
    let mut search = Search {
        graph,
        origin: instance.origin(),
        w1: instance.w1(),
        w2: instance.w2(),
        order,
        suffix_weight,
        degree: vec![0; n],
        remaining: (0..n).map(|v| graph.degree(v)).collect(),
        chosen: Vec::new(),
        best: None,
        nodes: 0,
        budget: node_budget,
        exhausted: false,
    };
    if search.remaining[search.origin] >= 2 {
        search.descend(0, 0, 0.0);
    }
    let best = search.best.map(|(cost, weight, selected)| EdgeSelection {
        selected: selected.into_iter().collect(),
        total_cost: cost,
        total_weight: weight,
    });
    match (search.exhausted, best) {
        (true, incumbent) => XrOutcome::BudgetExceeded { incumbent },
        (false, Some(s)) => XrOutcome::Optimal(s),
        (false, None) => XrOutcome::Infeasible,
    }
}

struct Search<'g> {
    graph: &'g Graph,
    origin: VertexId,
    w1: u64,
    w2: u64,
    order: Vec<EdgeId>,
    suffix_weight: Vec<u64>,
    degree: Vec<usize>,
    /// Undecided incident edges per vertex.
    remaining: Vec<usize>,
    chosen: Vec<EdgeId>,
    best: Option<(f64, u64, Vec<EdgeId>)>,
    nodes: u64,
    budget: u64,
    exhausted: bool,
}

impl Search<'_> {
    fn vertex_ok(&self, v: VertexId) -> bool {
        let (d, r) = (self.degree[v], self.remaining[v]);
        if d > 2 {
            return false;
        }
        if v == self.origin {
            d + r >= 2
        } else {
            d != 1 || r > 0
        }
    }

    fn descend(&mut self, k: usize, weight: u64, cost: f64) {
        if self.exhausted {
            return;
        }
        self.nodes += 1;
        if self.nodes > self.budget {
            self.exhausted = true;
            return;
        }
        if weight > self.w2 || weight + self.suffix_weight[k] < self.w1 {
            return;
        }
        if let Some((best, _, _)) = &self.best {
            if !cost_lt(cost, *best) {
                return;
            }
        }
        if k == self.order.len() {
            if self.degree[self.origin] == 2 {
                self.best = Some((cost, weight, self.chosen.clone()));
            }
            return;
        }

        let e = self.order[k];
        let edge = *self.graph.edge(e);
        self.remaining[edge.u] -= 1;
        self.remaining[edge.v] -= 1;

        if self.degree[edge.u] < 2 && self.degree[edge.v] < 2 {
            self.degree[edge.u] += 1;
            self.degree[edge.v] += 1;
            if self.vertex_ok(edge.u) && self.vertex_ok(edge.v) {
                self.chosen.push(e);
                self.descend(k + 1, weight + edge.weight, cost + edge.cost);
                self.chosen.pop();
            }
            self.degree[edge.u] -= 1;
            self.degree[edge.v] -= 1;
        }
        if self.vertex_ok(edge.u) && self.vertex_ok(edge.v) {
            self.descend(k + 1, weight, cost);
        }

        self.remaining[edge.u] += 1;
        self.remaining[edge.v] += 1;
    }
}

fn x_name(graph: &Graph, e: EdgeId) -> String {
    let edge = graph.edge(e);
    format!("x_{}_{}", edge.u.min(edge.v), edge.u.max(edge.v))
}

/// Appends `name: terms <sense> rhs`, wrapping long rows. An empty term list
/// becomes `0 y_<origin>` so the row stays syntactically valid.
fn write_row(out: &mut String, name: &str, terms: &[(String, String)], tail: &str, filler: &str) {
    let _ = write!(out, " {name}:");
    if terms.is_empty() {
        let _ = write!(out, " 0 {filler}");
    }
    for (i, (coef, var)) in terms.iter().enumerate() {
        if i > 0 && i % 8 == 0 {
            out.push_str("\n   ");
        }
        match (coef.strip_prefix('-'), i) {
            (Some(abs), _) => {
                let _ = write!(out, " - {abs} {var}");
            }
            (None, 0) => {
                let _ = write!(out, " {coef} {var}");
            }
            (None, _) => {
                let _ = write!(out, " + {coef} {var}");
            }
        }
    }
    if tail.is_empty() {
        out.push('\n');
    } else {
        let _ = writeln!(out, " {tail}");
    }
}

/// The connectivity-relaxed cycle model in CPLEX LP format.
pub fn xr_lp_model(instance: &Instance) -> String {
    let graph = instance.graph();
    let origin = instance.origin();
    let filler = format!("y_{origin}");
    let edges: Vec<EdgeId> = (0..graph.edge_count()).collect();
    let mut out = String::new();
    out.push_str("\\ Connectivity relaxation of the constrained least-cost cycle model.\n");
    out.push_str("\\ Omitted: for every vertex set S holding the origin and every used vertex\n");
    out.push_str("\\ outside S, at least two selected edges must cross the cut (S, V - S).\n");
    let _ = writeln!(
        out,
        "\\ origin {origin}, weight window [{}, {}]",
        instance.w1(),
        instance.w2()
    );

    out.push_str("Minimize\n");
    let obj: Vec<_> = edges
        .iter()
        .map(|&e| (graph.edge(e).cost.to_string(), x_name(graph, e)))
        .collect();
    write_row(&mut out, "obj", &obj, "", &filler);

    out.push_str("Subject To\n");
    let weight: Vec<_> = edges
        .iter()
        .map(|&e| (graph.edge(e).weight.to_string(), x_name(graph, e)))
        .collect();
    write_row(
        &mut out,
        "weight_lo",
        &weight,
        &format!(">= {}", instance.w1()),
        &filler,
    );
    write_row(
        &mut out,
        "weight_hi",
        &weight,
        &format!("<= {}", instance.w2()),
        &filler,
    );
    let incident = |v: VertexId| -> Vec<(String, String)> {
        graph
            .incident(v)
            .iter()
            .map(|&e| ("1".to_string(), x_name(graph, e)))
            .collect()
    };
    write_row(&mut out, "origin_deg", &incident(origin), "= 2", &filler);
    for v in graph.vertices() {
        let mut terms = incident(v);
        terms.push(("-2".to_string(), format!("y_{v}")));
        write_row(&mut out, &format!("parity_{v}"), &terms, "= 0", &filler);
    }

    out.push_str("Bounds\n");
    for &e in &edges {
        let _ = writeln!(out, " 0 <= {} <= 1", x_name(graph, e));
    }
    for v in graph.vertices() {
        let _ = writeln!(out, " 0 <= y_{v} <= 1");
    }

    out.push_str("Binary\n");
    for &e in &edges {
        let _ = writeln!(out, " {}", x_name(graph, e));
    }
    for v in graph.vertices() {
        let _ = writeln!(out, " y_{v}");
    }
    out.push_str("End\n");
    out
}

pub fn xr_export_lp(instance: &Instance, path: &Path) -> io::Result<()> {
    std::fs::write(path, xr_lp_model(instance))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::fixtures::{s4, triangle};

    fn inst(g: Graph, w1: u64, w2: u64) -> Instance {
        Instance::new(g, 0, w1, w2).unwrap()
    }

    #[test]
    fn cr_triangle_examples() {
        let g = triangle();
        let sa = g.edge_between(0, 1).unwrap();
        let s = cr_solve(&inst(g.clone(), 3, 3)).unwrap();
        assert_eq!(s.head_edge, Some(sa));
        assert_eq!(s.anchor_vertex, 0);
        assert_eq!(s.head_multiplicity, 3.0);
        assert_eq!(s.lower_bound_cost, 3.0);
        assert_eq!(s.achieved_weight, 3);

        let s = cr_solve(&inst(g, 2, 2)).unwrap();
        assert_eq!(
            (s.head_edge, s.head_multiplicity, s.lower_bound_cost),
            (Some(sa), 2.0, 2.0)
        );
    }

    #[test]
    fn cr_empty_tour() {
        let s = cr_solve(&inst(triangle(), 0, 5)).unwrap();
        assert_eq!(s.lower_bound_cost, 0.0);
        assert_eq!(s.head_edge, None);
        assert_eq!(s.achieved_weight, 0);
    }

    #[test]
    fn cr_isolated_origin_is_infeasible() {
        let mut b = crate::graph::GraphBuilder::new();
        b.add_vertex(0);
        b.add_edge(1, 2, 1, 1.0).unwrap();
        assert!(cr_solve(&inst(b.build(), 2, 2)).is_none());
    }

    #[test]
    fn cr_zero_weight_graph_cannot_reach_positive_target() {
        let g = Graph::from_edges([(0, 1, 0, 1.0), (1, 2, 0, 1.0)]).unwrap();
        assert!(cr_solve(&inst(g, 1, 4)).is_none());
    }

    #[test]
    fn cr_looks_past_the_least_cost_tree() {
        // The cheapest route to u is the direct edge (cost 1, weight 1); the
        // heavier detour via y costs 2 but carries weight 8 at ratio 1/4.
        // s-y-u-z-u-y-s weighs exactly 26 and costs 6, while any head at the
        // end of a least-cost-tree path gives at least 6.5.
        let g = Graph::from_edges([
            (0, 1, 4, 1.0), // s-y
            (1, 2, 4, 1.0), // y-u
            (0, 2, 1, 1.0), // s-u
            (2, 3, 5, 1.0), // u-z
        ])
        .unwrap();
        let s = cr_solve(&inst(g.clone(), 26, 26)).unwrap();
        assert!(s.lower_bound_cost <= 6.0 + 1e-9, "{}", s.lower_bound_cost);
        assert_eq!(s.achieved_weight, 26);
        let tour = crate::graph::evaluate_tour(&g, vec![0, 1, 2, 3, 2, 1, 0]).unwrap();
        assert_eq!((tour.total_weight(), tour.total_cost()), (26, 6.0));
    }

    #[test]
    fn cr_truncates_heavy_access_paths() {
        // Cheapest ratio sits far away; the path to it crosses w1/2 early.
        let g = Graph::from_edges([(0, 1, 3, 3.0), (1, 2, 10, 1.0)]).unwrap();
        let s = cr_solve(&inst(g.clone(), 4, 4)).unwrap();
        assert_eq!(s.achieved_weight, 4);
        // Bouncing on s-1 costs 4; reaching 1 already takes weight 6 > 4.
        assert_eq!(s.lower_bound_cost, 4.0);
        assert_eq!(s.head_edge, g.edge_between(0, 1));
        assert_eq!(s.access_path, vec![0]);
    }

    #[test]
    fn cr_solution_invariants_hold() {
        let g = s4();
        for w1 in 1..12 {
            let s = cr_solve(&inst(g.clone(), w1, w1)).unwrap();
            let head = g.edge(s.head_edge.unwrap());
            assert!(head.u == s.anchor_vertex || head.v == s.anchor_vertex);
            let tour_part = crate::graph::evaluate_tour(&g, {
                let mut v = s.access_path.clone();
                v.extend(s.access_path.iter().rev().skip(1));
                v
            })
            .unwrap();
            assert_eq!(tour_part.total_weight() + s.head_weight, w1);
            let expect = tour_part.total_cost() + s.head_multiplicity * head.cost;
            assert!((expect - s.lower_bound_cost).abs() < 1e-9);
        }
    }

    #[test]
    fn xr_triangle_examples() {
        let all = |o: XrOutcome| match o {
            XrOutcome::Optimal(s) => s,
            other => panic!("{other:?}"),
        };
        let s = all(xr_solve_exact(&inst(triangle(), 3, 3)));
        assert_eq!(s.selected.len(), 3);
        assert_eq!((s.total_cost, s.total_weight), (6.0, 3));
        assert_eq!(all(xr_solve_exact(&inst(triangle(), 0, 3))).total_cost, 6.0);
        assert_eq!(
            xr_solve_exact(&inst(triangle(), 10, 10)),
            XrOutcome::Infeasible
        );
    }

    #[test]
    fn xr_allows_disjoint_cycles() {
        // A triangle through the origin plus a separate square elsewhere:
        // weight 7 needs both, which no single cycle can provide.
        let g = Graph::from_edges([
            (0, 1, 1, 1.0),
            (1, 2, 1, 1.0),
            (2, 0, 1, 1.0),
            (3, 4, 1, 1.0),
            (4, 5, 1, 1.0),
            (5, 6, 1, 1.0),
            (6, 3, 1, 1.0),
        ])
        .unwrap();
        let s = xr_solve_exact(&inst(g, 7, 7));
        assert_eq!(s.selection().unwrap().total_cost, 7.0);
    }

    #[test]
    fn xr_budget_is_reported() {
        let o = xr_solve_with_budget(&inst(s4(), 4, 4), 3);
        assert!(matches!(o, XrOutcome::BudgetExceeded { .. }));
        assert!(!o.is_optimal());
    }

    #[test]
    fn lp_row_and_variable_counts() {
        let lp = xr_lp_model(&inst(triangle(), 3, 3));
        let count = |p: &str| lp.lines().filter(|l| l.trim_start().starts_with(p)).count();
        assert_eq!(count("obj:"), 1);
        assert_eq!(count("weight_lo:") + count("weight_hi:"), 2);
        assert_eq!(count("origin_deg:"), 1);
        assert_eq!(count("parity_"), 3);
        let binary = lp.split("Binary\n").nth(1).unwrap();
        let vars: Vec<&str> = binary
            .lines()
            .take_while(|l| *l != "End")
            .map(str::trim)
            .collect();
        assert_eq!(vars.iter().filter(|v| v.starts_with("x_")).count(), 3);
        assert_eq!(vars.iter().filter(|v| v.starts_with("y_")).count(), 3);
        assert!(lp.contains(" obj: 1 x_0_1 + 2 x_1_2 + 3 x_0_2\n"));
        assert!(lp.contains(" parity_0: 1 x_0_1 + 1 x_0_2 - 2 y_0 = 0\n"));
        assert!(lp.ends_with("End\n"));
    }

    #[test]
    fn lp_for_edgeless_graph_is_well_formed() {
        let mut b = crate::graph::GraphBuilder::new();
        b.add_vertex(0);
        let lp = xr_lp_model(&inst(b.build(), 0, 0));
        assert!(lp.contains(" origin_deg: 0 y_0 = 2\n"));
        assert!(lp.contains(" obj: 0 y_0\n"));
    }
}
