//! Exact reference solvers for small instances, and the reduction from
//! unbounded subset sum to CLT on a path.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use crate::float::{cost_eq, cost_lt};
use crate::graph::{evaluate_tour, CycleSolution, Graph, Instance, Tour, VertexId};

#[derive(Clone, Copy, Debug)]
struct State {
    cost: f64,
    weight: u64,
    vertex: VertexId,
}

impl PartialEq for State {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for State {}

impl PartialOrd for State {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for State {
    fn cmp(&self, other: &Self) -> Ordering {
        other
            .cost
            .total_cmp(&self.cost)
            .then_with(|| other.weight.cmp(&self.weight))
            .then_with(|| other.vertex.cmp(&self.vertex))
    }
}

/// Least-cost closed walk from the origin with weight in `[w1, w2]`.
///
/// Dijkstra over `(vertex, accumulated weight)` states with weight at most
/// `w2`; the first origin state popped inside the window is optimal. Memory
/// and time grow with `|V| * (w2 + 1)`. With `w1 = 0` the answer is the empty
/// tour `[origin]`.
pub fn clt_exact(instance: &Instance) -> Option<Tour> {
    let graph = instance.graph();
    let origin = instance.origin();
    let layers = instance.w2() as usize + 1;
    let index = |v: VertexId, w: u64| v * layers + w as usize;
    let states = graph.vertex_bound() * layers;
    let mut dist = vec![f64::INFINITY; states];
    let mut parent = vec![usize::MAX; states];
    let mut settled = vec![false; states];
    let mut heap = BinaryHeap::new();
    dist[index(origin, 0)] = 0.0;
    heap.push(State {
        cost: 0.0,
        weight: 0,
        vertex: origin,
    });

    while let Some(State {
        cost,
        weight,
        vertex,
    }) = heap.pop()
    {
        let here = index(vertex, weight);
        if settled[here] {
            continue;
        }
        settled[here] = true;
        if vertex == origin && instance.accepts_weight(weight) {
            let mut seq = vec![vertex];
            let mut at = here;
            while parent[at] != usize::MAX {
                at = parent[at];
                seq.push(at / layers);
            }
            seq.reverse();
            return Some(evaluate_tour(graph, seq).expect("walk along edges"));
        }
        for (next, e) in graph.neighbors(vertex) {
            let edge = graph.edge(e);
            let nw = weight + edge.weight;
            if nw > instance.w2() {
                continue;
            }
            let there = index(next, nw);
            let nc = cost + edge.cost;
            if !settled[there] && nc < dist[there] {
                dist[there] = nc;
                parent[there] = here;
                heap.push(State {
                    cost: nc,
                    weight: nw,
                    vertex: next,
                });
            }
        }
    }
    None
}

/// Least-cost simple cycle through the origin with weight in `[w1, w2]`, by
/// depth-first enumeration. Exponential; meant for graphs of a dozen or so
/// vertices. Equal-cost cycles are ranked by vertex count, then by their
/// canonical vertex sequence.
pub fn clc_exact(instance: &Instance) -> Option<CycleSolution> {
    let graph = instance.graph();
    let mut dfs = CycleSearch {
        graph,
        instance,
        on_path: vec![false; graph.vertex_bound()],
        path: vec![instance.origin()],
        best: None,
    };
    dfs.on_path[instance.origin()] = true;
    dfs.extend(0, 0.0);
    let (_, seq) = dfs.best?;
    let tour = evaluate_tour(graph, seq).expect("cycle along edges");
    Some(CycleSolution::try_from(tour).expect("simple cycle"))
}

struct CycleSearch<'a> {
    graph: &'a Graph,
    instance: &'a Instance,
    on_path: Vec<bool>,
    path: Vec<VertexId>,
    best: Option<(f64, Vec<VertexId>)>,
}

impl CycleSearch<'_> {
    fn extend(&mut self, weight: u64, cost: f64) {
        let origin = self.instance.origin();
        let last = *self.path.last().expect("non-empty");
        for (next, e) in self.graph.neighbors(last) {
            let edge = self.graph.edge(e);
            let nw = weight + edge.weight;
            let nc = cost + edge.cost;
            if nw > self.instance.w2() {
                continue;
            }
            if let Some((best, _)) = &self.best {
                if cost_lt(*best, nc) {
                    continue;
                }
            }
            if next == origin {
                if self.path.len() >= 3 && self.instance.accepts_weight(nw) {
                    let mut closed = self.path.clone();
                    closed.push(origin);
                    self.offer(nc, closed);
                }
            } else if !self.on_path[next] {
                self.on_path[next] = true;
                self.path.push(next);
                self.extend(nw, nc);
                self.path.pop();
                self.on_path[next] = false;
            }
        }
    }

    fn offer(&mut self, cost: f64, closed: Vec<VertexId>) {
        let seq = CycleSolution::canonical_sequence(&closed, self.instance.origin())
            .expect("origin on cycle");
        let better = match &self.best {
            None => true,
            Some((best, best_seq)) => {
                cost_lt(cost, *best)
                    || (cost_eq(cost, *best) && (seq.len(), &seq) < (best_seq.len(), best_seq))
            }
        };
        if better {
            self.best = Some((cost, seq));
        }
    }
}

/// Unbounded subset sum: can `target` be written as a non-negative integer
/// combination of `items`?
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SubsetSumInstance {
    items: Vec<u64>,
    target: u64,
}

#[derive(Debug, thiserror::Error, Clone, PartialEq, Eq)]
pub enum SubsetSumError {
    #[error("items must be positive")]
    NonPositiveItem,
    #[error("target must be positive")]
    NonPositiveTarget,
    #[error("item list is empty")]
    NoItems,
}

impl SubsetSumInstance {
    pub fn new(items: Vec<u64>, target: u64) -> Result<Self, SubsetSumError> {
        if items.is_empty() {
            return Err(SubsetSumError::NoItems);
        }
        if items.contains(&0) {
            return Err(SubsetSumError::NonPositiveItem);
        }
        if target == 0 {
            return Err(SubsetSumError::NonPositiveTarget);
        }
        Ok(Self { items, target })
    }

    pub fn items(&self) -> &[u64] {
        &self.items
    }

    pub fn target(&self) -> u64 {
        self.target
    }
}

/// Table-driven decision over `0..=target`.
pub fn subset_sum_decide(ss: &SubsetSumInstance) -> bool {
    let z = ss.target as usize;
    let mut reachable = vec![false; z + 1];
    reachable[0] = true;
    for s in 1..=z {
        reachable[s] = ss
            .items
            .iter()
            .any(|&f| f as usize <= s && reachable[s - f as usize]);
    }
    reachable[z]
}

/// Builds a CLT instance on a path `0 - 1 - ... - (n+1)` whose optimum is at
/// most the returned threshold exactly when `ss` has a solution.
///
/// Edge `i` (for item `i`) has weight and cost `f_i`. The last edge is made
/// so heavy that every feasible tour crosses it exactly twice; its cost pins
/// the remaining weight budget to `2 * target` on the item edges.
pub fn reduce_subset_sum(ss: &SubsetSumInstance) -> (Instance, u64) {
    let n = ss.items.len();
    let sum: u64 = ss.items.iter().sum();
    let threshold = 4 * ss.target + 4 * sum;
    let heavy_weight = threshold * threshold;
    let heavy_cost = ss.target + sum;
    let mut edges: Vec<(VertexId, VertexId, u64, f64)> = ss
        .items
        .iter()
        .enumerate()
        .map(|(i, &f)| (i, i + 1, f, f as f64))
        .collect();
    edges.push((n, n + 1, heavy_weight, heavy_cost as f64));
    let graph = Graph::from_edges(edges).expect("path graph");
    let w1 = 2 * ss.target + 2 * heavy_weight + 2 * sum;
    let instance = Instance::new(graph, 0, w1, w1).expect("origin on path");
    (instance, threshold)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::fixtures::{s4, triangle};

    fn inst(g: Graph, w1: u64, w2: u64) -> Instance {
        Instance::new(g, 0, w1, w2).unwrap()
    }

    #[test]
    fn clt_triangle_examples() {
        let t = clt_exact(&inst(triangle(), 3, 3)).unwrap();
        assert_eq!(t.total_cost(), 6.0);
        let t = clt_exact(&inst(triangle(), 2, 2)).unwrap();
        assert_eq!(t.vertices(), &[0, 1, 0]);
        assert_eq!(t.total_cost(), 2.0);
        let t = clt_exact(&inst(triangle(), 7, 7)).unwrap();
        assert_eq!((t.total_cost(), t.total_weight()), (10.0, 7));
    }

    #[test]
    fn clt_empty_tour_when_window_starts_at_zero() {
        let t = clt_exact(&inst(triangle(), 0, 4)).unwrap();
        assert!(t.is_empty());
        assert_eq!(t.total_cost(), 0.0);
    }

    #[test]
    fn clt_infeasible_window() {
        let g = Graph::from_edges([(0, 1, 2, 1.0)]).unwrap();
        assert!(clt_exact(&inst(g, 3, 3)).is_none());
    }

    #[test]
    fn clt_handles_zero_weight_edges() {
        let g = Graph::from_edges([(0, 1, 0, 0.5), (1, 2, 1, 1.0)]).unwrap();
        let t = clt_exact(&inst(g, 2, 2)).unwrap();
        assert_eq!(t.vertices(), &[0, 1, 2, 1, 0]);
        assert_eq!(t.total_cost(), 3.0);
    }

    #[test]
    fn clc_examples() {
        assert_eq!(
            clc_exact(&inst(triangle(), 3, 3)).unwrap().total_cost(),
            6.0
        );
        assert!(clc_exact(&inst(triangle(), 2, 2)).is_none());
        let c = clc_exact(&inst(s4(), 4, 4)).unwrap();
        assert_eq!(c.vertices(), &[0, 1, 3, 2, 0]);
        assert_eq!(c.total_cost(), 6.0);
    }

    #[test]
    fn clc_prefers_fewer_vertices_on_ties() {
        // Triangle 0-1-2 and square 0-3-4-5 with equal cost 6 and weight 6.
        let g = Graph::from_edges([
            (0, 1, 2, 2.0),
            (1, 2, 2, 2.0),
            (2, 0, 2, 2.0),
            (0, 3, 1, 1.5),
            (3, 4, 2, 1.5),
            (4, 5, 2, 1.5),
            (5, 0, 1, 1.5),
        ])
        .unwrap();
        let c = clc_exact(&inst(g, 6, 6)).unwrap();
        assert_eq!(c.vertices(), &[0, 1, 2, 0]);
    }

    #[test]
    fn subset_sum_examples() {
        let ss = |items: &[u64], z| SubsetSumInstance::new(items.to_vec(), z).unwrap();
        assert!(subset_sum_decide(&ss(&[1, 2], 3)));
        assert!(!subset_sum_decide(&ss(&[5], 3)));
        assert!(subset_sum_decide(&ss(&[2, 3], 7)));
        assert!(!subset_sum_decide(&ss(&[4, 6], 9)));
        assert!(SubsetSumInstance::new(vec![0], 3).is_err());
        assert!(SubsetSumInstance::new(vec![1], 0).is_err());
    }

    #[test]
    fn reduction_worked_example() {
        let ss = SubsetSumInstance::new(vec![1, 2], 3).unwrap();
        let (instance, c) = reduce_subset_sum(&ss);
        assert_eq!(c, 24);
        assert_eq!((instance.w1(), instance.w2()), (1164, 1164));
        let g = instance.graph();
        let heavy = g.edge(g.edge_between(2, 3).unwrap());
        assert_eq!((heavy.weight, heavy.cost), (576, 6.0));
        let natural = evaluate_tour(g, vec![0, 1, 0, 1, 2, 1, 2, 3, 2, 1, 0]).unwrap();
        assert_eq!((natural.total_weight(), natural.total_cost()), (1164, 24.0));
        assert!(clt_exact(&instance).unwrap().total_cost() <= 24.0);
    }

    #[test]
    fn reduction_without_solution() {
        let ss = SubsetSumInstance::new(vec![5], 3).unwrap();
        let (instance, c) = reduce_subset_sum(&ss);
        assert!(clt_exact(&instance).is_none_or(|t| t.total_cost() > c as f64));
    }
}
