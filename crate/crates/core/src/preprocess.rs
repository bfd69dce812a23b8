//! Graph reductions applied before solving.
//!
//! `prune_unreachable` drops every vertex whose least-*weight* distance from
//! the origin exceeds `w2 / 2`: no weight-feasible tour can reach it and come
//! back. `remove_leaves` peels degree-one vertices, which can never lie on a
//! simple cycle.

use std::collections::VecDeque;

use crate::graph::{shortest_tree, Graph, Instance, VertexId};

pub fn prune_unreachable(instance: &Instance) -> Graph {
    let graph = instance.graph();
    let (tree, _) = shortest_tree(graph, instance.origin(), |_, e| Some(e.weight as f64));
    // Weight-metric tree: path_weight is the least-weight distance.
    graph.induced(|v| tree.weight(v).is_some_and(|d| 2 * d <= instance.w2()))
}

/// Repeatedly removes vertices of degree at most one, except `origin`.
pub fn remove_leaves(graph: &Graph, origin: VertexId) -> Graph {
    let mut degree: Vec<usize> = (0..graph.vertex_bound()).map(|v| graph.degree(v)).collect();
    let mut removed = vec![false; graph.vertex_bound()];
    let mut queue: VecDeque<VertexId> = graph
        .vertices()
        .filter(|&v| v != origin && degree[v] <= 1)
        .collect();
    while let Some(v) = queue.pop_front() {
        if removed[v] {
            continue;
        }
        removed[v] = true;
        for (u, _) in graph.neighbors(v) {
            if removed[u] {
                continue;
            }
            degree[u] -= 1;
            if u != origin && degree[u] == 1 {
                queue.push_back(u);
            }
        }
    }
    graph.induced(|v| !removed[v])
}
