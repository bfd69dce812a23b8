//! Graph and instance data model, tour evaluation and the least-cost tree.
//!
//! Vertex ids are dense non-negative integers. A graph may leave gaps in its
//! id range (preprocessing removes vertices without renumbering), so per-vertex
//! tables are sized by [`Graph::vertex_bound`] and absent ids are skipped.

use std::cmp::Ordering;
use std::collections::{BTreeMap, BinaryHeap, HashMap};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::float::{cost_eq, cost_lt};

pub type VertexId = usize;
pub type EdgeId = usize;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Edge {
    pub u: VertexId,
    pub v: VertexId,
    pub weight: u64,
    pub cost: f64,
}

impl Edge {
    /// The endpoint opposite `x`.
    #[inline]
    pub fn other(&self, x: VertexId) -> VertexId {
        if self.u == x {
            self.v
        } else {
            debug_assert_eq!(self.v, x);
            self.u
        }
    }

    #[inline]
    fn key(&self) -> (VertexId, VertexId) {
        (self.u.min(self.v), self.u.max(self.v))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Point {
    pub x: f64,
    pub y: f64,
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GraphError {
    #[error("self-loop at vertex {0}")]
    SelfLoop(VertexId),
    #[error("duplicate edge {0}-{1}")]
    DuplicateEdge(VertexId, VertexId),
    #[error("edge {u}-{v} has invalid cost {cost} (costs must be finite and non-negative)")]
    InvalidCost { u: VertexId, v: VertexId, cost: f64 },
    #[error("vertex {0} has non-finite coordinates")]
    InvalidCoordinates(VertexId),
}

/// Incrementally assembles a [`Graph`], rejecting self-loops, parallel edges
/// and invalid costs as they are added.
#[derive(Debug, Default, Clone)]
pub struct GraphBuilder {
    present: Vec<bool>,
    edges: Vec<Edge>,
    coords: Vec<Option<Point>>,
    lookup: HashMap<(VertexId, VertexId), EdgeId>,
}

impl GraphBuilder {
    pub fn new() -> Self {
        Self::default()
    }

    fn touch(&mut self, v: VertexId) {
        if v >= self.present.len() {
            self.present.resize(v + 1, false);
            self.coords.resize(v + 1, None);
        }
        self.present[v] = true;
    }

    pub fn add_vertex(&mut self, v: VertexId) -> &mut Self {
        self.touch(v);
        self
    }

    pub fn set_coords(&mut self, v: VertexId, point: Point) -> Result<&mut Self, GraphError> {
        if !(point.x.is_finite() && point.y.is_finite()) {
            return Err(GraphError::InvalidCoordinates(v));
        }
        self.touch(v);
        self.coords[v] = Some(point);
        Ok(self)
    }

    pub fn add_edge(
        &mut self,
        u: VertexId,
        v: VertexId,
        weight: u64,
        cost: f64,
    ) -> Result<EdgeId, GraphError> {
        if u == v {
            return Err(GraphError::SelfLoop(u));
        }
        if !(cost.is_finite() && cost >= 0.0) {
            return Err(GraphError::InvalidCost { u, v, cost });
        }
        let edge = Edge { u, v, weight, cost };
        if self.lookup.contains_key(&edge.key()) {
            return Err(GraphError::DuplicateEdge(u, v));
        }
        self.touch(u);
        self.touch(v);
        let id = self.edges.len();
        self.lookup.insert(edge.key(), id);
        self.edges.push(edge);
        Ok(id)
    }

    pub fn build(self) -> Graph {
        let mut adjacency = vec![Vec::new(); self.present.len()];
        for (id, e) in self.edges.iter().enumerate() {
            adjacency[e.u].push(id);
            adjacency[e.v].push(id);
        }
        Graph {
            vertex_count: self.present.iter().filter(|&&p| p).count(),
            present: self.present,
            edges: self.edges,
            adjacency,
            coords: self.coords,
            lookup: self.lookup,
        }
    }
}

/// Undirected simple graph with integer edge weights and real edge costs.
#[derive(Clone, Debug, PartialEq, Default)]
pub struct Graph {
    present: Vec<bool>,
    vertex_count: usize,
    edges: Vec<Edge>,
    adjacency: Vec<Vec<EdgeId>>,
    coords: Vec<Option<Point>>,
    lookup: HashMap<(VertexId, VertexId), EdgeId>,
}

impl Graph {
    /// Builds a graph from `(u, v, weight, cost)` tuples.
    pub fn from_edges(
        edges: impl IntoIterator<Item = (VertexId, VertexId, u64, f64)>,
    ) -> Result<Self, GraphError> {
        let mut b = GraphBuilder::new();
        for (u, v, w, c) in edges {
            b.add_edge(u, v, w, c)?;
        }
        Ok(b.build())
    }

    /// One past the largest vertex id; size for per-vertex tables.
    #[inline]
    pub fn vertex_bound(&self) -> usize {
        self.present.len()
    }

    #[inline]
    pub fn contains(&self, v: VertexId) -> bool {
        self.present.get(v).copied().unwrap_or(false)
    }

    pub fn vertices(&self) -> impl Iterator<Item = VertexId> + '_ {
        self.present
            .iter()
            .enumerate()
            .filter_map(|(v, &p)| p.then_some(v))
    }

    #[inline]
    pub fn vertex_count(&self) -> usize {
        self.vertex_count
    }

    #[inline]
    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    #[inline]
    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    #[inline]
    pub fn edge(&self, id: EdgeId) -> &Edge {
        &self.edges[id]
    }

    /// Ids of edges incident to `v` (empty for absent vertices).
    #[inline]
    pub fn incident(&self, v: VertexId) -> &[EdgeId] {
        self.adjacency.get(v).map(Vec::as_slice).unwrap_or(&[])
    }

    /// `(neighbor, edge id)` pairs around `v`.
    pub fn neighbors(&self, v: VertexId) -> impl Iterator<Item = (VertexId, EdgeId)> + '_ {
        self.incident(v)
            .iter()
            .map(move |&e| (self.edges[e].other(v), e))
    }

    #[inline]
    pub fn degree(&self, v: VertexId) -> usize {
        self.incident(v).len()
    }

    pub fn edge_between(&self, u: VertexId, v: VertexId) -> Option<EdgeId> {
        self.lookup.get(&(u.min(v), u.max(v))).copied()
    }

    pub fn coords(&self, v: VertexId) -> Option<Point> {
        self.coords.get(v).copied().flatten()
    }

    pub fn has_coords(&self) -> bool {
        self.coords.iter().any(Option::is_some)
    }

    /// Subgraph induced by the vertices for which `keep` holds. Vertex ids and
    /// coordinates are preserved; edge ids are reassigned in original order.
    pub fn induced(&self, keep: impl Fn(VertexId) -> bool) -> Graph {
        let mut b = GraphBuilder::new();
        for v in self.vertices().filter(|&v| keep(v)) {
            b.add_vertex(v);
            if let Some(p) = self.coords(v) {
                b.coords[v] = Some(p);
            }
        }
        for e in &self.edges {
            if b.present.get(e.u).copied().unwrap_or(false)
                && b.present.get(e.v).copied().unwrap_or(false)
            {
                b.add_edge(e.u, e.v, e.weight, e.cost)
                    .expect("subgraph of a simple graph is simple");
            }
        }
        b.build()
    }
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum InstanceError {
    #[error("origin {0} is not a vertex of the graph")]
    UnknownOrigin(VertexId),
    #[error("weight window is empty: w1 = {w1} > w2 = {w2}")]
    EmptyWindow { w1: u64, w2: u64 },
}

/// A graph with an origin and a weight window `[w1, w2]`.
#[derive(Clone, Debug, PartialEq)]
pub struct Instance {
    graph: Graph,
    origin: VertexId,
    w1: u64,
    w2: u64,
}

impl Instance {
    pub fn new(graph: Graph, origin: VertexId, w1: u64, w2: u64) -> Result<Self, InstanceError> {
        if !graph.contains(origin) {
            return Err(InstanceError::UnknownOrigin(origin));
        }
        if w1 > w2 {
            return Err(InstanceError::EmptyWindow { w1, w2 });
        }
        Ok(Self {
            graph,
            origin,
            w1,
            w2,
        })
    }

    /// Same origin and window over a different (typically reduced) graph.
    pub fn with_graph(&self, graph: Graph) -> Result<Self, InstanceError> {
        Self::new(graph, self.origin, self.w1, self.w2)
    }

    #[inline]
    pub fn graph(&self) -> &Graph {
        &self.graph
    }

    #[inline]
    pub fn origin(&self) -> VertexId {
        self.origin
    }

    #[inline]
    pub fn w1(&self) -> u64 {
        self.w1
    }

    #[inline]
    pub fn w2(&self) -> u64 {
        self.w2
    }

    #[inline]
    pub fn accepts_weight(&self, weight: u64) -> bool {
        self.w1 <= weight && weight <= self.w2
    }
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum TourError {
    #[error("empty vertex sequence")]
    Empty,
    #[error("tour is not closed: starts at {first} but ends at {last}")]
    NotClosed { first: VertexId, last: VertexId },
    #[error("vertices {0} and {1} are not adjacent")]
    NotAdjacent(VertexId, VertexId),
    #[error("vertex {0} is not in the graph")]
    UnknownVertex(VertexId),
    #[error("vertex {0} is visited twice")]
    RepeatedVertex(VertexId),
    #[error("a simple cycle needs at least three vertices")]
    TooShort,
}

/// A closed walk with its edge multiplicities and totals.
#[derive(Clone, Debug, PartialEq)]
pub struct Tour {
    vertices: Vec<VertexId>,
    multiplicity: BTreeMap<EdgeId, u64>,
    total_weight: u64,
    total_cost: f64,
}

/// Evaluates a closed vertex sequence: multiplicity of every traversed edge,
/// total weight and total cost.
pub fn evaluate_tour(graph: &Graph, vertices: Vec<VertexId>) -> Result<Tour, TourError> {
    let (&first, &last) = match (vertices.first(), vertices.last()) {
        (Some(f), Some(l)) => (f, l),
        _ => return Err(TourError::Empty),
    };
    if !graph.contains(first) {
        return Err(TourError::UnknownVertex(first));
    }
    if first != last {
        return Err(TourError::NotClosed { first, last });
    }
    let mut multiplicity = BTreeMap::new();
    for pair in vertices.windows(2) {
        let e = graph
            .edge_between(pair[0], pair[1])
            .ok_or(TourError::NotAdjacent(pair[0], pair[1]))?;
        *multiplicity.entry(e).or_insert(0u64) += 1;
    }
    let (mut total_weight, mut total_cost) = (0u64, 0.0f64);
    for (&e, &phi) in &multiplicity {
        let edge = graph.edge(e);
        total_weight += phi * edge.weight;
        total_cost += phi as f64 * edge.cost;
    }
    Ok(Tour {
        vertices,
        multiplicity,
        total_weight,
        total_cost,
    })
}

/// `w1 <= w(tour) <= w2`.
pub fn is_weight_feasible(instance: &Instance, tour: &Tour) -> bool {
    instance.accepts_weight(tour.total_weight())
}

impl Tour {
    #[inline]
    pub fn vertices(&self) -> &[VertexId] {
        &self.vertices
    }

    #[inline]
    pub fn multiplicity(&self) -> &BTreeMap<EdgeId, u64> {
        &self.multiplicity
    }

    /// Number of times the tour traverses `e`.
    pub fn multiplicity_of(&self, e: EdgeId) -> u64 {
        self.multiplicity.get(&e).copied().unwrap_or(0)
    }

    #[inline]
    pub fn total_weight(&self) -> u64 {
        self.total_weight
    }

    #[inline]
    pub fn total_cost(&self) -> f64 {
        self.total_cost
    }

    #[inline]
    pub fn start(&self) -> VertexId {
        self.vertices[0]
    }

    /// The tour that never leaves its start vertex.
    pub fn is_empty(&self) -> bool {
        self.vertices.len() == 1
    }

    /// Number of distinct vertices visited.
    pub fn distinct_vertex_count(&self) -> usize {
        let mut v = self.vertices.clone();
        v.sort_unstable();
        v.dedup();
        v.len()
    }
}

/// A tour that is a simple cycle: every vertex appears once (apart from the
/// repeated endpoint) and every edge has multiplicity one.
#[derive(Clone, Debug, PartialEq)]
pub struct CycleSolution(Tour);

impl TryFrom<Tour> for CycleSolution {
    type Error = TourError;

    fn try_from(tour: Tour) -> Result<Self, TourError> {
        let inner = &tour.vertices[..tour.vertices.len() - 1];
        if inner.len() < 3 {
            return Err(TourError::TooShort);
        }
        let mut seen = inner.to_vec();
        seen.sort_unstable();
        if let Some(w) = seen.windows(2).find(|w| w[0] == w[1]) {
            return Err(TourError::RepeatedVertex(w[0]));
        }
        debug_assert!(tour.multiplicity.values().all(|&m| m == 1));
        Ok(CycleSolution(tour))
    }
}

impl CycleSolution {
    pub fn into_tour(self) -> Tour {
        self.0
    }

    /// The cycle re-rooted at `start` and oriented so that its vertex
    /// sequence is the lexicographically smaller of the two directions.
    pub fn canonical_sequence(vertices: &[VertexId], start: VertexId) -> Option<Vec<VertexId>> {
        let ring = &vertices[..vertices.len().saturating_sub(1)];
        let pos = ring.iter().position(|&v| v == start)?;
        let mut fwd: Vec<VertexId> = ring[pos..].iter().chain(&ring[..pos]).copied().collect();
        fwd.push(start);
        let mut bwd = fwd.clone();
        bwd.reverse();
        Some(fwd.min(bwd))
    }
}

impl std::ops::Deref for CycleSolution {
    type Target = Tour;

    fn deref(&self) -> &Tour {
        &self.0
    }
}

/// Shortest-path tree by cost from a root, with accumulated path weights.
///
/// Among equal-cost paths the one with smaller weight wins; remaining ties
/// go to the smaller parent id.
#[derive(Clone, Debug, PartialEq)]
pub struct LeastCostTree {
    root: VertexId,
    parent: Vec<Option<VertexId>>,
    parent_edge: Vec<Option<EdgeId>>,
    path_cost: Vec<f64>,
    path_weight: Vec<u64>,
    reachable: Vec<bool>,
}

pub fn least_cost_tree(graph: &Graph, root: VertexId) -> LeastCostTree {
    shortest_tree(graph, root, |_, e| Some(e.cost)).0
}

impl LeastCostTree {
    #[inline]
    pub fn root(&self) -> VertexId {
        self.root
    }

    #[inline]
    pub fn is_reachable(&self, v: VertexId) -> bool {
        self.reachable.get(v).copied().unwrap_or(false)
    }

    pub fn reachable(&self) -> impl Iterator<Item = VertexId> + '_ {
        self.reachable
            .iter()
            .enumerate()
            .filter_map(|(v, &r)| r.then_some(v))
    }

    pub fn parent(&self, v: VertexId) -> Option<VertexId> {
        self.parent.get(v).copied().flatten()
    }

    pub fn parent_edge(&self, v: VertexId) -> Option<EdgeId> {
        self.parent_edge.get(v).copied().flatten()
    }

    /// Cost of the tree path from the root, `None` if unreachable.
    pub fn cost(&self, v: VertexId) -> Option<f64> {
        self.is_reachable(v).then(|| self.path_cost[v])
    }

    /// Weight of the tree path from the root, `None` if unreachable.
    pub fn weight(&self, v: VertexId) -> Option<u64> {
        self.is_reachable(v).then(|| self.path_weight[v])
    }

    /// Tree path `root, ..., v`.
    pub fn path_to(&self, v: VertexId) -> Option<Vec<VertexId>> {
        if !self.is_reachable(v) {
            return None;
        }
        let mut path = vec![v];
        let mut cur = v;
        while let Some(p) = self.parent[cur] {
            path.push(p);
            cur = p;
        }
        path.reverse();
        Some(path)
    }
}

#[derive(Clone, Copy, Debug)]
struct Label {
    key: f64,
    weight: u64,
    vertex: VertexId,
}

impl PartialEq for Label {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for Label {}

impl PartialOrd for Label {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Label {
    // Reversed: BinaryHeap is a max-heap.
    fn cmp(&self, other: &Self) -> Ordering {
        other
            .key
            .total_cmp(&self.key)
            .then_with(|| other.weight.cmp(&self.weight))
            .then_with(|| other.vertex.cmp(&self.vertex))
    }
}

/// Dijkstra over an arbitrary non-negative edge metric (`None` drops the
/// edge). Returns the tree, whose `path_cost` holds true edge costs, and the
/// metric distance of every vertex (`f64::INFINITY` when unreachable).
pub(crate) fn shortest_tree(
    graph: &Graph,
    root: VertexId,
    metric: impl Fn(EdgeId, &Edge) -> Option<f64>,
) -> (LeastCostTree, Vec<f64>) {
    let n = graph.vertex_bound();
    let mut dist = vec![f64::INFINITY; n];
    let mut tree = LeastCostTree {
        root,
        parent: vec![None; n],
        parent_edge: vec![None; n],
        path_cost: vec![0.0; n],
        path_weight: vec![0; n],
        reachable: vec![false; n],
    };
    if !graph.contains(root) {
        return (tree, dist);
    }
    let mut settled = vec![false; n];
    let mut heap = BinaryHeap::new();
    dist[root] = 0.0;
    tree.reachable[root] = true;
    heap.push(Label {
        key: 0.0,
        weight: 0,
        vertex: root,
    });
    while let Some(Label {
        key,
        weight,
        vertex: u,
    }) = heap.pop()
    {
        if settled[u] || key != dist[u] || weight != tree.path_weight[u] {
            continue;
        }
        settled[u] = true;
        for &e in graph.incident(u) {
            let edge = graph.edge(e);
            let Some(step) = metric(e, edge) else {
                continue;
            };
            let v = edge.other(u);
            if settled[v] {
                continue;
            }
            let nk = key + step.max(0.0);
            let nw = weight + edge.weight;
            let better = if !tree.reachable[v] {
                true
            } else if cost_eq(nk, dist[v]) {
                nw < tree.path_weight[v] || (nw == tree.path_weight[v] && Some(u) < tree.parent[v])
            } else {
                cost_lt(nk, dist[v])
            };
            if better {
                dist[v] = nk;
                tree.reachable[v] = true;
                tree.parent[v] = Some(u);
                tree.parent_edge[v] = Some(e);
                tree.path_weight[v] = nw;
                tree.path_cost[v] = tree.path_cost[u] + edge.cost;
                heap.push(Label {
                    key: nk,
                    weight: nw,
                    vertex: v,
                });
            }
        }
    }
    (tree, dist)
}
