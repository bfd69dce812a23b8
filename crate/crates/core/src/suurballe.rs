//! Shortest pairs of vertex-disjoint paths.
//!
//! The undirected graph is turned into an asymmetric digraph by splitting
//! every vertex `v` into `v_in -> v_out` (zero weight, zero cost) and every
//! edge `{u, v}` into the arcs `u_out -> v_in` and `v_out -> u_in`. Arc-disjoint
//! paths from `s_out` to `t_in` in that digraph are vertex-disjoint paths from
//! `s` to `t` in the original graph.
//!
//! For each target the pair is found with two Dijkstra passes: the first path
//! is the least-cost tree path, the second is a shortest path in the residual
//! digraph (first path reversed) under reduced costs. Cancelling opposite arcs
//! in the union yields the minimum-cost pair.

use std::cmp::Ordering;
use std::collections::{BTreeMap, BinaryHeap, HashMap};

use crate::graph::{evaluate_tour, least_cost_tree, CycleSolution, Graph, LeastCostTree, VertexId};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Side {
    In,
    Out,
}

/// A vertex of the split digraph: an original vertex together with a side.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SplitVertex(usize);

impl SplitVertex {
    #[inline]
    pub fn new(v: VertexId, side: Side) -> Self {
        SplitVertex(2 * v + usize::from(side == Side::Out))
    }

    #[inline]
    pub fn original(self) -> VertexId {
        self.0 / 2
    }

    #[inline]
    pub fn side(self) -> Side {
        if self.0.is_multiple_of(2) {
            Side::In
        } else {
            Side::Out
        }
    }

    #[inline]
    pub fn index(self) -> usize {
        self.0
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Arc {
    pub from: SplitVertex,
    pub to: SplitVertex,
    pub weight: u64,
    pub cost: f64,
}

/// The vertex-split digraph of an undirected graph.
#[derive(Clone, Debug)]
pub struct SplitDigraph {
    vertex_count: usize,
    arcs: Vec<Arc>,
    outgoing: Vec<Vec<usize>>,
}

pub fn split_transform(graph: &Graph) -> SplitDigraph {
    let mut arcs = Vec::with_capacity(graph.vertex_count() + 2 * graph.edge_count());
    for v in graph.vertices() {
        arcs.push(Arc {
            from: SplitVertex::new(v, Side::In),
            to: SplitVertex::new(v, Side::Out),
            weight: 0,
            cost: 0.0,
        });
    }
    for e in graph.edges() {
        for (a, b) in [(e.u, e.v), (e.v, e.u)] {
            arcs.push(Arc {
                from: SplitVertex::new(a, Side::Out),
                to: SplitVertex::new(b, Side::In),
                weight: e.weight,
                cost: e.cost,
            });
        }
    }
    let mut outgoing = vec![Vec::new(); 2 * graph.vertex_bound()];
    for (i, a) in arcs.iter().enumerate() {
        outgoing[a.from.index()].push(i);
    }
    SplitDigraph {
        vertex_count: 2 * graph.vertex_count(),
        arcs,
        outgoing,
    }
}

impl SplitDigraph {
    pub fn vertex_count(&self) -> usize {
        self.vertex_count
    }

    pub fn arcs(&self) -> &[Arc] {
        &self.arcs
    }

    pub fn outgoing(&self, x: SplitVertex) -> impl Iterator<Item = &Arc> + '_ {
        self.outgoing
            .get(x.index())
            .into_iter()
            .flatten()
            .map(move |&i| &self.arcs[i])
    }

    pub fn has_arc(&self, from: SplitVertex, to: SplitVertex) -> bool {
        self.outgoing(from).any(|a| a.to == to)
    }
}

/// Two vertex-disjoint simple paths from `source` to `target`.
#[derive(Clone, Debug, PartialEq)]
pub struct DisjointPathPair {
    pub source: VertexId,
    pub target: VertexId,
    /// The lexicographically smaller of the two paths.
    pub path_a: Vec<VertexId>,
    pub path_b: Vec<VertexId>,
    pub total_cost: f64,
    pub total_weight: u64,
}

impl DisjointPathPair {
    /// The simple cycle `path_a` followed by `path_b` reversed.
    pub fn to_cycle(&self, graph: &Graph) -> CycleSolution {
        let mut seq = self.path_a.clone();
        seq.extend(self.path_b.iter().rev().skip(1));
        let tour = evaluate_tour(graph, seq).expect("disjoint pair paths follow graph edges");
        CycleSolution::try_from(tour).expect("vertex-disjoint paths form a simple cycle")
    }
}

/// Convenience wrapper: [`DisjointPairs::from_source`] on a fresh split.
pub fn shortest_pairs_from(
    graph: &Graph,
    source: VertexId,
) -> BTreeMap<VertexId, DisjointPathPair> {
    DisjointPairs::new(graph).from_source(source)
}

pub fn extract_cycle(graph: &Graph, pair: &DisjointPathPair) -> CycleSolution {
    pair.to_cycle(graph)
}

/// Reusable shortest-pair solver over one graph; one instance can serve many
/// sources (and many threads, since queries take `&self`).
pub struct DisjointPairs<'g> {
    graph: &'g Graph,
    split: SplitDigraph,
}

#[derive(Clone, Copy, Debug)]
struct Entry {
    key: f64,
    node: usize,
}

impl PartialEq for Entry {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for Entry {}

impl PartialOrd for Entry {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Entry {
    fn cmp(&self, other: &Self) -> Ordering {
        other
            .key
            .total_cmp(&self.key)
            .then_with(|| other.node.cmp(&self.node))
    }
}

/// Scratch buffers for the residual search, reset between targets.
struct Residual {
    dist: Vec<f64>,
    prev: Vec<usize>,
    done: Vec<bool>,
    touched: Vec<usize>,
    on_path: Vec<bool>,
    path_pred: Vec<usize>,
    heap: BinaryHeap<Entry>,
}

const NONE: usize = usize::MAX;

impl Residual {
    fn new(nodes: usize) -> Self {
        Self {
            dist: vec![f64::INFINITY; nodes],
            prev: vec![NONE; nodes],
            done: vec![false; nodes],
            touched: Vec::new(),
            on_path: vec![false; nodes],
            path_pred: vec![NONE; nodes],
            heap: BinaryHeap::new(),
        }
    }

    fn reset(&mut self) {
        for &x in &self.touched {
            self.dist[x] = f64::INFINITY;
            self.prev[x] = NONE;
            self.done[x] = false;
        }
        self.touched.clear();
        self.heap.clear();
    }
}

impl<'g> DisjointPairs<'g> {
    pub fn new(graph: &'g Graph) -> Self {
        Self {
            graph,
            split: split_transform(graph),
        }
    }

    pub fn split(&self) -> &SplitDigraph {
        &self.split
    }

    /// Minimum-cost vertex-disjoint pair from `source` to every vertex that
    /// has one. Targets without a pair are absent.
    pub fn from_source(&self, source: VertexId) -> BTreeMap<VertexId, DisjointPathPair> {
        let mut pairs = BTreeMap::new();
        if !self.graph.contains(source) {
            return pairs;
        }
        let tree = least_cost_tree(self.graph, source);
        let potential = self.potentials(&tree, source);
        let mut scratch = Residual::new(2 * self.graph.vertex_bound());
        for target in tree.reachable().filter(|&t| t != source) {
            if let Some(pair) = self.pair_to(&tree, &potential, source, target, &mut scratch) {
                pairs.insert(target, pair);
            }
        }
        pairs
    }

    /// Shortest-path distances in the split digraph from `s_out`, read off the
    /// least-cost tree. `s_in` and unreachable nodes get `NaN` and are never
    /// entered by the residual search.
    fn potentials(&self, tree: &LeastCostTree, source: VertexId) -> Vec<f64> {
        let mut pot = vec![f64::NAN; 2 * self.graph.vertex_bound()];
        for v in tree.reachable() {
            let l = tree.cost(v).expect("reachable");
            pot[SplitVertex::new(v, Side::Out).index()] = l;
            if v != source {
                pot[SplitVertex::new(v, Side::In).index()] = l;
            }
        }
        pot
    }

    fn pair_to(
        &self,
        tree: &LeastCostTree,
        pot: &[f64],
        source: VertexId,
        target: VertexId,
        r: &mut Residual,
    ) -> Option<DisjointPathPair> {
        let start = SplitVertex::new(source, Side::Out).index();
        let goal = SplitVertex::new(target, Side::In).index();

        // First path in split form: s_out, a1_in, a1_out, ..., t_in.
        let tree_path = tree.path_to(target)?;
        let mut first = Vec::with_capacity(2 * tree_path.len());
        first.push(start);
        for &v in &tree_path[1..] {
            first.push(SplitVertex::new(v, Side::In).index());
            if v != target {
                first.push(SplitVertex::new(v, Side::Out).index());
            }
        }
        for w in first.windows(2) {
            r.on_path[w[1]] = true;
            r.path_pred[w[1]] = w[0];
        }

        r.reset();
        r.dist[start] = 0.0;
        r.touched.push(start);
        r.heap.push(Entry {
            key: 0.0,
            node: start,
        });
        while let Some(Entry { key, node: x }) = r.heap.pop() {
            if r.done[x] || key != r.dist[x] {
                continue;
            }
            r.done[x] = true;
            if x == goal {
                break;
            }
            // Reversed first-path arc, zero reduced cost.
            if r.on_path[x] {
                let y = r.path_pred[x];
                relax(r, x, y, key);
            }
            for &ai in &self.split.outgoing[x] {
                let arc = &self.split.arcs[ai];
                let y = arc.to.index();
                if pot[y].is_nan() || (r.on_path[y] && r.path_pred[y] == x) {
                    continue;
                }
                let reduced = (arc.cost + pot[x] - pot[y]).max(0.0);
                relax(r, x, y, key + reduced);
            }
        }
        let found = r.done[goal];

        let result = found.then(|| {
            let mut second = vec![goal];
            let mut cur = goal;
            while cur != start {
                cur = r.prev[cur];
                second.push(cur);
            }
            second.reverse();
            self.combine(r, &first, &second, source, target)
        });

        for &x in &first[1..] {
            r.on_path[x] = false;
            r.path_pred[x] = NONE;
        }
        result
    }

    /// Cancels opposite arcs of the two split paths and traces the two
    /// resulting disjoint paths back to original vertices.
    fn combine(
        &self,
        r: &Residual,
        first: &[usize],
        second: &[usize],
        source: VertexId,
        target: VertexId,
    ) -> DisjointPathPair {
        let mut arcs: HashMap<(usize, usize), ()> =
            first.windows(2).map(|w| ((w[0], w[1]), ())).collect();
        for w in second.windows(2) {
            let (x, y) = (w[0], w[1]);
            if r.on_path[x] && r.path_pred[x] == y {
                arcs.remove(&(y, x));
            } else {
                arcs.insert((x, y), ());
            }
        }
        let mut succ: HashMap<usize, Vec<usize>> = HashMap::new();
        let mut sorted: Vec<(usize, usize)> = arcs.into_keys().collect();
        sorted.sort_unstable();
        for (x, y) in sorted {
            succ.entry(x).or_default().push(y);
        }
        let start = first[0];
        let goal = *first.last().unwrap();
        let mut paths: Vec<Vec<VertexId>> = succ[&start]
            .clone()
            .into_iter()
            .map(|head| {
                let mut nodes = vec![start, head];
                let mut cur = head;
                while cur != goal {
                    cur = succ[&cur][0];
                    nodes.push(cur);
                }
                let mut path: Vec<VertexId> = nodes.iter().map(|&n| n / 2).collect();
                path.dedup();
                path
            })
            .collect();
        debug_assert_eq!(paths.len(), 2);
        paths.sort();
        let path_b = paths.pop().unwrap();
        let path_a = paths.pop().unwrap();
        let (mut total_cost, mut total_weight) = (0.0, 0u64);
        for p in [&path_a, &path_b] {
            for w in p.windows(2) {
                let e = self
                    .graph
                    .edge(self.graph.edge_between(w[0], w[1]).expect("path edge"));
                total_cost += e.cost;
                total_weight += e.weight;
            }
        }
        DisjointPathPair {
            source,
            target,
            path_a,
            path_b,
            total_cost,
            total_weight,
        }
    }
}

#[inline]
fn relax(r: &mut Residual, x: usize, y: usize, key: f64) {
    if r.done[y] || key >= r.dist[y] {
        return;
    }
    if r.dist[y].is_infinite() {
        r.touched.push(y);
    }
    r.dist[y] = key;
    r.prev[y] = x;
    r.heap.push(Entry { key, node: y });
}
