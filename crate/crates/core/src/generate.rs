//! Seeded generators for test corpora and synthetic benchmark maps.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::exact::clt_exact;
use crate::graph::{Graph, GraphBuilder, Instance};
use crate::ingest::{GridMap, GROUND, OUT_OF_BOUNDS, SHALLOW_WATER, TREES, WATER};

/// Connected graph on `0..n`: a random spanning tree plus every other pair
/// with probability `extra`. Weights and costs are integers drawn uniformly
/// from the given inclusive ranges.
pub fn random_connected_graph(
    rng: &mut impl Rng,
    n: usize,
    extra: f64,
    weights: (u64, u64),
    costs: (u64, u64),
) -> Graph {
    let mut b = GraphBuilder::new();
    b.add_vertex(0);
    fn draw(rng: &mut impl Rng, weights: (u64, u64), costs: (u64, u64)) -> (u64, f64) {
        (
            rng.random_range(weights.0..=weights.1),
            rng.random_range(costs.0..=costs.1) as f64,
        )
    }
    for v in 1..n {
        let u = rng.random_range(0..v);
        let (w, c) = draw(rng, weights, costs);
        b.add_edge(u, v, w, c).expect("tree edge");
    }
    let tree = b.clone().build();
    for u in 0..n {
        for v in u + 1..n {
            if tree.edge_between(u, v).is_none() && rng.random_bool(extra) {
                let (w, c) = draw(rng, weights, costs);
                b.add_edge(u, v, w, c).expect("new edge");
            }
        }
    }
    b.build()
}

/// A small instance for cross-checking solvers: 5 to 8 vertices, weights
/// 1 to 5, costs 1 to 9, origin 0 and a window `[w1, w1 + gap]` with
/// `w1` in 2..=24 and `gap` in 0..=4, redrawn until a feasible tour exists.
pub fn random_small_instance(rng: &mut impl Rng) -> Instance {
    loop {
        let n = rng.random_range(5..=8);
        let g = random_connected_graph(rng, n, 0.4, (1, 5), (1, 9));
        let w1 = rng.random_range(2..=24);
        let w2 = w1 + rng.random_range(0..=4);
        let instance = Instance::new(g, 0, w1, w2).expect("origin 0 exists");
        if clt_exact(&instance).is_some() {
            return instance;
        }
    }
}

/// `count` instances from a fixed seed.
pub fn small_corpus(seed: u64, count: usize) -> Vec<Instance> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| random_small_instance(&mut rng))
        .collect()
}

/// Open terrain sprinkled with rectangular patches of the other classes,
/// covering roughly a fifth of the map.
pub fn synthetic_map(width: usize, height: usize, seed: u64) -> GridMap {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut cells = vec![GROUND; width * height];
    let classes = [SHALLOW_WATER, TREES, WATER, OUT_OF_BOUNDS];
    let target = width * height / 5;
    let mut covered = 0;
    while covered < target {
        let class = classes[rng.random_range(0..classes.len())];
        let pw = rng.random_range(1..=(width / 8).max(1));
        let ph = rng.random_range(1..=(height / 8).max(1));
        let r0 = rng.random_range(0..height);
        let c0 = rng.random_range(0..width);
        for r in r0..(r0 + ph).min(height) {
            for c in c0..(c0 + pw).min(width) {
                let cell = &mut cells[r * width + c];
                if *cell == GROUND {
                    covered += 1;
                }
                *cell = class;
            }
        }
    }
    GridMap::new(width, height, cells).expect("classes in range")
}
