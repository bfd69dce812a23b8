//! Constrained least-cost tours (CLT) and cycles (CLC).
//!
//! Given an undirected graph whose edges carry an integer weight and a real
//! cost, an origin vertex and a weight window `[w1, w2]`, find a closed walk
//! (CLT) or simple cycle (CLC) through the origin whose total weight lies in
//! the window and whose total cost is as small as possible.
//!
//! The crate provides polynomial heuristics ([`heuristics`]), lower bounds
//! ([`relaxations`]), exact reference solvers for small instances
//! ([`exact`]), dataset readers ([`ingest`]) and a benchmark harness
//! ([`bench`]).

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

pub mod bench;
pub mod exact;
pub mod float;
pub mod generate;
pub mod graph;
pub mod heuristics;
pub mod ingest;
pub mod preprocess;
pub mod relaxations;
pub mod solve;
pub mod suurballe;

pub use graph::{
    evaluate_tour, least_cost_tree, CycleSolution, Edge, EdgeId, Graph, GraphBuilder, GraphError,
    Instance, InstanceError, LeastCostTree, Point, Tour, TourError, VertexId,
};

/// Every solver the toolkit exposes. The declaration order is the order used
/// when sorting benchmark output.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Algorithm {
    Djv,
    Cr,
    Sh,
    Ah,
    Xr,
    ExactClt,
    ExactClc,
}

impl Algorithm {
    pub const ALL: [Algorithm; 7] = [
        Algorithm::Djv,
        Algorithm::Cr,
        Algorithm::Sh,
        Algorithm::Ah,
        Algorithm::Xr,
        Algorithm::ExactClt,
        Algorithm::ExactClc,
    ];

    pub fn tag(self) -> &'static str {
        match self {
            Algorithm::Djv => "djv",
            Algorithm::Cr => "cr",
            Algorithm::Sh => "sh",
            Algorithm::Ah => "ah",
            Algorithm::Xr => "xr",
            Algorithm::ExactClt => "exact-clt",
            Algorithm::ExactClc => "exact-clc",
        }
    }

    /// Whether the algorithm answers the simple-cycle problem (and so may run
    /// on a leaf-free graph).
    pub fn solves_cycles(self) -> bool {
        matches!(
            self,
            Algorithm::Sh | Algorithm::Ah | Algorithm::Xr | Algorithm::ExactClc
        )
    }
}

impl fmt::Display for Algorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.tag())
    }
}

#[derive(Debug, thiserror::Error, Clone, PartialEq, Eq)]
#[error("unknown algorithm '{0}' (expected one of djv, cr, sh, ah, xr, exact-clt, exact-clc)")]
pub struct UnknownAlgorithm(pub String);

impl FromStr for Algorithm {
    type Err = UnknownAlgorithm;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Algorithm::ALL
            .into_iter()
            .find(|a| a.tag() == s)
            .ok_or_else(|| UnknownAlgorithm(s.to_string()))
    }
}
