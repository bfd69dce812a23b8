//! One entry point for every algorithm, with the standard preprocessing.

use std::collections::BTreeSet;
use std::time::{Duration, Instant};

use crate::exact::{clc_exact, clt_exact};
use crate::graph::{EdgeId, Instance, Tour, VertexId};
use crate::heuristics::{ah_solve, djv_solve, sh_solve};
use crate::preprocess::{prune_unreachable, remove_leaves};
use crate::relaxations::{
    cr_solve, xr_solve_with_budget, CrSolution, XrOutcome, DEFAULT_NODE_BUDGET,
};
use crate::Algorithm;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum LeafRemoval {
    /// Only for the cycle algorithms (SH, AH, XR, exact CLC).
    Default,
    Always,
    Never,
}

#[derive(Clone, Copy, Debug)]
pub struct SolveOptions {
    pub prune: bool,
    pub leaf_removal: LeafRemoval,
    pub xr_node_budget: u64,
}

impl Default for SolveOptions {
    fn default() -> Self {
        Self {
            prune: true,
            leaf_removal: LeafRemoval::Default,
            xr_node_budget: DEFAULT_NODE_BUDGET,
        }
    }
}

impl SolveOptions {
    pub fn removes_leaves_for(&self, algorithm: Algorithm) -> bool {
        match self.leaf_removal {
            LeafRemoval::Default => algorithm.solves_cycles(),
            LeafRemoval::Always => true,
            LeafRemoval::Never => false,
        }
    }
}

/// Applies pruning and, where the options ask for it, leaf removal.
pub fn preprocess(instance: &Instance, algorithm: Algorithm, options: &SolveOptions) -> Instance {
    let mut graph = if options.prune {
        prune_unreachable(instance)
    } else {
        instance.graph().clone()
    };
    if options.removes_leaves_for(algorithm) {
        graph = remove_leaves(&graph, instance.origin());
    }
    instance
        .with_graph(graph)
        .expect("origin survives preprocessing")
}

#[derive(Clone, Debug, PartialEq)]
pub enum Answer {
    Tour(Tour),
    Relaxed(CrSolution),
    Selection {
        edges: BTreeSet<EdgeId>,
        cost: f64,
        weight: u64,
        vertices: usize,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Status {
    Solved,
    Infeasible,
    BudgetExceeded,
}

#[derive(Clone, Debug)]
pub struct Outcome {
    pub algorithm: Algorithm,
    pub status: Status,
    /// Present when solved, and for a budget cutoff that found an incumbent.
    pub answer: Option<Answer>,
    /// Solver time only; preprocessing is excluded.
    pub elapsed: Duration,
}

impl Outcome {
    pub fn cost(&self) -> Option<f64> {
        self.answer.as_ref().map(|a| match a {
            Answer::Tour(t) => t.total_cost(),
            Answer::Relaxed(s) => s.lower_bound_cost,
            Answer::Selection { cost, .. } => *cost,
        })
    }

    pub fn weight(&self) -> Option<u64> {
        self.answer.as_ref().map(|a| match a {
            Answer::Tour(t) => t.total_weight(),
            Answer::Relaxed(s) => s.achieved_weight,
            Answer::Selection { weight, .. } => *weight,
        })
    }

    /// Distinct vertices touched by the solution.
    pub fn vertex_count(&self, instance: &Instance) -> Option<usize> {
        self.answer.as_ref().map(|a| match a {
            Answer::Tour(t) => t.distinct_vertex_count(),
            Answer::Relaxed(s) => {
                let mut v: BTreeSet<VertexId> = s.access_path.iter().copied().collect();
                if let Some(e) = s.head_edge {
                    let edge = instance.graph().edge(e);
                    v.extend([edge.u, edge.v]);
                }
                v.len()
            }
            Answer::Selection { vertices, .. } => *vertices,
        })
    }

    pub fn route(&self) -> Option<&[VertexId]> {
        match &self.answer {
            Some(Answer::Tour(t)) => Some(t.vertices()),
            _ => None,
        }
    }

    pub fn is_feasible(&self) -> bool {
        self.status == Status::Solved
    }
}

/// Runs `algorithm` on `instance` as given (no preprocessing).
pub fn solve(algorithm: Algorithm, instance: &Instance, options: &SolveOptions) -> Outcome {
    let started = Instant::now();
    let tour = |t: Option<Tour>| match t {
        Some(t) => (Status::Solved, Some(Answer::Tour(t))),
        None => (Status::Infeasible, None),
    };
    let (status, answer) = match algorithm {
        Algorithm::Djv => tour(djv_solve(instance).map(|r| r.tour)),
        Algorithm::Sh => tour(sh_solve(instance).map(|r| r.tour)),
        Algorithm::Ah => tour(ah_solve(instance).map(|r| r.tour)),
        Algorithm::ExactClt => tour(clt_exact(instance)),
        Algorithm::ExactClc => tour(clc_exact(instance).map(|c| c.into_tour())),
        Algorithm::Cr => match cr_solve(instance) {
            Some(s) => (Status::Solved, Some(Answer::Relaxed(s))),
            None => (Status::Infeasible, None),
        },
        Algorithm::Xr => {
            let outcome = xr_solve_with_budget(instance, options.xr_node_budget);
            let answer = outcome.selection().map(|s| {
                let graph = instance.graph();
                let vertices: BTreeSet<VertexId> = s
                    .selected
                    .iter()
                    .flat_map(|&e| [graph.edge(e).u, graph.edge(e).v])
                    .collect();
                Answer::Selection {
                    edges: s.selected.clone(),
                    cost: s.total_cost,
                    weight: s.total_weight,
                    vertices: vertices.len(),
                }
            });
            let status = match outcome {
                XrOutcome::Optimal(_) => Status::Solved,
                XrOutcome::Infeasible => Status::Infeasible,
                XrOutcome::BudgetExceeded { .. } => Status::BudgetExceeded,
            };
            (status, answer)
        }
    };
    Outcome {
        algorithm,
        status,
        answer,
        elapsed: started.elapsed(),
    }
}
