//! Consensus optimisation over a gossip graph.
//!
//! Each algorithm keeps its own per-node memory and advances one activated
//! edge at a time (the synchronous variant advances one full round). All of
//! them are generic over [`LocalObjective`], so the same code estimates
//! scalar quantiles (pinball losses) and geometric medians (Euclidean
//! distances).
//!
//! Per-(edge, endpoint) variables live in flat arrays indexed by
//! [`Incidence::slot`](crate::graph::Incidence::slot).

mod asyl;
mod async_admm;
mod dapd;
mod run;
mod subgradient;
mod sync;
mod edge_admm;

use serde::{Deserialize, Serialize};

pub use asyl::AsylState;
pub use async_admm::AsyncAdmmState;
pub use dapd::DapdState;
pub use run::{run, run_with_rng, DivergencePolicy, EvalGrid, RunConfig, Trace};
pub use subgradient::SubgradState;
pub use sync::{EdgeDuals, SyncState};
pub use edge_admm::EdgeAdmmState;

use crate::graph::Graph;
use crate::prox::LocalObjective;
use crate::values::NodeValues;

/// Any iterate beyond this magnitude marks the run as diverged.
pub const DIVERGENCE_THRESHOLD: f64 = 1e12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AlgorithmKind {
    AsylAdmm,
    SyncAdmm,
    AsyncAdmm,
    Dapd,
    Subgradient,
    EdgeAdmm,
}

impl AlgorithmKind {
    pub fn label(self) -> &'static str {
        match self {
            AlgorithmKind::AsylAdmm => "AsylADMM",
            AlgorithmKind::SyncAdmm => "SyncADMM",
            AlgorithmKind::AsyncAdmm => "AsyncADMM",
            AlgorithmKind::Dapd => "DAPD",
            AlgorithmKind::Subgradient => "Subgradient",
            AlgorithmKind::EdgeAdmm => "EdgeADMM",
        }
    }

    pub fn is_synchronous(self) -> bool {
        matches!(self, AlgorithmKind::SyncAdmm)
    }
}

/// Initial estimates: every node starts at its own anchor.
pub(crate) fn anchors<O: LocalObjective>(objectives: &[O]) -> NodeValues {
    let dim = objectives.first().map_or(1, |o| o.dim());
    let mut flat = Vec::with_capacity(objectives.len() * dim);
    for o in objectives {
        assert_eq!(o.dim(), dim, "objectives must share a dimension");
        flat.extend_from_slice(o.anchor());
    }
    NodeValues::from_flat(dim, flat)
}

/// Repeats each node's anchor into both slots of every incident edge.
pub(crate) fn anchors_per_slot<O: LocalObjective>(graph: &Graph, objectives: &[O]) -> Vec<f64> {
    let dim = objectives[0].dim();
    let mut out = vec![0.0; 2 * graph.num_edges() * dim];
    for (k, o) in objectives.iter().enumerate() {
        for inc in graph.incident(k) {
            out[inc.slot() * dim..(inc.slot() + 1) * dim].copy_from_slice(o.anchor());
        }
    }
    out
}

pub(crate) fn slot(buf: &[f64], s: usize, dim: usize) -> &[f64] {
    &buf[s * dim..(s + 1) * dim]
}

pub(crate) fn slot_mut(buf: &mut [f64], s: usize, dim: usize) -> &mut [f64] {
    &mut buf[s * dim..(s + 1) * dim]
}

/// State of any of the algorithms, for uniform driving by the runner.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "algorithm", rename_all = "snake_case")]
pub enum SolverState {
    AsylAdmm(AsylState),
    SyncAdmm(SyncState),
    AsyncAdmm(AsyncAdmmState),
    Dapd(DapdState),
    Subgradient(SubgradState),
    EdgeAdmm(EdgeAdmmState),
}

impl SolverState {
    pub fn new<O: LocalObjective>(kind: AlgorithmKind, graph: &Graph, objectives: &[O]) -> Self {
        assert_eq!(graph.n(), objectives.len(), "one objective per node");
        match kind {
            AlgorithmKind::AsylAdmm => SolverState::AsylAdmm(AsylState::new(objectives)),
            AlgorithmKind::SyncAdmm => SolverState::SyncAdmm(SyncState::new(graph, objectives, false)),
            AlgorithmKind::AsyncAdmm => SolverState::AsyncAdmm(AsyncAdmmState::new(graph, objectives)),
            AlgorithmKind::Dapd => SolverState::Dapd(DapdState::new(graph, objectives)),
            AlgorithmKind::Subgradient => SolverState::Subgradient(SubgradState::new(objectives)),
            AlgorithmKind::EdgeAdmm => SolverState::EdgeAdmm(EdgeAdmmState::new(graph, objectives)),
        }
    }

    pub fn kind(&self) -> AlgorithmKind {
        match self {
            SolverState::AsylAdmm(_) => AlgorithmKind::AsylAdmm,
            SolverState::SyncAdmm(_) => AlgorithmKind::SyncAdmm,
            SolverState::AsyncAdmm(_) => AlgorithmKind::AsyncAdmm,
            SolverState::Dapd(_) => AlgorithmKind::Dapd,
            SolverState::Subgradient(_) => AlgorithmKind::Subgradient,
            SolverState::EdgeAdmm(_) => AlgorithmKind::EdgeAdmm,
        }
    }

    pub fn estimates(&self) -> &NodeValues {
        match self {
            SolverState::AsylAdmm(s) => &s.x,
            SolverState::SyncAdmm(s) => &s.x,
            SolverState::AsyncAdmm(s) => &s.x,
            SolverState::Dapd(s) => &s.x,
            SolverState::Subgradient(s) => &s.x,
            SolverState::EdgeAdmm(s) => &s.x,
        }
    }

    /// Processes one edge activation. For the synchronous variant this runs a
    /// full round and ignores `edge`.
    pub fn activate<O: LocalObjective>(&mut self, graph: &Graph, objectives: &[O], edge: usize, rho: f64) {
        match self {
            SolverState::AsylAdmm(s) => s.step(graph, objectives, edge, rho),
            SolverState::SyncAdmm(s) => s
                .round(graph, objectives, rho)
                .expect("untracked synchronous round cannot violate dual identities"),
            SolverState::AsyncAdmm(s) => s.step(graph, objectives, edge, rho),
            SolverState::Dapd(s) => s.step(graph, objectives, edge, rho),
            SolverState::Subgradient(s) => s.step(graph, objectives, edge, rho),
            SolverState::EdgeAdmm(s) => s.step(graph, objectives, edge, rho),
        }
    }

    pub fn to_json(&self) -> crate::Result<String> {
        Ok(serde_json::to_string(self)?)
    }
}
