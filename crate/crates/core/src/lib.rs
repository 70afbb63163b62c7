//! Decentralized quantile, median and trimmed-mean estimation over gossip
//! networks.
//!
//! Every node of an undirected graph holds one observation. At each tick a
//! random edge wakes up and only its two endpoints talk. The crate provides:
//!
//! | Module | Contents |
//! |--------|----------|
//! | [`graph`] | test topologies, edge sampling, Laplacian spectra |
//! | [`prox`] | pinball and Euclidean-distance objectives with closed-form prox |
//! | [`consensus`] | AsylADMM, its synchronous variant, AsyncADMM, DAPD, subgradient, edge-based ADMM |
//! | [`ranktrim`] | GoRank, Adaptive GoTrim, GoDepth and trimming weights |
//! | [`theory`] | Lyapunov / residual diagnostics, interchange chain, concentration bounds |
//! | [`regress`] | robust linear regression by gradient trimming |
//! | [`harness`] | data generators, exact oracles, experiment runner, CSV/SVG output |
//!
//! Simulations are sequential per trial and deterministic given a seed.

pub mod consensus;
pub mod error;
pub mod graph;
pub mod harness;
pub mod linalg;
pub mod prox;
pub mod ranktrim;
pub mod regress;
pub mod rng;
pub mod theory;
pub mod values;

pub use error::{Error, Result};
pub use graph::{EdgeDistribution, Graph, SpectralSummary, Topology};
pub use prox::{EuclideanDistanceObjective, LocalObjective, Objective, PinballObjective};
pub use values::NodeValues;
