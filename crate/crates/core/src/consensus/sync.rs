use serde::{Deserialize, Serialize};

use super::{anchors, slot, slot_mut};
use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::prox::LocalObjective;
use crate::values::NodeValues;

/// Full edge-level variables of the synchronous variant, kept only for
/// diagnostics: `y[slot(e, k)]` is the dual `y_{e,k}` and `z[e]` the consensus
/// value of edge `e` from the latest round.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EdgeDuals {
    pub y: Vec<f64>,
    pub z: Vec<f64>,
}

/// Synchronous variant: every node updates in parallel each round.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SyncState {
    pub x: NodeValues,
    pub mu_hat: NodeValues,
    pub duals: Option<EdgeDuals>,
    pub rounds: u64,
}

/// Tolerance for the aggregate and antisymmetry identities, relative to the
/// magnitude of the duals involved.
const IDENTITY_TOL: f64 = 1e-9;

impl SyncState {
    pub fn new<O: LocalObjective>(graph: &Graph, objectives: &[O], track_duals: bool) -> Self {
        let x = anchors(objectives);
        let dim = x.dim();
        let mu_hat = NodeValues::zeros(x.len(), dim);
        let duals = track_duals.then(|| {
            let mut z = vec![0.0; graph.num_edges() * dim];
            for (e, &(i, j)) in graph.edges().iter().enumerate() {
                for c in 0..dim {
                    z[e * dim + c] = 0.5 * (x.row(i)[c] + x.row(j)[c]);
                }
            }
            EdgeDuals { y: vec![0.0; 2 * graph.num_edges() * dim], z }
        });
        Self { x, mu_hat, duals, rounds: 0 }
    }

    /// One synchronous round:
    ///
    /// ```text
    /// xhat_k = mean of neighbour estimates
    /// zhat_k = (xhat_k + x_k) / 2
    /// mu_k  += rho (zhat_k - x_k)
    /// x_k    = prox_{f_k / (rho d_k)}(zhat_k + mu_k / rho)
    /// ```
    ///
    /// With tracked duals the edge-level updates `z_e = (x_i + x_j)/2`,
    /// `y_{e,k} += rho (z_e - x_k)` run alongside, and the identities
    /// `mu_k = mean_e y_{e,k}` and `y_{e,i} + y_{e,j} = 0` are checked.
    pub fn round<O: LocalObjective>(&mut self, graph: &Graph, objectives: &[O], rho: f64) -> Result<()> {
        let n = graph.n();
        let dim = self.x.dim();
        let old = self.x.clone();

        if let Some(duals) = self.duals.as_mut() {
            for (e, &(i, j)) in graph.edges().iter().enumerate() {
                for c in 0..dim {
                    let ze = 0.5 * (old.row(i)[c] + old.row(j)[c]);
                    duals.z[e * dim + c] = ze;
                    duals.y[(2 * e) * dim + c] += rho * (ze - old.row(i)[c]);
                    duals.y[(2 * e + 1) * dim + c] += rho * (ze - old.row(j)[c]);
                }
            }
        }

        let mut zhat = vec![0.0; dim];
        let mut u = vec![0.0; dim];
        for k in 0..n {
            let dk = graph.degree(k) as f64;
            zhat.iter_mut().for_each(|v| *v = 0.0);
            for l in graph.neighbors(k) {
                for c in 0..dim {
                    zhat[c] += old.row(l)[c];
                }
            }
            let xk = old.row(k);
            let mu = self.mu_hat.row_mut(k);
            for c in 0..dim {
                zhat[c] = 0.5 * (zhat[c] / dk + xk[c]);
                mu[c] += rho * (zhat[c] - xk[c]);
                u[c] = zhat[c] + mu[c] / rho;
            }
            objectives[k].prox_into(&u, 1.0 / (rho * dk), self.x.row_mut(k));
        }
        self.rounds += 1;

        if let Some(duals) = &self.duals {
            check_dual_identities(graph, &self.mu_hat, duals)?;
        }
        Ok(())
    }

    /// Stacked residual `r_{e,k} = z_e - x_k` from the latest round, laid out by
    /// slot. `None` without tracked duals.
    pub fn residual(&self, graph: &Graph) -> Option<Vec<f64>> {
        let duals = self.duals.as_ref()?;
        let dim = self.x.dim();
        let mut r = vec![0.0; 2 * graph.num_edges() * dim];
        for (e, &(i, j)) in graph.edges().iter().enumerate() {
            for (side, k) in [(0, i), (1, j)] {
                let out = slot_mut(&mut r, 2 * e + side, dim);
                for c in 0..dim {
                    out[c] = duals.z[e * dim + c] - self.x.row(k)[c];
                }
            }
        }
        Some(r)
    }
}

fn check_dual_identities(graph: &Graph, mu_hat: &NodeValues, duals: &EdgeDuals) -> Result<()> {
    let dim = mu_hat.dim();
    for e in 0..graph.num_edges() {
        let (a, b) = (slot(&duals.y, 2 * e, dim), slot(&duals.y, 2 * e + 1, dim));
        for c in 0..dim {
            let scale = 1.0 + a[c].abs().max(b[c].abs());
            if (a[c] + b[c]).abs() > IDENTITY_TOL * scale {
                return Err(Error::Invariant(format!("dual antisymmetry broken on edge {e}: {} vs {}", a[c], b[c])));
            }
        }
    }
    for k in 0..graph.n() {
        let dk = graph.degree(k) as f64;
        for c in 0..dim {
            let mean: f64 = graph.incident(k).iter().map(|inc| slot(&duals.y, inc.slot(), dim)[c]).sum::<f64>() / dk;
            let mu = mu_hat.row(k)[c];
            if (mean - mu).abs() > IDENTITY_TOL * (1.0 + mu.abs()) {
                return Err(Error::Invariant(format!("aggregate identity broken at node {k}: mu={mu}, mean y={mean}")));
            }
        }
    }
    Ok(())
}
