use serde::{Deserialize, Serialize};

use super::anchors;
use crate::graph::Graph;
use crate::prox::LocalObjective;
use crate::values::NodeValues;

/// AsylADMM memory: an estimate `x_k` and one dual aggregate `mu_hat_k` per
/// node, independent of the degree.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AsylState {
    pub x: NodeValues,
    pub mu_hat: NodeValues,
}

impl AsylState {
    pub fn new<O: LocalObjective>(objectives: &[O]) -> Self {
        let x = anchors(objectives);
        let mu_hat = NodeValues::zeros(x.len(), x.dim());
        Self { x, mu_hat }
    }

    /// One activation of edge `e = (i, j)`:
    ///
    /// ```text
    /// z_e   = (x_i + x_j) / 2
    /// mu_k += rho (z_e - x_k) / d_k                 k in {i, j}
    /// x_k   = prox_{f_k / (rho d_k)}(z_e + mu_k / rho)
    /// ```
    pub fn step<O: LocalObjective>(&mut self, graph: &Graph, objectives: &[O], e: usize, rho: f64) {
        let (i, j) = graph.edge(e);
        let dim = self.x.dim();
        let z: Vec<f64> = self.x.row(i).iter().zip(self.x.row(j)).map(|(a, b)| 0.5 * (a + b)).collect();
        let mut u = vec![0.0; dim];
        for k in [i, j] {
            let dk = graph.degree(k) as f64;
            let mu = self.mu_hat.row_mut(k);
            let xk = self.x.row(k);
            for c in 0..dim {
                mu[c] += rho * (z[c] - xk[c]) / dk;
                u[c] = z[c] + mu[c] / rho;
            }
            objectives[k].prox_into(&u, 1.0 / (rho * dk), self.x.row_mut(k));
        }
    }
}
