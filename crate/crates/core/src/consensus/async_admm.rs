use serde::{Deserialize, Serialize};

use super::{anchors, anchors_per_slot, slot, slot_mut};
use crate::graph::Graph;
use crate::prox::LocalObjective;
use crate::values::NodeValues;

/// Asynchronous ADMM with per-neighbour duals `lambda_{kl}` and stored
/// neighbour averages `xbar_{kl}`, both indexed by the slot of node `k` on
/// edge `{k, l}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AsyncAdmmState {
    pub x: NodeValues,
    pub lambda: Vec<f64>,
    pub xbar: Vec<f64>,
}

impl AsyncAdmmState {
    pub fn new<O: LocalObjective>(graph: &Graph, objectives: &[O]) -> Self {
        let x = anchors(objectives);
        let lambda = vec![0.0; 2 * graph.num_edges() * x.dim()];
        let xbar = anchors_per_slot(graph, objectives);
        Self { x, lambda, xbar }
    }

    /// One activation of `e = (i, j)`, in order:
    /// 1. `x_k = prox_{f_k/(rho d_k)}((1/d_k) sum_l (xbar_{kl} - lambda_{kl}))` for `k in {i, j}`;
    /// 2. `xbar = (x_i + x_j) / 2`;
    /// 3. `lambda_{ij} += rho (x_i - xbar)`, `lambda_{ji} += rho (x_j - xbar)`;
    /// 4. `xbar_{ij} = xbar_{ji} = xbar`.
    pub fn step<O: LocalObjective>(&mut self, graph: &Graph, objectives: &[O], e: usize, rho: f64) {
        let (i, j) = graph.edge(e);
        let dim = self.x.dim();
        let mut u = vec![0.0; dim];
        for k in [i, j] {
            let dk = graph.degree(k) as f64;
            u.iter_mut().for_each(|v| *v = 0.0);
            for inc in graph.incident(k) {
                let (xb, lam) = (slot(&self.xbar, inc.slot(), dim), slot(&self.lambda, inc.slot(), dim));
                for c in 0..dim {
                    u[c] += xb[c] - lam[c];
                }
            }
            u.iter_mut().for_each(|v| *v /= dk);
            objectives[k].prox_into(&u, 1.0 / (rho * dk), self.x.row_mut(k));
        }
        let avg: Vec<f64> = self.x.row(i).iter().zip(self.x.row(j)).map(|(a, b)| 0.5 * (a + b)).collect();
        for (side, k) in [(0, i), (1, j)] {
            let s = 2 * e + side;
            let xk = self.x.row(k);
            let lam = slot_mut(&mut self.lambda, s, dim);
            for c in 0..dim {
                lam[c] += rho * (xk[c] - avg[c]);
            }
            slot_mut(&mut self.xbar, s, dim).copy_from_slice(&avg);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::prox::pinball_objectives;

    #[test]
    fn equal_state_is_fixed() {
        let g = Graph::complete(4).unwrap();
        let objs = pinball_objectives(&[3.0; 4], 0.5).unwrap();
        let mut s = AsyncAdmmState::new(&g, &objs);
        let before = s.clone();
        for e in 0..g.num_edges() {
            s.step(&g, &objs, e, 0.4);
        }
        assert_eq!(s, before);
    }
}
