use serde::{Deserialize, Serialize};

use super::{anchors, anchors_per_slot, slot, slot_mut};
use crate::graph::Graph;
use crate::prox::LocalObjective;
use crate::values::NodeValues;

/// DAPD (primal-dual coordinate method) specialised to consensus, with the
/// same per-slot layout as [`AsyncAdmmState`](super::AsyncAdmmState).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DapdState {
    pub x: NodeValues,
    pub lambda: Vec<f64>,
    pub xbar: Vec<f64>,
}

impl DapdState {
    pub fn new<O: LocalObjective>(graph: &Graph, objectives: &[O]) -> Self {
        let x = anchors(objectives);
        let lambda = vec![0.0; 2 * graph.num_edges() * x.dim()];
        let xbar = anchors_per_slot(graph, objectives);
        Self { x, lambda, xbar }
    }

    /// One activation of `e = (i, j)`:
    /// 1. `lambda_{ij} = (lambda_{ij} - lambda_{ji})/2 + rho (x_i - x_j)/2`, `lambda_{ji} = -lambda_{ij}`;
    /// 2. `x_k = prox_{f_k/(rho d_k)}(x_k/2 + (1/(2 d_k)) sum_l (xbar_{kl} - lambda_{kl}/rho))`;
    /// 3. `xbar_{ij} = x_j`, `xbar_{ji} = x_i`.
    pub fn step<O: LocalObjective>(&mut self, graph: &Graph, objectives: &[O], e: usize, rho: f64) {
        let (i, j) = graph.edge(e);
        let dim = self.x.dim();
        let (si, sj) = (2 * e, 2 * e + 1);
        for c in 0..dim {
            let lij = self.lambda[si * dim + c];
            let lji = self.lambda[sj * dim + c];
            let new = 0.5 * (lij - lji) + 0.5 * rho * (self.x.row(i)[c] - self.x.row(j)[c]);
            self.lambda[si * dim + c] = new;
            self.lambda[sj * dim + c] = -new;
        }
        let mut u = vec![0.0; dim];
        for k in [i, j] {
            let dk = graph.degree(k) as f64;
            u.iter_mut().for_each(|v| *v = 0.0);
            for inc in graph.incident(k) {
                let (xb, lam) = (slot(&self.xbar, inc.slot(), dim), slot(&self.lambda, inc.slot(), dim));
                for c in 0..dim {
                    u[c] += xb[c] - lam[c] / rho;
                }
            }
            let xk = self.x.row(k);
            for c in 0..dim {
                u[c] = 0.5 * xk[c] + u[c] / (2.0 * dk);
            }
            objectives[k].prox_into(&u, 1.0 / (rho * dk), self.x.row_mut(k));
        }
        let (xi, xj) = (self.x.row(i).to_vec(), self.x.row(j).to_vec());
        slot_mut(&mut self.xbar, si, dim).copy_from_slice(&xj);
        slot_mut(&mut self.xbar, sj, dim).copy_from_slice(&xi);
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::prox::pinball_objectives;

    #[test]
    fn activated_duals_are_antisymmetric() {
        let g = Graph::cycle(5).unwrap();
        let objs = pinball_objectives(&[0.0, 1.0, 5.0, -2.0, 3.0], 0.5).unwrap();
        let mut s = DapdState::new(&g, &objs);
        for t in 0..40 {
            let e = t % g.num_edges();
            s.step(&g, &objs, e, 0.6);
            assert_eq!(s.lambda[2 * e], -s.lambda[2 * e + 1]);
        }
    }

    #[test]
    fn equal_state_is_fixed() {
        let g = Graph::cycle(4).unwrap();
        let objs = pinball_objectives(&[-1.0; 4], 0.7).unwrap();
        let mut s = DapdState::new(&g, &objs);
        let before = s.clone();
        s.step(&g, &objs, 2, 0.9);
        assert_eq!(s, before);
    }
}
