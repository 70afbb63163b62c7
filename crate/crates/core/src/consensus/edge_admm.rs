use serde::{Deserialize, Serialize};

use super::anchors;
use crate::graph::Graph;
use crate::prox::LocalObjective;
use crate::values::NodeValues;

/// Edge-based asynchronous ADMM in which each edge constraint `x_i = x_j` is
/// split as `A_ei x_i = z_ei`, `A_ej x_j = z_ej`, `z_ei + z_ej = 0`, with
/// `A_ei = +1` for the smaller endpoint and `-1` for the larger one.
///
/// Kept as a baseline because it does not converge on quantile problems.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EdgeAdmmState {
    pub x: NodeValues,
    pub z: Vec<f64>,
    pub p: Vec<f64>,
}

/// Incidence-matrix sign for `side` (0 = smaller endpoint) of an edge.
pub(crate) fn orientation(side: usize) -> f64 {
    if side == 0 {
        1.0
    } else {
        -1.0
    }
}

impl EdgeAdmmState {
    /// `x_k = a_k`, `z_eq = A_eq a_q`, `p = 0`.
    pub fn new<O: LocalObjective>(graph: &Graph, objectives: &[O]) -> Self {
        let x = anchors(objectives);
        let dim = x.dim();
        let mut z = vec![0.0; 2 * graph.num_edges() * dim];
        for (e, &(i, j)) in graph.edges().iter().enumerate() {
            for (side, q) in [(0, i), (1, j)] {
                for c in 0..dim {
                    z[(2 * e + side) * dim + c] = orientation(side) * x.row(q)[c];
                }
            }
        }
        let p = vec![0.0; z.len()];
        Self { x, z, p }
    }

    /// One tick of edge `e` with penalty `beta`.
    ///
    /// The primal subproblem `f(x) - p A x + (beta/2)(A x - z)^2` equals
    /// `f(x) + (beta/2)(x - A(z + p/beta))^2` up to a constant because
    /// `A^2 = 1`, so it is a prox with step `1/beta`.
    pub fn step<O: LocalObjective>(&mut self, graph: &Graph, objectives: &[O], e: usize, beta: f64) {
        let (i, j) = graph.edge(e);
        let dim = self.x.dim();
        let mut u = vec![0.0; dim];
        for (side, q) in [(0, i), (1, j)] {
            let s = (2 * e + side) * dim;
            let a = orientation(side);
            for c in 0..dim {
                u[c] = a * (self.z[s + c] + self.p[s + c] / beta);
            }
            objectives[q].prox_into(&u, 1.0 / beta, self.x.row_mut(q));
        }
        let (si, sj) = (2 * e * dim, (2 * e + 1) * dim);
        for c in 0..dim {
            let (ai, aj) = (orientation(0), orientation(1));
            let (xi, xj) = (self.x.row(i)[c], self.x.row(j)[c]);
            let v = 0.5 * (-self.p[si + c] - self.p[sj + c]) + 0.5 * beta * (ai * xi + aj * xj);
            self.z[si + c] = (-self.p[si + c] - v) / beta + ai * xi;
            self.z[sj + c] = (-self.p[sj + c] - v) / beta + aj * xj;
            self.p[si + c] = -v;
            self.p[sj + c] = -v;
        }
    }
}
