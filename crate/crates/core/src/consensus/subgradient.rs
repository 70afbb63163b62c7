use serde::{Deserialize, Serialize};

use super::anchors;
use crate::graph::Graph;
use crate::prox::LocalObjective;
use crate::values::NodeValues;

/// Distributed subgradient descent with pairwise averaging.
///
/// Each iteration moves every node along a subgradient with step
/// `rho / sqrt(t + 1)`, then averages the two endpoints of the sampled edge.
/// The global step is what makes this method only partially asynchronous.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SubgradState {
    pub x: NodeValues,
    pub t: u64,
}

impl SubgradState {
    pub fn new<O: LocalObjective>(objectives: &[O]) -> Self {
        Self { x: anchors(objectives), t: 0 }
    }

    pub fn step<O: LocalObjective>(&mut self, graph: &Graph, objectives: &[O], e: usize, rho: f64) {
        let step = rho / ((self.t + 1) as f64).sqrt();
        let mut g = vec![0.0; self.x.dim()];
        for (k, obj) in objectives.iter().enumerate() {
            obj.subgradient_into(self.x.row(k), &mut g);
            for (xc, gc) in self.x.row_mut(k).iter_mut().zip(&g) {
                *xc -= step * gc;
            }
        }
        let (i, j) = graph.edge(e);
        let (xi, xj) = self.x.pair_mut(i, j);
        for (a, b) in xi.iter_mut().zip(xj.iter_mut()) {
            let m = 0.5 * (*a + *b);
            *a = m;
            *b = m;
        }
        self.t += 1;
    }
}
