use serde::{Deserialize, Serialize};

use crate::consensus::AsylState;
use crate::graph::Graph;
use crate::prox::PinballObjective;
use crate::values::{distance, NodeValues};

/// GoDepth: running mean of distances to the swapped auxiliary points gives
/// an estimate of the L2 depth `1 / (1 + mean_i |x_k - x_i|)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GoDepthState {
    pub x: NodeValues,
    pub y: NodeValues,
    pub z: Vec<f64>,
    pub count: Vec<u64>,
}

impl GoDepthState {
    pub fn new(data: NodeValues) -> Self {
        let n = data.len();
        Self { y: data.clone(), x: data, z: vec![0.0; n], count: vec![1; n] }
    }

    pub fn depth(&self, k: usize) -> f64 {
        1.0 / (1.0 + self.z[k])
    }

    pub fn depths(&self) -> Vec<f64> {
        (0..self.z.len()).map(|k| self.depth(k)).collect()
    }

    pub fn swap(&mut self, i: usize, j: usize) {
        let (a, b) = self.y.pair_mut(i, j);
        a.swap_with_slice(b);
    }

    pub fn update(&mut self, k: usize) {
        self.count[k] += 1;
        let c = self.count[k] as f64;
        let dist = distance(self.x.row(k), self.y.row(k));
        self.z[k] = (1.0 - 1.0 / c) * self.z[k] + dist / c;
    }

    /// Swap first, then update both endpoints.
    pub fn step(&mut self, i: usize, j: usize) {
        self.swap(i, j);
        self.update(i);
        self.update(j);
    }
}

/// Exact L2 depths `(1 + (1/n) sum_i |x_k - x_i|)^-1`.
pub fn exact_depths(data: &NodeValues) -> Vec<f64> {
    let n = data.len();
    (0..n)
        .map(|k| {
            let mean: f64 = (0..n).map(|i| distance(data.row(k), data.row(i))).sum::<f64>() / n as f64;
            1.0 / (1.0 + mean)
        })
        .collect()
}

/// GoDepth feeding AsylADMM: each activation refreshes the endpoints' depth
/// estimates and uses them as the anchors of an `alpha`-quantile problem.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AsylGoDepth {
    pub depth: GoDepthState,
    pub quant: AsylState,
    pub objectives: Vec<PinballObjective>,
}

impl AsylGoDepth {
    pub fn new(data: NodeValues, alpha: f64) -> crate::Result<Self> {
        let depth = GoDepthState::new(data);
        let objectives = depth
            .depths()
            .into_iter()
            .map(|d| PinballObjective::new(d, alpha))
            .collect::<crate::Result<Vec<_>>>()?;
        let quant = AsylState::new(&objectives);
        Ok(Self { depth, quant, objectives })
    }

    pub fn step(&mut self, graph: &Graph, e: usize, rho: f64) {
        let (i, j) = graph.edge(e);
        self.depth.step(i, j);
        self.objectives[i].set_anchor(self.depth.depth(i));
        self.objectives[j].set_anchor(self.depth.depth(j));
        self.quant.step(graph, &self.objectives, e, rho);
    }

    /// Node `k`'s current estimate of the depth quantile.
    pub fn quantile(&self, k: usize) -> f64 {
        self.quant.x.row(k)[0]
    }
}
