use serde::{Deserialize, Serialize};

use super::{quantile_weight, rank_weight, weight_error, AsylGoDepth, GoRankState, TrimInterval};
use crate::consensus::AsylState;
use crate::error::Result;
use crate::graph::Graph;
use crate::prox::PinballObjective;
use crate::values::NodeValues;

/// Gossip-averaged weighted sums behind the trimmed mean.
///
/// Weight changes enter with a factor `n`, so that `sum_k M_k / n` is the
/// number of included nodes and `max(1, M_k)` guards only the start of a run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrimAccumulator {
    pub x: NodeValues,
    pub num: NodeValues,
    pub mass: Vec<f64>,
    pub w: Vec<bool>,
}

impl TrimAccumulator {
    pub fn new(data: NodeValues) -> Self {
        let (n, dim) = (data.len(), data.dim());
        Self { x: data, num: NodeValues::zeros(n, dim), mass: vec![0.0; n], w: vec![false; n] }
    }

    /// Sets node `k`'s weight, correcting `N_k` and `M_k` by the change.
    pub fn refresh(&mut self, k: usize, w_new: bool) {
        let delta = (w_new as i32 - self.w[k] as i32) as f64 * self.x.len() as f64;
        if delta != 0.0 {
            let xk = self.x.row(k).to_vec();
            for (nc, xc) in self.num.row_mut(k).iter_mut().zip(&xk) {
                *nc += delta * xc;
            }
            self.mass[k] += delta;
            self.w[k] = w_new;
        }
    }

    pub fn average(&mut self, i: usize, j: usize) {
        let (a, b) = self.num.pair_mut(i, j);
        for (p, q) in a.iter_mut().zip(b.iter_mut()) {
            let m = 0.5 * (*p + *q);
            *p = m;
            *q = m;
        }
        let m = 0.5 * (self.mass[i] + self.mass[j]);
        self.mass[i] = m;
        self.mass[j] = m;
    }

    /// `N_k / max(1, M_k)`.
    pub fn estimate(&self, k: usize) -> Vec<f64> {
        let d = self.mass[k].max(1.0);
        self.num.row(k).iter().map(|v| v / d).collect()
    }

    pub fn estimates(&self) -> NodeValues {
        let rows: Vec<Vec<f64>> = (0..self.x.len()).map(|k| self.estimate(k)).collect();
        NodeValues::from_rows(&rows)
    }
}

/// Two AsylADMM instances tracking the `alpha` and `1 - alpha` quantiles on
/// a shared edge stream.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QuantilePair {
    pub lo: AsylState,
    pub hi: AsylState,
    pub obj_lo: Vec<PinballObjective>,
    pub obj_hi: Vec<PinballObjective>,
}

impl QuantilePair {
    pub fn new(data: &[f64], alpha: f64) -> Result<Self> {
        let obj_lo = data.iter().map(|&a| PinballObjective::new(a, alpha)).collect::<Result<Vec<_>>>()?;
        let obj_hi = data.iter().map(|&a| PinballObjective::new(a, 1.0 - alpha)).collect::<Result<Vec<_>>>()?;
        Ok(Self { lo: AsylState::new(&obj_lo), hi: AsylState::new(&obj_hi), obj_lo, obj_hi })
    }

    pub fn step(&mut self, graph: &Graph, e: usize, rho: f64) {
        self.lo.step(graph, &self.obj_lo, e, rho);
        self.hi.step(graph, &self.obj_hi, e, rho);
    }

    pub fn bounds(&self, k: usize) -> (f64, f64) {
        (self.lo.x.row(k)[0], self.hi.x.row(k)[0])
    }
}

/// Source of the inclusion weights.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "rule", rename_all = "snake_case")]
pub enum TrimRule {
    Rank { gorank: GoRankState, interval: TrimInterval },
    Quantile { pair: QuantilePair },
    /// Keep nodes whose depth estimate is at least their estimate of the
    /// depth quantile.
    Depth { joint: AsylGoDepth },
}

/// Adaptive GoTrim: a weight rule plus the gossip-averaged trimmed mean.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GoTrim {
    pub acc: TrimAccumulator,
    pub rule: TrimRule,
}

impl GoTrim {
    pub fn rank(data: &[f64], alpha: f64) -> Result<Self> {
        let interval = TrimInterval::new(data.len(), alpha)?;
        let gorank = GoRankState::new(data)?;
        Ok(Self { acc: TrimAccumulator::new(NodeValues::from_scalars(data)), rule: TrimRule::Rank { gorank, interval } })
    }

    pub fn quantile(data: &[f64], alpha: f64) -> Result<Self> {
        TrimInterval::new(data.len(), alpha)?;
        let pair = QuantilePair::new(data, alpha)?;
        Ok(Self { acc: TrimAccumulator::new(NodeValues::from_scalars(data)), rule: TrimRule::Quantile { pair } })
    }

    pub fn depth(data: NodeValues, alpha: f64) -> Result<Self> {
        let joint = AsylGoDepth::new(data.clone(), alpha)?;
        Ok(Self { acc: TrimAccumulator::new(data), rule: TrimRule::Depth { joint } })
    }

    /// Current weight of node `k` under the rule.
    pub fn weight(&self, k: usize) -> bool {
        match &self.rule {
            TrimRule::Rank { gorank, interval } => rank_weight(gorank.rank(k), interval),
            TrimRule::Quantile { pair } => {
                let (lo, hi) = pair.bounds(k);
                quantile_weight(self.acc.x.row(k)[0], lo, hi)
            }
            TrimRule::Depth { joint } => joint.depth.depth(k) >= joint.quantile(k),
        }
    }

    /// One activation of edge `e`: the rule updates the endpoints, their
    /// weights are refreshed, `N` and `M` are averaged across the edge, and
    /// the rule exchanges (GoRank swaps; the optimisation rules have already
    /// communicated inside their own step).
    pub fn step(&mut self, graph: &Graph, e: usize, rho: f64) {
        let (i, j) = graph.edge(e);
        match &mut self.rule {
            TrimRule::Rank { gorank, .. } => {
                gorank.update(i);
                gorank.update(j);
            }
            TrimRule::Quantile { pair } => pair.step(graph, e, rho),
            TrimRule::Depth { joint } => joint.step(graph, e, rho),
        }
        for k in [i, j] {
            let w = self.weight(k);
            self.acc.refresh(k, w);
        }
        self.acc.average(i, j);
        if let TrimRule::Rank { gorank, .. } = &mut self.rule {
            gorank.swap(i, j);
        }
    }

    /// Weights currently applied in the accumulator (refreshed only on
    /// activation).
    pub fn weights(&self) -> &[bool] {
        &self.acc.w
    }

    pub fn weight_error(&self, truth: &[bool]) -> f64 {
        weight_error(self.weights(), truth)
    }
}
