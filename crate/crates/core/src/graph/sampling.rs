use rand::distr::weighted::WeightedIndex;
use rand::distr::Distribution;
use rand::Rng;
use serde::{Deserialize, Serialize};

use super::Graph;
use crate::error::{Error, Result};

/// Probability of activating each edge at a gossip tick.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EdgeDistribution {
    probs: Vec<f64>,
}

impl EdgeDistribution {
    /// Standard edge sampling: `p_e = (1/n)(1/d_i + 1/d_j)`.
    ///
    /// Every node spreads `1/n` evenly over its incident edges, so the
    /// probabilities sum to one identically.
    pub fn standard(g: &Graph) -> Self {
        let n = g.n() as f64;
        let probs = g
            .edges()
            .iter()
            .map(|&(i, j)| (1.0 / g.degree(i) as f64 + 1.0 / g.degree(j) as f64) / n)
            .collect();
        Self { probs }
    }

    pub fn uniform(num_edges: usize) -> Self {
        Self { probs: vec![1.0 / num_edges as f64; num_edges] }
    }

    pub fn from_probs(probs: Vec<f64>) -> Result<Self> {
        if probs.is_empty() || probs.iter().any(|&p| !(p > 0.0) || !p.is_finite()) {
            return Err(Error::invalid("edge probabilities must be positive and finite"));
        }
        let total: f64 = probs.iter().sum();
        if (total - 1.0).abs() > 1e-12 {
            return Err(Error::invalid(format!("edge probabilities sum to {total}")));
        }
        Ok(Self { probs })
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn len(&self) -> usize {
        self.probs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.probs.is_empty()
    }

    pub fn sampler(&self) -> EdgeSampler {
        EdgeSampler::new(self)
    }
}

/// Draws edge indices according to an [`EdgeDistribution`].
#[derive(Debug, Clone)]
pub struct EdgeSampler {
    index: Option<WeightedIndex<f64>>,
}

impl EdgeSampler {
    pub fn new(dist: &EdgeDistribution) -> Self {
        let index = if dist.len() > 1 {
            Some(WeightedIndex::new(dist.probs()).expect("validated probabilities"))
        } else {
            None
        };
        Self { index }
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> usize {
        match &self.index {
            Some(w) => w.sample(rng),
            None => 0,
        }
    }
}

/// One draw from `dist`.
pub fn sample_edge<R: Rng + ?Sized>(dist: &EdgeDistribution, rng: &mut R) -> usize {
    EdgeSampler::new(dist).sample(rng)
}
