//! Rank and depth based trimming over gossip.
//!
//! [`GoRankState`] estimates ranks with a running average over a random
//! swapping process, [`GoDepthState`] does the same for L2 depths, and
//! [`GoTrim`] turns either weight source (or a pair of quantile estimates)
//! into a trimmed mean by gossip averaging.

mod godepth;
mod gorank;
mod gotrim;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use godepth::{exact_depths, AsylGoDepth, GoDepthState};
pub use gorank::GoRankState;
pub use gotrim::{GoTrim, QuantilePair, TrimAccumulator, TrimRule};

/// Inclusion interval `[m + 1/2, n - m + 1/2]` with `m = floor(alpha n)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TrimInterval {
    pub m: usize,
    pub b1: f64,
    pub b2: f64,
}

impl TrimInterval {
    pub fn new(n: usize, alpha: f64) -> Result<Self> {
        if !(0.0..0.5).contains(&alpha) {
            return Err(Error::invalid(format!("trimming level {alpha} outside [0, 1/2)")));
        }
        let m = (alpha * n as f64).floor() as usize;
        Ok(Self { m, b1: m as f64 + 0.5, b2: (n - m) as f64 + 0.5 })
    }

    pub fn contains(&self, r: f64) -> bool {
        self.b1 <= r && r <= self.b2
    }

    /// Distance of a true rank to the nearer interval bound.
    pub fn margin(&self, r: usize) -> f64 {
        let r = r as f64;
        (r - self.b1).abs().min((r - self.b2).abs())
    }
}

/// `r_k = 1 + #{l : a_k > a_l}`. Ties are rejected.
pub fn true_ranks(data: &[f64]) -> Result<Vec<usize>> {
    let mut idx: Vec<usize> = (0..data.len()).collect();
    idx.sort_by(|&a, &b| data[a].total_cmp(&data[b]));
    let mut ranks = vec![0; data.len()];
    for (pos, w) in idx.windows(2).enumerate() {
        if data[w[0]] == data[w[1]] {
            return Err(Error::Ties(w[0].min(w[1]), w[0].max(w[1])));
        }
        ranks[w[0]] = pos + 1;
    }
    if let Some(&last) = idx.last() {
        ranks[last] = data.len();
    }
    Ok(ranks)
}

/// Rank-based weight `1{R in [b1, b2]}`.
pub fn rank_weight(r: f64, interval: &TrimInterval) -> bool {
    interval.contains(r)
}

/// Quantile-based weight `1{q_lo <= x <= q_hi}`; crossed estimates give 0.
pub fn quantile_weight(x: f64, q_lo: f64, q_hi: f64) -> bool {
    q_lo <= x && x <= q_hi
}

/// Mean absolute difference between estimated and reference weights.
pub fn weight_error(estimated: &[bool], truth: &[bool]) -> f64 {
    assert_eq!(estimated.len(), truth.len());
    let wrong = estimated.iter().zip(truth).filter(|(a, b)| a != b).count();
    wrong as f64 / truth.len().max(1) as f64
}
