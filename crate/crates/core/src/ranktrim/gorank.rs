use serde::{Deserialize, Serialize};

use super::true_ranks;
use crate::error::Result;

/// GoRank: each node averages `1{X_k > Y_k}` over the auxiliary
/// observations `Y_k` that random swaps bring to it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GoRankState {
    pub x: Vec<f64>,
    pub y: Vec<f64>,
    pub rprime: Vec<f64>,
    /// `C_k`: one more than the number of updates made so far.
    pub count: Vec<u64>,
}

impl GoRankState {
    /// `Y_k = X_k`, `R'_k = 0`, `C_k = 1`. Tied data is rejected.
    pub fn new(data: &[f64]) -> Result<Self> {
        true_ranks(data)?;
        let n = data.len();
        Ok(Self { x: data.to_vec(), y: data.to_vec(), rprime: vec![0.0; n], count: vec![1; n] })
    }

    /// Starts from a given arrangement of the auxiliary observations, e.g. a
    /// uniformly random permutation for a stationary start.
    pub fn with_auxiliary(data: &[f64], y: Vec<f64>) -> Result<Self> {
        let mut s = Self::new(data)?;
        assert_eq!(y.len(), data.len());
        s.y = y;
        Ok(s)
    }

    pub fn n(&self) -> usize {
        self.x.len()
    }

    /// `R_k = n R'_k + 1`.
    pub fn rank(&self, k: usize) -> f64 {
        self.n() as f64 * self.rprime[k] + 1.0
    }

    pub fn ranks(&self) -> Vec<f64> {
        (0..self.n()).map(|k| self.rank(k)).collect()
    }

    /// Number of running-average updates node `k` has made.
    pub fn updates(&self, k: usize) -> u64 {
        self.count[k] - 1
    }

    /// Folds the current indicator into node `k`'s running average.
    pub fn update(&mut self, k: usize) {
        let c = self.count[k] as f64;
        let ind = if self.x[k] > self.y[k] { 1.0 } else { 0.0 };
        self.rprime[k] = (1.0 - 1.0 / c) * self.rprime[k] + ind / c;
        self.count[k] += 1;
    }

    pub fn swap(&mut self, i: usize, j: usize) {
        self.y.swap(i, j);
    }

    /// Asynchronous step on edge `(i, j)`: both endpoints update, then swap.
    pub fn step_async(&mut self, i: usize, j: usize) {
        self.update(i);
        self.update(j);
        self.swap(i, j);
    }

    /// Synchronous round: every node updates with weight `1/s`, then the
    /// drawn edge `(i, j)` swaps.
    pub fn round_sync(&mut self, i: usize, j: usize) {
        for k in 0..self.n() {
            self.update(k);
        }
        self.swap(i, j);
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn first_indicator_compares_with_itself() {
        let mut s = GoRankState::new(&[0.0, 5.0, 3.0]).unwrap();
        s.step_async(0, 1);
        assert_eq!(s.rprime[0], 0.0);
        assert_eq!(s.rprime[1], 0.0);
        assert_eq!(s.y, vec![5.0, 0.0, 3.0]);
        s.step_async(0, 1);
        // Node 1 now holds 0.0 < 5.0.
        assert_eq!(s.rprime[1], 0.5);
        assert_eq!(s.rank(1), 2.5);
    }

    #[test]
    fn two_nodes_alternate() {
        // Y alternates between own and other value, so R' tends to 1/2 for
        // the larger value and stays 0 for the smaller one.
        let mut s = GoRankState::new(&[1.0, 2.0]).unwrap();
        for _ in 0..1000 {
            s.step_async(0, 1);
        }
        assert_eq!(s.rprime[0], 0.0);
        assert!((s.rprime[1] - 0.5).abs() < 1e-12);
        assert!((s.rank(1) - 2.0).abs() < 1e-9);
    }

    #[test]
    fn sync_round_updates_everyone() {
        let mut s = GoRankState::new(&[3.0, 1.0, 2.0]).unwrap();
        s.round_sync(0, 1);
        assert!(s.count.iter().all(|&c| c == 2));
        assert_eq!(s.y, vec![1.0, 3.0, 2.0]);
        s.round_sync(1, 2);
        assert_eq!(s.rprime, vec![0.5, 0.0, 0.0]);
    }
}
