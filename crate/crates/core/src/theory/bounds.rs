use rand::seq::SliceRandom;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{spectral_summary, EdgeDistribution, Graph};
use crate::ranktrim::{true_ranks, GoRankState, TrimInterval};
use crate::rng::{stream_rng, Stream};

/// `2 exp(-(2/(2-c)) c t gamma^2 / n^2)`.
pub fn hoeffding_bound(c: f64, t: f64, gamma: f64, n: usize) -> f64 {
    let n2 = (n * n) as f64;
    2.0 * (-(2.0 / (2.0 - c)) * c * t * gamma * gamma / n2).exp()
}

/// `2 exp(-c t u^2 n^-2 / (4 V_f + 10 u / n))`.
pub fn bernstein_bound(c: f64, t: f64, u: f64, v_f: f64, n: usize) -> f64 {
    let nf = n as f64;
    2.0 * (-(c * t * u * u / (nf * nf)) / (4.0 * v_f + 10.0 * u / nf)).exp()
}

/// Monte-Carlo frequencies of `|R_k(t) - r_k| >= gamma_k` for synchronous
/// GoRank from a stationary (uniformly shuffled) start.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DeviationReport {
    pub t: u64,
    pub trials: usize,
    pub c: f64,
    pub gamma: Vec<f64>,
    pub frequency: Vec<f64>,
    /// 95% normal-approximation half-width `1.96 sqrt(p (1 - p) / trials)`.
    pub half_width: Vec<f64>,
    pub hoeffding: Vec<f64>,
    pub bernstein: Vec<f64>,
}

impl DeviationReport {
    /// Nodes whose frequency exceeds the Hoeffding bound plus CI slack.
    pub fn hoeffding_violations(&self) -> Vec<usize> {
        (0..self.gamma.len()).filter(|&k| self.frequency[k] > self.hoeffding[k] + self.half_width[k]).collect()
    }

    pub fn bernstein_violations(&self) -> Vec<usize> {
        (0..self.gamma.len()).filter(|&k| self.frequency[k] > self.bernstein[k] + self.half_width[k]).collect()
    }
}

/// The synchronous rounds draw their swap edge from `dist`, the same
/// distribution whose `c` enters the bounds.
pub fn empirical_deviation(
    graph: &Graph,
    dist: &EdgeDistribution,
    data: &[f64],
    alpha: f64,
    t: u64,
    trials: usize,
    seed: u64,
) -> Result<DeviationReport> {
    if trials == 0 {
        return Err(Error::invalid("at least one trial is required"));
    }
    if t == 0 {
        return Err(Error::invalid("t must be at least 1"));
    }
    let n = graph.n();
    if data.len() != n {
        return Err(Error::invalid("one observation per node"));
    }
    let ranks = true_ranks(data)?;
    let interval = TrimInterval::new(n, alpha)?;
    let gamma: Vec<f64> = ranks.iter().map(|&r| interval.margin(r)).collect();
    let c = spectral_summary(graph, dist)?.c;
    let sampler = dist.sampler();

    let hits: Vec<Vec<bool>> = (0..trials)
        .into_par_iter()
        .map(|trial| {
            let mut shuffle = stream_rng(seed, trial as u64, Stream::Shuffle);
            let mut edges = stream_rng(seed, trial as u64, Stream::Edges);
            let mut y = data.to_vec();
            y.shuffle(&mut shuffle);
            let mut s = GoRankState::with_auxiliary(data, y).expect("data already checked for ties");
            for _ in 0..t {
                let (i, j) = graph.edge(sampler.sample(&mut edges));
                s.round_sync(i, j);
            }
            (0..n).map(|k| (s.rank(k) - ranks[k] as f64).abs() >= gamma[k]).collect()
        })
        .collect();

    let mut frequency = vec![0.0; n];
    for h in &hits {
        for k in 0..n {
            if h[k] {
                frequency[k] += 1.0;
            }
        }
    }
    frequency.iter_mut().for_each(|f| *f /= trials as f64);
    let half_width = frequency.iter().map(|&p| 1.96 * (p * (1.0 - p) / trials as f64).sqrt()).collect();
    let hoeffding = gamma.iter().map(|&g| hoeffding_bound(c, t as f64, g, n)).collect();
    let bernstein = gamma
        .iter()
        .zip(&ranks)
        .map(|(&g, &r)| {
            let rp = (r - 1) as f64 / n as f64;
            bernstein_bound(c, t as f64, g, rp * (1.0 - rp), n)
        })
        .collect();
    Ok(DeviationReport { t, trials, c, gamma, frequency, half_width, hoeffding, bernstein })
}
