//! Decentralised robust linear regression by gradient trimming.
//!
//! Every node holds one `(x_k, y_k)` pair and a parameter copy `theta_k` for
//! the model `y = theta^T (x, 1)`. Nodes whose score `d_k = -|x_k| |y_k|`
//! falls in the bottom `m = floor(alpha n)` are meant to be excluded from the
//! gradient steps; the rank and quantile rules estimate that set by gossip
//! while the optimisation runs.

use nalgebra::{DMatrix, DVector};
use rand::Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use crate::consensus::{AsylState, DIVERGENCE_THRESHOLD};
use crate::error::{Error, Result};
use crate::graph::{EdgeSampler, Graph};
use crate::prox::PinballObjective;
use crate::ranktrim::{true_ranks, GoRankState};
use crate::values::NodeValues;

/// Data, ground truth and the contamination mask (the mask is used only by
/// oracles).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RegressionProblem {
    pub x: NodeValues,
    pub y: Vec<f64>,
    pub contaminated: Vec<bool>,
    pub theta_true: Vec<f64>,
}

impl RegressionProblem {
    pub fn new(x: NodeValues, y: Vec<f64>, contaminated: Vec<bool>, theta_true: Vec<f64>) -> Result<Self> {
        if x.len() != y.len() || y.len() != contaminated.len() || theta_true.len() != x.dim() + 1 {
            return Err(Error::invalid("regression arrays disagree in size"));
        }
        let p = Self { x, y, contaminated, theta_true };
        true_ranks(&p.scores())?;
        Ok(p)
    }

    pub fn n(&self) -> usize {
        self.y.len()
    }

    /// Parameter dimension: features plus intercept.
    pub fn dim(&self) -> usize {
        self.x.dim() + 1
    }

    /// `d_k = -|x_k| |y_k|`.
    pub fn scores(&self) -> Vec<f64> {
        (0..self.n()).map(|k| -crate::values::norm(self.x.row(k)) * self.y[k].abs()).collect()
    }

    /// `(x_k, 1)`.
    pub fn features(&self, k: usize) -> Vec<f64> {
        let mut f = self.x.row(k).to_vec();
        f.push(1.0);
        f
    }

    /// Least-squares gradient `phi_k (phi_k^T theta - y_k)`.
    pub fn gradient_into(&self, k: usize, theta: &[f64], out: &mut [f64]) {
        let xk = self.x.row(k);
        let d = xk.len();
        let pred: f64 = xk.iter().zip(theta).map(|(a, b)| a * b).sum::<f64>() + theta[d];
        let resid = pred - self.y[k];
        for c in 0..d {
            out[c] = xk[c] * resid;
        }
        out[d] = resid;
    }

    /// Oracle trimming mask: `true` for the `m` nodes with the lowest scores.
    pub fn lowest_scores(&self, m: usize) -> Vec<bool> {
        let ranks = true_ranks(&self.scores()).expect("scores checked at construction");
        ranks.into_iter().map(|r| r <= m).collect()
    }
}

/// Generator: clean points `x ~ N(0, 1)` per feature, `y = theta*^T (x, 1) +
/// N(0, noise^2)`; exactly `floor(eps n)` points replaced by large Gaussian
/// `x` and `y`, far from the line.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct RegressionSpec {
    pub n: usize,
    pub features: usize,
    pub contamination: f64,
    pub noise: f64,
    pub outlier_x_scale: f64,
    pub outlier_y_scale: f64,
    pub outlier_y_shift: f64,
    pub theta_scale: f64,
}

impl Default for RegressionSpec {
    fn default() -> Self {
        Self { n: 101, features: 1, contamination: 0.1, noise: 0.5, outlier_x_scale: 10.0, outlier_y_scale: 10.0, outlier_y_shift: 50.0, theta_scale: 2.0 }
    }
}

impl RegressionSpec {
    pub fn generate<R: Rng + ?Sized>(&self, rng: &mut R) -> Result<RegressionProblem> {
        if self.n < 3 || self.features == 0 || self.features > 3 || !(0.0..1.0).contains(&self.contamination) {
            return Err(Error::invalid("regression generator settings out of range"));
        }
        let std = Normal::new(0.0, 1.0).expect("unit normal");
        let theta_true: Vec<f64> = (0..=self.features).map(|_| self.theta_scale * (2.0 * rng.random::<f64>() - 1.0)).collect();
        let n_bad = (self.contamination * self.n as f64).floor() as usize;
        loop {
            let mut xs = Vec::with_capacity(self.n * self.features);
            let mut ys = Vec::with_capacity(self.n);
            let mut mask = vec![false; self.n];
            for k in 0..self.n {
                let bad = k < n_bad;
                let row: Vec<f64> = (0..self.features)
                    .map(|_| std.sample(rng) * if bad { self.outlier_x_scale } else { 1.0 })
                    .collect();
                let y = if bad {
                    self.outlier_y_shift + self.outlier_y_scale * std.sample(rng)
                } else {
                    row.iter().zip(&theta_true).map(|(a, b)| a * b).sum::<f64>() + theta_true[self.features] + self.noise * std.sample(rng)
                };
                xs.extend_from_slice(&row);
                ys.push(y);
                mask[k] = bad;
            }
            match RegressionProblem::new(NodeValues::from_flat(self.features, xs), ys, mask, theta_true.clone()) {
                Ok(p) => return Ok(p),
                Err(Error::Ties(..)) => continue,
                Err(e) => return Err(e),
            }
        }
    }
}

/// Least squares on the rows where `keep` is true.
pub fn least_squares(problem: &RegressionProblem, keep: &[bool]) -> Result<Vec<f64>> {
    let w: Vec<f64> = keep.iter().map(|&k| if k { 1.0 } else { 0.0 }).collect();
    weighted_least_squares(problem, &w)
}

fn weighted_least_squares(problem: &RegressionProblem, w: &[f64]) -> Result<Vec<f64>> {
    let d = problem.dim();
    let mut ata = DMatrix::<f64>::zeros(d, d);
    let mut atb = DVector::<f64>::zeros(d);
    for k in 0..problem.n() {
        if w[k] == 0.0 {
            continue;
        }
        let f = problem.features(k);
        for a in 0..d {
            atb[a] += w[k] * f[a] * problem.y[k];
            for b in 0..d {
                ata[(a, b)] += w[k] * f[a] * f[b];
            }
        }
    }
    let sol = ata.cholesky().ok_or(Error::Singular)?.solve(&atb);
    Ok(sol.iter().copied().collect())
}

/// Huber regression by iteratively reweighted least squares, threshold
/// `1.345 * sigma` with `sigma = MAD / 0.6745` of the current residuals.
pub fn huber(problem: &RegressionProblem, max_iter: usize) -> Result<Vec<f64>> {
    let n = problem.n();
    let mut theta = least_squares(problem, &vec![true; n])?;
    for _ in 0..max_iter {
        let resid: Vec<f64> = (0..n)
            .map(|k| {
                let f = problem.features(k);
                problem.y[k] - f.iter().zip(&theta).map(|(a, b)| a * b).sum::<f64>()
            })
            .collect();
        let mut abs: Vec<f64> = resid.iter().map(|r| r.abs()).collect();
        abs.sort_by(f64::total_cmp);
        let mad = abs[n / 2];
        let sigma = (mad / 0.6745).max(1e-12);
        let thr = 1.345 * sigma;
        let w: Vec<f64> = resid.iter().map(|r| if r.abs() <= thr { 1.0 } else { thr / r.abs() }).collect();
        let next = weighted_least_squares(problem, &w)?;
        let change: f64 = next.iter().zip(&theta).map(|(a, b)| (a - b).abs()).sum();
        theta = next;
        if change < 1e-12 {
            break;
        }
    }
    Ok(theta)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Baselines {
    pub oracle_regression: Vec<f64>,
    pub oracle_trimming: Vec<f64>,
    pub corrupted: Vec<f64>,
    pub huber: Vec<f64>,
}

pub fn oracle_baselines(problem: &RegressionProblem, alpha: f64) -> Result<Baselines> {
    let n = problem.n();
    let m = (alpha * n as f64).floor() as usize;
    let clean: Vec<bool> = problem.contaminated.iter().map(|&c| !c).collect();
    let trimmed: Vec<bool> = problem.lowest_scores(m).into_iter().map(|low| !low).collect();
    Ok(Baselines {
        oracle_regression: least_squares(problem, &clean)?,
        oracle_trimming: least_squares(problem, &trimmed)?,
        corrupted: least_squares(problem, &vec![true; n])?,
        huber: huber(problem, 200)?,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TrimMode {
    /// Rule and optimisation run together with the uncertainty correction.
    Simultaneous,
    /// The rule runs alone for a fixed number of activations; the weights are
    /// then frozen and the optimisation starts.
    Sequential { estimation_steps: u64 },
}

/// Inclusion rule parameters. `kappa` scales the correction `kappa /
/// sqrt(c_k)`; `burn_in` withholds gradients until `c_k > burn_in`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "rule", rename_all = "snake_case")]
pub enum RuleSpec {
    Rank { kappa: f64 },
    Quantile { kappa: f64, burn_in: f64, rho: f64 },
    /// Fixed weights from the score oracle.
    Oracle,
}

impl RuleSpec {
    /// Rank rule with `kappa = 4 n / p`.
    pub fn rank_with_p(n: usize, p: f64) -> Self {
        RuleSpec::Rank { kappa: 4.0 * n as f64 / p }
    }

    /// Quantile rule with burn-in `4 n / p` and no additive correction.
    pub fn quantile_with_p(n: usize, p: f64, rho: f64) -> Self {
        RuleSpec::Quantile { kappa: 0.0, burn_in: 4.0 * n as f64 / p, rho }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
enum RuleState {
    Rank { gorank: GoRankState, kappa: f64 },
    Quantile { asyl: AsylState, objectives: Vec<PinballObjective>, kappa: f64, burn_in: f64, rho: f64 },
    Oracle { b: Vec<bool> },
}

/// Trimmed decentralised gradient descent.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrimmedGdState {
    pub theta: NodeValues,
    /// Rule updates made by each node.
    pub updates: Vec<u64>,
    pub steps: u64,
    m: usize,
    scores: Vec<f64>,
    rule: RuleState,
    mode: TrimMode,
    frozen: Option<Vec<bool>>,
}

impl TrimmedGdState {
    pub fn new(problem: &RegressionProblem, alpha: f64, rule: RuleSpec, mode: TrimMode) -> Result<Self> {
        let n = problem.n();
        let m = (alpha * n as f64).floor() as usize;
        let scores = problem.scores();
        let rule = match rule {
            RuleSpec::Rank { kappa } => RuleState::Rank { gorank: GoRankState::new(&scores)?, kappa },
            RuleSpec::Quantile { kappa, burn_in, rho } => {
                let objectives = scores.iter().map(|&d| PinballObjective::new(d, alpha)).collect::<Result<Vec<_>>>()?;
                RuleState::Quantile { asyl: AsylState::new(&objectives), objectives, kappa, burn_in, rho }
            }
            RuleSpec::Oracle => RuleState::Oracle { b: problem.lowest_scores(m).into_iter().map(|low| !low).collect() },
        };
        Ok(Self {
            theta: NodeValues::zeros(n, problem.dim()),
            updates: vec![0; n],
            steps: 0,
            m,
            scores,
            rule,
            mode,
            frozen: None,
        })
    }

    fn correction(kappa: f64, c: u64) -> f64 {
        if kappa == 0.0 {
            0.0
        } else if c == 0 {
            f64::INFINITY
        } else {
            kappa / (c as f64).sqrt()
        }
    }

    /// Current inclusion decision `b_k`, with or without the correction.
    fn include(&self, k: usize, corrected: bool) -> bool {
        let c = self.updates[k];
        match &self.rule {
            RuleState::Rank { gorank, kappa } => {
                let delta = if corrected { Self::correction(*kappa, c) } else { 0.0 };
                gorank.rank(k) > self.m as f64 + delta
            }
            RuleState::Quantile { asyl, kappa, burn_in, .. } => {
                if corrected && (c as f64) <= *burn_in {
                    return false;
                }
                let delta = if corrected { Self::correction(*kappa, c) } else { 0.0 };
                self.scores[k] > asyl.x.row(k)[0] + delta
            }
            RuleState::Oracle { b } => b[k],
        }
    }

    pub fn inclusions(&self) -> Vec<bool> {
        match &self.frozen {
            Some(b) => b.clone(),
            None => (0..self.updates.len()).map(|k| self.include(k, true)).collect(),
        }
    }

    fn advance_rule(&mut self, graph: &Graph, e: usize) {
        let (i, j) = graph.edge(e);
        match &mut self.rule {
            RuleState::Rank { gorank, .. } => gorank.step_async(i, j),
            RuleState::Quantile { asyl, objectives, rho, .. } => asyl.step(graph, objectives, e, *rho),
            RuleState::Oracle { .. } => {}
        }
        self.updates[i] += 1;
        self.updates[j] += 1;
    }

    /// One iteration on edge `e`: the rule advances on `e`, every included
    /// node takes a gradient step, and `e`'s endpoints average `theta`.
    /// Returns `false` once any parameter leaves the divergence bound.
    pub fn step(&mut self, problem: &RegressionProblem, graph: &Graph, e: usize, rho: f64) -> bool {
        self.steps += 1;
        if let TrimMode::Sequential { estimation_steps } = self.mode {
            if self.frozen.is_none() {
                self.advance_rule(graph, e);
                if self.steps >= estimation_steps {
                    self.frozen = Some((0..self.updates.len()).map(|k| self.include(k, false)).collect());
                }
                return true;
            }
        } else {
            self.advance_rule(graph, e);
        }
        let b = self.inclusions();
        let mut g = vec![0.0; problem.dim()];
        let mut ok = true;
        for k in 0..problem.n() {
            if !b[k] {
                continue;
            }
            problem.gradient_into(k, self.theta.row(k), &mut g);
            for (t, gc) in self.theta.row_mut(k).iter_mut().zip(&g) {
                *t -= rho * gc;
                ok &= t.abs() <= DIVERGENCE_THRESHOLD;
            }
        }
        let (i, j) = graph.edge(e);
        let (a, bb) = self.theta.pair_mut(i, j);
        for (p, q) in a.iter_mut().zip(bb.iter_mut()) {
            let m = 0.5 * (*p + *q);
            *p = m;
            *q = m;
        }
        ok
    }

    /// Mean over nodes of `|theta_k - reference|`.
    pub fn error_to(&self, reference: &[f64]) -> f64 {
        self.theta.mean_distance_to(reference)
    }
}

/// Error trace of one trimmed-GD run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RegressionTrace {
    pub checkpoints: Vec<u64>,
    pub error: Vec<f64>,
    pub diverged_at: Option<u64>,
}

/// Runs trimmed GD for the given checkpoints (strictly increasing, starting
/// at 0), measuring the error to `reference`. Aborts at divergence, repeating
/// the last error.
pub fn run_trimmed_gd<R: Rng + ?Sized>(
    problem: &RegressionProblem,
    graph: &Graph,
    sampler: &EdgeSampler,
    state: &mut TrimmedGdState,
    rho: f64,
    checkpoints: &[u64],
    reference: &[f64],
    rng: &mut R,
) -> RegressionTrace {
    let mut error = Vec::with_capacity(checkpoints.len());
    let mut diverged_at = None;
    let mut done = 0u64;
    for &c in checkpoints {
        while diverged_at.is_none() && done < c {
            let e = sampler.sample(rng);
            done += 1;
            if !state.step(problem, graph, e, rho) {
                diverged_at = Some(done);
            }
        }
        error.push(state.error_to(reference));
    }
    RegressionTrace { checkpoints: checkpoints.to_vec(), error, diverged_at }
}
