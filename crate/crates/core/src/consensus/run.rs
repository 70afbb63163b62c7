use serde::{Deserialize, Serialize};

use super::{AlgorithmKind, SolverState, DIVERGENCE_THRESHOLD};
use crate::error::{Error, Result};
use crate::graph::{EdgeDistribution, Graph};
use crate::prox::LocalObjective;
use crate::rng::{seeded, SimRng};

/// Where the error is recorded along a run. Checkpoint 0 (the initial state)
/// and the final budget are always included.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum EvalGrid {
    Every { step: u64 },
    Geometric { points: usize },
}

impl Default for EvalGrid {
    fn default() -> Self {
        EvalGrid::Geometric { points: 60 }
    }
}

impl EvalGrid {
    /// Strictly increasing activation counts from 0 to `budget`.
    pub fn checkpoints(&self, budget: u64) -> Vec<u64> {
        let mut out = vec![0];
        match *self {
            EvalGrid::Every { step } => {
                let step = step.max(1);
                let mut c = step;
                while c < budget {
                    out.push(c);
                    c += step;
                }
            }
            EvalGrid::Geometric { points } => {
                if budget > 1 && points > 1 {
                    let ratio = (budget as f64).ln() / (points - 1) as f64;
                    for k in 0..points {
                        let c = (ratio * k as f64).exp().round() as u64;
                        if c > *out.last().unwrap() && c < budget {
                            out.push(c);
                        }
                    }
                }
            }
        }
        if budget > 0 {
            out.push(budget);
        }
        out
    }
}

/// What to do once an iterate exceeds [`DIVERGENCE_THRESHOLD`] or turns
/// non-finite.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DivergencePolicy {
    /// Freeze the state; remaining checkpoints repeat the last error.
    #[default]
    Abort,
    /// Keep stepping; errors may become infinite.
    Continue,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    pub budget: u64,
    pub grid: EvalGrid,
    pub rho: f64,
    pub divergence: DivergencePolicy,
}

impl RunConfig {
    pub fn new(budget: u64, rho: f64) -> Self {
        Self { budget, grid: EvalGrid::default(), rho, divergence: DivergencePolicy::Abort }
    }

    pub fn with_grid(mut self, grid: EvalGrid) -> Self {
        self.grid = grid;
        self
    }
}

/// Mean distance to the target at each checkpoint of one run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Trace {
    pub algorithm: AlgorithmKind,
    pub checkpoints: Vec<u64>,
    pub mae: Vec<f64>,
    pub diverged_at: Option<u64>,
}

impl Trace {
    pub fn diverged(&self) -> bool {
        self.diverged_at.is_some()
    }

    pub fn initial(&self) -> f64 {
        self.mae[0]
    }

    pub fn last(&self) -> f64 {
        *self.mae.last().expect("at least one checkpoint")
    }
}

/// Runs `kind` from its initial state with an edge stream seeded by `seed`.
pub fn run<O: LocalObjective>(
    kind: AlgorithmKind,
    graph: &Graph,
    dist: &EdgeDistribution,
    objectives: &[O],
    truth: &[f64],
    cfg: &RunConfig,
    seed: u64,
) -> Result<Trace> {
    run_with_rng(kind, graph, dist, objectives, truth, cfg, &mut seeded(seed)).map(|(t, _)| t)
}

/// Like [`run`], drawing edges from a caller-owned stream and also returning
/// the final state.
///
/// Asynchronous algorithms advance one activation per edge draw. The
/// synchronous variant counts one round as `|E|` activations: checkpoint `c`
/// shows its state after `floor(c / |E|)` rounds, and it consumes no edge
/// draws.
pub fn run_with_rng<O: LocalObjective>(
    kind: AlgorithmKind,
    graph: &Graph,
    dist: &EdgeDistribution,
    objectives: &[O],
    truth: &[f64],
    cfg: &RunConfig,
    rng: &mut SimRng,
) -> Result<(Trace, SolverState)> {
    if !(cfg.rho > 0.0 && cfg.rho.is_finite()) {
        return Err(Error::invalid(format!("step size {} must be positive", cfg.rho)));
    }
    if dist.len() != graph.num_edges() {
        return Err(Error::invalid("edge distribution does not match graph"));
    }
    if objectives.len() != graph.n() || objectives.iter().any(|o| o.dim() != truth.len()) {
        return Err(Error::invalid("objectives, graph and target disagree in size"));
    }
    let sampler = dist.sampler();
    let mut state = SolverState::new(kind, graph, objectives);
    let checkpoints = cfg.grid.checkpoints(cfg.budget);
    let mut mae = Vec::with_capacity(checkpoints.len());
    let mut diverged_at = None;
    let m = graph.num_edges() as u64;
    let mut done = 0u64;

    for &c in &checkpoints {
        if diverged_at.is_none() || cfg.divergence == DivergencePolicy::Continue {
            if kind.is_synchronous() {
                let target_rounds = c / m;
                while done < target_rounds {
                    state.activate(graph, objectives, 0, cfg.rho);
                    done += 1;
                    if diverged_at.is_none() && !within_bounds(state.estimates().as_flat()) {
                        diverged_at = Some(done * m);
                        if cfg.divergence == DivergencePolicy::Abort {
                            break;
                        }
                    }
                }
            } else {
                while done < c {
                    let e = sampler.sample(rng);
                    state.activate(graph, objectives, e, cfg.rho);
                    done += 1;
                    if diverged_at.is_none() {
                        let (i, j) = graph.edge(e);
                        let est = state.estimates();
                        let touched_ok = within_bounds(est.row(i)) && within_bounds(est.row(j));
                        // Subgradient moves every node, so check all of them.
                        let ok = if kind == AlgorithmKind::Subgradient { within_bounds(est.as_flat()) } else { touched_ok };
                        if !ok {
                            diverged_at = Some(done);
                            if cfg.divergence == DivergencePolicy::Abort {
                                break;
                            }
                        }
                    }
                }
            }
        }
        mae.push(state.estimates().mean_distance_to(truth));
    }
    Ok((Trace { algorithm: kind, checkpoints, mae, diverged_at }, state))
}

fn within_bounds(v: &[f64]) -> bool {
    v.iter().all(|x| x.abs() <= DIVERGENCE_THRESHOLD)
}
