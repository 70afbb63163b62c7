use serde::{Deserialize, Serialize};

use super::saddle::{solve_saddle_dual, SaddlePoint};
use crate::consensus::{AsylState, SyncState};
use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::prox::{LocalObjective, PinballObjective};
use crate::values::NodeValues;

/// `V = |(y - y*) - rho M (x - x*)|^2` over the stacked (edge, endpoint)
/// representation. Needs tracked duals.
pub fn lyapunov(state: &SyncState, graph: &Graph, saddle: &SaddlePoint, rho: f64) -> Result<f64> {
    let duals = state.duals.as_ref().ok_or_else(|| Error::invalid("synchronous state does not track duals"))?;
    let mut v = 0.0;
    for k in 0..graph.n() {
        let xk = state.x.row(k)[0] - saddle.x_star;
        for inc in graph.incident(k) {
            let s = inc.slot();
            let q = (duals.y[s] - saddle.y_star[s]) - rho * xk;
            v += q * q;
        }
    }
    Ok(v)
}

/// `|r|` with `r_{e,k} = z_e - x_k`.
pub fn residual_norm(state: &SyncState, graph: &Graph) -> Result<f64> {
    let r = state.residual(graph).ok_or_else(|| Error::invalid("synchronous state does not track duals"))?;
    Ok(r.iter().map(|v| v * v).sum::<f64>().sqrt())
}

/// `|f(x) - f(x*)|` with `f(x) = sum_k f_k(x_k)`.
pub fn objective_gap<O: LocalObjective>(x: &NodeValues, objectives: &[O], x_star: &[f64]) -> f64 {
    let fx: f64 = objectives.iter().enumerate().map(|(k, o)| o.value(x.row(k))).sum();
    let fs: f64 = objectives.iter().map(|o| o.value(x_star)).sum();
    (fx - fs).abs()
}

/// `A(t) = |sum_k sum_{e in N_k} (1/d_k) mu_k^T z_e|` with `z_e` the current
/// edge averages. Logged only; nothing is asserted about it.
pub fn track_a(state: &AsylState, graph: &Graph) -> f64 {
    let dim = state.x.dim();
    let mut total = 0.0;
    for k in 0..graph.n() {
        let dk = graph.degree(k) as f64;
        let mu = state.mu_hat.row(k);
        for l in graph.neighbors(k) {
            for c in 0..dim {
                let ze = 0.5 * (state.x.row(k)[c] + state.x.row(l)[c]);
                total += mu[c] * ze / dk;
            }
        }
    }
    total.abs()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SyncTraceRow {
    pub round: u64,
    pub v: f64,
    pub r2: f64,
    pub gap: f64,
    /// `V^{t+1} - V^t + rho^2 |r^{t+1}|^2`; the theory says this is <= 0.
    pub slack: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SyncTrace {
    pub x_star: f64,
    pub v0: f64,
    pub rows: Vec<SyncTraceRow>,
}

impl SyncTrace {
    pub fn max_slack(&self) -> f64 {
        self.rows.iter().map(|r| r.slack).fold(f64::NEG_INFINITY, f64::max)
    }

    /// `rho^2 sum_t |r^{t+1}|^2`, bounded by `V^0`.
    pub fn residual_energy(&self, rho: f64) -> f64 {
        rho * rho * self.rows.iter().map(|r| r.r2).sum::<f64>()
    }

    pub fn last(&self) -> &SyncTraceRow {
        self.rows.last().expect("at least one round")
    }

    pub fn to_csv(&self) -> String {
        let mut s = String::from("round,v,r2,gap,slack\n");
        for r in &self.rows {
            s.push_str(&format!("{},{:e},{:e},{:e},{:e}\n", r.round, r.v, r.r2, r.gap, r.slack));
        }
        s
    }
}

/// Runs the instrumented synchronous variant for `rounds` rounds from the
/// anchors, recording the Lyapunov function, squared residual and objective
/// gap after each round.
pub fn sync_trace(graph: &Graph, objectives: &[PinballObjective], x_star: f64, rho: f64, rounds: u64) -> Result<SyncTrace> {
    let saddle = solve_saddle_dual(graph, objectives, x_star)?;
    let mut state = SyncState::new(graph, objectives, true);
    let mut v_prev = lyapunov(&state, graph, &saddle, rho)?;
    let v0 = v_prev;
    let mut rows = Vec::with_capacity(rounds as usize);
    for t in 1..=rounds {
        state.round(graph, objectives, rho)?;
        let v = lyapunov(&state, graph, &saddle, rho)?;
        let r = residual_norm(&state, graph)?;
        let gap = objective_gap(&state.x, objectives, &[x_star]);
        rows.push(SyncTraceRow { round: t, v, r2: r * r, gap, slack: v - v_prev + rho * rho * r * r });
        v_prev = v;
    }
    Ok(SyncTrace { x_star, v0, rows })
}
