use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::prox::PinballObjective;

/// Consensus optimum with antisymmetric edge duals whose node sums are
/// subgradients of the local losses at `x_star`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SaddlePoint {
    pub x_star: f64,
    /// Indexed by incidence slot.
    pub y_star: Vec<f64>,
    /// Required node sums `g_k`.
    pub node_sums: Vec<f64>,
}

const SLACK: f64 = 1e-9;

/// Routes the node slopes along a BFS spanning tree.
///
/// Non-anchor nodes need their exact slope at `x_star` (`+1` to the right of
/// the anchor, `-beta` to the left). Nodes sitting on `x_star` share the
/// balancing remainder, which must fall in their subdifferential
/// `[-beta, 1]`; otherwise `x_star` is not optimal.
pub fn solve_saddle_dual(graph: &Graph, objectives: &[PinballObjective], x_star: f64) -> Result<SaddlePoint> {
    let n = graph.n();
    if objectives.len() != n {
        return Err(Error::invalid("one objective per node"));
    }
    let mut g = vec![0.0; n];
    let mut anchored = Vec::new();
    for (k, o) in objectives.iter().enumerate() {
        if o.a() == x_star {
            anchored.push(k);
        } else {
            g[k] = if x_star > o.a() { 1.0 } else { -o.beta() };
        }
    }
    let rest: f64 = g.iter().sum();
    if anchored.is_empty() {
        if rest.abs() > SLACK {
            return Err(Error::Invariant(format!("x* = {x_star} is not stationary: slopes sum to {rest}")));
        }
    } else {
        let share = -rest / anchored.len() as f64;
        for &k in &anchored {
            let beta = objectives[k].beta();
            if share < -beta - SLACK || share > 1.0 + SLACK {
                return Err(Error::Invariant(format!(
                    "balancing slope {share} at node {k} outside [-{beta}, 1]; x* = {x_star} is not optimal"
                )));
            }
            g[k] = share;
        }
    }

    let (order, parent) = graph.bfs_tree(0);
    let mut y = vec![0.0; 2 * graph.num_edges()];
    // Flow already pushed into node k by its children.
    let mut inflow = vec![0.0; n];
    for &k in order.iter().rev() {
        if let Some((p, e)) = parent[k] {
            let (i, _) = graph.edge(e);
            let (sk, sp) = if i == k { (2 * e, 2 * e + 1) } else { (2 * e + 1, 2 * e) };
            let need = g[k] - inflow[k];
            y[sk] = need;
            y[sp] = -need;
            inflow[p] += -need;
        }
    }
    Ok(SaddlePoint { x_star, y_star: y, node_sums: g })
}

/// Largest deviation of the dual node sums from the required slopes.
pub fn node_sum_residual(graph: &Graph, saddle: &SaddlePoint) -> f64 {
    (0..graph.n())
        .map(|k| {
            let s: f64 = graph.incident(k).iter().map(|inc| saddle.y_star[inc.slot()]).sum();
            (s - saddle.node_sums[k]).abs()
        })
        .fold(0.0, f64::max)
}
