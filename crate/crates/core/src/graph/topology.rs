use rand::Rng;
use serde::{Deserialize, Serialize};

use super::Graph;
use crate::error::{Error, Result};
use crate::rng::{seeded, SimRng};

/// Number of fresh draws tried before giving up on a connected random graph.
pub const GEOMETRIC_RETRY_CAP: usize = 100;

/// Test topologies.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Topology {
    Cycle,
    Complete,
    Path,
    Star,
    /// Random geometric graph on the unit square. Exactly one of `radius` or
    /// `target_edges` should be set; with `target_edges` the radius is chosen
    /// per draw so that exactly that many pairs are connected.
    Geometric {
        #[serde(default)]
        radius: Option<f64>,
        #[serde(default)]
        target_edges: Option<usize>,
    },
    WattsStrogatz {
        #[serde(default = "default_ring_degree")]
        k: usize,
        #[serde(default = "default_rewire")]
        p: f64,
    },
}

fn default_ring_degree() -> usize {
    4
}

// Mean connectivity at n = 101, k = 4 is about 2.28e-3 at this value.
fn default_rewire() -> f64 {
    0.43
}

impl Topology {
    pub fn geometric_radius(radius: f64) -> Self {
        Topology::Geometric { radius: Some(radius), target_edges: None }
    }

    pub fn geometric_edges(target_edges: usize) -> Self {
        Topology::Geometric { radius: None, target_edges: Some(target_edges) }
    }

    pub fn watts_strogatz() -> Self {
        Topology::WattsStrogatz { k: default_ring_degree(), p: default_rewire() }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Topology::Cycle => "cycle",
            Topology::Complete => "complete",
            Topology::Path => "path",
            Topology::Star => "star",
            Topology::Geometric { .. } => "geometric",
            Topology::WattsStrogatz { .. } => "watts_strogatz",
        }
    }
}

/// Builds a connected graph of the requested kind.
pub fn build_topology(kind: &Topology, n: usize, seed: u64) -> Result<Graph> {
    build_topology_with(kind, n, &mut seeded(seed))
}

pub fn build_topology_with(kind: &Topology, n: usize, rng: &mut SimRng) -> Result<Graph> {
    if n < 3 {
        return Err(Error::invalid(format!("topologies need n >= 3, got {n}")));
    }
    match *kind {
        Topology::Cycle => Graph::cycle(n),
        Topology::Complete => Graph::complete(n),
        Topology::Path => Graph::path(n),
        Topology::Star => Graph::star(n),
        Topology::Geometric { radius, target_edges } => geometric(n, radius, target_edges, rng),
        Topology::WattsStrogatz { k, p } => watts_strogatz(n, k, p, rng),
    }
}

fn geometric(n: usize, radius: Option<f64>, target_edges: Option<usize>, rng: &mut SimRng) -> Result<Graph> {
    let max_pairs = n * (n - 1) / 2;
    match (radius, target_edges) {
        (Some(r), None) if r > 0.0 && r < std::f64::consts::SQRT_2 => {}
        (None, Some(m)) if m >= n - 1 && m <= max_pairs => {}
        _ => {
            return Err(Error::invalid(
                "geometric graph needs either a radius in (0, sqrt 2) or a target edge count in [n-1, n(n-1)/2]",
            ))
        }
    }
    for _ in 0..GEOMETRIC_RETRY_CAP {
        let pos: Vec<[f64; 2]> = (0..n).map(|_| [rng.random::<f64>(), rng.random::<f64>()]).collect();
        let mut pairs = Vec::with_capacity(max_pairs);
        for i in 0..n {
            for j in i + 1..n {
                let (dx, dy) = (pos[i][0] - pos[j][0], pos[i][1] - pos[j][1]);
                pairs.push(((dx * dx + dy * dy).sqrt(), i, j));
            }
        }
        let r = match (radius, target_edges) {
            (Some(r), _) => r,
            (None, Some(m)) => {
                pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
                if m == max_pairs {
                    pairs[m - 1].0
                } else if pairs[m - 1].0 == pairs[m].0 {
                    continue;
                } else {
                    0.5 * (pairs[m - 1].0 + pairs[m].0)
                }
            }
            _ => unreachable!(),
        };
        let edges: Vec<_> = pairs.iter().filter(|p| p.0 <= r).map(|p| (p.1, p.2)).collect();
        let g = Graph::from_edges_unchecked(n, &edges)?;
        if g.is_connected() {
            return Ok(g.with_positions(pos));
        }
    }
    Err(Error::RetryCapExceeded { kind: "geometric", attempts: GEOMETRIC_RETRY_CAP })
}

/// Radius that realised a geometric graph: the longest edge, for reporting.
pub fn realised_radius(g: &Graph) -> Option<f64> {
    let pos = g.positions()?;
    g.edges()
        .iter()
        .map(|&(i, j)| ((pos[i][0] - pos[j][0]).powi(2) + (pos[i][1] - pos[j][1]).powi(2)).sqrt())
        .max_by(f64::total_cmp)
}

fn watts_strogatz(n: usize, k: usize, p: f64, rng: &mut SimRng) -> Result<Graph> {
    if k < 2 || !k.is_multiple_of(2) || k >= n {
        return Err(Error::invalid(format!("Watts-Strogatz ring degree must be even, >= 2 and < n (got {k})")));
    }
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::invalid(format!("rewiring probability {p} outside [0, 1]")));
    }
    for _ in 0..GEOMETRIC_RETRY_CAP {
        let mut adj = vec![std::collections::BTreeSet::new(); n];
        for i in 0..n {
            for s in 1..=k / 2 {
                let j = (i + s) % n;
                adj[i].insert(j);
                adj[j].insert(i);
            }
        }
        // Rewire the far end of each lattice edge (i, i+s) with probability p,
        // skipping choices that would create a self-loop or a duplicate.
        for s in 1..=k / 2 {
            for i in 0..n {
                let j = (i + s) % n;
                if !adj[i].contains(&j) || rng.random::<f64>() >= p {
                    continue;
                }
                if adj[i].len() >= n - 1 {
                    continue;
                }
                let mut t = rng.random_range(0..n);
                while t == i || adj[i].contains(&t) {
                    t = rng.random_range(0..n);
                }
                adj[i].remove(&j);
                adj[j].remove(&i);
                adj[i].insert(t);
                adj[t].insert(i);
            }
        }
        let edges: Vec<_> = adj
            .iter()
            .enumerate()
            .flat_map(|(i, nb)| nb.iter().filter(move |&&j| j > i).map(move |&j| (i, j)))
            .collect();
        let g = Graph::from_edges_unchecked(n, &edges)?;
        if g.is_connected() {
            return Ok(g);
        }
    }
    Err(Error::RetryCapExceeded { kind: "watts_strogatz", attempts: GEOMETRIC_RETRY_CAP })
}
