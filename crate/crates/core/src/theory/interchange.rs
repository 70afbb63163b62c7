use std::collections::HashMap;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{spectral_summary, EdgeDistribution, Graph};
use crate::linalg::symmetric_eigenvalues;

/// Largest node count whose permutation chain is built (7! = 5040 states).
pub const MAX_CHAIN_NODES: usize = 7;

/// Markov chain on arrangements of `n` labels: edge `e = (i, j)` fires with
/// probability `p_e` and swaps the labels at positions `i` and `j`.
#[derive(Debug, Clone)]
pub struct InterchangeChain {
    pub states: Vec<Vec<u8>>,
    pub transition: DMatrix<f64>,
}

fn permutations(n: usize) -> Vec<Vec<u8>> {
    let mut out: Vec<Vec<u8>> = vec![Vec::new()];
    for v in 0..n as u8 {
        out = out
            .into_iter()
            .flat_map(|p| {
                (0..=p.len()).map(move |pos| {
                    let mut q = p.clone();
                    q.insert(pos, v);
                    q
                })
            })
            .collect();
    }
    out.sort();
    out
}

pub fn build_interchange_chain(graph: &Graph, dist: &EdgeDistribution) -> Result<InterchangeChain> {
    let n = graph.n();
    if n > MAX_CHAIN_NODES {
        return Err(Error::StateSpaceTooLarge(n));
    }
    if dist.len() != graph.num_edges() {
        return Err(Error::invalid("edge distribution does not match graph"));
    }
    let states = permutations(n);
    let index: HashMap<&[u8], usize> = states.iter().enumerate().map(|(k, s)| (s.as_slice(), k)).collect();
    let mut p = DMatrix::zeros(states.len(), states.len());
    let mut next = vec![0u8; n];
    for (a, s) in states.iter().enumerate() {
        for (e, &(i, j)) in graph.edges().iter().enumerate() {
            next.copy_from_slice(s);
            next.swap(i, j);
            let b = index[next.as_slice()];
            p[(a, b)] += dist.probs()[e];
        }
    }
    Ok(InterchangeChain { states, transition: p })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GapCheck {
    pub gap_chain: f64,
    pub c: f64,
    pub agree: bool,
}

/// Compares `1 - lambda_2(P)` (second-largest signed eigenvalue) with the
/// smallest positive eigenvalue `c` of `L(P)`.
pub fn verify_gap_identity(graph: &Graph, dist: &EdgeDistribution) -> Result<GapCheck> {
    let chain = build_interchange_chain(graph, dist)?;
    let ev = symmetric_eigenvalues(&chain.transition)?;
    let lambda2 = if ev.len() >= 2 { ev[ev.len() - 2] } else { 1.0 };
    let gap_chain = 1.0 - lambda2;
    let c = spectral_summary(graph, dist)?.c;
    Ok(GapCheck { gap_chain, c, agree: (gap_chain - c).abs() <= 1e-10 })
}
