use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use super::{EdgeDistribution, Graph};
use crate::error::{Error, Result};
use crate::linalg::symmetric_eigenvalues;

/// Spectral quantities of a graph under an edge distribution.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpectralSummary {
    /// Second-smallest eigenvalue of the unweighted Laplacian.
    pub lambda2: f64,
    /// Smallest positive eigenvalue of `L(P) = sum_e p_e L_e`.
    pub c: f64,
    /// `lambda2 / |E|`.
    pub connectivity: f64,
}

/// `sum_e w_e (e_i - e_j)(e_i - e_j)^T`.
fn laplacian_with(g: &Graph, weight: impl Fn(usize) -> f64) -> DMatrix<f64> {
    let mut l = DMatrix::zeros(g.n(), g.n());
    for (e, &(i, j)) in g.edges().iter().enumerate() {
        let w = weight(e);
        l[(i, i)] += w;
        l[(j, j)] += w;
        l[(i, j)] -= w;
        l[(j, i)] -= w;
    }
    l
}

pub fn unweighted_laplacian(g: &Graph) -> DMatrix<f64> {
    laplacian_with(g, |_| 1.0)
}

pub fn weighted_laplacian(g: &Graph, dist: &EdgeDistribution) -> DMatrix<f64> {
    assert_eq!(dist.len(), g.num_edges(), "distribution size does not match edge count");
    laplacian_with(g, |e| dist.probs()[e])
}

pub fn spectral_summary(g: &Graph, dist: &EdgeDistribution) -> Result<SpectralSummary> {
    if g.n() < 2 {
        return Err(Error::InvalidGraph("spectral summary needs n >= 2".into()));
    }
    if !g.is_connected() {
        return Err(Error::Disconnected);
    }
    let lambda2 = symmetric_eigenvalues(&unweighted_laplacian(g))?[1];
    let c = symmetric_eigenvalues(&weighted_laplacian(g, dist))?[1];
    Ok(SpectralSummary { lambda2, c, connectivity: lambda2 / g.num_edges() as f64 })
}
