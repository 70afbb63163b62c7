//! Observation generators.

use rand::seq::SliceRandom;
use rand::Rng;
use rand_distr::{Cauchy, Distribution, Normal};

use super::config::DataSpec;
use crate::error::{Error, Result};
use crate::ranktrim::true_ranks;
use crate::values::NodeValues;

/// `n` observations with the contaminated ones first. Scalar data is redrawn
/// until all values are distinct.
pub fn generate_raw<R: Rng + ?Sized>(spec: &DataSpec, n: usize, rng: &mut R) -> Result<NodeValues> {
    match *spec {
        DataSpec::ContaminatedGaussian { mean, std, outlier_mean, outlier_std, contamination } => {
            let clean = Normal::new(mean, std).map_err(|e| Error::invalid(e.to_string()))?;
            let bad = Normal::new(outlier_mean, outlier_std).map_err(|e| Error::invalid(e.to_string()))?;
            let n_bad = contaminated_count(contamination, n);
            distinct(|rng| (0..n).map(|k| if k < n_bad { bad.sample(rng) } else { clean.sample(rng) }).collect(), rng)
        }
        DataSpec::Cauchy { location, scale } => {
            let c = Cauchy::new(location, scale).map_err(|e| Error::invalid(e.to_string()))?;
            distinct(|rng| (0..n).map(|_| c.sample(rng)).collect(), rng)
        }
        DataSpec::ContaminatedGaussian2d { mean, cov, contamination, arc_radius, arc_start, arc_end } => {
            // Cholesky factor of the 2x2 covariance.
            let l11 = cov[0][0].sqrt();
            let l21 = cov[1][0] / l11;
            let l22 = (cov[1][1] - l21 * l21).sqrt();
            if !(l11 > 0.0 && l22 > 0.0) {
                return Err(Error::invalid("covariance must be positive definite"));
            }
            let std = Normal::new(0.0, 1.0).expect("unit normal");
            let n_bad = contaminated_count(contamination, n);
            let mut flat = Vec::with_capacity(2 * n);
            for k in 0..n {
                if k < n_bad {
                    let theta = rng.random_range(arc_start..=arc_end);
                    flat.push(mean[0] + arc_radius * theta.cos());
                    flat.push(mean[1] + arc_radius * theta.sin());
                } else {
                    let (u, v): (f64, f64) = (std.sample(rng), std.sample(rng));
                    flat.push(mean[0] + l11 * u);
                    flat.push(mean[1] + l21 * u + l22 * v);
                }
            }
            Ok(NodeValues::from_flat(2, flat))
        }
    }
}

/// Exactly `floor(eps n)` contaminated points.
pub fn contaminated_count(eps: f64, n: usize) -> usize {
    (eps * n as f64 + 1e-9).floor() as usize
}

fn distinct<R: Rng + ?Sized>(mut draw: impl FnMut(&mut R) -> Vec<f64>, rng: &mut R) -> Result<NodeValues> {
    for _ in 0..100 {
        let v = draw(rng);
        if true_ranks(&v).is_ok() {
            return Ok(NodeValues::from_scalars(&v));
        }
    }
    Err(Error::invalid("could not draw tie-free data"))
}

/// Generates observations and assigns them to nodes in a random order.
pub fn generate_data<R: Rng + ?Sized, S: Rng + ?Sized>(spec: &DataSpec, n: usize, data_rng: &mut R, shuffle_rng: &mut S) -> Result<NodeValues> {
    let raw = generate_raw(spec, n, data_rng)?;
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(shuffle_rng);
    let rows: Vec<Vec<f64>> = order.iter().map(|&k| raw.row(k).to_vec()).collect();
    Ok(NodeValues::from_rows(&rows))
}
