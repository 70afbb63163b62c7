//! Local convex objectives, exposed only through value and proximal queries.
//!
//! Every consensus algorithm is generic over [`LocalObjective`]; the scalar
//! pinball loss and the vector Euclidean distance are the two instances.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::values::norm;

/// A node's private convex loss.
pub trait LocalObjective {
    fn dim(&self) -> usize;

    /// The observation the loss is centred on.
    fn anchor(&self) -> &[f64];

    fn value(&self, x: &[f64]) -> f64;

    /// `argmin_w f(w) + |w - z|^2 / (2 gamma)`, written into `out`.
    fn prox_into(&self, z: &[f64], gamma: f64, out: &mut [f64]);

    /// One element of the subdifferential at `x`. At a kink the midpoint of
    /// the subdifferential is returned.
    fn subgradient_into(&self, x: &[f64], out: &mut [f64]);

    fn prox(&self, z: &[f64], gamma: f64) -> Vec<f64> {
        let mut out = vec![0.0; self.dim()];
        self.prox_into(z, gamma, &mut out);
        out
    }
}

/// `f(x) = L_alpha(a - x) / (1 - alpha)` with `L_alpha(u) = (alpha - 1{u <= 0}) u`.
///
/// Slopes are `-beta` left of the anchor and `+1` right of it, where
/// `beta = alpha / (1 - alpha)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PinballObjective {
    a: [f64; 1],
    alpha: f64,
    beta: f64,
}

impl PinballObjective {
    pub fn new(a: f64, alpha: f64) -> Result<Self> {
        if !(alpha > 0.0 && alpha < 1.0) {
            return Err(Error::invalid(format!("quantile level {alpha} outside (0, 1)")));
        }
        if !a.is_finite() {
            return Err(Error::invalid("anchor must be finite"));
        }
        Ok(Self { a: [a], alpha, beta: alpha / (1.0 - alpha) })
    }

    pub fn a(&self) -> f64 {
        self.a[0]
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    pub fn set_anchor(&mut self, a: f64) {
        self.a[0] = a;
    }

    pub fn value_at(&self, x: f64) -> f64 {
        pinball_loss(self.alpha, self.a[0] - x) / (1.0 - self.alpha)
    }

    pub fn prox_scalar(&self, z: f64, gamma: f64) -> f64 {
        let a = self.a[0];
        let shift = gamma * self.beta;
        if z < a - shift {
            z + shift
        } else if z > a + gamma {
            z - gamma
        } else {
            a
        }
    }

    pub fn subgradient_at(&self, x: f64) -> f64 {
        let a = self.a[0];
        if x > a {
            1.0
        } else if x < a {
            -self.beta
        } else {
            0.5 * (1.0 - self.beta)
        }
    }
}

/// The pinball (check) loss `(alpha - 1{u <= 0}) u`.
pub fn pinball_loss(alpha: f64, u: f64) -> f64 {
    let ind = if u <= 0.0 { 1.0 } else { 0.0 };
    (alpha - ind) * u
}

impl LocalObjective for PinballObjective {
    fn dim(&self) -> usize {
        1
    }

    fn anchor(&self) -> &[f64] {
        &self.a
    }

    fn value(&self, x: &[f64]) -> f64 {
        self.value_at(x[0])
    }

    fn prox_into(&self, z: &[f64], gamma: f64, out: &mut [f64]) {
        out[0] = self.prox_scalar(z[0], gamma);
    }

    fn subgradient_into(&self, x: &[f64], out: &mut [f64]) {
        out[0] = self.subgradient_at(x[0]);
    }
}

/// `f(x) = |x - a|_2`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EuclideanDistanceObjective {
    a: Vec<f64>,
}

impl EuclideanDistanceObjective {
    pub fn new(a: Vec<f64>) -> Result<Self> {
        if a.is_empty() || a.iter().any(|v| !v.is_finite()) {
            return Err(Error::invalid("anchor must be a non-empty finite vector"));
        }
        Ok(Self { a })
    }

    pub fn set_anchor(&mut self, a: &[f64]) {
        self.a.copy_from_slice(a);
    }
}

impl LocalObjective for EuclideanDistanceObjective {
    fn dim(&self) -> usize {
        self.a.len()
    }

    fn anchor(&self) -> &[f64] {
        &self.a
    }

    fn value(&self, x: &[f64]) -> f64 {
        crate::values::distance(x, &self.a)
    }

    /// `a + (1 - lambda / |v - a|)_+ (v - a)`; inside the ball the shrink
    /// factor is zero and no division happens.
    fn prox_into(&self, v: &[f64], lambda: f64, out: &mut [f64]) {
        let dist = crate::values::distance(v, &self.a);
        if dist <= lambda {
            out.copy_from_slice(&self.a);
        } else {
            let shrink = 1.0 - lambda / dist;
            for ((o, &vi), &ai) in out.iter_mut().zip(v).zip(&self.a) {
                *o = ai + shrink * (vi - ai);
            }
        }
    }

    fn subgradient_into(&self, x: &[f64], out: &mut [f64]) {
        for ((o, &xi), &ai) in out.iter_mut().zip(x).zip(&self.a) {
            *o = xi - ai;
        }
        let len = norm(out);
        if len > 0.0 {
            out.iter_mut().for_each(|o| *o /= len);
        }
    }
}

/// Closed set of objectives used by the simulators.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Objective {
    Pinball(PinballObjective),
    Euclidean(EuclideanDistanceObjective),
}

impl Objective {
    pub fn pinball(a: f64, alpha: f64) -> Result<Self> {
        PinballObjective::new(a, alpha).map(Objective::Pinball)
    }

    pub fn euclidean(a: Vec<f64>) -> Result<Self> {
        EuclideanDistanceObjective::new(a).map(Objective::Euclidean)
    }

    /// Replaces the anchor in place (used when the data itself is being
    /// estimated, e.g. depth values).
    pub fn set_anchor(&mut self, a: &[f64]) {
        match self {
            Objective::Pinball(p) => p.set_anchor(a[0]),
            Objective::Euclidean(e) => e.set_anchor(a),
        }
    }
}

impl LocalObjective for Objective {
    fn dim(&self) -> usize {
        match self {
            Objective::Pinball(p) => p.dim(),
            Objective::Euclidean(e) => e.dim(),
        }
    }

    fn anchor(&self) -> &[f64] {
        match self {
            Objective::Pinball(p) => p.anchor(),
            Objective::Euclidean(e) => e.anchor(),
        }
    }

    fn value(&self, x: &[f64]) -> f64 {
        match self {
            Objective::Pinball(p) => p.value(x),
            Objective::Euclidean(e) => e.value(x),
        }
    }

    #[inline]
    fn prox_into(&self, z: &[f64], gamma: f64, out: &mut [f64]) {
        match self {
            Objective::Pinball(p) => p.prox_into(z, gamma, out),
            Objective::Euclidean(e) => e.prox_into(z, gamma, out),
        }
    }

    fn subgradient_into(&self, x: &[f64], out: &mut [f64]) {
        match self {
            Objective::Pinball(p) => p.subgradient_into(x, out),
            Objective::Euclidean(e) => e.subgradient_into(x, out),
        }
    }
}

/// Pinball objectives for scalar data at quantile level `alpha`.
pub fn pinball_objectives(data: &[f64], alpha: f64) -> Result<Vec<Objective>> {
    data.iter().map(|&a| Objective::pinball(a, alpha)).collect()
}

/// Euclidean-distance objectives for vector data.
pub fn euclidean_objectives(rows: impl IntoIterator<Item = Vec<f64>>) -> Result<Vec<Objective>> {
    rows.into_iter().map(Objective::euclidean).collect()
}
