//! Experiment configuration.
//!
//! Every subcommand starts from its own defaults; a user JSON file is merged
//! on top key by key, so a config only needs the fields it changes.

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::consensus::{AlgorithmKind, EvalGrid};
use crate::error::{Error, Result};
use crate::graph::Topology;
use crate::regress::{RegressionSpec, TrimMode};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    Simulate,
    Trim,
    Depth,
    Geomed,
    Spectral,
    Bounds,
    Regress,
    SyncCompare,
}

impl Command {
    pub const ALL: [Command; 8] = [
        Command::Simulate,
        Command::Trim,
        Command::Depth,
        Command::Geomed,
        Command::Spectral,
        Command::Bounds,
        Command::Regress,
        Command::SyncCompare,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Command::Simulate => "simulate",
            Command::Trim => "trim",
            Command::Depth => "depth",
            Command::Geomed => "geomed",
            Command::Spectral => "spectral",
            Command::Bounds => "bounds",
            Command::Regress => "regress",
            Command::SyncCompare => "sync-compare",
        }
    }
}

/// Observation generator.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum DataSpec {
    /// `floor(eps n)` points from `N(outlier_mean, outlier_std^2)`, the rest
    /// from `N(mean, std^2)`.
    ContaminatedGaussian { mean: f64, std: f64, outlier_mean: f64, outlier_std: f64, contamination: f64 },
    Cauchy { location: f64, scale: f64 },
    /// Bivariate Gaussian with `floor(eps n)` points placed uniformly on a
    /// circular arc of `arc_radius` around the mean, angles in
    /// `[arc_start, arc_end]` (radians).
    ContaminatedGaussian2d { mean: [f64; 2], cov: [[f64; 2]; 2], contamination: f64, arc_radius: f64, arc_start: f64, arc_end: f64 },
}

impl DataSpec {
    pub fn contaminated_gaussian(contamination: f64) -> Self {
        DataSpec::ContaminatedGaussian { mean: 10.0, std: 3.0, outlier_mean: 30.0, outlier_std: 5.0, contamination }
    }

    pub fn contaminated_gaussian_2d(contamination: f64) -> Self {
        DataSpec::ContaminatedGaussian2d {
            mean: [10.0, 10.0],
            cov: [[5.0, 3.0], [3.0, 5.0]],
            contamination,
            arc_radius: 30.0,
            arc_start: 0.0,
            arc_end: std::f64::consts::FRAC_PI_2,
        }
    }

    pub fn dim(&self) -> usize {
        match self {
            DataSpec::ContaminatedGaussian2d { .. } => 2,
            _ => 1,
        }
    }

    /// Location of the clean distribution, used as the error target where the
    /// quantity of interest is the uncontaminated centre.
    pub fn clean_location(&self) -> Vec<f64> {
        match self {
            DataSpec::ContaminatedGaussian { mean, .. } => vec![*mean],
            DataSpec::Cauchy { location, .. } => vec![*location],
            DataSpec::ContaminatedGaussian2d { mean, .. } => mean.to_vec(),
        }
    }

    pub fn contamination(&self) -> f64 {
        match self {
            DataSpec::ContaminatedGaussian { contamination, .. } | DataSpec::ContaminatedGaussian2d { contamination, .. } => *contamination,
            DataSpec::Cauchy { .. } => 0.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ObjectiveSpec {
    Quantile { alpha: f64 },
    GeometricMedian,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum RhoSpec {
    Fixed { value: f64 },
    Uniform { low: f64, high: f64 },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct RegressionSettings {
    pub generator: RegressionSpec,
    pub alpha: f64,
    /// Gradient step size.
    pub step: f64,
    /// AsylADMM step size inside the quantile rule.
    pub quantile_rho: f64,
    pub p_values: Vec<f64>,
    pub mode: TrimMode,
}

impl Default for RegressionSettings {
    fn default() -> Self {
        Self {
            generator: RegressionSpec::default(),
            alpha: 0.2,
            step: 0.05,
            quantile_rho: 0.2,
            p_values: vec![1.0, 3.0, 4.0],
            mode: TrimMode::Simultaneous,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct BoundsSettings {
    pub graphs: Vec<Topology>,
    pub sizes: Vec<usize>,
    pub t_values: Vec<u64>,
    pub trials: usize,
    pub alpha: f64,
}

impl Default for BoundsSettings {
    fn default() -> Self {
        Self {
            graphs: vec![Topology::Complete, Topology::Cycle],
            sizes: vec![4, 5],
            t_values: vec![50, 200, 1000],
            trials: 2000,
            alpha: 0.25,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ExperimentConfig {
    pub topology: Topology,
    pub n: usize,
    pub algorithms: Vec<AlgorithmKind>,
    pub objective: ObjectiveSpec,
    pub data: DataSpec,
    pub trials: usize,
    pub budget: u64,
    /// Fixed checkpoint spacing; geometric spacing with `eval_points` points
    /// when absent.
    pub eval_every: Option<u64>,
    pub eval_points: usize,
    pub rho: RhoSpec,
    pub seed: u64,
    /// Step sizes tried for the edge-based ADMM baseline.
    pub edge_admm_betas: Vec<f64>,
    pub trim_alpha: f64,
    pub depth_alpha: f64,
    /// Largest graph order enumerated by `spectral`.
    pub spectral_max_n: usize,
    pub regression: RegressionSettings,
    pub bounds: BoundsSettings,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            topology: Topology::geometric_edges(507),
            n: 101,
            algorithms: vec![AlgorithmKind::AsylAdmm, AlgorithmKind::Dapd, AlgorithmKind::AsyncAdmm, AlgorithmKind::Subgradient],
            objective: ObjectiveSpec::Quantile { alpha: 0.5 },
            data: DataSpec::contaminated_gaussian(0.2),
            trials: 20,
            budget: 200_000,
            eval_every: None,
            eval_points: 60,
            rho: RhoSpec::Uniform { low: 0.1, high: 1.0 },
            seed: 0,
            edge_admm_betas: vec![0.5, 1.0, 2.0],
            trim_alpha: 0.3,
            depth_alpha: 0.3,
            spectral_max_n: 5,
            regression: RegressionSettings::default(),
            bounds: BoundsSettings::default(),
        }
    }
}

impl ExperimentConfig {
    pub fn for_command(cmd: Command) -> Self {
        let base = Self::default();
        match cmd {
            Command::Simulate | Command::Spectral | Command::Bounds | Command::Regress => base,
            Command::Trim => Self { algorithms: vec![AlgorithmKind::AsylAdmm], ..base },
            Command::Depth => Self {
                algorithms: vec![AlgorithmKind::AsylAdmm],
                objective: ObjectiveSpec::GeometricMedian,
                data: DataSpec::contaminated_gaussian_2d(0.3),
                ..base
            },
            Command::Geomed => Self {
                algorithms: vec![AlgorithmKind::AsylAdmm, AlgorithmKind::Dapd, AlgorithmKind::AsyncAdmm],
                objective: ObjectiveSpec::GeometricMedian,
                data: DataSpec::contaminated_gaussian_2d(0.3),
                ..base
            },
            Command::SyncCompare => Self { algorithms: vec![AlgorithmKind::AsylAdmm, AlgorithmKind::SyncAdmm], ..base },
        }
    }

    /// Defaults for `cmd` with `overrides` merged on top.
    pub fn from_json(cmd: Command, overrides: &str) -> Result<Self> {
        let mut base = serde_json::to_value(Self::for_command(cmd))?;
        let patch: Value = serde_json::from_str(overrides)?;
        merge(&mut base, patch);
        let cfg: Self = serde_json::from_value(base)?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if self.n < 2 {
            return Err(Error::invalid("n must be at least 2"));
        }
        if self.trials == 0 {
            return Err(Error::invalid("at least one trial is required"));
        }
        if let ObjectiveSpec::Quantile { alpha } = self.objective {
            if !(alpha > 0.0 && alpha < 1.0) {
                return Err(Error::invalid(format!("quantile level {alpha} outside (0, 1)")));
            }
            if alpha == 0.5 && self.n.is_multiple_of(2) {
                return Err(Error::invalid("median targets need an odd number of nodes"));
            }
        }
        let eps = self.data.contamination();
        if !(0.0..1.0).contains(&eps) {
            return Err(Error::invalid(format!("contamination {eps} outside [0, 1)")));
        }
        match self.rho {
            RhoSpec::Fixed { value } if !(value > 0.0) => return Err(Error::invalid("rho must be positive")),
            RhoSpec::Uniform { low, high } if !(low > 0.0 && high >= low) => {
                return Err(Error::invalid("rho range must satisfy 0 < low <= high"))
            }
            _ => {}
        }
        if self.eval_every == Some(0) {
            return Err(Error::invalid("eval_every must be positive"));
        }
        Ok(())
    }

    pub fn grid(&self) -> EvalGrid {
        match self.eval_every {
            Some(step) => EvalGrid::Every { step },
            None => EvalGrid::Geometric { points: self.eval_points },
        }
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    /// FNV-1a hash of the canonical JSON form, as 16 hex digits.
    pub fn hash(&self) -> String {
        let json = serde_json::to_string(self).expect("config serialises");
        let mut h: u64 = 0xcbf2_9ce4_8422_2325;
        for b in json.bytes() {
            h ^= b as u64;
            h = h.wrapping_mul(0x0100_0000_01b3);
        }
        format!("{h:016x}")
    }
}

/// Recursive object merge. Non-object values replace, and so does any object
/// carrying a `kind` tag, so a tagged variant is always given in full.
fn merge(base: &mut Value, patch: Value) {
    match (base, patch) {
        (Value::Object(b), Value::Object(p)) if !p.contains_key("kind") => {
            for (k, v) in p {
                match b.get_mut(&k) {
                    Some(slot) => merge(slot, v),
                    None => {
                        b.insert(k, v);
                    }
                }
            }
        }
        (slot, v) => *slot = v,
    }
}
