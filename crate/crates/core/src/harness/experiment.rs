//! Trial runner for every subcommand.
//!
//! A trial owns its graph, data, step size and edge stream, each drawn from
//! its own seed stream. Within a trial every method replays the same edge
//! sequence. Trials run in parallel and are collected in index order, so the
//! output does not depend on scheduling.

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::config::{Command, ExperimentConfig, ObjectiveSpec, RhoSpec};
use super::data::generate_data;
use super::oracle::{exact_quantile, quantile_interval, quantile_weights, rank_weights, weiszfeld};
use crate::consensus::{run_with_rng, AlgorithmKind, AsylState, EvalGrid, RunConfig};
use crate::error::{Error, Result};
use crate::graph::{build_topology_with, spectral_summary, EdgeDistribution, EdgeSampler, Graph};
use crate::prox::{euclidean_objectives, pinball_objectives, Objective, PinballObjective};
use crate::ranktrim::{exact_depths, GoTrim};
use crate::regress::{oracle_baselines, run_trimmed_gd, RuleSpec, TrimmedGdState};
use crate::rng::{stream_rng, SimRng, Stream};
use crate::theory::{empirical_deviation, sync_trace, track_a, verify_gap_identity};
use crate::values::{distance, NodeValues};

/// Mean and standard deviation across trials of one metric.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricSeries {
    pub name: String,
    pub checkpoints: Vec<u64>,
    pub mean: Vec<f64>,
    pub std: Vec<f64>,
    /// Per-trial values, indexed `[trial][checkpoint]`.
    pub per_trial: Vec<Vec<f64>>,
    pub diverged: Vec<bool>,
    pub config_hash: String,
    pub seed: u64,
}

impl MetricSeries {
    fn aggregate(name: String, checkpoints: Vec<u64>, per_trial: Vec<Vec<f64>>, diverged: Vec<bool>, cfg: &ExperimentConfig) -> Self {
        let t = per_trial.len() as f64;
        let mean: Vec<f64> = (0..checkpoints.len()).map(|c| per_trial.iter().map(|v| v[c]).sum::<f64>() / t).collect();
        let std = (0..checkpoints.len())
            .map(|c| (per_trial.iter().map(|v| (v[c] - mean[c]).powi(2)).sum::<f64>() / t).sqrt())
            .collect();
        Self { name, checkpoints, mean, std, per_trial, diverged, config_hash: cfg.hash(), seed: cfg.seed }
    }

    pub fn last_mean(&self) -> f64 {
        *self.mean.last().expect("at least one checkpoint")
    }

    pub fn first_mean(&self) -> f64 {
        self.mean[0]
    }

    pub fn any_diverged(&self) -> bool {
        self.diverged.iter().any(|&d| d)
    }
}

/// A free-form result table.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Table {
    pub name: String,
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    fn new(name: &str, header: &[&str]) -> Self {
        Self { name: name.into(), header: header.iter().map(|s| s.to_string()).collect(), rows: Vec::new() }
    }

    pub fn to_csv(&self) -> String {
        let mut s = self.header.join(",");
        s.push('\n');
        for r in &self.rows {
            s.push_str(&r.join(","));
            s.push('\n');
        }
        s
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub command: Command,
    /// Meaning of the checkpoint axis.
    pub x_label: String,
    pub series: Vec<MetricSeries>,
    pub tables: Vec<Table>,
    /// Failed invariant checks; a non-empty list means a nonzero exit.
    pub violations: Vec<String>,
}

impl Report {
    fn new(command: Command) -> Self {
        Self { command, x_label: "activation".into(), series: Vec::new(), tables: Vec::new(), violations: Vec::new() }
    }

    pub fn series(&self, name: &str) -> Option<&MetricSeries> {
        self.series.iter().find(|s| s.name == name)
    }
}

pub fn run_experiment(cmd: Command, cfg: &ExperimentConfig) -> Result<Report> {
    cfg.validate()?;
    match cmd {
        Command::Simulate | Command::Geomed => simulate(cmd, cfg),
        Command::SyncCompare => sync_compare(cfg),
        Command::Trim => trim(cfg),
        Command::Depth => depth(cfg),
        Command::Spectral => spectral(cfg),
        Command::Bounds => bounds(cfg),
        Command::Regress => regress(cfg),
    }
}

/// Graph, observations, step size and edge stream of one trial.
pub struct TrialSetup {
    pub graph: Graph,
    pub dist: EdgeDistribution,
    pub data: NodeValues,
    pub rho: f64,
    pub edges: SimRng,
}

pub fn trial_setup(cfg: &ExperimentConfig, trial: u64) -> Result<TrialSetup> {
    let graph = build_topology_with(&cfg.topology, cfg.n, &mut stream_rng(cfg.seed, trial, Stream::Topology))?;
    let dist = EdgeDistribution::standard(&graph);
    let data = generate_data(
        &cfg.data,
        cfg.n,
        &mut stream_rng(cfg.seed, trial, Stream::Data),
        &mut stream_rng(cfg.seed, trial, Stream::Shuffle),
    )?;
    let rho = match cfg.rho {
        RhoSpec::Fixed { value } => value,
        RhoSpec::Uniform { low, high } => {
            if high > low {
                stream_rng(cfg.seed, trial, Stream::Rho).random_range(low..high)
            } else {
                low
            }
        }
    };
    Ok(TrialSetup { graph, dist, data, rho, edges: stream_rng(cfg.seed, trial, Stream::Edges) })
}

/// Exact target of the configured objective.
pub fn exact_target(objective: &ObjectiveSpec, data: &NodeValues) -> Result<Vec<f64>> {
    match *objective {
        ObjectiveSpec::Quantile { alpha } => {
            if data.dim() != 1 {
                return Err(Error::invalid("quantile targets need scalar data"));
            }
            Ok(vec![exact_quantile(data.scalars(), alpha)?])
        }
        ObjectiveSpec::GeometricMedian => weiszfeld(data, 1e-10, 100_000),
    }
}

fn objectives_for(objective: &ObjectiveSpec, data: &NodeValues) -> Result<Vec<Objective>> {
    match *objective {
        ObjectiveSpec::Quantile { alpha } => pinball_objectives(data.scalars(), alpha),
        ObjectiveSpec::GeometricMedian => euclidean_objectives(data.rows().map(|r| r.to_vec())),
    }
}

fn par_trials<T: Send>(cfg: &ExperimentConfig, f: impl Fn(u64) -> Result<T> + Sync + Send) -> Result<Vec<T>> {
    (0..cfg.trials as u64).into_par_iter().map(f).collect()
}

/// Advances `state` through the checkpoints, recording `measure` at each.
/// Returns `[metric][checkpoint]`.
fn trace<S>(
    state: &mut S,
    checkpoints: &[u64],
    sampler: &EdgeSampler,
    rng: &mut SimRng,
    step: impl Fn(&mut S, usize),
    measure: impl Fn(&S) -> Vec<f64>,
) -> Vec<Vec<f64>> {
    let mut out: Vec<Vec<f64>> = Vec::new();
    let mut done = 0;
    for &c in checkpoints {
        while done < c {
            step(state, sampler.sample(rng));
            done += 1;
        }
        let m = measure(state);
        if out.is_empty() {
            out = vec![Vec::with_capacity(checkpoints.len()); m.len()];
        }
        for (o, v) in out.iter_mut().zip(m) {
            o.push(v);
        }
    }
    out
}

/// Collects `(name, values, diverged)` triples from every trial into series.
fn collect_series(cfg: &ExperimentConfig, checkpoints: &[u64], trials: Vec<Vec<(String, Vec<f64>, bool)>>) -> Vec<MetricSeries> {
    let names: Vec<String> = trials[0].iter().map(|(n, _, _)| n.clone()).collect();
    names
        .iter()
        .enumerate()
        .map(|(s, name)| {
            let per_trial = trials.iter().map(|t| t[s].1.clone()).collect();
            let diverged = trials.iter().map(|t| t[s].2).collect();
            MetricSeries::aggregate(name.clone(), checkpoints.to_vec(), per_trial, diverged, cfg)
        })
        .collect()
}

fn mean_abs_to(values: &NodeValues, target: &[f64]) -> f64 {
    values.mean_distance_to(target)
}

fn simulate(cmd: Command, cfg: &ExperimentConfig) -> Result<Report> {
    let checkpoints = cfg.grid().checkpoints(cfg.budget);
    let trials = par_trials(cfg, |trial| {
        let setup = trial_setup(cfg, trial)?;
        let truth = exact_target(&cfg.objective, &setup.data)?;
        let objs = objectives_for(&cfg.objective, &setup.data)?;
        let mut out = Vec::new();
        for &kind in &cfg.algorithms {
            let runs: Vec<(String, f64)> = if kind == AlgorithmKind::EdgeAdmm {
                cfg.edge_admm_betas.iter().map(|&b| (format!("{}(beta={b})", kind.label()), b)).collect()
            } else {
                vec![(kind.label().to_string(), setup.rho)]
            };
            for (name, rho) in runs {
                let rc = RunConfig::new(cfg.budget, rho).with_grid(cfg.grid());
                let (tr, _) = run_with_rng(kind, &setup.graph, &setup.dist, &objs, &truth, &rc, &mut setup.edges.clone())?;
                out.push((name, tr.mae, tr.diverged_at.is_some()));
            }
        }
        Ok(out)
    })?;
    let mut report = Report::new(cmd);
    report.series = collect_series(cfg, &checkpoints, trials);
    Ok(report)
}

/// AsylADMM against the synchronous variant on a per-graph-use axis, plus
/// Lyapunov and `A(t)` diagnostics for the first trial.
fn sync_compare(cfg: &ExperimentConfig) -> Result<Report> {
    let trials = par_trials(cfg, |trial| {
        let setup = trial_setup(cfg, trial)?;
        let truth = exact_target(&cfg.objective, &setup.data)?;
        let objs = objectives_for(&cfg.objective, &setup.data)?;
        let m = setup.graph.num_edges() as u64;
        let rounds = cfg.budget / m;
        let grid = EvalGrid::Every { step: m };
        let mut out = Vec::new();
        for &kind in &[AlgorithmKind::AsylAdmm, AlgorithmKind::SyncAdmm] {
            let rc = RunConfig::new(rounds * m, setup.rho).with_grid(grid);
            let (tr, _) = run_with_rng(kind, &setup.graph, &setup.dist, &objs, &truth, &rc, &mut setup.edges.clone())?;
            out.push((kind.label().to_string(), tr.mae, tr.diverged_at.is_some()));
        }
        Ok(out)
    })?;
    let len = trials.iter().flat_map(|t| t.iter().map(|s| s.1.len())).min().unwrap_or(0);
    let trials: Vec<_> = trials.into_iter().map(|t| t.into_iter().map(|(n, v, d)| (n, v[..len].to_vec(), d)).collect()).collect();
    let checkpoints: Vec<u64> = (0..len as u64).collect();
    let mut report = Report::new(Command::SyncCompare);
    report.x_label = "graph_use".into();
    report.series = collect_series(cfg, &checkpoints, trials);

    if let ObjectiveSpec::Quantile { alpha } = cfg.objective {
        let setup = trial_setup(cfg, 0)?;
        let objs: Vec<PinballObjective> =
            setup.data.scalars().iter().map(|&a| PinballObjective::new(a, alpha)).collect::<Result<_>>()?;
        let x_star = exact_quantile(setup.data.scalars(), alpha)?;
        let rounds = (cfg.budget / setup.graph.num_edges() as u64).max(1);
        let st = sync_trace(&setup.graph, &objs, x_star, setup.rho, rounds)?;
        let mut lyap = Table::new("lyapunov", &["round", "v", "r2", "gap", "slack"]);
        for r in &st.rows {
            lyap.rows.push(vec![r.round.to_string(), fmt(r.v), fmt(r.r2), fmt(r.gap), fmt(r.slack)]);
        }
        if st.max_slack() > 1e-9 {
            report.violations.push(format!("Lyapunov decrement violated by {:e}", st.max_slack()));
        }
        report.tables.push(lyap);

        let checkpoints = cfg.grid().checkpoints(cfg.budget);
        let sampler = setup.dist.sampler();
        let mut asyl = AsylState::new(&objs);
        let graph = &setup.graph;
        let cols = trace(
            &mut asyl,
            &checkpoints,
            &sampler,
            &mut setup.edges.clone(),
            |s, e| s.step(graph, &objs, e, setup.rho),
            |s| vec![track_a(s, graph), mean_abs_to(&s.x, &[x_star])],
        );
        let mut ta = Table::new("track_a", &["activation", "a", "mae"]);
        for (c, &t) in checkpoints.iter().enumerate() {
            ta.rows.push(vec![t.to_string(), fmt(cols[0][c]), fmt(cols[1][c])]);
        }
        report.tables.push(ta);
    }
    Ok(report)
}

fn trim(cfg: &ExperimentConfig) -> Result<Report> {
    let checkpoints = cfg.grid().checkpoints(cfg.budget);
    let alpha = cfg.trim_alpha;
    let target = cfg.data.clean_location();
    let trials = par_trials(cfg, |trial| {
        let setup = trial_setup(cfg, trial)?;
        let data = setup.data.scalars().to_vec();
        let sampler = setup.dist.sampler();
        let graph = &setup.graph;
        let rho = setup.rho;
        let mut out = Vec::new();

        let med_objs = pinball_objectives(&data, 0.5)?;
        let mut asyl = AsylState::new(&med_objs);
        let med = trace(&mut asyl, &checkpoints, &sampler, &mut setup.edges.clone(), |s, e| s.step(graph, &med_objs, e, rho), |s| {
            vec![mean_abs_to(&s.x, &target)]
        });
        out.push(("median".to_string(), med[0].clone(), false));

        for (label, mut gt, truth) in [
            ("quantile", GoTrim::quantile(&data, alpha)?, quantile_weights(&data, alpha)?),
            ("rank", GoTrim::rank(&data, alpha)?, rank_weights(&data, alpha)?),
        ] {
            let cols = trace(&mut gt, &checkpoints, &sampler, &mut setup.edges.clone(), |s, e| s.step(graph, e, rho), |s| {
                vec![mean_abs_to(&s.acc.estimates(), &target), s.weight_error(&truth)]
            });
            out.push((format!("trimmed_mean_{label}"), cols[0].clone(), false));
            out.push((format!("weight_error_{label}"), cols[1].clone(), false));
        }
        let corrupted = (data.iter().sum::<f64>() / data.len() as f64 - target[0]).abs();
        out.push(("corrupted_mean".to_string(), vec![corrupted; checkpoints.len()], false));
        let exact = (super::oracle::trimmed_mean(&data, alpha)? - target[0]).abs();
        out.push(("exact_trimmed_mean".to_string(), vec![exact; checkpoints.len()], false));
        Ok(out)
    })?;
    let mut report = Report::new(Command::Trim);
    report.series = collect_series(cfg, &checkpoints, trials);
    Ok(report)
}

fn depth(cfg: &ExperimentConfig) -> Result<Report> {
    let checkpoints = cfg.grid().checkpoints(cfg.budget);
    let alpha = cfg.depth_alpha;
    let target = cfg.data.clean_location();
    let trials = par_trials(cfg, |trial| {
        let setup = trial_setup(cfg, trial)?;
        let sampler = setup.dist.sampler();
        let graph = &setup.graph;
        let rho = setup.rho;
        let exact = exact_depths(&setup.data);
        let (q_lo, q_hi) = quantile_interval(&exact, alpha)?;
        let truth: Vec<bool> = exact.iter().map(|&d| d >= q_lo).collect();
        let mut out = Vec::new();

        let mut gt = GoTrim::depth(setup.data.clone(), alpha)?;
        let cols = trace(&mut gt, &checkpoints, &sampler, &mut setup.edges.clone(), |s, e| s.step(graph, e, rho), |s| {
            let crate::ranktrim::TrimRule::Depth { joint } = &s.rule else { unreachable!("depth rule") };
            let est = joint.depth.depths();
            let errs: Vec<f64> = est.iter().zip(&exact).map(|(a, b)| (a - b).abs()).collect();
            let q_err = (0..est.len()).map(|k| interval_distance(joint.quantile(k), q_lo, q_hi)).fold(0.0, f64::max);
            vec![
                errs.iter().sum::<f64>() / errs.len() as f64,
                errs.iter().cloned().fold(0.0, f64::max),
                q_err,
                mean_abs_to(&s.acc.estimates(), &target),
                s.weight_error(&truth),
            ]
        });
        for (name, col) in ["depth_error", "depth_max_error", "depth_quantile_max_error", "trimmed_mean_depth", "weight_error_depth"]
            .iter()
            .zip(cols)
        {
            out.push((name.to_string(), col, false));
        }

        let objs = euclidean_objectives(setup.data.rows().map(|r| r.to_vec()))?;
        let rc = RunConfig::new(cfg.budget, rho).with_grid(cfg.grid());
        let (tr, _) = run_with_rng(AlgorithmKind::AsylAdmm, graph, &setup.dist, &objs, &target, &rc, &mut setup.edges.clone())?;
        out.push(("geometric_median".to_string(), tr.mae, tr.diverged_at.is_some()));
        Ok(out)
    })?;
    let mut report = Report::new(Command::Depth);
    report.series = collect_series(cfg, &checkpoints, trials);
    Ok(report)
}

pub fn interval_distance(x: f64, lo: f64, hi: f64) -> f64 {
    if x < lo {
        lo - x
    } else if x > hi {
        x - hi
    } else {
        0.0
    }
}

fn spectral(cfg: &ExperimentConfig) -> Result<Report> {
    let mut report = Report::new(Command::Spectral);
    let mut table = Table::new("gap_identity", &["n", "edges", "gap_chain", "c", "difference", "agree"]);
    for n in 2..=cfg.spectral_max_n {
        let graphs = Graph::all_connected(n)?;
        let checks: Vec<_> = graphs
            .par_iter()
            .map(|g| verify_gap_identity(g, &EdgeDistribution::standard(g)).map(|c| (g, c)))
            .collect::<Result<_>>()?;
        for (g, chk) in checks {
            let edges: Vec<String> = g.edges().iter().map(|(i, j)| format!("{i}-{j}")).collect();
            table.rows.push(vec![
                n.to_string(),
                edges.join(" "),
                fmt(chk.gap_chain),
                fmt(chk.c),
                fmt((chk.gap_chain - chk.c).abs()),
                chk.agree.to_string(),
            ]);
            if !chk.agree {
                report.violations.push(format!("gap identity fails on n={n} graph [{}]", edges.join(" ")));
            }
        }
    }
    report.tables.push(table);

    let mut topo = Table::new("topology", &["trial", "edges", "lambda2", "c", "connectivity"]);
    let rows = par_trials(cfg, |trial| {
        let g = build_topology_with(&cfg.topology, cfg.n, &mut stream_rng(cfg.seed, trial, Stream::Topology))?;
        let s = spectral_summary(&g, &EdgeDistribution::standard(&g))?;
        Ok(vec![trial.to_string(), g.num_edges().to_string(), fmt(s.lambda2), fmt(s.c), fmt(s.connectivity)])
    })?;
    topo.rows = rows;
    report.tables.push(topo);
    Ok(report)
}

fn bounds(cfg: &ExperimentConfig) -> Result<Report> {
    let b = &cfg.bounds;
    if b.graphs.len() != b.sizes.len() {
        return Err(Error::invalid("bounds.graphs and bounds.sizes must pair up"));
    }
    let mut report = Report::new(Command::Bounds);
    let mut table =
        Table::new("deviation", &["graph", "n", "t", "node", "gamma", "frequency", "half_width", "hoeffding", "bernstein"]);
    for (gi, (kind, &n)) in b.graphs.iter().zip(&b.sizes).enumerate() {
        let graph = build_topology_with(kind, n, &mut stream_rng(cfg.seed, gi as u64, Stream::Topology))?;
        let dist = EdgeDistribution::standard(&graph);
        let data: Vec<f64> = (1..=n).map(|v| v as f64).collect();
        for &t in &b.t_values {
            let seed = cfg.seed ^ (gi as u64) << 32 ^ t;
            let rep = empirical_deviation(&graph, &dist, &data, b.alpha, t, b.trials, seed)?;
            for k in 0..n {
                table.rows.push(vec![
                    kind.name().to_string(),
                    n.to_string(),
                    t.to_string(),
                    k.to_string(),
                    fmt(rep.gamma[k]),
                    fmt(rep.frequency[k]),
                    fmt(rep.half_width[k]),
                    fmt(rep.hoeffding[k]),
                    fmt(rep.bernstein[k]),
                ]);
            }
            for k in rep.hoeffding_violations() {
                report.violations.push(format!("{} n={n} t={t} node {k}: frequency above the Hoeffding bound", kind.name()));
            }
        }
    }
    report.tables.push(table);
    Ok(report)
}

fn regress(cfg: &ExperimentConfig) -> Result<Report> {
    let checkpoints = cfg.grid().checkpoints(cfg.budget);
    let rs = &cfg.regression;
    let n = rs.generator.n;
    let trials = par_trials(cfg, |trial| {
        let graph = build_topology_with(&cfg.topology, n, &mut stream_rng(cfg.seed, trial, Stream::Topology))?;
        let sampler = EdgeDistribution::standard(&graph).sampler();
        let problem = rs.generator.generate(&mut stream_rng(cfg.seed, trial, Stream::Data))?;
        let edges = stream_rng(cfg.seed, trial, Stream::Edges);
        let base = oracle_baselines(&problem, rs.alpha)?;
        let truth = &problem.theta_true;
        let mut out = Vec::new();
        let mut rules = vec![("oracle_trimming".to_string(), RuleSpec::Oracle)];
        for &p in &rs.p_values {
            rules.push((format!("rank_p{p}"), RuleSpec::rank_with_p(n, p)));
            rules.push((format!("quantile_p{p}"), RuleSpec::quantile_with_p(n, p, rs.quantile_rho)));
        }
        for (name, rule) in rules {
            let mut s = TrimmedGdState::new(&problem, rs.alpha, rule, rs.mode)?;
            let tr = run_trimmed_gd(&problem, &graph, &sampler, &mut s, rs.step, &checkpoints, truth, &mut edges.clone());
            out.push((name, tr.error, tr.diverged_at.is_some()));
        }
        for (name, theta) in [
            ("ls_oracle_regression", &base.oracle_regression),
            ("ls_oracle_trimming", &base.oracle_trimming),
            ("ls_corrupted", &base.corrupted),
            ("huber", &base.huber),
        ] {
            out.push((name.to_string(), vec![distance(theta, truth); checkpoints.len()], false));
        }
        Ok(out)
    })?;
    let mut report = Report::new(Command::Regress);
    report.series = collect_series(cfg, &checkpoints, trials);
    Ok(report)
}

/// Shortest round-trip float formatting, stable across runs.
pub fn fmt(v: f64) -> String {
    format!("{v:e}")
}
