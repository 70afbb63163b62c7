mod common;

use gossipq::consensus::{run, AlgorithmKind, AsylState, RunConfig};
use gossipq::graph::{EdgeDistribution, Graph, Topology};
use gossipq::harness::config::{Command, DataSpec, ExperimentConfig};
use gossipq::harness::data::{contaminated_count, generate_raw};
use gossipq::harness::experiment::{run_experiment, trial_setup};
use gossipq::harness::oracle::exact_quantile;
use gossipq::harness::output::write_report;
use gossipq::prox::{pinball_objectives, PinballObjective};
use gossipq::ranktrim::GoTrim;
use gossipq::rng::seeded;
use gossipq::theory::sync_trace;

use common::sorted_quantile;

#[test]
fn two_node_hand_trace() {
    let g = Graph::path(2).unwrap();
    let objs: Vec<PinballObjective> = [0.0, 2.0].iter().map(|&a| PinballObjective::new(a, 0.5).unwrap()).collect();
    let mut s = AsylState::new(&objs);
    s.step(&g, &objs, 0, 1.0);
    // z = 1, degrees are 1, so mu = (1, -1); prox inputs are 2 and 0 with
    // unit step, each moved one unit towards its anchor.
    assert_eq!(s.mu_hat.row(0)[0], 1.0);
    assert_eq!(s.mu_hat.row(1)[0], -1.0);
    assert_eq!(s.x.row(0)[0], 1.0);
    assert_eq!(s.x.row(1)[0], 1.0);
    // Consensus inside the median interval is a fixed point.
    let before = s.clone();
    s.step(&g, &objs, 0, 1.0);
    assert_eq!(s, before);
}

#[test]
fn asyl_reaches_median_on_cycle() {
    let data: Vec<f64> = (0..21).map(|k| ((k * 7) % 21) as f64 + 0.25 * k as f64).collect();
    let g = Graph::cycle(21).unwrap();
    let dist = EdgeDistribution::standard(&g);
    let objs = pinball_objectives(&data, 0.5).unwrap();
    let truth = [sorted_quantile(&data, 0.5)];
    let trace = run(AlgorithmKind::AsylAdmm, &g, &dist, &objs, &truth, &RunConfig::new(200_000, 0.5), 3).unwrap();
    assert!(trace.diverged_at.is_none());
    assert!(*trace.mae.last().unwrap() < 1e-3 * trace.mae[0]);
}

#[test]
fn sync_trace_csv_has_one_row_per_round() {
    let g = Graph::cycle(7).unwrap();
    let data = [3.0, 9.0, 1.0, 4.0, 8.0, 2.0, 6.0];
    let objs: Vec<PinballObjective> = data.iter().map(|&a| PinballObjective::new(a, 0.5).unwrap()).collect();
    let x_star = exact_quantile(&data, 0.5).unwrap();
    let tr = sync_trace(&g, &objs, x_star, 0.5, 50).unwrap();
    let csv = tr.to_csv();
    assert_eq!(csv.lines().count(), 51);
    assert!(csv.starts_with("round,v,r2,gap,slack"));
    assert!(tr.max_slack() <= 1e-9);
    assert!(tr.residual_energy(0.5) <= tr.v0 + 1e-9);
}

#[test]
fn contaminated_points_sit_near_outlier_mean() {
    for n in [11, 50, 101] {
        for eps in [0.0, 0.1, 0.25] {
            let spec = DataSpec::contaminated_gaussian(eps);
            let d = generate_raw(&spec, n, &mut seeded(n as u64)).unwrap();
            let k = contaminated_count(eps, n);
            // Outliers sit near 30, clean points near 10, so a split at 20
            // recovers the count up to rare tail draws.
            let high = d.scalars().iter().filter(|&&x| x > 20.0).count();
            assert!((high as i64 - k as i64).abs() <= 1 + n as i64 / 50, "n={n} eps={eps} high={high} k={k}");
        }
    }
}

#[test]
fn trial_setup_draws_rho_in_range_and_shares_it() {
    let cfg = ExperimentConfig::for_command(Command::Simulate);
    let rhos: Vec<f64> = (0..10).map(|t| trial_setup(&cfg, t).unwrap().rho).collect();
    assert!(rhos.iter().all(|&r| (0.1..1.0).contains(&r)));
    assert_eq!(trial_setup(&cfg, 3).unwrap().rho, rhos[3]);
}

#[test]
fn gotrim_matches_exact_trimmed_mean_on_complete_graph() {
    let data: Vec<f64> = (0..31).map(|k| (k as f64 * 1.7).sin() * 10.0 + k as f64 * 0.01).collect();
    let g = Graph::complete(31).unwrap();
    let sampler = EdgeDistribution::standard(&g).sampler();
    let mut rng = seeded(5);
    let mut t = GoTrim::rank(&data, 0.2).unwrap();
    for _ in 0..300_000 {
        t.step(&g, sampler.sample(&mut rng), 1.0);
    }
    let exact = gossipq::harness::oracle::trimmed_mean(&data, 0.2).unwrap();
    let est = t.acc.estimates();
    let worst = est.scalars().iter().map(|e| (e - exact).abs()).fold(0.0, f64::max);
    assert!(worst < 0.05, "worst {worst}");
}

#[test]
fn report_files_round_trip_through_disk() {
    let mut cfg = ExperimentConfig::for_command(Command::Geomed);
    cfg.n = 21;
    cfg.topology = Topology::Cycle;
    cfg.trials = 2;
    cfg.budget = 3000;
    let r = run_experiment(Command::Geomed, &cfg).unwrap();
    let dir = tempfile::tempdir().unwrap();
    let paths = write_report(&r, &cfg, dir.path(), false).unwrap();
    let cfg_path = paths.iter().find(|p| p.to_string_lossy().ends_with("geomed_config.json")).unwrap();
    let back = ExperimentConfig::from_json(Command::Geomed, &std::fs::read_to_string(cfg_path).unwrap()).unwrap();
    assert_eq!(back, cfg);
    let trials = std::fs::read_to_string(dir.path().join("geomed_trials.csv")).unwrap();
    assert!(trials.starts_with("algorithm,trial,activation,mae\n"));
}
