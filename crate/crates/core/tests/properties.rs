mod common;

use gossipq::consensus::AsylState;
use gossipq::graph::{EdgeDistribution, Graph};
use gossipq::harness::config::{Command, ExperimentConfig};
use gossipq::harness::oracle::{exact_quantile, trimmed_mean, weiszfeld};
use gossipq::prox::{LocalObjective, PinballObjective};
use gossipq::ranktrim::{exact_depths, GoRankState, GoTrim};
use gossipq::{EuclideanDistanceObjective, NodeValues};
use proptest::prelude::*;

use common::{brute_depths, sorted_quantile};

fn distinct(v: Vec<f64>) -> Vec<f64> {
    // Spread duplicates apart deterministically.
    v.iter().enumerate().map(|(i, x)| x + i as f64 * 1e-7).collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn pinball_prox_is_nonexpansive(a in -10.0..10.0f64, alpha in 0.01..0.99f64, gamma in 0.01..10.0f64,
                                     z1 in -30.0..30.0f64, z2 in -30.0..30.0f64) {
        let o = PinballObjective::new(a, alpha).unwrap();
        let (p1, p2) = (o.prox_scalar(z1, gamma), o.prox_scalar(z2, gamma));
        prop_assert!((p1 - p2).abs() <= (z1 - z2).abs() + 1e-12);
    }

    #[test]
    fn euclidean_prox_is_nonexpansive(a in prop::collection::vec(-10.0..10.0f64, 3),
                                      v1 in prop::collection::vec(-20.0..20.0f64, 3),
                                      v2 in prop::collection::vec(-20.0..20.0f64, 3),
                                      lambda in 0.01..10.0f64) {
        let o = EuclideanDistanceObjective::new(a).unwrap();
        let (p1, p2) = (o.prox(&v1, lambda), o.prox(&v2, lambda));
        let d = |x: &[f64], y: &[f64]| x.iter().zip(y).map(|(p, q)| (p - q).powi(2)).sum::<f64>().sqrt();
        prop_assert!(d(&p1, &p2) <= d(&v1, &v2) + 1e-12);
    }

    #[test]
    fn pinball_prox_beats_nearby_points(a in -10.0..10.0f64, alpha in 0.01..0.99f64, gamma in 0.01..10.0f64, z in -30.0..30.0f64) {
        let o = PinballObjective::new(a, alpha).unwrap();
        let w = o.prox_scalar(z, gamma);
        let obj = |x: f64| o.value_at(x) + (x - z).powi(2) / (2.0 * gamma);
        for eps in [1e-4, 1e-2] {
            prop_assert!(obj(w) <= obj(w + eps) + 1e-12);
            prop_assert!(obj(w) <= obj(w - eps) + 1e-12);
        }
    }

    #[test]
    fn euclidean_prox_beats_nearby_points(a in prop::collection::vec(-10.0..10.0f64, 2),
                                          v in prop::collection::vec(-20.0..20.0f64, 2),
                                          lambda in 0.01..10.0f64) {
        let o = EuclideanDistanceObjective::new(a).unwrap();
        let w = o.prox(&v, lambda);
        let obj = |x: &[f64]| o.value(x) + x.iter().zip(&v).map(|(p, q)| (p - q).powi(2)).sum::<f64>() / (2.0 * lambda);
        for eps in [1e-4, 1e-2] {
            for dir in [[1.0, 0.0], [0.0, 1.0], [-1.0, 0.0], [0.0, -1.0]] {
                let x = [w[0] + eps * dir[0], w[1] + eps * dir[1]];
                prop_assert!(obj(&w) <= obj(&x) + 1e-12);
            }
        }
    }

    #[test]
    fn pinball_prox_limits(a in -10.0..10.0f64, alpha in 0.01..0.99f64, z in -30.0..30.0f64, gamma in 0.01..10.0f64) {
        let o = PinballObjective::new(a, alpha).unwrap();
        prop_assert!((o.prox_scalar(z, 1e-12) - z).abs() < 1e-10);
        prop_assert_eq!(o.prox_scalar(a, gamma), a);
    }

    #[test]
    fn exact_quantile_matches_sorting(v in prop::collection::vec(-100.0..100.0f64, 3..60), alpha in 0.05..0.95f64) {
        let v = distinct(v);
        let pos = alpha * v.len() as f64;
        prop_assume!((pos - pos.round()).abs() > 1e-9);
        prop_assert_eq!(exact_quantile(&v, alpha).unwrap(), sorted_quantile(&v, alpha));
    }

    #[test]
    fn trimmed_mean_lies_between_kept_extremes(v in prop::collection::vec(-100.0..100.0f64, 5..60), alpha in 0.0..0.45f64) {
        let v = distinct(v);
        let mut s = v.clone();
        s.sort_by(f64::total_cmp);
        let m = (alpha * v.len() as f64).floor() as usize;
        let t = trimmed_mean(&v, alpha).unwrap();
        let expect = s[m..v.len() - m].iter().sum::<f64>() / (v.len() - 2 * m) as f64;
        prop_assert!((t - expect).abs() < 1e-9);
    }

    #[test]
    fn depth_matches_double_loop(rows in prop::collection::vec(prop::collection::vec(-10.0..10.0f64, 2), 2..25)) {
        let data = NodeValues::from_rows(&rows);
        let (a, b) = (exact_depths(&data), brute_depths(&data));
        for (x, y) in a.iter().zip(&b) {
            prop_assert!((x - y).abs() < 1e-12);
            prop_assert!(*x > 0.0 && *x <= 1.0);
        }
    }

    #[test]
    fn asyl_conserves_degree_weighted_duals(data in prop::collection::vec(-10.0..10.0f64, 6), edges in prop::collection::vec(0usize..6, 1..200), rho in 0.1..2.0f64) {
        let g = Graph::cycle(6).unwrap();
        let objs: Vec<PinballObjective> = data.iter().map(|&a| PinballObjective::new(a, 0.3).unwrap()).collect();
        let mut s = AsylState::new(&objs);
        for e in edges {
            s.step(&g, &objs, e, rho);
        }
        let total: f64 = (0..6).map(|k| g.degree(k) as f64 * s.mu_hat.row(k)[0]).sum();
        prop_assert!(total.abs() < 1e-9);
    }

    #[test]
    fn gorank_stays_in_range(data in prop::collection::vec(-10.0..10.0f64, 2..12), steps in prop::collection::vec(0usize..1000, 0..300)) {
        let data = distinct(data);
        let n = data.len();
        let g = Graph::complete(n).unwrap();
        let mut s = GoRankState::new(&data).unwrap();
        for e in steps {
            let (i, j) = g.edge(e % g.num_edges());
            s.step_async(i, j);
        }
        for k in 0..n {
            // R' is an average of indicators, so R = n R' + 1 lies in [1, n + 1].
            prop_assert!(s.rank(k) >= 1.0 && s.rank(k) <= n as f64 + 1.0);
        }
    }

    #[test]
    fn gotrim_mass_counts_included_nodes(data in prop::collection::vec(-10.0..10.0f64, 5..15), steps in prop::collection::vec(0usize..1000, 0..300), alpha in 0.0..0.4f64) {
        let data = distinct(data);
        let n = data.len();
        let g = Graph::complete(n).unwrap();
        let mut t = GoTrim::rank(&data, alpha).unwrap();
        for e in steps {
            t.step(&g, e % g.num_edges(), 1.0);
        }
        let included = t.weights().iter().filter(|&&w| w).count() as f64;
        let mass: f64 = t.acc.mass.iter().sum();
        prop_assert!((mass / n as f64 - included).abs() < 1e-9);
    }

    #[test]
    fn edge_probabilities_sum_to_one(n in 3usize..12) {
        for g in [Graph::cycle(n).unwrap(), Graph::complete(n).unwrap(), Graph::star(n).unwrap()] {
            let p: f64 = EdgeDistribution::standard(&g).probs().iter().sum();
            prop_assert!((p - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn weiszfeld_beats_every_data_point(rows in prop::collection::vec(prop::collection::vec(-10.0..10.0f64, 2), 3..20)) {
        let data = NodeValues::from_rows(&rows);
        let m = weiszfeld(&data, 1e-10, 100_000).unwrap();
        let cost = |x: &[f64]| data.rows().map(|r| ((r[0] - x[0]).powi(2) + (r[1] - x[1]).powi(2)).sqrt()).sum::<f64>();
        for r in data.rows() {
            prop_assert!(cost(&m) <= cost(r) + 1e-7);
        }
    }

    #[test]
    fn config_json_roundtrip(seed in any::<u64>(), trials in 1usize..50) {
        let mut cfg = ExperimentConfig::for_command(Command::Trim);
        cfg.seed = seed;
        cfg.trials = trials;
        let back = ExperimentConfig::from_json(Command::Trim, &cfg.to_json().unwrap()).unwrap();
        prop_assert_eq!(back, cfg);
    }
}
