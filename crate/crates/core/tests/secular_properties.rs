use std::f64::consts::PI;

use proptest::prelude::*;
use qgraph::fixtures;
use qgraph::secular::{compute_spectrum, ground_state, ground_state_curve, rayleigh_quotient, SpectrumRequest};
use qgraph::MetricGraph;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn random_graph(seed: u64) -> MetricGraph {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    fixtures::random_graph(&mut || rng.gen::<f64>())
}

fn assert_spectrum(g: &MetricGraph, lambda_max: f64, want: &[(f64, usize)]) {
    let list = compute_spectrum(g, &SpectrumRequest::lambda_max(lambda_max)).unwrap();
    assert_eq!(list.values.len(), want.len(), "{:?}", list.values);
    for ((v, m), (w, wm)) in list.values.iter().zip(&list.multiplicities).zip(want) {
        assert!((v - w).abs() < 1e-8 * w.max(1.0), "{v} vs {w}");
        assert_eq!(m, wm, "multiplicity at {w}");
    }
    assert!(list.certified);
    assert!(list.multiplicities_consistent(), "{:?}", list);
}

#[test]
fn completeness_interval() {
    let want: Vec<_> = (0..7).map(|n| ((n as f64 * PI).powi(2), 1)).collect();
    assert_spectrum(&fixtures::interval(1.0), 400.0, &want);
}

#[test]
fn completeness_star() {
    let mut want = vec![(0.0, 1)];
    for j in 1..=9 {
        let k = j as f64 * PI / 2.0;
        want.push((k * k, if j % 2 == 1 { 2 } else { 1 }));
    }
    assert_spectrum(&fixtures::star3(0.0), 200.0, &want);
}

#[test]
fn completeness_cycle() {
    let mut want = vec![(0.0, 1)];
    for n in 1..=5 {
        want.push(((2.0 * PI * n as f64 / 3.0).powi(2), 2));
    }
    assert_spectrum(&fixtures::cycle(3, 1.0), 150.0, &want);
}

#[test]
fn completeness_path_of_unequal_edges() {
    // a path is an interval of the total length
    let want: Vec<_> = (0..6).map(|n| ((n as f64 * PI / 2.5).powi(2), 1)).collect();
    assert_spectrum(&fixtures::path(&[0.7, 1.0, 0.8]), 40.0, &want);
}

fn random_test_function(g: &MetricGraph, rng: &mut ChaCha8Rng) -> Vec<Vec<f64>> {
    let at_vertex: Vec<f64> = g.vertices().iter().map(|_| rng.gen_range(-1.0..1.0)).collect();
    g.edges()
        .iter()
        .map(|e| {
            let (u, v) = (at_vertex[e.from], at_vertex[e.to]);
            let bumps: Vec<f64> = (0..3).map(|_| rng.gen_range(-1.0..1.0)).collect();
            let n = 201;
            let mut f: Vec<f64> = (0..n)
                .map(|i| {
                    let t = i as f64 / (n - 1) as f64;
                    let bump: f64 = bumps
                        .iter()
                        .enumerate()
                        .map(|(j, b)| b * ((j + 1) as f64 * PI * t).sin())
                        .sum();
                    (1.0 - t) * u + t * v + bump
                })
                .collect();
            f[0] = u;
            f[n - 1] = v;
            f
        })
        .collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(8))]

    #[test]
    fn min_max_and_constant_bound(seed in any::<u64>()) {
        let g = random_graph(seed);
        let (lambda0, simple) = ground_state(&g).unwrap();
        prop_assert!(simple);
        let constant = (g.potential_integral(1e-12).unwrap() + g.couplings().sum::<f64>())
            / g.total_length();
        prop_assert!(lambda0 <= constant + 1e-9);
        let ones: Vec<Vec<f64>> = g.edges().iter().map(|_| vec![1.0; 9]).collect();
        prop_assert!((rayleigh_quotient(&g, &ones).unwrap() - constant).abs() < 1e-8);
        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x5eed);
        for _ in 0..100 {
            let f = random_test_function(&g, &mut rng);
            let r = rayleigh_quotient(&g, &f).unwrap();
            prop_assert!(lambda0 <= r + 1e-8, "λ0 = {} > R = {}", lambda0, r);
        }
    }

    #[test]
    fn ground_state_curve_is_concave(seed in any::<u64>()) {
        let g = random_graph(seed);
        let taus: Vec<f64> = (0..9).map(|i| -1.0 + 0.5 * i as f64).collect();
        let curve = ground_state_curve(&g, &taus).unwrap();
        prop_assert!(curve[2].abs() < 1e-9);
        for i in 1..curve.len() - 1 {
            prop_assert!(curve[i] >= 0.5 * (curve[i - 1] + curve[i + 1]) - 1e-8);
        }
    }

    #[test]
    fn shift_covariance(seed in any::<u64>(), c in -3.0f64..3.0) {
        let g = random_graph(seed);
        let req = SpectrumRequest::count(6);
        let base = compute_spectrum(&g, &req).unwrap().expanded();
        let shifted = compute_spectrum(&g.shifted(c), &req).unwrap().expanded();
        for (a, b) in base.iter().zip(&shifted).take(6) {
            prop_assert!((a + c - b).abs() <= 2.0 * req.tol + 1e-9 * a.abs().max(1.0),
                "{} + {} vs {}", a, c, b);
        }
    }

    #[test]
    fn orientation_and_labelling_invariance(seed in any::<u64>()) {
        let g = random_graph(seed);
        let req = SpectrumRequest::count(6);
        let base = compute_spectrum(&g, &req).unwrap().expanded();
        let reversed = compute_spectrum(&g.with_reversed_edge(0), &req).unwrap().expanded();
        let n = g.vertices().len();
        let perm: Vec<usize> = (0..n).rev().collect();
        let relabelled = compute_spectrum(&g.with_vertex_order(&perm), &req).unwrap().expanded();
        for i in 0..6 {
            let scale = 1e-8 * base[i].abs().max(1.0);
            prop_assert!((base[i] - reversed[i]).abs() < scale);
            prop_assert!((base[i] - relabelled[i]).abs() < scale);
        }
    }
}

#[test]
fn random_spectra_are_certified() {
    for seed in 0..6 {
        let g = random_graph(seed);
        let list = compute_spectrum(&g, &SpectrumRequest::lambda_max(300.0)).unwrap();
        assert!(list.certified, "seed {seed}: {list:?}");
        assert!(list.multiplicities_consistent(), "seed {seed}: {list:?}");
    }
}
