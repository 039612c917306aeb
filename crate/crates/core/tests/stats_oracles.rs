mod common;

use common::*;
use ecm_core::stats::{stats_from_pairs, Provenance};
use ecm_core::{expected_stats, observed_stats, ModelKind, ModelParams, PairMatrices};

/// Independent pair moments from the plain linear-space kernel; the cube-root
/// moment is summed term by term until the remaining tail is negligible.
fn pair_oracle(params: &ModelParams, i: usize, j: usize) -> (f64, f64, f64) {
    let xx = params.x()[i] * params.x()[j];
    let z = params.y()[i] * params.y()[j];
    let den = 1.0 - z + xx * z;
    let q = |w: u64| if w == 0 { (1.0 - z) / den } else { xx * z.powi(w as i32) * (1.0 - z) / den };
    let p = 1.0 - q(0);
    let mut mean = 0.0;
    let mut cube = 0.0;
    let mut w = 1u64;
    loop {
        let qw = q(w);
        mean += w as f64 * qw;
        cube += (w as f64).cbrt() * qw;
        if qw * w as f64 / (1.0 - z) < 1e-18 || w > 200_000 {
            break;
        }
        w += 1;
    }
    (p, mean, cube)
}

fn close(a: Option<f64>, b: Option<f64>, tol: f64) -> bool {
    match (a, b) {
        (Some(a), Some(b)) => (a - b).abs() <= tol * a.abs().max(b.abs()).max(1.0),
        (None, None) => true,
        _ => false,
    }
}

/// Literal transcription of the ratio definitions with explicit index
/// exclusions.
fn brute_force(n: usize, p: &dyn Fn(usize, usize) -> f64, w: &dyn Fn(usize, usize) -> f64, c: &dyn Fn(usize, usize) -> f64) -> Vec<[Option<f64>; 4]> {
    (0..n)
        .map(|i| {
            let (mut knn_num, mut snn_num, mut k) = (0.0, 0.0, 0.0);
            let (mut tri, mut wtri, mut wedge) = (0.0, 0.0, 0.0);
            for j in (0..n).filter(|&j| j != i) {
                k += p(i, j);
                for l in (0..n).filter(|&l| l != j) {
                    knn_num += p(i, j) * p(j, l);
                    snn_num += p(i, j) * w(j, l);
                }
                for l in (0..n).filter(|&l| l != i && l != j) {
                    tri += p(i, j) * p(j, l) * p(l, i);
                    wtri += c(i, j) * c(j, l) * c(l, i);
                    wedge += p(i, j) * p(l, i);
                }
            }
            let r = |num: f64, den: f64| (den > 0.0).then(|| num / den);
            [r(knn_num, k), r(tri, wedge), r(snn_num, k), r(wtri, wedge)]
        })
        .collect()
}

#[test]
fn expected_statistics_match_triple_sums() {
    let mut r = rng(41);
    for case in 0..100 {
        let n = 3 + case % 4;
        let params = if case % 3 == 0 { random_wcm(&mut r, n) } else { random_ecm(&mut r, n) };
        let moments: Vec<Vec<(f64, f64, f64)>> = (0..n)
            .map(|i| (0..n).map(|j| if i == j { (0.0, 0.0, 0.0) } else { pair_oracle(&params, i, j) }).collect())
            .collect();
        let oracle = brute_force(n, &|i, j| moments[i][j].0, &|i, j| moments[i][j].1, &|i, j| moments[i][j].2);
        let stats = expected_stats(&params);
        for i in 0..n {
            let got = [stats.knn[i], stats.c[i], stats.snn[i], stats.cw[i]];
            for (s, (g, o)) in got.iter().zip(&oracle[i]).enumerate() {
                assert!(close(*g, *o, 1e-10), "case {case} node {i} stat {s}: {g:?} vs {o:?}");
            }
        }
    }
}

#[test]
fn observed_statistics_match_triple_sums() {
    let mut r = rng(43);
    for case in 0..50 {
        let n = 3 + case % 8;
        let g = random_graph(&mut r, n, 0.6);
        let a = |i: usize, j: usize| if g.is_linked(i, j) { 1.0 } else { 0.0 };
        let w = |i: usize, j: usize| g.weight(i, j) as f64;
        let c = |i: usize, j: usize| (g.weight(i, j) as f64).cbrt();
        let oracle = brute_force(n, &a, &w, &c);
        let stats = observed_stats(&g);
        let k = g.local_constraints();
        for i in 0..n {
            let got = [stats.knn[i], stats.c[i], stats.snn[i], stats.cw[i]];
            for (s, (gv, o)) in got.iter().zip(&oracle[i]).enumerate() {
                assert!(close(*gv, *o, 1e-12), "case {case} node {i} stat {s}");
            }
            assert_eq!(stats.knn[i].is_some(), k.degrees[i] >= 1);
            assert_eq!(stats.c[i].is_some(), k.degrees[i] >= 2);
            if let Some(c) = stats.c[i] {
                assert!((0.0..=1.0).contains(&c));
            }
            if let Some(knn) = stats.knn[i] {
                assert!(knn >= 1.0 && knn <= (n - 1) as f64);
            }
        }
    }
}

#[test]
fn saturated_probabilities_give_complete_graph_values() {
    let n = 12;
    let mut pairs = PairMatrices::zeros(n);
    for i in 0..n {
        for j in (i + 1)..n {
            pairs.set(i, j, 1.0, 2.0, 1.25);
        }
    }
    let labels: Vec<String> = (0..n).map(|i| i.to_string()).collect();
    let s = stats_from_pairs(&pairs, labels, Provenance::Expected(ModelKind::Ecm)).unwrap();
    for i in 0..n {
        assert_eq!(s.knn[i], Some((n - 1) as f64));
        assert_eq!(s.c[i], Some(1.0));
        // every neighbour has strength 2(n-1)
        assert_eq!(s.snn[i], Some(2.0 * (n - 1) as f64));
    }
}

#[test]
fn wcm_binary_statistics_depend_on_y_products_only() {
    let mut r = rng(47);
    let a = random_wcm(&mut r, 6);
    // under the WCM p_ij = y_i y_j, so ANND follows from the products alone
    let s = expected_stats(&a);
    let p = |i: usize, j: usize| if i == j { 0.0 } else { a.y()[i] * a.y()[j] };
    for i in 0..6 {
        let k: f64 = (0..6).map(|j| p(i, j)).sum();
        let kj = |j: usize| (0..6).map(|l| p(j, l)).sum::<f64>();
        let knn = (0..6).map(|j| p(i, j) * kj(j)).sum::<f64>() / k;
        assert!((s.knn[i].unwrap() - knn).abs() < 1e-12 * knn);
    }
}
