mod common;

use common::*;
use ecm_core::bias::DEFAULT_TOLERANCE;
use ecm_core::{bias_report, fit, BiasClass, FitConfig, ModelKind};
use proptest::prelude::*;

#[test]
fn classes_agree_with_creation_versus_reinforcement() {
    let mut r = rng(61);
    for _ in 0..20 {
        let p = random_ecm(&mut r, 12);
        let report = bias_report(&p, DEFAULT_TOLERANCE).unwrap();
        assert_eq!(report.classified() + report.excluded, 66);
        for b in &report.pairs {
            let d = p.dyad(b.i, b.j).unwrap();
            let (pij, z) = (d.connection_probability(), d.z());
            assert_eq!(b.class == BiasClass::Extensive, pij > z);
            for w in 1..6 {
                // a link of weight w: first unit created, w - 1 reinforcements
                let created = pij * z.powi(w - 1);
                let reinforced = z.powi(w);
                assert_eq!(b.bias > 1.0, created > reinforced);
            }
        }
        let f = report.extensive_fraction() + report.intensive_fraction() + report.neutral_fraction();
        assert!((f - 1.0).abs() < 1e-15);
    }
}

#[test]
fn fitted_report_is_log_rank_one() {
    let mut r = rng(67);
    let g = random_graph(&mut r, 15, 0.5);
    let p = fit(&g, ModelKind::Ecm, &FitConfig::default()).unwrap();
    let report = bias_report(&p, DEFAULT_TOLERANCE).unwrap();
    let ln = |i: usize, j: usize| {
        report
            .pairs
            .iter()
            .find(|b| (b.i, b.j) == (i.min(j), i.max(j)))
            .map(|b| b.bias.ln())
            .unwrap()
    };
    // ln b_ij + ln b_kl = ln b_ik + ln b_jl
    for (i, j, k, l) in [(0, 1, 2, 3), (4, 7, 9, 12), (1, 5, 8, 14)] {
        let lhs = ln(i, j) + ln(k, l);
        let rhs = ln(i, k) + ln(j, l);
        assert!((lhs - rhs).abs() < 1e-9 * lhs.abs().max(1.0));
    }
}

proptest! {
    #[test]
    fn uniform_x_above_one_is_fully_extensive(x in 1.001f64..20.0, n in 2usize..20) {
        let p = ecm_core::ModelParams::ecm(labels(n), vec![x; n], vec![0.2; n]).unwrap();
        let r = bias_report(&p, DEFAULT_TOLERANCE).unwrap();
        prop_assert_eq!(r.extensive, n * (n - 1) / 2);
        prop_assert_eq!(r.extensive_fraction(), 1.0);
    }
}
