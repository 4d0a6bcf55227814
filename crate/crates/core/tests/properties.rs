use proptest::prelude::*;
use qcx_core::decomp::{characterize, harmonic_index, index_sum_criterion, infinite_sum_criterion, SumDecision};
use qcx_core::extcore::ExtReal;
use qcx_core::l2basis::{build_example_10pt, check_basis_locality};
use qcx_core::riskmeasure::{
    check_locality, nqc_mu_interval, separating_dual_witness, CheckConfig, FiniteProbSpace, MuInterval, PartitionSigma,
    RiskMeasure,
};

fn nonzero() -> impl Strategy<Value = f64> {
    prop_oneof![-5.0..-0.01f64, 0.01..5.0f64]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(500))]

    #[test]
    fn criteria_agree_off_the_boundary(c in prop::collection::vec(nonzero(), 2..6)) {
        let a = index_sum_criterion(&c, 1e-3).unwrap();
        let b = characterize(&c, 1e-3).unwrap();
        if a.verdict != SumDecision::BoundaryInconclusive && b.verdict != SumDecision::BoundaryInconclusive {
            prop_assert_eq!(a.verdict, b.verdict, "{:?}", c);
        }
    }

    #[test]
    fn harmonic_index_is_symmetric_and_monotone(
        mut c in prop::collection::vec(0.01..10.0f64, 2..6),
        bump in 0.0..3.0f64,
    ) {
        let ext = |v: &[f64]| v.iter().map(|&x| ExtReal::Finite(x)).collect::<Vec<_>>();
        let h = harmonic_index(&ext(&c)).unwrap().to_float();
        let mut rev = c.clone();
        rev.reverse();
        let hr = harmonic_index(&ext(&rev)).unwrap().to_float();
        prop_assert!((h - hr).abs() <= 1e-12 * h.max(1.0));
        prop_assert!(h <= c.iter().copied().fold(f64::INFINITY, f64::min) + 1e-12);
        c[0] += bump;
        let h2 = harmonic_index(&ext(&c)).unwrap().to_float();
        prop_assert!(h2 >= h - 1e-12);
    }

    #[test]
    fn infinite_sum_decisions_are_prefix_stable(
        neg in -3.0..-0.1f64,
        rest in prop::collection::vec(0.1..10.0f64, 3..20),
    ) {
        let stream: Vec<f64> = std::iter::once(neg).chain(rest.iter().copied()).collect();
        let short = infinite_sum_criterion(stream.iter().copied(), 3, None).unwrap();
        let long = infinite_sum_criterion(stream.iter().copied(), stream.len(), None).unwrap();
        if short.verdict == SumDecision::NotQuasiconvex {
            prop_assert_eq!(long.verdict, SumDecision::NotQuasiconvex);
            prop_assert_eq!(long.inspected, short.inspected);
        }
    }

    #[test]
    fn mu_interval_and_dual_are_lp_duals(
        rx in prop::collection::vec(-2.0..2.0f64, 3),
        ry in prop::collection::vec(-2.0..2.0f64, 3),
        rm in prop::collection::vec(-2.0..2.0f64, 3),
    ) {
        let tol = 1e-6;
        let probs = [0.4, 0.3, 0.3];
        let empty = matches!(nqc_mu_interval(&rx, &ry, &rm, tol), MuInterval::Empty { .. });
        let margin = separating_dual_witness(&rx, &ry, &rm, &probs).map_or(f64::NEG_INFINITY, |d| d.margin);
        if empty {
            prop_assert!(margin > tol - 1e-12, "margin {}", margin);
        } else {
            prop_assert!(margin <= tol + 1e-12, "margin {}", margin);
        }
    }

    #[test]
    fn pythagoras_in_the_block_basis(x in prop::collection::vec(-3.0..3.0f64, 10)) {
        let b = build_example_10pt::<f64>();
        let coords: Vec<f64> = b.basis().iter().map(|v| b.space.inner(&x, v)).collect();
        let total: f64 = coords.iter().map(|c| c * c).sum();
        let norm2 = b.space.inner(&x, &x);
        prop_assert!((total - norm2).abs() <= 1e-10 * norm2.max(1.0));
    }
}

#[test]
fn conditional_mean_is_local_both_ways() {
    let b = build_example_10pt::<f64>();
    let cfg = CheckConfig::new(300, 9);
    let rho = RiskMeasure::neg_conditional_mean(b.sigma.clone());
    assert!(check_locality(&rho, &b.space, &cfg).unwrap().is_pass());
    assert!(check_basis_locality(&rho, &b, &cfg).unwrap().is_pass());
    let broadcast = RiskMeasure::mean_broadcast(b.sigma.clone());
    assert!(check_locality(&broadcast, &b.space, &cfg).unwrap().is_fail());
    assert!(check_basis_locality(&broadcast, &b, &cfg).unwrap().is_fail());
}

#[test]
fn translativity_and_monotonicity_of_certainty_equivalents() {
    use qcx_core::riskmeasure::{check_monotonicity, check_translativity};
    let space = FiniteProbSpace::<f64>::new(vec![0.05, 0.15, 0.1, 0.2, 0.1, 0.05, 0.05, 0.1, 0.1, 0.1]).unwrap();
    let g = PartitionSigma::from_sizes(&[2, 5, 3]).unwrap();
    let cfg = CheckConfig::new(200, 1);
    for rho in [
        RiskMeasure::entropic(g.clone()),
        RiskMeasure::neg_conditional_mean(g.clone()),
    ] {
        assert!(
            check_monotonicity(&rho, &space, &cfg).unwrap().is_pass(),
            "{}",
            rho.name()
        );
        assert!(
            check_translativity(&rho, &space, &cfg).unwrap().is_pass(),
            "{}",
            rho.name()
        );
    }
}
