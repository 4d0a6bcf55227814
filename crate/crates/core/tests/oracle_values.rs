//! Frozen reference values.

use qcx_core::cindex::{compute_index, scale_index, smooth_index_1d, IndexCase, IndexConfig};
use qcx_core::decomp::{characterize, harmonic_index, index_sum_criterion, SumDecision, SumRule};
use qcx_core::extcore::{BoxDomain, CertConfig, ExtReal, FunctionSpec, PairScan};
use qcx_core::l2basis::{build_example_10pt, build_refined_10pt};
use qcx_core::riskmeasure::{nqc_mu_interval, separating_dual_witness, MuInterval};

type E = ExtReal<f64>;

fn cfg() -> IndexConfig<f64> {
    IndexConfig::new(1e-4).with_cert(CertConfig::new(1e-13).with_scan(PairScan::Hybrid { radius: 4, coarse: 65 }))
}

fn dom(lo: f64, hi: f64) -> BoxDomain<f64> {
    BoxDomain::interval(lo, hi, 1025).unwrap()
}

#[test]
fn sqrt_index_is_minus_one_case_one() {
    let f = FunctionSpec::univariate_smooth(f64::sqrt, |x| 0.5 / x.sqrt(), |x| -0.25 * x.powf(-1.5));
    let c = compute_index(&f, &dom(1.0, 4.0), &cfg()).unwrap();
    assert!((c.value.to_float() + 1.0).abs() < 1e-3);
    assert_eq!(c.case, IndexCase::CaseI);
    assert_eq!(smooth_index_1d(&f, &dom(1.0, 4.0)).unwrap(), E::Finite(-1.0));
}

#[test]
fn neglog_and_square_indices() {
    let e = std::f64::consts::E;
    let nl = FunctionSpec::univariate_smooth(|y: f64| -y.ln(), |y| -1.0 / y, |y| 1.0 / (y * y));
    let c = compute_index(&nl, &dom(1.0, e), &cfg()).unwrap();
    assert!((c.value.to_float() - 1.0).abs() < 1e-3);
    assert_eq!(c.case, IndexCase::CaseII);
    let sq = FunctionSpec::univariate_smooth(|x: f64| x * x, |x| 2.0 * x, |_| 2.0);
    let c = compute_index(&sq, &dom(1.0, 2.0), &cfg()).unwrap();
    assert!((c.value.to_float() - 0.125).abs() < 1e-3);
    let s = smooth_index_1d(&sq, &dom(1.0, 2.0)).unwrap().to_float();
    assert!((s - 0.125).abs() < 1e-12);
}

#[test]
fn bracket_contains_value() {
    let sq = FunctionSpec::univariate(|x: f64| x * x);
    let c = compute_index(&sq, &dom(1.0, 2.0), &cfg()).unwrap();
    let (lo, hi) = c.bracket.unwrap();
    let v = c.value.to_float();
    assert!(lo <= v && v <= hi && hi - lo <= 1e-4);
}

#[test]
fn scaling_examples() {
    assert_eq!(scale_index(E::Finite(-1.0), 4.0), E::Finite(-0.25));
    assert_eq!(scale_index(E::Finite(1.0), 0.5), E::Finite(2.0));
    assert_eq!(scale_index(E::PosInf, 3.0), E::PosInf);
}

#[test]
fn sum_criteria_examples() {
    let v = index_sum_criterion(&[-1.0, 1.0 / 0.9], 1e-3).unwrap();
    assert_eq!(v.verdict, SumDecision::Quasiconvex);
    let v = index_sum_criterion(&[-1.0, 1.0 / 1.1], 1e-3).unwrap();
    assert_eq!(v.verdict, SumDecision::NotQuasiconvex);
    let v = characterize(&[-0.25, 1.0, 1.0], 1e-3).unwrap();
    assert_eq!(
        (v.verdict, v.rule),
        (SumDecision::Quasiconvex, SumRule::OneExceptionReciprocal)
    );
    assert_eq!(v.margin, E::Finite(2.0));
    let v = characterize(&[-1.0, 0.5], 1e-3).unwrap();
    assert_eq!(v.verdict, SumDecision::NotQuasiconvex);
    assert_eq!(v.margin, E::Finite(-1.0));
    let v = characterize(&[-1.0, -1.0, 5.0], 1e-3).unwrap();
    assert_eq!(v.rule, SumRule::SeveralNonConvex);
    let h = harmonic_index(&[E::Finite(0.125), E::Finite(1.0)]).unwrap();
    assert!((h.to_float() - 1.0 / 9.0).abs() < 1e-15);
    assert_eq!(harmonic_index(&[E::Finite(0.0), E::Finite(3.0)]).unwrap(), E::zero());
    assert_eq!(harmonic_index(&[E::PosInf, E::PosInf]).unwrap(), E::PosInf);
}

#[test]
fn mu_interval_examples() {
    let mu = nqc_mu_interval(&[1.0, 0.0], &[0.0, 1.0], &[0.5, 0.5], 0.0);
    assert_eq!(mu, MuInterval::Feasible { lo: 0.5, hi: 0.5 });
    let mu = nqc_mu_interval(&[1.0, 0.0], &[0.0, 1.0], &[0.9, 0.9], 1e-9);
    assert!(matches!(mu, MuInterval::Empty { .. }));
}

#[test]
fn separating_dual_example() {
    let d = separating_dual_witness(&[1.0f64, 0.0], &[0.0, 1.0], &[0.9, 0.9], &[0.5, 0.5]).unwrap();
    assert!((d.margin - 0.4).abs() < 1e-12);
    assert!((d.weights[0] - 0.5).abs() < 1e-12);
    assert!((d.z_star[0] - 1.0).abs() < 1e-12 && (d.z_star[1] - 1.0).abs() < 1e-12);
    assert!(separating_dual_witness(&[1.0, 0.0], &[0.0, 1.0], &[0.5, 0.5], &[0.5, 0.5]).is_none());
}

#[test]
fn fixture_dimensions() {
    let b = build_example_10pt::<f64>();
    assert_eq!(b.e_block_dims(), vec![1, 1, 1]);
    assert_eq!(b.beta_block_dims(), vec![3, 2, 2]);
    assert!(b.orthonormality_residual() < 1e-12);
    let r = build_refined_10pt::<f64>();
    assert_eq!(r.e_block_dims(), vec![2, 1, 1]);
    assert_eq!(r.beta_block_dims(), vec![2, 2, 2]);
    assert_eq!(r.basis().len(), 10);
}
