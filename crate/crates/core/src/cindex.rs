//! Convexity index `c(f)` by bisection over the exponent of `x -> exp(-lambda f(x))`.
//!
//! For `lambda < 0` the set of exponents with a convex transform is a down-set,
//! and for `lambda >= 0` the set with a concave transform is a down-set within
//! `[0, inf)`. Each bisection step is one grid certification of the transform.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::extcore::certify::{certify_concave, certify_convex, grid_values, CertConfig, Verdict};
use crate::extcore::domain::BoxDomain;
use crate::extcore::ext::ExtReal;
use crate::extcore::function::FunctionSpec;
use crate::scalar::Scalar;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum IndexCase {
    /// Some transform with negative exponent is not convex; `c(f) < 0`.
    #[serde(rename = "I")]
    CaseI,
    /// Every transform with negative exponent is convex; `c(f) >= 0`.
    #[serde(rename = "II")]
    CaseII,
}

/// One certified probe of the bisection.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LambdaProbe<T> {
    pub lambda: T,
    /// Convex (case I) or concave (case II) transform certified at this exponent.
    pub holds: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConvexityIndex<T> {
    pub value: ExtReal<T>,
    /// `[lambda_lo, lambda_hi]`: the property holds at `lo` and fails at `hi`.
    /// Absent for infinite values.
    pub bracket: Option<(T, T)>,
    pub case: IndexCase,
    pub lambda_cap: T,
    /// The value is infinite only because the probe at `+-lambda_cap` held.
    pub cap_probe: bool,
    /// Grid spread below the constancy threshold.
    pub constant: bool,
    pub iterations: usize,
    pub trace: Vec<LambdaProbe<T>>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct IndexConfig<T> {
    pub lambda_cap: T,
    /// Target bracket width.
    pub tol: T,
    pub max_iter: usize,
    /// Range spread on the grid under which `f` counts as constant.
    pub constant_spread: T,
    pub cert: CertConfig<T>,
}

impl<T: Scalar> IndexConfig<T> {
    /// Cap `1e4`, bracket width `tol`, 60 iterations, certifier tolerance `1e-13`.
    ///
    /// Transforms are evaluated normalized to values of order one, and the
    /// bisection error scales like the cube root of the certifier tolerance,
    /// hence the small default.
    pub fn new(tol: T) -> Self {
        Self {
            lambda_cap: T::lit(1e4),
            tol,
            max_iter: 60,
            constant_spread: T::lit(1e-10),
            cert: CertConfig::new(T::lit(1e-13)),
        }
    }

    pub fn with_cert(mut self, cert: CertConfig<T>) -> Self {
        self.cert = cert;
        self
    }

    pub fn with_cap(mut self, cap: T) -> Self {
        self.lambda_cap = cap;
        self
    }
}

impl Default for IndexConfig<f64> {
    fn default() -> Self {
        Self::new(1e-4)
    }
}

/// `x -> exp(-lambda f(x))`.
pub fn r_lambda<T: Scalar>(f: &FunctionSpec<T>, lambda: T) -> FunctionSpec<T> {
    f.r_lambda(lambda)
}

fn holds<T: Scalar>(v: &Verdict<T>) -> bool {
    !matches!(v, Verdict::Refuted(_))
}

pub fn compute_index<T: Scalar>(
    f: &FunctionSpec<T>,
    domain: &BoxDomain<T>,
    cfg: &IndexConfig<T>,
) -> Result<ConvexityIndex<T>> {
    if cfg.lambda_cap <= T::zero() || cfg.tol <= T::zero() {
        return Err(Error::InvalidArgument("lambda_cap and tol must be positive".into()));
    }
    let values = grid_values(f, domain)?;
    let finite: Vec<T> = values.iter().filter_map(|v| v.finite()).collect();
    let fmin = finite.iter().copied().fold(T::infinity(), T::min);
    let fmax = finite.iter().copied().fold(T::neg_infinity(), T::max);
    let all_finite = finite.len() == values.len();

    let mut out = ConvexityIndex {
        value: ExtReal::PosInf,
        bracket: None,
        case: IndexCase::CaseII,
        lambda_cap: cfg.lambda_cap,
        cap_probe: false,
        constant: false,
        iterations: 0,
        trace: Vec::new(),
    };
    if all_finite && fmax - fmin < cfg.constant_spread {
        out.constant = true;
        return Ok(out);
    }

    let convex_f = holds(&certify_convex(f, domain, &cfg.cert)?.verdict);
    let (case, reference) = if convex_f {
        (IndexCase::CaseII, fmin)
    } else {
        (IndexCase::CaseI, fmax)
    };
    out.case = case;

    let probe = |lambda: T, trace: &mut Vec<LambdaProbe<T>>| -> Result<bool> {
        let r = f.r_lambda_normalized(lambda, reference);
        let v = match case {
            IndexCase::CaseI => certify_convex(&r, domain, &cfg.cert)?.verdict,
            IndexCase::CaseII => certify_concave(&r, domain, &cfg.cert)?.verdict,
        };
        let ok = holds(&v);
        trace.push(LambdaProbe { lambda, holds: ok });
        Ok(ok)
    };

    let cap = cfg.lambda_cap;
    let (mut lo, mut hi) = match case {
        IndexCase::CaseI => {
            if !probe(-cap, &mut out.trace)? {
                out.value = ExtReal::NegInf;
                out.cap_probe = true;
                return Ok(out);
            }
            (-cap, T::zero())
        }
        IndexCase::CaseII => {
            if probe(cap, &mut out.trace)? {
                out.value = ExtReal::PosInf;
                out.cap_probe = true;
                return Ok(out);
            }
            (T::zero(), cap)
        }
    };

    let two = T::lit(2.0);
    while hi - lo > cfg.tol && out.iterations < cfg.max_iter {
        let mid = (lo + hi) / two;
        if probe(mid, &mut out.trace)? {
            lo = mid;
        } else {
            hi = mid;
        }
        out.iterations += 1;
    }
    out.bracket = Some((lo, hi));
    out.value = ExtReal::Finite((lo + hi) / two);
    Ok(out)
}

/// Closed-form index of a smooth univariate function: the infimum over grid nodes
/// of `f''(x) / f'(x)^2`, where a vanishing first derivative contributes `+inf`
/// unless `f'' < 0` there.
pub fn smooth_index_1d<T: Scalar>(f: &FunctionSpec<T>, domain: &BoxDomain<T>) -> Result<ExtReal<T>> {
    if f.dim() != 1 || domain.dim() != 1 {
        return Err(Error::InvalidArgument("smooth index is univariate only".into()));
    }
    if !f.has_derivatives() {
        return Err(Error::MissingDerivatives);
    }
    let mut best = ExtReal::PosInf;
    for p in domain.points() {
        let d1 = f.grad(&p).ok_or(Error::MissingDerivatives)?[0];
        let d2 = f.hess(&p).ok_or(Error::MissingDerivatives)?[0];
        let ratio = if d1 == T::zero() {
            if d2 < T::zero() {
                ExtReal::NegInf
            } else {
                ExtReal::PosInf
            }
        } else {
            ExtReal::new(d2 / (d1 * d1))
        };
        best = best.min(ratio);
    }
    Ok(best)
}

/// Index of `w f` from the index of `f`: `c(w f) = c(f) / w`, and `+inf` for `w = 0`.
///
/// # Panics
/// If `w` is negative.
pub fn scale_index<T: Scalar>(c: ExtReal<T>, w: T) -> ExtReal<T> {
    assert!(w >= T::zero(), "weight must be nonnegative");
    if w == T::zero() {
        ExtReal::PosInf
    } else {
        c.div_finite(w)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Classification {
    pub convex: bool,
    pub constant: bool,
}

/// Convex iff `c >= 0`; constant iff `c = +inf` (for lower semicontinuous `f`).
pub fn classify<T: Scalar>(c: &ConvexityIndex<T>) -> Classification {
    Classification {
        convex: c.value >= ExtReal::zero(),
        constant: c.value == ExtReal::PosInf,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::extcore::certify::PairScan;
    use std::f64::consts::E;

    fn coarse_cfg() -> IndexConfig<f64> {
        IndexConfig::new(1e-3).with_cert(CertConfig::new(1e-13).with_scan(PairScan::Exhaustive))
    }

    #[test]
    fn constant_has_infinite_index() {
        let f = FunctionSpec::constant(1, 3.0);
        let b = BoxDomain::interval(0.0, 1.0, 9).unwrap();
        let c = compute_index(&f, &b, &coarse_cfg()).unwrap();
        assert_eq!(c.value, ExtReal::PosInf);
        assert!(c.constant && !c.cap_probe);
        assert_eq!(
            classify(&c),
            Classification {
                convex: true,
                constant: true
            }
        );
    }

    #[test]
    fn negsquare_has_minus_infinity() {
        let f = FunctionSpec::univariate(|x: f64| -x * x);
        let b = BoxDomain::interval(-1.0, 1.0, 33).unwrap();
        let c = compute_index(&f, &b, &coarse_cfg()).unwrap();
        assert_eq!(c.value, ExtReal::NegInf);
        assert_eq!(c.case, IndexCase::CaseI);
        assert!(c.cap_probe);
    }

    #[test]
    fn neglog_index_is_one() {
        let f = FunctionSpec::univariate(|y: f64| -y.ln());
        let b = BoxDomain::interval(1.0, E, 65).unwrap();
        let c = compute_index(&f, &b, &coarse_cfg()).unwrap();
        assert_eq!(c.case, IndexCase::CaseII);
        assert!((c.value.finite().unwrap() - 1.0).abs() < 5e-3, "{:?}", c.value);
        let (lo, hi) = c.bracket.unwrap();
        assert!(hi - lo <= 1e-3);
    }

    #[test]
    fn power_concavity_matches_around_one() {
        // y^lambda on [1, e] is concave exactly for lambda <= 1
        let f = FunctionSpec::univariate(|y: f64| -y.ln());
        let b = BoxDomain::interval(1.0, E, 65).unwrap();
        let cfg = CertConfig::new(1e-13);
        for (lambda, concave) in [(0.9, true), (0.99, true), (1.01, false), (1.1, false)] {
            let r = certify_concave(&f.r_lambda(lambda), &b, &cfg).unwrap();
            assert_eq!(r.is_certified(), concave, "lambda = {lambda}");
        }
    }

    #[test]
    fn smooth_index_examples() {
        let sq = FunctionSpec::univariate_smooth(|x: f64| x * x, |x| 2.0 * x, |_| 2.0);
        let v = smooth_index_1d(&sq, &BoxDomain::interval(1.0, 2.0, 11).unwrap()).unwrap();
        assert!((v.finite().unwrap() - 0.125).abs() < 1e-15);

        let ex = FunctionSpec::univariate_smooth(f64::exp, f64::exp, f64::exp);
        let v = smooth_index_1d(&ex, &BoxDomain::interval(0.0, 1.0, 11).unwrap()).unwrap();
        assert!((v.finite().unwrap() - (-1.0f64).exp()).abs() < 1e-12);

        let nl = FunctionSpec::univariate_smooth(|x: f64| -x.ln(), |x| -1.0 / x, |x| 1.0 / (x * x));
        let v = smooth_index_1d(&nl, &BoxDomain::interval(1.0, E, 11).unwrap()).unwrap();
        assert!((v.finite().unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn smooth_index_stationary_points() {
        let sq = FunctionSpec::univariate_smooth(|x: f64| x * x, |x| 2.0 * x, |_| 2.0);
        // 0 is a node: f' = 0, f'' > 0 contributes +inf, others give 2/(4x^2) >= 0.5
        let v = smooth_index_1d(&sq, &BoxDomain::interval(-1.0, 1.0, 3).unwrap()).unwrap();
        assert_eq!(v, ExtReal::Finite(0.5));
        let ns = FunctionSpec::univariate_smooth(|x: f64| -x * x, |x| -2.0 * x, |_| -2.0);
        let v = smooth_index_1d(&ns, &BoxDomain::interval(-1.0, 1.0, 3).unwrap()).unwrap();
        assert_eq!(v, ExtReal::NegInf);
        let flat = FunctionSpec::univariate_smooth(|_: f64| 1.0, |_| 0.0, |_| 0.0);
        let v = smooth_index_1d(&flat, &BoxDomain::interval(-1.0, 1.0, 3).unwrap()).unwrap();
        assert_eq!(v, ExtReal::PosInf);
    }

    #[test]
    fn smooth_index_needs_derivatives() {
        let f = FunctionSpec::univariate(|x: f64| x);
        let b = BoxDomain::interval(0.0, 1.0, 5).unwrap();
        assert_eq!(smooth_index_1d(&f, &b), Err(Error::MissingDerivatives));
    }

    #[test]
    fn scaling_examples() {
        assert_eq!(scale_index(ExtReal::Finite(1.0), 2.0), ExtReal::Finite(0.5));
        assert_eq!(scale_index(ExtReal::Finite(-1.0), 0.5), ExtReal::Finite(-2.0));
        assert_eq!(scale_index(ExtReal::Finite(0.125), 0.0), ExtReal::PosInf);
        assert_eq!(scale_index(ExtReal::<f64>::NegInf, 3.0), ExtReal::NegInf);
    }

    #[test]
    fn classification_examples() {
        let mk = |v| ConvexityIndex {
            value: v,
            bracket: None,
            case: IndexCase::CaseII,
            lambda_cap: 1e4,
            cap_probe: false,
            constant: false,
            iterations: 0,
            trace: vec![],
        };
        assert_eq!(
            classify(&mk(ExtReal::Finite(0.125))),
            Classification {
                convex: true,
                constant: false
            }
        );
        assert_eq!(
            classify(&mk(ExtReal::Finite(-1.0))),
            Classification {
                convex: false,
                constant: false
            }
        );
        assert_eq!(
            classify(&mk(ExtReal::PosInf)),
            Classification {
                convex: true,
                constant: true
            }
        );
    }
}
