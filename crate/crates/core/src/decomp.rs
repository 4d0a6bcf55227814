//! Quasiconvexity of additively decomposable sums `s(x_1, .., x_n) = f_1(x_1) + .. + f_n(x_n)`
//! decided from coordinate convexity indices, with a product-grid brute-force oracle.

use serde::Serialize;

use crate::cindex::{compute_index, ConvexityIndex, IndexConfig};
use crate::error::{Error, Result};
use crate::extcore::certify::{certify_quasiconvex, CertConfig, CertResult, PairScan};
use crate::extcore::domain::BoxDomain;
use crate::extcore::ext::ExtReal;
use crate::extcore::function::FunctionSpec;
use crate::scalar::Scalar;

/// Margin band inside which a verdict is flagged as boundary.
pub const DEFAULT_TOL_MARGIN: f64 = 1e-3;

/// Default product-grid pair budget for the brute-force oracle.
pub const DEFAULT_PAIR_BUDGET: u128 = 1_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SumDecision {
    Quasiconvex,
    NotQuasiconvex,
    BoundaryInconclusive,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SumRule {
    /// Every coordinate index is nonnegative.
    AllConvex,
    /// Exactly one negative index; reciprocal sum tested against zero.
    OneExceptionReciprocal,
    /// Two or more negative indices.
    SeveralNonConvex,
    /// Index sum tested against zero.
    IndexSum,
    /// Truncated reciprocal series with a declared tail.
    PartialReciprocalSum,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SumVerdict<T> {
    pub verdict: SumDecision,
    pub rule: SumRule,
    /// Signed distance of the tested quantity from its threshold; positive
    /// favours quasiconvexity.
    pub margin: ExtReal<T>,
    /// `|margin|` is below the configured band.
    pub boundary: bool,
    /// Number of indices inspected (relevant for series).
    pub inspected: usize,
}

fn check_finite<T: Scalar>(indices: &[T]) -> Result<()> {
    for (position, &c) in indices.iter().enumerate() {
        if !c.is_finite() {
            return Err(Error::InfiniteIndex {
                position,
                value: format!("{c}"),
            });
        }
    }
    Ok(())
}

fn decide<T: Scalar>(rule: SumRule, margin: ExtReal<T>, band: T, inspected: usize) -> SumVerdict<T> {
    let band_ext = ExtReal::Finite(band);
    let boundary = margin < band_ext && margin > -band_ext;
    let verdict = if margin >= ExtReal::zero() {
        SumDecision::Quasiconvex
    } else if boundary {
        SumDecision::BoundaryInconclusive
    } else {
        SumDecision::NotQuasiconvex
    };
    SumVerdict {
        verdict,
        rule,
        margin,
        boundary,
        inspected,
    }
}

/// Index-sum test. Two factors: `c_1 + c_2 >= 0`. With more factors the convex
/// coordinates are merged first through [`harmonic_index`], so the test reads
/// `c_neg + c(rest) >= 0`; with two or more negative indices the sum is not
/// quasiconvex.
pub fn index_sum_criterion<T: Scalar>(indices: &[T], tol_margin: T) -> Result<SumVerdict<T>> {
    check_finite(indices)?;
    if indices.len() < 2 {
        return Err(Error::InvalidArgument("a sum needs at least two coordinates".into()));
    }
    let n = indices.len();
    if n == 2 {
        let m = ExtReal::new(indices[0] + indices[1]);
        return Ok(decide(SumRule::IndexSum, m, tol_margin, n));
    }
    let negatives: Vec<usize> = (0..n).filter(|&i| indices[i] < T::zero()).collect();
    match negatives.len() {
        0 => {
            let m = ExtReal::new(indices.iter().copied().sum::<T>());
            Ok(decide(SumRule::IndexSum, m, tol_margin, n))
        }
        1 => {
            let k = negatives[0];
            let rest: Vec<ExtReal<T>> = (0..n)
                .filter(|&i| i != k)
                .map(|i| ExtReal::Finite(indices[i]))
                .collect();
            let m = ExtReal::Finite(indices[k]) + harmonic_index(&rest)?;
            Ok(decide(SumRule::IndexSum, m, tol_margin, n))
        }
        _ => {
            let m = ExtReal::new(negatives.iter().map(|&i| indices[i]).sum::<T>());
            let mut v = decide(SumRule::SeveralNonConvex, m, tol_margin, n);
            v.verdict = SumDecision::NotQuasiconvex;
            Ok(v)
        }
    }
}

/// All-but-one-convex characterization: all indices nonnegative, or exactly one
/// negative index and `sum 1/c_i <= 0` (with `1/0 = +inf`).
pub fn characterize<T: Scalar>(indices: &[T], tol_margin: T) -> Result<SumVerdict<T>> {
    check_finite(indices)?;
    let n = indices.len();
    let negatives = indices.iter().filter(|&&c| c < T::zero()).count();
    match negatives {
        0 => Ok(SumVerdict {
            verdict: SumDecision::Quasiconvex,
            rule: SumRule::AllConvex,
            margin: ExtReal::new(indices.iter().copied().fold(T::infinity(), T::min)),
            boundary: false,
            inspected: n,
        }),
        1 => {
            let recip = indices
                .iter()
                .map(|&c| ExtReal::Finite(c).recip())
                .fold(ExtReal::zero(), |a, b| a + b);
            Ok(decide(SumRule::OneExceptionReciprocal, -recip, tol_margin, n))
        }
        _ => Ok(SumVerdict {
            verdict: SumDecision::NotQuasiconvex,
            rule: SumRule::SeveralNonConvex,
            margin: ExtReal::new(indices.iter().filter(|&&c| c < T::zero()).copied().sum::<T>()),
            boundary: false,
            inspected: n,
        }),
    }
}

/// Index of a sum of convex coordinates: `1 / sum(1/c_i)`; any zero index gives 0
/// and all-infinite indices give `+inf`.
pub fn harmonic_index<T: Scalar>(indices: &[ExtReal<T>]) -> Result<ExtReal<T>> {
    for (position, c) in indices.iter().enumerate() {
        if *c < ExtReal::zero() {
            return Err(Error::NegativeIndex {
                position,
                value: c.to_string(),
            });
        }
    }
    let total = indices.iter().map(|c| c.recip()).fold(ExtReal::zero(), |a, b| a + b);
    Ok(total.recip())
}

/// What the caller asserts about the indices beyond the inspected prefix.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TailDeclaration<T> {
    /// Upper bound on `sum_{i > N} 1/c_i` after `N` terms, given as `scale / N`
    /// (the integral bound for `1/i^2`-type tails) plus `constant`.
    pub scale_over_n: T,
    pub constant: T,
}

impl<T: Scalar> TailDeclaration<T> {
    pub fn bound(&self, n: usize) -> T {
        self.scale_over_n / T::from_usize(n).unwrap() + self.constant
    }
}

/// Truncated test for infinite sums. Reads up to `n_max` indices.
///
/// * a second negative index or a positive partial reciprocal sum after the
///   exception decides `NotQuasiconvex` immediately (later convex terms only
///   increase it);
/// * otherwise, after `n_max` terms, a declared tail bound decides
///   `Quasiconvex` when `a_N + tail(N) <= 0` (or when no exception was seen);
/// * anything else is `BoundaryInconclusive`.
///
/// The tail declaration also asserts that every later coordinate is convex;
/// it is trusted, not verified.
pub fn infinite_sum_criterion<T, I>(
    index_stream: I,
    n_max: usize,
    tail: Option<TailDeclaration<T>>,
) -> Result<SumVerdict<T>>
where
    T: Scalar,
    I: IntoIterator<Item = T>,
{
    let mut partial = ExtReal::zero();
    let mut exception = false;
    let mut seen = 0usize;
    for (position, c) in index_stream.into_iter().take(n_max).enumerate() {
        if !c.is_finite() {
            return Err(Error::InfiniteIndex {
                position,
                value: format!("{c}"),
            });
        }
        seen += 1;
        if c < T::zero() {
            if exception {
                return Ok(SumVerdict {
                    verdict: SumDecision::NotQuasiconvex,
                    rule: SumRule::SeveralNonConvex,
                    margin: -partial,
                    boundary: false,
                    inspected: seen,
                });
            }
            exception = true;
        }
        partial = partial + ExtReal::Finite(c).recip();
        if exception && partial > ExtReal::zero() {
            return Ok(SumVerdict {
                verdict: SumDecision::NotQuasiconvex,
                rule: SumRule::PartialReciprocalSum,
                margin: -partial,
                boundary: false,
                inspected: seen,
            });
        }
    }
    if seen == 0 {
        return Err(Error::InvalidArgument("empty index stream".into()));
    }
    let verdict = match (tail, exception) {
        (Some(_), false) => SumVerdict {
            verdict: SumDecision::Quasiconvex,
            rule: SumRule::AllConvex,
            margin: ExtReal::PosInf,
            boundary: false,
            inspected: seen,
        },
        (Some(t), true) => {
            let upper = partial + ExtReal::Finite(t.bound(seen));
            SumVerdict {
                verdict: if upper <= ExtReal::zero() {
                    SumDecision::Quasiconvex
                } else {
                    SumDecision::BoundaryInconclusive
                },
                rule: SumRule::PartialReciprocalSum,
                margin: -upper,
                boundary: false,
                inspected: seen,
            }
        }
        (None, _) => SumVerdict {
            verdict: SumDecision::BoundaryInconclusive,
            rule: SumRule::PartialReciprocalSum,
            margin: -partial,
            boundary: false,
            inspected: seen,
        },
    };
    Ok(verdict)
}

/// Coordinate functions with their boxes.
#[derive(Debug, Clone)]
pub struct DecomposableSum<T> {
    coords: Vec<(FunctionSpec<T>, BoxDomain<T>)>,
    indices: Option<Vec<ConvexityIndex<T>>>,
}

impl<T: Scalar> DecomposableSum<T> {
    pub fn new(coords: Vec<(FunctionSpec<T>, BoxDomain<T>)>) -> Result<Self> {
        if coords.is_empty() {
            return Err(Error::InvalidArgument("empty sum".into()));
        }
        for (i, (f, b)) in coords.iter().enumerate() {
            if f.dim() != b.dim() {
                return Err(Error::InvalidArgument(format!(
                    "coordinate {i}: function dimension {} vs box dimension {}",
                    f.dim(),
                    b.dim()
                )));
            }
        }
        Ok(Self { coords, indices: None })
    }

    pub fn coords(&self) -> &[(FunctionSpec<T>, BoxDomain<T>)] {
        &self.coords
    }

    /// The joint function on the product box.
    pub fn joint(&self) -> Result<(FunctionSpec<T>, BoxDomain<T>)> {
        let fs: Vec<FunctionSpec<T>> = self.coords.iter().map(|(f, _)| f.clone()).collect();
        let bs: Vec<BoxDomain<T>> = self.coords.iter().map(|(_, b)| b.clone()).collect();
        Ok((FunctionSpec::separable_sum(&fs), BoxDomain::product(&bs)?))
    }

    /// Computes and caches the coordinate indices.
    pub fn indices(&mut self, cfg: &IndexConfig<T>) -> Result<&[ConvexityIndex<T>]> {
        if self.indices.is_none() {
            let v = self
                .coords
                .iter()
                .map(|(f, b)| compute_index(f, b, cfg))
                .collect::<Result<Vec<_>>>()?;
            self.indices = Some(v);
        }
        Ok(self.indices.as_deref().unwrap())
    }

    pub fn cached_indices(&self) -> Option<&[ConvexityIndex<T>]> {
        self.indices.as_deref()
    }
}

/// Exhaustive product-grid quasiconvexity scan of the joint sum.
pub fn brute_force_sum_quasiconvex<T: Scalar>(
    sum: &DecomposableSum<T>,
    tol: T,
    pair_budget: u128,
) -> Result<CertResult<T>> {
    let (s, b) = sum.joint()?;
    let n = b.total_points() as u128;
    let needed = n * n.saturating_sub(1) / 2;
    if needed > pair_budget {
        return Err(Error::BudgetExceeded {
            needed,
            budget: pair_budget,
        });
    }
    let cfg = CertConfig::new(tol).with_scan(PairScan::Exhaustive);
    certify_quasiconvex(&s, &b, &cfg)
}
