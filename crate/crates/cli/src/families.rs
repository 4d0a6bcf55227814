//! Built-in univariate function families.

use qcx_core::extcore::{BoxDomain, FunctionSpec};

use crate::config::{Family, FunctionDecl};

/// Piecewise-linear interpolation of `values` on equispaced nodes over `[lo, hi]`.
fn table(values: Vec<f64>, lo: f64, hi: f64) -> FunctionSpec<f64> {
    let k = values.len() - 1;
    FunctionSpec::univariate(move |x: f64| {
        let s = ((x - lo) / (hi - lo) * k as f64).clamp(0.0, k as f64);
        let i = (s.floor() as usize).min(k - 1);
        let t = s - i as f64;
        values[i] * (1.0 - t) + values[i + 1] * t
    })
}

pub fn build_function(d: &FunctionDecl) -> FunctionSpec<f64> {
    let base = match d.family {
        Family::Affine => {
            let (a, b) = (d.params[0], d.params[1]);
            FunctionSpec::univariate_smooth(move |x| a * x + b, move |_| a, |_| 0.0)
        }
        Family::Square => FunctionSpec::univariate_smooth(|x| x * x, |x| 2.0 * x, |_| 2.0),
        Family::Sqrt => FunctionSpec::univariate_smooth(f64::sqrt, |x| 0.5 / x.sqrt(), |x| -0.25 * x.powf(-1.5)),
        Family::Neglog => FunctionSpec::univariate_smooth(|x: f64| -x.ln(), |x| -1.0 / x, |x| 1.0 / (x * x)),
        Family::Exp => {
            let s = d.params.first().copied().unwrap_or(1.0);
            FunctionSpec::univariate_smooth(
                move |x: f64| (s * x).exp(),
                move |x| s * (s * x).exp(),
                move |x| s * s * (s * x).exp(),
            )
        }
        Family::Negsquare => FunctionSpec::univariate_smooth(|x: f64| -x * x, |x| -2.0 * x, |_| -2.0),
        Family::Const => {
            let c = d.params[0];
            FunctionSpec::univariate_smooth(move |_| c, |_| 0.0, |_| 0.0)
        }
        Family::Table => table(d.values.clone(), d.domain.0, d.domain.1),
    };
    let f = if d.weight == 1.0 { base } else { base.scaled(d.weight) };
    f.labeled(d.name.clone())
}

pub fn build_domain(d: &FunctionDecl) -> qcx_core::Result<BoxDomain<f64>> {
    BoxDomain::interval(d.domain.0, d.domain.1, d.points)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn decl(family: Family, params: Vec<f64>, values: Vec<f64>) -> FunctionDecl {
        FunctionDecl {
            name: "f".into(),
            family,
            params,
            weight: 2.0,
            domain: (0.0, 2.0),
            points: 5,
            values,
            line: 1,
        }
    }

    #[test]
    fn families_evaluate() {
        let f = build_function(&decl(Family::Affine, vec![3.0, 1.0], vec![]));
        assert_eq!(f.eval(&[1.0]).finite(), Some(8.0));
        assert_eq!(f.grad(&[1.0]), Some(vec![6.0]));
        let t = build_function(&decl(Family::Table, vec![], vec![0.0, 1.0, 4.0]));
        assert_eq!(t.eval(&[1.5]).finite(), Some(5.0));
        assert_eq!(t.eval(&[2.0]).finite(), Some(8.0));
        assert!(!t.has_derivatives());
    }
}
