use std::fmt;
use std::sync::Arc;

use crate::extcore::ext::{ext_exp_neg, ExtReal};
use crate::scalar::Scalar;

pub type EvalFn<T> = Arc<dyn Fn(&[T]) -> ExtReal<T> + Send + Sync>;
pub type GradFn<T> = Arc<dyn Fn(&[T]) -> Vec<T> + Send + Sync>;

/// Extended-real function on `R^dim` given by oracles.
///
/// Oracles must be reentrant: certifiers call them from several threads.
/// The Hessian oracle returns the full matrix in row-major order.
#[derive(Clone)]
pub struct FunctionSpec<T> {
    dim: usize,
    eval: EvalFn<T>,
    grad: Option<GradFn<T>>,
    hess: Option<GradFn<T>>,
    proper: bool,
    label: String,
}

impl<T: Scalar> FunctionSpec<T> {
    pub fn new<F>(dim: usize, eval: F) -> Self
    where
        F: Fn(&[T]) -> ExtReal<T> + Send + Sync + 'static,
    {
        assert!(dim > 0, "dimension must be positive");
        Self {
            dim,
            eval: Arc::new(eval),
            grad: None,
            hess: None,
            proper: true,
            label: String::from("f"),
        }
    }

    /// Univariate real-valued function.
    pub fn univariate<F>(f: F) -> Self
    where
        F: Fn(T) -> T + Send + Sync + 'static,
    {
        Self::new(1, move |x: &[T]| ExtReal::new(f(x[0])))
    }

    /// Univariate function with first and second derivative oracles.
    pub fn univariate_smooth<F, D1, D2>(f: F, d1: D1, d2: D2) -> Self
    where
        F: Fn(T) -> T + Send + Sync + 'static,
        D1: Fn(T) -> T + Send + Sync + 'static,
        D2: Fn(T) -> T + Send + Sync + 'static,
    {
        Self::univariate(f)
            .with_grad(move |x: &[T]| vec![d1(x[0])])
            .with_hess(move |x: &[T]| vec![d2(x[0])])
    }

    pub fn constant(dim: usize, value: T) -> Self {
        Self::new(dim, move |_| ExtReal::new(value)).labeled("const")
    }

    pub fn with_grad<G>(mut self, grad: G) -> Self
    where
        G: Fn(&[T]) -> Vec<T> + Send + Sync + 'static,
    {
        self.grad = Some(Arc::new(grad));
        self
    }

    pub fn with_hess<H>(mut self, hess: H) -> Self
    where
        H: Fn(&[T]) -> Vec<T> + Send + Sync + 'static,
    {
        self.hess = Some(Arc::new(hess));
        self
    }

    pub fn labeled(mut self, label: impl Into<String>) -> Self {
        self.label = label.into();
        self
    }

    /// Marks the function as not claimed proper (e.g. exponential transforms).
    pub fn improper(mut self) -> Self {
        self.proper = false;
        self
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn is_proper(&self) -> bool {
        self.proper
    }

    pub fn eval(&self, x: &[T]) -> ExtReal<T> {
        debug_assert_eq!(x.len(), self.dim);
        (self.eval)(x)
    }

    pub fn grad(&self, x: &[T]) -> Option<Vec<T>> {
        self.grad.as_ref().map(|g| g(x))
    }

    pub fn hess(&self, x: &[T]) -> Option<Vec<T>> {
        self.hess.as_ref().map(|h| h(x))
    }

    pub fn has_derivatives(&self) -> bool {
        self.grad.is_some() && self.hess.is_some()
    }

    /// `x -> w * f(x)` for `w >= 0`; derivative oracles are scaled along.
    pub fn scaled(&self, w: T) -> Self {
        let eval = self.eval.clone();
        let mut out = Self {
            dim: self.dim,
            eval: Arc::new(move |x: &[T]| eval(x).scale(w)),
            grad: None,
            hess: None,
            proper: self.proper,
            label: format!("{}*{}", w, self.label),
        };
        if let Some(g) = self.grad.clone() {
            out.grad = Some(Arc::new(move |x: &[T]| g(x).into_iter().map(|v| v * w).collect()));
        }
        if let Some(h) = self.hess.clone() {
            out.hess = Some(Arc::new(move |x: &[T]| h(x).into_iter().map(|v| v * w).collect()));
        }
        out
    }

    /// `x -> f(x) + shift`.
    pub fn shifted(&self, shift: T) -> Self {
        let eval = self.eval.clone();
        Self {
            dim: self.dim,
            eval: Arc::new(move |x: &[T]| eval(x) + ExtReal::Finite(shift)),
            grad: self.grad.clone(),
            hess: self.hess.clone(),
            proper: self.proper,
            label: format!("{}+{}", self.label, shift),
        }
    }

    /// `x -> exp(-lambda * f(x))`.
    pub fn r_lambda(&self, lambda: T) -> Self {
        self.r_lambda_normalized(lambda, T::zero())
    }

    /// `x -> exp(-lambda * (f(x) - reference))`, a positive multiple of `r_lambda`.
    ///
    /// Positive rescaling preserves convexity and concavity; choosing the reference
    /// near the extreme value of `f` keeps the transform inside floating range.
    pub fn r_lambda_normalized(&self, lambda: T, reference: T) -> Self {
        let eval = self.eval.clone();
        let shift = ExtReal::Finite(-reference);
        Self {
            dim: self.dim,
            eval: Arc::new(move |x: &[T]| ext_exp_neg(lambda, eval(x) + shift)),
            grad: None,
            hess: None,
            proper: false,
            label: format!("exp(-{}*{})", lambda, self.label),
        }
    }

    /// Additively separable sum `s(x_1, .., x_n) = f_1(x_1) + .. + f_n(x_n)` on the
    /// concatenated coordinates.
    pub fn separable_sum(parts: &[FunctionSpec<T>]) -> Self {
        let dims: Vec<usize> = parts.iter().map(|p| p.dim).collect();
        let total = dims.iter().sum();
        let evals: Vec<EvalFn<T>> = parts.iter().map(|p| p.eval.clone()).collect();
        let label = parts.iter().map(|p| p.label.as_str()).collect::<Vec<_>>().join(" + ");
        let proper = parts.iter().all(|p| p.proper);
        let mut out = Self::new(total, move |x: &[T]| {
            let mut acc = ExtReal::zero();
            let mut off = 0;
            for (e, &d) in evals.iter().zip(&dims) {
                acc = acc + e(&x[off..off + d]);
                off += d;
            }
            acc
        })
        .labeled(label);
        out.proper = proper;
        out
    }
}

impl<T> fmt::Debug for FunctionSpec<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("FunctionSpec")
            .field("label", &self.label)
            .field("dim", &self.dim)
            .field("grad", &self.grad.is_some())
            .field("hess", &self.hess.is_some())
            .field("proper", &self.proper)
            .finish()
    }
}
