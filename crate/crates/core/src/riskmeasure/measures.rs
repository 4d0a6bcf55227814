use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::scalar::Scalar;

use super::space::{atom_means, FiniteProbSpace, PartitionSigma};

/// Map from outcome vectors to outcome vectors. Implementations must be
/// reentrant: the checkers call them from several threads at once.
pub type MapFn<T> = Arc<dyn Fn(&[T], &FiniteProbSpace<T>) -> Vec<T> + Send + Sync>;

/// A conditional map `X -> rho(X)` whose outputs are declared measurable with
/// respect to `sigma`. Only measurability is enforced; every other property is
/// a claim for the checkers to test.
#[derive(Clone)]
pub struct RiskMeasure<T> {
    name: String,
    sigma: PartitionSigma,
    map: MapFn<T>,
}

impl<T> fmt::Debug for RiskMeasure<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("RiskMeasure")
            .field("name", &self.name)
            .field("sigma", &self.sigma)
            .finish_non_exhaustive()
    }
}

impl<T: Scalar> RiskMeasure<T> {
    pub fn new<F>(name: impl Into<String>, sigma: PartitionSigma, map: F) -> Self
    where
        F: Fn(&[T], &FiniteProbSpace<T>) -> Vec<T> + Send + Sync + 'static,
    {
        Self {
            name: name.into(),
            sigma,
            map: Arc::new(map),
        }
    }

    /// Builds `rho` from per-atom functions of the atom means:
    /// `rho(X) = g(a, E[X | A_a])` on atom `a`.
    pub fn cellwise_of_means<G>(name: impl Into<String>, sigma: PartitionSigma, g: G) -> Self
    where
        G: Fn(usize, T) -> T + Send + Sync + 'static,
    {
        let s = sigma.clone();
        Self::new(name, sigma, move |x, p| {
            let m = atom_means(x, &s, p);
            let per: Vec<T> = m.iter().enumerate().map(|(a, &v)| g(a, v)).collect();
            s.broadcast(&per)
        })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn sigma(&self) -> &PartitionSigma {
        &self.sigma
    }

    /// Evaluates and checks that the output is finite and constant on atoms.
    pub fn evaluate(&self, x: &[T], space: &FiniteProbSpace<T>) -> Result<Vec<T>> {
        let n = space.n();
        if x.len() != n || self.sigma.n_outcomes() != n {
            return Err(Error::InvalidArgument(format!(
                "measure '{}' expects {} outcomes, got input of length {} on a space of {n}",
                self.name,
                self.sigma.n_outcomes(),
                x.len()
            )));
        }
        let out = (self.map)(x, space);
        if out.len() != n {
            return Err(Error::InvalidArgument(format!(
                "measure '{}' returned {} values for {n} outcomes",
                self.name,
                out.len()
            )));
        }
        if let Some(outcome) = out.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFinite {
                measure: self.name.clone(),
                outcome,
            });
        }
        if let Some(atom) = self.sigma.first_nonconstant_atom(&out) {
            return Err(Error::NotMeasurable {
                measure: self.name.clone(),
                atom,
            });
        }
        Ok(out)
    }

    /// Per-atom values of `rho(X)`.
    pub fn evaluate_atoms(&self, x: &[T], space: &FiniteProbSpace<T>) -> Result<Vec<T>> {
        Ok(self.sigma.atom_values(&self.evaluate(x, space)?))
    }

    /// `rho(X) = -E[X | G]`.
    pub fn neg_conditional_mean(sigma: PartitionSigma) -> Self {
        Self::cellwise_of_means("neg-cond-mean", sigma, |_, m: T| -m)
    }

    /// `rho(X) = E[X | G]`, the wrong-sign counterpart.
    pub fn conditional_mean(sigma: PartitionSigma) -> Self {
        Self::cellwise_of_means("cond-mean", sigma, |_, m| m)
    }

    /// `rho(X) = E[X | coarse]`, declared against a finer `sigma`.
    pub fn coarse_conditional_mean(coarse: PartitionSigma, sigma: PartitionSigma) -> Result<Self> {
        if !sigma.refines(&coarse) {
            return Err(Error::InvalidPartition(
                "the coarse partition must be a union of declared atoms".into(),
            ));
        }
        let c = coarse.clone();
        Ok(Self::new("coarse-cond-mean", sigma, move |x, p| {
            c.broadcast(&atom_means(x, &c, p))
        }))
    }

    /// `rho(X) = inverse(E[loss(-X) | G])`. The inverse is probed on `[-10, 10]`.
    pub fn certainty_equivalent<L, I>(
        name: impl Into<String>,
        sigma: PartitionSigma,
        loss: L,
        inverse: I,
    ) -> Result<Self>
    where
        L: Fn(T) -> T + Send + Sync + 'static,
        I: Fn(T) -> T + Send + Sync + 'static,
    {
        for k in -20..=20 {
            let t = T::lit(k as f64 * 0.5);
            let back = inverse(loss(t));
            let tol = T::lit(1e-9) * (T::one() + t.abs());
            if !((back - t).abs() <= tol.max(T::epsilon() * T::lit(64.0) * (T::one() + t.abs()))) {
                return Err(Error::InverseMismatch {
                    at: t.to_f64_lossy(),
                    got: back.to_f64_lossy(),
                });
            }
        }
        let s = sigma.clone();
        Ok(Self::new(name, sigma, move |x, p| {
            let lx: Vec<T> = x.iter().map(|&v| loss(-v)).collect();
            let per: Vec<T> = atom_means(&lx, &s, p).into_iter().map(&inverse).collect();
            s.broadcast(&per)
        }))
    }

    /// Entropic certainty equivalent `ln E[exp(-X) | G]`.
    pub fn entropic(sigma: PartitionSigma) -> Self {
        Self::certainty_equivalent("entropic", sigma, T::exp, T::ln).expect("exp and ln are mutually inverse")
    }

    /// `rho(X) = (-E[X | G])^3`.
    pub fn cubed_mean(sigma: PartitionSigma) -> Self {
        Self::cellwise_of_means("cubed-mean", sigma, |_, m: T| -(m * m * m))
    }

    /// `rho(X) = -E[X]`, broadcast regardless of `G`.
    pub fn mean_broadcast(sigma: PartitionSigma) -> Self {
        Self::new("mean-broadcast", sigma, |x, p| vec![-p.expectation(x); x.len()])
    }

    /// `rho(X) = -E[X 1_{A0^c} | G]`, blind to atom `blind`.
    pub fn blind_spot(sigma: PartitionSigma, blind: usize) -> Result<Self> {
        if blind >= sigma.n_atoms() {
            return Err(Error::InvalidArgument(format!("atom {blind} does not exist")));
        }
        let s = sigma.clone();
        Ok(Self::new("blind-spot", sigma, move |x, p| {
            let masked: Vec<T> = x
                .iter()
                .enumerate()
                .map(|(i, &v)| if s.atom_of(i) == blind { T::zero() } else { v })
                .collect();
            let per: Vec<T> = atom_means(&masked, &s, p).into_iter().map(|m| -m).collect();
            s.broadcast(&per)
        }))
    }

    /// `rho = 0`.
    pub fn zero(sigma: PartitionSigma) -> Self {
        Self::new("zero", sigma, |x, _| vec![T::zero(); x.len()])
    }

    /// Cellwise map of atom means cycling through `sqrt(m + 4)` (index `-1` on
    /// `m in [-3, 3]`), `-ln(m + 4) / 2` (index `2`) and `-m` (index `0`). Each
    /// piece is monotone, so the map is quasiconvex and local but has
    /// scalarizations with a negative reciprocal-index test. Defined for means
    /// above `-4`.
    pub fn sqrt_log_demo(sigma: PartitionSigma) -> Self {
        let four = T::lit(4.0);
        let half = T::lit(0.5);
        Self::cellwise_of_means("sqrt-log-demo", sigma, move |a, m: T| match a % 3 {
            0 => (m + four).sqrt(),
            1 => -half * (m + four).ln(),
            _ => -m,
        })
    }
}
