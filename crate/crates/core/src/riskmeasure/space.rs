use std::ops::Deref;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::scalar::{weighted_dot, Scalar};

/// Finite outcome set `{0, .., n-1}` with strictly positive probabilities.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FiniteProbSpace<T> {
    probs: Vec<T>,
}

impl<T: Scalar> FiniteProbSpace<T> {
    pub fn new(probs: Vec<T>) -> Result<Self> {
        if probs.is_empty() {
            return Err(Error::InvalidSpace("no outcomes".into()));
        }
        if let Some(i) = probs.iter().position(|p| !(p.is_finite() && *p > T::zero())) {
            return Err(Error::InvalidSpace(format!("outcome {i} has probability {}", probs[i])));
        }
        let total: T = probs.iter().copied().sum();
        let slack = T::lit(1e-12).max(T::epsilon() * T::from_usize(4 * probs.len()).unwrap());
        if (total - T::one()).abs() > slack {
            return Err(Error::InvalidSpace(format!("probabilities sum to {total}")));
        }
        Ok(Self { probs })
    }

    pub fn uniform(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidSpace("no outcomes".into()));
        }
        let p = T::one() / T::from_usize(n).unwrap();
        Ok(Self { probs: vec![p; n] })
    }

    pub fn n(&self) -> usize {
        self.probs.len()
    }

    pub fn probs(&self) -> &[T] {
        &self.probs
    }

    /// Probability of a set of outcomes.
    pub fn prob_of(&self, outcomes: &[usize]) -> T {
        outcomes.iter().map(|&i| self.probs[i]).sum()
    }

    pub fn expectation(&self, x: &[T]) -> T {
        self.probs.iter().zip(x).map(|(&p, &v)| p * v).sum()
    }

    /// `E[XY]`.
    pub fn inner(&self, x: &[T], y: &[T]) -> T {
        weighted_dot(&self.probs, x, y)
    }

    pub fn norm(&self, x: &[T]) -> T {
        self.inner(x, x).sqrt()
    }
}

/// Sub-sigma-algebra generated by a partition of the outcomes into atoms.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PartitionSigma {
    atoms: Vec<Vec<usize>>,
    #[serde(skip)]
    atom_of: Vec<usize>,
}

impl PartitionSigma {
    pub fn new(n: usize, atoms: Vec<Vec<usize>>) -> Result<Self> {
        let mut atom_of = vec![usize::MAX; n];
        for (a, atom) in atoms.iter().enumerate() {
            if atom.is_empty() {
                return Err(Error::InvalidPartition(format!("atom {a} is empty")));
            }
            for &i in atom {
                if i >= n {
                    return Err(Error::InvalidPartition(format!("outcome {i} out of range 0..{n}")));
                }
                if atom_of[i] != usize::MAX {
                    return Err(Error::InvalidPartition(format!(
                        "outcome {i} in atoms {} and {a}",
                        atom_of[i]
                    )));
                }
                atom_of[i] = a;
            }
        }
        if let Some(i) = atom_of.iter().position(|&a| a == usize::MAX) {
            return Err(Error::InvalidPartition(format!("outcome {i} is not covered")));
        }
        Ok(Self { atoms, atom_of })
    }

    pub fn trivial(n: usize) -> Self {
        Self::new(n, vec![(0..n).collect()]).expect("nonempty space")
    }

    pub fn discrete(n: usize) -> Self {
        Self::new(n, (0..n).map(|i| vec![i]).collect()).expect("nonempty space")
    }

    /// Consecutive blocks of the given sizes.
    pub fn from_sizes(sizes: &[usize]) -> Result<Self> {
        let mut start = 0;
        let atoms = sizes
            .iter()
            .map(|&s| {
                let a: Vec<usize> = (start..start + s).collect();
                start += s;
                a
            })
            .collect();
        Self::new(start, atoms)
    }

    pub fn atoms(&self) -> &[Vec<usize>] {
        &self.atoms
    }

    pub fn n_atoms(&self) -> usize {
        self.atoms.len()
    }

    pub fn n_outcomes(&self) -> usize {
        self.atom_of.len()
    }

    pub fn atom_of(&self, outcome: usize) -> usize {
        self.atom_of[outcome]
    }

    /// Outcomes of a union of atoms.
    pub fn event(&self, atoms: &[usize]) -> Vec<usize> {
        let mut v: Vec<usize> = atoms.iter().flat_map(|&a| self.atoms[a].iter().copied()).collect();
        v.sort_unstable();
        v
    }

    pub fn atom_probs<T: Scalar>(&self, space: &FiniteProbSpace<T>) -> Vec<T> {
        self.atoms.iter().map(|a| space.prob_of(a)).collect()
    }

    /// Every atom of `self` lies inside an atom of `other`.
    pub fn refines(&self, other: &PartitionSigma) -> bool {
        self.n_outcomes() == other.n_outcomes()
            && self
                .atoms
                .iter()
                .all(|a| a.iter().all(|&i| other.atom_of(i) == other.atom_of(a[0])))
    }

    /// First atom on which `x` is not constant (relative tolerance `1e-12`).
    pub fn first_nonconstant_atom<T: Scalar>(&self, x: &[T]) -> Option<usize> {
        let tol = T::lit(1e-12);
        self.atoms.iter().position(|atom| {
            let v0 = x[atom[0]];
            atom.iter().any(|&i| {
                let v = x[i];
                !((v - v0).abs() <= tol * (T::one() + v0.abs()))
            })
        })
    }

    /// Per-atom values of a measurable vector (first outcome of each atom).
    pub fn atom_values<T: Scalar>(&self, x: &[T]) -> Vec<T> {
        self.atoms.iter().map(|a| x[a[0]]).collect()
    }

    /// Spreads per-atom values back to outcomes.
    pub fn broadcast<T: Scalar>(&self, per_atom: &[T]) -> Vec<T> {
        self.atom_of.iter().map(|&a| per_atom[a]).collect()
    }
}

/// Real random variable on a finite space.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(transparent)]
pub struct RandomVariable<T>(Vec<T>);

impl<T: Scalar> RandomVariable<T> {
    pub fn new(values: Vec<T>) -> Result<Self> {
        if let Some(i) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::InvalidArgument(format!("entry {i} is not finite")));
        }
        Ok(Self(values))
    }

    pub fn constant(n: usize, c: T) -> Self {
        Self(vec![c; n])
    }

    pub fn indicator(n: usize, outcomes: &[usize]) -> Self {
        let mut v = vec![T::zero(); n];
        for &i in outcomes {
            v[i] = T::one();
        }
        Self(v)
    }

    pub fn values(&self) -> &[T] {
        &self.0
    }

    pub fn into_vec(self) -> Vec<T> {
        self.0
    }
}

impl<T> Deref for RandomVariable<T> {
    type Target = [T];
    fn deref(&self) -> &[T] {
        &self.0
    }
}

/// Per-atom means `sum_{i in A} p_i x_i / P(A)`.
pub fn atom_means<T: Scalar>(x: &[T], sigma: &PartitionSigma, space: &FiniteProbSpace<T>) -> Vec<T> {
    let p = space.probs();
    sigma
        .atoms()
        .iter()
        .map(|a| {
            let num: T = a.iter().map(|&i| p[i] * x[i]).sum();
            let den: T = a.iter().map(|&i| p[i]).sum();
            num / den
        })
        .collect()
}

/// `E[X | G]` as a vector over outcomes.
pub fn conditional_expectation<T: Scalar>(
    x: &[T],
    sigma: &PartitionSigma,
    space: &FiniteProbSpace<T>,
) -> RandomVariable<T> {
    RandomVariable(sigma.broadcast(&atom_means(x, sigma, space)))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ten() -> (FiniteProbSpace<f64>, PartitionSigma) {
        (
            FiniteProbSpace::uniform(10).unwrap(),
            PartitionSigma::from_sizes(&[4, 3, 3]).unwrap(),
        )
    }

    #[test]
    fn conditional_expectation_examples() {
        let (p, g) = ten();
        let x: Vec<f64> = (1..=10).map(f64::from).collect();
        let e = conditional_expectation(&x, &g, &p);
        let want = [2.5, 2.5, 2.5, 2.5, 6.0, 6.0, 6.0, 9.0, 9.0, 9.0];
        for (a, b) in e.iter().zip(want) {
            assert!((a - b).abs() < 1e-12);
        }
        let e2 = conditional_expectation(&e, &g, &p);
        assert_eq!(e, e2);

        let centred: Vec<f64> = x.iter().map(|v| v - 5.5).collect();
        let z = conditional_expectation(&centred, &PartitionSigma::trivial(10), &p);
        assert!(z.iter().all(|v| v.abs() < 1e-12));
    }

    #[test]
    fn space_validation() {
        assert!(FiniteProbSpace::new(vec![0.5, 0.5]).is_ok());
        assert!(FiniteProbSpace::new(vec![0.5, 0.4]).is_err());
        assert!(FiniteProbSpace::new(vec![1.0, 0.0]).is_err());
        assert!(FiniteProbSpace::<f64>::new(vec![]).is_err());
        assert!(FiniteProbSpace::new(vec![0.1f32; 10]).is_ok());
    }

    #[test]
    fn partition_validation() {
        assert!(PartitionSigma::new(3, vec![vec![0, 1], vec![1, 2]]).is_err());
        assert!(PartitionSigma::new(3, vec![vec![0, 1]]).is_err());
        assert!(PartitionSigma::new(3, vec![vec![0, 1], vec![]]).is_err());
        assert!(PartitionSigma::new(3, vec![vec![0, 3], vec![1, 2]]).is_err());
        let g = PartitionSigma::new(3, vec![vec![2, 0], vec![1]]).unwrap();
        assert_eq!(g.atom_of(2), 0);
        assert_eq!(g.event(&[0]), vec![0, 2]);
    }

    #[test]
    fn refinement_and_measurability() {
        let fine = PartitionSigma::from_sizes(&[2, 2, 3, 3]).unwrap();
        let coarse = PartitionSigma::from_sizes(&[4, 3, 3]).unwrap();
        assert!(fine.refines(&coarse));
        assert!(!coarse.refines(&fine));
        let x = coarse.broadcast(&[1.0, 2.0, 3.0]);
        assert_eq!(coarse.first_nonconstant_atom(&x), None);
        assert_eq!(fine.first_nonconstant_atom(&x), None);
        let y = fine.broadcast(&[1.0, 2.0, 3.0, 4.0]);
        assert_eq!(coarse.first_nonconstant_atom(&y), Some(0));
    }
}
