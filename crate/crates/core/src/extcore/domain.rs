use serde::Serialize;

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// One axis of a box: closed interval `[lo, hi]` sampled at `points` equispaced nodes.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Axis<T> {
    pub lo: T,
    pub hi: T,
    pub points: usize,
}

impl<T: Scalar> Axis<T> {
    pub fn node(&self, k: usize) -> T {
        if k + 1 == self.points {
            return self.hi;
        }
        let t = T::from_usize(k).unwrap() / T::from_usize(self.points - 1).unwrap();
        self.lo + (self.hi - self.lo) * t
    }

    pub fn spacing(&self) -> T {
        (self.hi - self.lo) / T::from_usize(self.points - 1).unwrap()
    }
}

/// Axis-aligned box with a tensor grid; both endpoints of every axis are grid nodes.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BoxDomain<T> {
    axes: Vec<Axis<T>>,
}

impl<T: Scalar> BoxDomain<T> {
    pub fn new(axes: Vec<Axis<T>>) -> Result<Self> {
        if axes.is_empty() {
            return Err(Error::InvalidDomain("a box needs at least one axis".into()));
        }
        for (k, a) in axes.iter().enumerate() {
            if !(a.lo.is_finite() && a.hi.is_finite()) || a.lo >= a.hi {
                return Err(Error::InvalidDomain(format!(
                    "axis {k}: need finite lo < hi, got [{}, {}]",
                    a.lo, a.hi
                )));
            }
            if a.points < 3 {
                return Err(Error::InvalidDomain(format!(
                    "axis {k}: grid resolution must be at least 3, got {}",
                    a.points
                )));
            }
        }
        Ok(Self { axes })
    }

    /// One-dimensional interval `[lo, hi]` with `points` nodes.
    pub fn interval(lo: T, hi: T, points: usize) -> Result<Self> {
        Self::new(vec![Axis { lo, hi, points }])
    }

    /// Cartesian product of boxes, axes concatenated in order.
    pub fn product(parts: &[BoxDomain<T>]) -> Result<Self> {
        Self::new(parts.iter().flat_map(|b| b.axes.iter().copied()).collect())
    }

    pub fn axes(&self) -> &[Axis<T>] {
        &self.axes
    }

    pub fn dim(&self) -> usize {
        self.axes.len()
    }

    pub fn total_points(&self) -> usize {
        self.axes.iter().map(|a| a.points).product()
    }

    /// Same box with a different resolution on every axis.
    pub fn with_points(&self, points: usize) -> Result<Self> {
        Self::new(self.axes.iter().map(|a| Axis { points, ..*a }).collect())
    }

    /// Multi-index of the flat (row-major, last axis fastest) grid index.
    pub fn multi_index(&self, mut flat: usize) -> Vec<usize> {
        let mut idx = vec![0; self.axes.len()];
        for (k, a) in self.axes.iter().enumerate().rev() {
            idx[k] = flat % a.points;
            flat /= a.points;
        }
        idx
    }

    pub fn flat_index(&self, multi: &[usize]) -> usize {
        multi.iter().zip(&self.axes).fold(0, |acc, (&i, a)| acc * a.points + i)
    }

    pub fn point_at(&self, multi: &[usize]) -> Vec<T> {
        multi.iter().zip(&self.axes).map(|(&i, a)| a.node(i)).collect()
    }

    pub fn point(&self, flat: usize) -> Vec<T> {
        self.point_at(&self.multi_index(flat))
    }

    pub fn points(&self) -> Vec<Vec<T>> {
        (0..self.total_points()).map(|i| self.point(i)).collect()
    }

    pub fn contains(&self, x: &[T]) -> bool {
        x.len() == self.dim() && x.iter().zip(&self.axes).all(|(&v, a)| v >= a.lo && v <= a.hi)
    }
}
