//! Extended reals `[-inf, +inf]` with the arithmetic conventions used throughout
//! the crate:
//!
//! * `0 * (+inf) = 0 * (-inf) = 0`
//! * `1 / 0 = +inf`, `1 / (+-inf) = 0`
//! * `exp(+inf) = +inf`, `exp(-inf) = 0`
//! * `(+inf) + (-inf) = +inf` (upper addition, so `+inf - +inf = +inf`)

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::scalar::Scalar;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ExtReal<T> {
    NegInf,
    Finite(T),
    PosInf,
}

impl<T: Scalar> ExtReal<T> {
    /// Wraps a float; IEEE infinities map to the infinite variants.
    ///
    /// # Panics
    /// If `x` is NaN.
    pub fn new(x: T) -> Self {
        assert!(!x.is_nan(), "NaN is not an extended real");
        if x == T::infinity() {
            Self::PosInf
        } else if x == T::neg_infinity() {
            Self::NegInf
        } else {
            Self::Finite(x)
        }
    }

    pub fn try_new(x: T) -> Option<Self> {
        (!x.is_nan()).then(|| Self::new(x))
    }

    pub fn zero() -> Self {
        Self::Finite(T::zero())
    }

    pub fn one() -> Self {
        Self::Finite(T::one())
    }

    pub fn is_finite(&self) -> bool {
        matches!(self, Self::Finite(_))
    }

    pub fn finite(&self) -> Option<T> {
        match *self {
            Self::Finite(x) => Some(x),
            _ => None,
        }
    }

    /// IEEE view: infinities become `T::infinity()` / `T::neg_infinity()`.
    pub fn to_float(self) -> T {
        match self {
            Self::NegInf => T::neg_infinity(),
            Self::Finite(x) => x,
            Self::PosInf => T::infinity(),
        }
    }

    pub fn signum_ext(&self) -> Ordering {
        match *self {
            Self::NegInf => Ordering::Less,
            Self::PosInf => Ordering::Greater,
            Self::Finite(x) => x.partial_cmp(&T::zero()).unwrap_or(Ordering::Equal),
        }
    }

    /// `1 / self` with `1/0 = +inf` and `1/(+-inf) = 0`.
    pub fn recip(self) -> Self {
        match self {
            Self::NegInf | Self::PosInf => Self::zero(),
            Self::Finite(x) if x == T::zero() => Self::PosInf,
            Self::Finite(x) => Self::new(T::one() / x),
        }
    }

    pub fn exp(self) -> Self {
        match self {
            Self::NegInf => Self::zero(),
            Self::PosInf => Self::PosInf,
            Self::Finite(x) => Self::new(x.exp()),
        }
    }

    /// Product with a finite scalar under `0 * (+-inf) = 0`.
    pub fn scale(self, w: T) -> Self {
        self * Self::Finite(w)
    }

    /// Division by a nonzero finite weight.
    pub fn div_finite(self, w: T) -> Self {
        debug_assert!(w != T::zero());
        match self {
            Self::Finite(x) => Self::new(x / w),
            inf => {
                if w > T::zero() {
                    inf
                } else {
                    -inf
                }
            }
        }
    }

    pub fn max(self, other: Self) -> Self {
        if other > self {
            other
        } else {
            self
        }
    }

    pub fn min(self, other: Self) -> Self {
        if other < self {
            other
        } else {
            self
        }
    }
}

/// `exp(-lambda * v)` under the extended-real conventions; `lambda = 0` gives 1
/// even for infinite `v` since `0 * inf = 0`.
pub fn ext_exp_neg<T: Scalar>(lambda: T, v: ExtReal<T>) -> ExtReal<T> {
    (v.scale(-lambda)).exp()
}

impl<T: Scalar> From<T> for ExtReal<T> {
    fn from(x: T) -> Self {
        Self::new(x)
    }
}

impl<T: Scalar> PartialOrd for ExtReal<T> {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        use ExtReal::*;
        match (self, other) {
            (NegInf, NegInf) | (PosInf, PosInf) => Some(Ordering::Equal),
            (NegInf, _) | (_, PosInf) => Some(Ordering::Less),
            (_, NegInf) | (PosInf, _) => Some(Ordering::Greater),
            (Finite(a), Finite(b)) => a.partial_cmp(b),
        }
    }
}

impl<T: Scalar> Neg for ExtReal<T> {
    type Output = Self;
    fn neg(self) -> Self {
        match self {
            Self::NegInf => Self::PosInf,
            Self::PosInf => Self::NegInf,
            Self::Finite(x) => Self::Finite(-x),
        }
    }
}

impl<T: Scalar> Add for ExtReal<T> {
    type Output = Self;
    fn add(self, rhs: Self) -> Self {
        use ExtReal::*;
        match (self, rhs) {
            (PosInf, _) | (_, PosInf) => PosInf,
            (NegInf, _) | (_, NegInf) => NegInf,
            (Finite(a), Finite(b)) => Self::new(a + b),
        }
    }
}

impl<T: Scalar> Sub for ExtReal<T> {
    type Output = Self;
    fn sub(self, rhs: Self) -> Self {
        self + (-rhs)
    }
}

impl<T: Scalar> Mul for ExtReal<T> {
    type Output = Self;
    fn mul(self, rhs: Self) -> Self {
        use ExtReal::*;
        match (self, rhs) {
            (Finite(a), Finite(b)) => Self::new(a * b),
            (Finite(a), inf) | (inf, Finite(a)) => match a.partial_cmp(&T::zero()) {
                Some(Ordering::Greater) => inf,
                Some(Ordering::Less) => -inf,
                _ => Self::zero(),
            },
            (PosInf, PosInf) | (NegInf, NegInf) => PosInf,
            _ => NegInf,
        }
    }
}

impl<T: Scalar> fmt::Display for ExtReal<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::NegInf => write!(f, "-inf"),
            Self::PosInf => write!(f, "+inf"),
            Self::Finite(x) => write!(f, "{x}"),
        }
    }
}

impl<T: Serialize> Serialize for ExtReal<T> {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        match self {
            Self::NegInf => s.serialize_str("-inf"),
            Self::PosInf => s.serialize_str("+inf"),
            Self::Finite(x) => x.serialize(s),
        }
    }
}

impl<'de, T: Deserialize<'de>> Deserialize<'de> for ExtReal<T> {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Repr<T> {
            Num(T),
            Text(String),
        }
        match Repr::<T>::deserialize(d)? {
            Repr::Num(x) => Ok(Self::Finite(x)),
            Repr::Text(s) => match s.as_str() {
                "-inf" => Ok(Self::NegInf),
                "+inf" => Ok(Self::PosInf),
                _ => Err(serde::de::Error::custom(format!("bad extended real '{s}'"))),
            },
        }
    }
}
