use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Exp1};
use serde::{Deserialize, Serialize};

use crate::scalar::Scalar;

/// Outcome of the mixing-weight feasibility problem
/// `mu * rx_a + (1 - mu) * ry_a >= rmix_a - tol` for every atom `a`, `mu in [0, 1]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum MuInterval<T> {
    Feasible {
        lo: T,
        hi: T,
    },
    /// The listed constraints are jointly unsatisfiable. One atom means its own
    /// constraint is void; two atoms give a lower bound above an upper bound; a
    /// single atom together with `bound` clashes with `mu in [0, 1]`.
    Empty {
        atoms: Vec<usize>,
        bound: Option<T>,
    },
}

impl<T: Scalar> MuInterval<T> {
    pub fn is_empty(&self) -> bool {
        matches!(self, MuInterval::Empty { .. })
    }

    pub fn bounds(&self) -> Option<(T, T)> {
        match *self {
            MuInterval::Feasible { lo, hi } => Some((lo, hi)),
            MuInterval::Empty { .. } => None,
        }
    }
}

/// Exact feasible set of mixing weights. Each atom contributes a half-line,
/// all of `R`, or nothing according to the sign of `rx_a - ry_a`.
pub fn nqc_mu_interval<T: Scalar>(rx: &[T], ry: &[T], rmix: &[T], tol: T) -> MuInterval<T> {
    assert!(rx.len() == ry.len() && ry.len() == rmix.len(), "length mismatch");
    let (mut lo, mut hi) = (T::zero(), T::one());
    let (mut lo_src, mut hi_src): (Option<usize>, Option<usize>) = (None, None);
    for a in 0..rx.len() {
        let d = rx[a] - ry[a];
        let r = rmix[a] - ry[a] - tol;
        if d > T::zero() {
            let b = r / d;
            if b > lo {
                lo = b;
                lo_src = Some(a);
            }
        } else if d < T::zero() {
            let b = r / d;
            if b < hi {
                hi = b;
                hi_src = Some(a);
            }
        } else if r > T::zero() {
            return MuInterval::Empty {
                atoms: vec![a],
                bound: None,
            };
        }
    }
    if lo <= hi {
        return MuInterval::Feasible { lo, hi };
    }
    match (lo_src, hi_src) {
        (Some(a), Some(b)) => MuInterval::Empty {
            atoms: vec![a, b],
            bound: None,
        },
        (Some(a), None) => MuInterval::Empty {
            atoms: vec![a],
            bound: Some(T::one()),
        },
        (None, Some(b)) => MuInterval::Empty {
            atoms: vec![b],
            bound: Some(T::zero()),
        },
        (None, None) => unreachable!("[0, 1] is nonempty"),
    }
}

/// Dual vector separating the mixture value from both endpoints.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DualWitness<T> {
    /// Weights on atoms, on the unit simplex.
    pub weights: Vec<T>,
    /// `Z*` on atoms: `weights[a] / P(A_a)`, so `E[Z*] = 1`.
    pub z_star: Vec<T>,
    /// `E[Z* rmix] - max(E[Z* rx], E[Z* ry])`.
    pub margin: T,
}

/// Maximizes `min(w.(rmix - rx), w.(rmix - ry))` over the simplex. The optimum
/// of this concave piecewise-linear objective sits at a vertex or where an edge
/// crosses the hyperplane on which the two linear pieces agree, so enumerating
/// those candidates is exact. Returns `None` when the best margin is not
/// positive.
pub fn separating_dual_witness<T: Scalar>(rx: &[T], ry: &[T], rmix: &[T], atom_probs: &[T]) -> Option<DualWitness<T>> {
    let k = rx.len();
    assert!(
        ry.len() == k && rmix.len() == k && atom_probs.len() == k,
        "length mismatch"
    );
    let u: Vec<T> = (0..k).map(|a| rmix[a] - rx[a]).collect();
    let v: Vec<T> = (0..k).map(|a| rmix[a] - ry[a]).collect();

    let mut best: Option<(T, usize, usize, T)> = None;
    let mut consider = |val: T, a: usize, b: usize, t: T| {
        if best.is_none_or(|(bv, ..)| val > bv) {
            best = Some((val, a, b, t));
        }
    };
    for a in 0..k {
        consider(u[a].min(v[a]), a, a, T::one());
    }
    for a in 0..k {
        for b in a + 1..k {
            let da = u[a] - v[a];
            let db = u[b] - v[b];
            if (da > T::zero() && db < T::zero()) || (da < T::zero() && db > T::zero()) {
                let t = db / (db - da);
                let val = t * u[a] + (T::one() - t) * u[b];
                consider(val, a, b, t);
            }
        }
    }
    let (_, a, b, t) = best?;
    let mut weights = vec![T::zero(); k];
    weights[a] = weights[a] + t;
    if b != a {
        weights[b] = weights[b] + (T::one() - t);
    }
    let dot = |w: &[T], r: &[T]| w.iter().zip(r).map(|(&x, &y)| x * y).sum::<T>();
    let margin = dot(&weights, rmix) - dot(&weights, rx).max(dot(&weights, ry));
    if !(margin > T::zero()) {
        return None;
    }
    let z_star = weights.iter().zip(atom_probs).map(|(&w, &p)| w / p).collect();
    Some(DualWitness {
        weights,
        z_star,
        margin,
    })
}

/// Points of the unit simplex in `k` coordinates used as scalarization weights:
/// the regular grid with `per_edge` points per edge for `k <= 3`, otherwise the
/// vertices plus `samples` Dirichlet(1, .., 1) draws.
pub fn dual_directions<T: Scalar>(k: usize, per_edge: usize, samples: usize, seed: u64) -> Vec<Vec<T>> {
    assert!(k >= 1 && per_edge >= 2);
    let d = per_edge - 1;
    let lit = |i: usize| T::from_usize(i).unwrap() / T::from_usize(d).unwrap();
    match k {
        1 => vec![vec![T::one()]],
        2 => (0..=d).map(|i| vec![lit(i), lit(d - i)]).collect(),
        3 => {
            let mut out = Vec::new();
            for i in 0..=d {
                for j in 0..=d - i {
                    out.push(vec![lit(i), lit(j), lit(d - i - j)]);
                }
            }
            out
        }
        _ => {
            let mut out: Vec<Vec<T>> = (0..k)
                .map(|a| (0..k).map(|b| if a == b { T::one() } else { T::zero() }).collect())
                .collect();
            // Normalized unit exponentials are Dirichlet(1, .., 1).
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            for _ in 0..samples {
                let e: Vec<f64> = (0..k).map(|_| Exp1.sample(&mut rng)).collect();
                let s: f64 = e.iter().sum();
                out.push(e.into_iter().map(|v| T::lit(v / s)).collect());
            }
            out
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn mu_interval_examples() {
        assert_eq!(
            nqc_mu_interval(&[0.0, 0.0], &[0.0, 0.0], &[0.0, 0.0], 0.0),
            MuInterval::Feasible { lo: 0.0, hi: 1.0 }
        );
        assert_eq!(
            nqc_mu_interval(&[2.0, 0.0], &[0.0, 2.0], &[1.0, 1.0], 0.0),
            MuInterval::Feasible { lo: 0.5, hi: 0.5 }
        );
        let e = nqc_mu_interval(&[1.0, 0.0], &[0.0, 1.0], &[0.9, 0.9], 0.0);
        assert_eq!(
            e,
            MuInterval::Empty {
                atoms: vec![0, 1],
                bound: None
            }
        );
    }

    #[test]
    fn mu_interval_single_atom_certificates() {
        let e = nqc_mu_interval(&[1.0], &[1.0], &[1.5], 1e-9);
        assert_eq!(
            e,
            MuInterval::Empty {
                atoms: vec![0],
                bound: None
            }
        );
        let e = nqc_mu_interval(&[1.0], &[0.0], &[2.0], 1e-9);
        assert_eq!(
            e,
            MuInterval::Empty {
                atoms: vec![0],
                bound: Some(1.0)
            }
        );
    }

    #[test]
    fn separating_example() {
        let w = separating_dual_witness(&[1.0f64, 0.0], &[0.0, 1.0], &[0.9, 0.9], &[0.5, 0.5]).unwrap();
        // (1/2, 1/2) gives 0.5, 0.5 and 0.9.
        assert!((w.margin - 0.4).abs() < 1e-12);
        assert!((w.weights[0] - 0.5).abs() < 1e-12 && (w.weights[1] - 0.5).abs() < 1e-12);
        assert!((w.z_star[0] - 1.0).abs() < 1e-12);
    }

    #[test]
    fn no_separation_when_feasible() {
        assert!(separating_dual_witness(&[2.0, 0.0], &[0.0, 2.0], &[1.0, 1.0], &[0.5, 0.5]).is_none());
        assert!(separating_dual_witness(&[2.0, 3.0], &[5.0, 1.0], &[1.0, 1.0], &[0.5, 0.5]).is_none());
    }

    #[test]
    fn simplex_grid_sizes() {
        assert_eq!(dual_directions::<f64>(3, 51, 0, 0).len(), 51 * 52 / 2);
        assert_eq!(dual_directions::<f64>(2, 51, 0, 0).len(), 51);
        let d = dual_directions::<f64>(5, 51, 500, 7);
        assert_eq!(d.len(), 505);
        assert!(d.iter().all(|w| (w.iter().sum::<f64>() - 1.0).abs() < 1e-12));
    }
}
