//! Grid certification of convexity, concavity and quasiconvexity.
//!
//! Every routine here is a necessary-condition test: `Certified` means no
//! violation larger than the tolerance was found among the scanned grid pairs
//! and mixing weights. It is never a proof.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::extcore::domain::BoxDomain;
use crate::extcore::ext::ExtReal;
use crate::extcore::function::FunctionSpec;
use crate::scalar::Scalar;

/// Which inequality is being tested along segments.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Shape {
    /// `g(mix) <= eta g(x1) + (1 - eta) g(x2)`
    Convex,
    /// `g(mix) >= eta g(x1) + (1 - eta) g(x2)`
    Concave,
    /// `g(mix) <= max(g(x1), g(x2))`
    Quasiconvex,
}

/// Which grid pairs are compared.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum PairScan {
    /// Exhaustive up to `EXHAUSTIVE_AUTO_LIMIT` grid points, hybrid above.
    Auto,
    /// Every unordered pair of distinct grid points.
    Exhaustive,
    /// Pairs whose multi-indices differ by at most `radius` on every axis, plus
    /// every pair of a coarse subgrid with `coarse` nodes per axis.
    Hybrid { radius: usize, coarse: usize },
}

pub const EXHAUSTIVE_AUTO_LIMIT: usize = 1200;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CertConfig<T> {
    pub tol: T,
    pub etas: Vec<T>,
    pub scan: PairScan,
}

impl<T: Scalar> CertConfig<T> {
    /// Mixing weights `k/8, k = 1..7`.
    pub fn new(tol: T) -> Self {
        let etas = (1..8).map(|k| T::lit(k as f64 / 8.0)).collect();
        Self {
            tol,
            etas,
            scan: PairScan::Auto,
        }
    }

    /// `1e-9` when derivative oracles are present (analytic input), `1e-6` otherwise.
    pub fn default_for(g: &FunctionSpec<T>) -> Self {
        Self::new(T::lit(if g.has_derivatives() { 1e-9 } else { 1e-6 }))
    }

    pub fn with_scan(mut self, scan: PairScan) -> Self {
        self.scan = scan;
        self
    }

    pub fn with_etas(mut self, etas: Vec<T>) -> Self {
        self.etas = etas;
        self
    }

    /// Configured weights plus `{1/4, 1/2, 3/4}`, sorted and deduplicated.
    fn eta_set(&self) -> Vec<T> {
        let mut e: Vec<T> = self
            .etas
            .iter()
            .copied()
            .chain([0.25, 0.5, 0.75].map(T::lit))
            .filter(|&x| x > T::zero() && x < T::one())
            .collect();
        e.sort_by(|a, b| a.partial_cmp(b).unwrap());
        e.dedup();
        e
    }
}

impl Default for CertConfig<f64> {
    fn default() -> Self {
        Self::new(1e-9)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Witness<T> {
    pub x1: Vec<T>,
    pub x2: Vec<T>,
    pub eta: T,
    pub violation: ExtReal<T>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "verdict", rename_all = "lowercase")]
pub enum Verdict<T> {
    Certified,
    Refuted(Witness<T>),
    Inconclusive { reason: String },
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CertResult<T> {
    pub verdict: Verdict<T>,
    pub tol: T,
    pub pairs_scanned: usize,
    /// Comparisons skipped because both sides were `+inf`.
    pub degenerate: usize,
}

impl<T: Scalar> CertResult<T> {
    pub fn is_certified(&self) -> bool {
        matches!(self.verdict, Verdict::Certified)
    }

    pub fn is_refuted(&self) -> bool {
        matches!(self.verdict, Verdict::Refuted(_))
    }

    pub fn witness(&self) -> Option<&Witness<T>> {
        match &self.verdict {
            Verdict::Refuted(w) => Some(w),
            _ => None,
        }
    }
}

/// Jensen gap with its degeneracy flag.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Gap<T> {
    pub value: ExtReal<T>,
    /// Both sides were `+inf`; the value is reported as `+inf` but the inequality
    /// `+inf <= +inf` holds.
    pub degenerate: bool,
}

fn mix<T: Scalar>(x1: &[T], x2: &[T], eta: T) -> Vec<T> {
    x1.iter()
        .zip(x2)
        .map(|(&a, &b)| eta * a + (T::one() - eta) * b)
        .collect()
}

fn chord<T: Scalar>(v1: ExtReal<T>, v2: ExtReal<T>, eta: T) -> ExtReal<T> {
    v1.scale(eta) + v2.scale(T::one() - eta)
}

/// Signed amount by which `shape` fails at the mixture value `vm`; positive means violated.
fn shape_gap<T: Scalar>(shape: Shape, vm: ExtReal<T>, v1: ExtReal<T>, v2: ExtReal<T>, eta: T) -> Gap<T> {
    let (lhs, rhs) = match shape {
        Shape::Convex => (vm, chord(v1, v2, eta)),
        Shape::Concave => (chord(v1, v2, eta), vm),
        Shape::Quasiconvex => (vm, v1.max(v2)),
    };
    let degenerate = lhs == ExtReal::PosInf && rhs == ExtReal::PosInf;
    Gap {
        value: lhs - rhs,
        degenerate,
    }
}

/// `g(eta x1 + (1-eta) x2) - eta g(x1) - (1-eta) g(x2)` in extended arithmetic.
pub fn convexity_gap<T: Scalar>(g: &FunctionSpec<T>, x1: &[T], x2: &[T], eta: T) -> Gap<T> {
    let vm = g.eval(&mix(x1, x2, eta));
    shape_gap(Shape::Convex, vm, g.eval(x1), g.eval(x2), eta)
}

/// Re-evaluates a witness from scratch and returns its violation.
pub fn replay_violation<T: Scalar>(g: &FunctionSpec<T>, shape: Shape, w: &Witness<T>) -> ExtReal<T> {
    let vm = g.eval(&mix(&w.x1, &w.x2, w.eta));
    shape_gap(shape, vm, g.eval(&w.x1), g.eval(&w.x2), w.eta).value
}

/// Grid pairs `(i, j)`, `i < j`, as flat indices.
pub fn grid_pairs<T: Scalar>(domain: &BoxDomain<T>, scan: PairScan) -> Vec<(usize, usize)> {
    let n = domain.total_points();
    let scan = match scan {
        PairScan::Auto if n <= EXHAUSTIVE_AUTO_LIMIT => PairScan::Exhaustive,
        PairScan::Auto => PairScan::Hybrid { radius: 4, coarse: 33 },
        s => s,
    };
    match scan {
        PairScan::Exhaustive | PairScan::Auto => {
            let mut out = Vec::with_capacity(n * n.saturating_sub(1) / 2);
            for i in 0..n {
                for j in i + 1..n {
                    out.push((i, j));
                }
            }
            out
        }
        PairScan::Hybrid { radius, coarse } => hybrid_pairs(domain, radius, coarse),
    }
}

fn hybrid_pairs<T: Scalar>(domain: &BoxDomain<T>, radius: usize, coarse: usize) -> Vec<(usize, usize)> {
    let d = domain.dim();
    let axes = domain.axes();
    let r = radius as isize;
    // lexicographically positive offsets in [-r, r]^d
    let mut offsets: Vec<Vec<isize>> = vec![vec![]];
    for _ in 0..d {
        offsets = offsets
            .into_iter()
            .flat_map(|o| {
                (-r..=r).map(move |k| {
                    let mut o = o.clone();
                    o.push(k);
                    o
                })
            })
            .collect();
    }
    offsets.retain(|o| o.iter().find(|&&k| k != 0).is_some_and(|&k| k > 0));

    let mut out = Vec::new();
    for i in 0..domain.total_points() {
        let mi = domain.multi_index(i);
        'off: for o in &offsets {
            let mut mj = Vec::with_capacity(d);
            for ((&a, &k), ax) in mi.iter().zip(o).zip(axes) {
                let b = a as isize + k;
                if b < 0 || b >= ax.points as isize {
                    continue 'off;
                }
                mj.push(b as usize);
            }
            out.push((i, domain.flat_index(&mj)));
        }
    }

    // coarse subgrid, all pairs not already covered locally
    let per_axis: Vec<Vec<usize>> = axes
        .iter()
        .map(|ax| {
            let c = coarse.clamp(2, ax.points);
            let mut v: Vec<usize> = (0..c)
                .map(|t| ((t * (ax.points - 1)) as f64 / (c - 1) as f64).round() as usize)
                .collect();
            v.dedup();
            v
        })
        .collect();
    let mut coarse_pts: Vec<Vec<usize>> = vec![vec![]];
    for nodes in &per_axis {
        coarse_pts = coarse_pts
            .into_iter()
            .flat_map(|p| {
                nodes.iter().map(move |&k| {
                    let mut p = p.clone();
                    p.push(k);
                    p
                })
            })
            .collect();
    }
    for (a, pa) in coarse_pts.iter().enumerate() {
        for pb in &coarse_pts[a + 1..] {
            let local = pa.iter().zip(pb).all(|(&x, &y)| x.abs_diff(y) <= radius);
            if !local {
                let (i, j) = (domain.flat_index(pa), domain.flat_index(pb));
                out.push((i.min(j), i.max(j)));
            }
        }
    }
    out
}

/// Evaluates `g` on the whole grid and checks properness.
pub fn grid_values<T: Scalar>(g: &FunctionSpec<T>, domain: &BoxDomain<T>) -> Result<Vec<ExtReal<T>>> {
    if g.dim() != domain.dim() {
        return Err(Error::InvalidArgument(format!(
            "function of dimension {} on a box of dimension {}",
            g.dim(),
            domain.dim()
        )));
    }
    let values: Vec<ExtReal<T>> = (0..domain.total_points())
        .into_par_iter()
        .map(|i| g.eval(&domain.point(i)))
        .collect();
    if values.iter().all(|v| *v == ExtReal::PosInf) {
        return Err(Error::ImproperFunction(format!(
            "'{}' is +inf on the whole grid",
            g.label()
        )));
    }
    if g.is_proper() && values.contains(&ExtReal::NegInf) {
        return Err(Error::ImproperFunction(format!("'{}' takes the value -inf", g.label())));
    }
    Ok(values)
}

#[derive(Clone, Copy)]
struct Best<T> {
    violation: ExtReal<T>,
    pair: usize,
    eta: usize,
}

fn better<T: Scalar>(a: Option<Best<T>>, b: Option<Best<T>>) -> Option<Best<T>> {
    match (a, b) {
        (None, x) | (x, None) => x,
        (Some(a), Some(b)) => {
            let a_wins = a.violation > b.violation || (a.violation == b.violation && (a.pair, a.eta) < (b.pair, b.eta));
            Some(if a_wins { a } else { b })
        }
    }
}

/// Scans grid pairs for the largest violation of `shape`.
pub fn certify_shape<T: Scalar>(
    g: &FunctionSpec<T>,
    domain: &BoxDomain<T>,
    shape: Shape,
    cfg: &CertConfig<T>,
) -> Result<CertResult<T>> {
    if cfg.tol <= T::zero() {
        return Err(Error::InvalidArgument("tolerance must be positive".into()));
    }
    let values = grid_values(g, domain)?;
    let points = domain.points();
    let pairs = grid_pairs(domain, cfg.scan);
    let etas = cfg.eta_set();
    let tol = ExtReal::Finite(cfg.tol);

    let (best, degenerate, compared) = pairs
        .par_iter()
        .enumerate()
        .map(|(pi, &(i, j))| {
            let mut best: Option<Best<T>> = None;
            let mut degenerate = 0usize;
            let mut compared = 0usize;
            let (v1, v2) = (values[i], values[j]);
            for (k, &eta) in etas.iter().enumerate() {
                let vm = g.eval(&mix(&points[i], &points[j], eta));
                let gap = shape_gap(shape, vm, v1, v2, eta);
                if gap.degenerate {
                    degenerate += 1;
                    continue;
                }
                compared += 1;
                if gap.value > tol {
                    best = better(
                        best,
                        Some(Best {
                            violation: gap.value,
                            pair: pi,
                            eta: k,
                        }),
                    );
                }
            }
            (best, degenerate, compared)
        })
        .reduce(|| (None, 0, 0), |a, b| (better(a.0, b.0), a.1 + b.1, a.2 + b.2));

    let verdict = match best {
        Some(b) => {
            let (i, j) = pairs[b.pair];
            Verdict::Refuted(Witness {
                x1: points[i].clone(),
                x2: points[j].clone(),
                eta: etas[b.eta],
                violation: b.violation,
            })
        }
        None if compared == 0 => Verdict::Inconclusive {
            reason: "every comparison was degenerate (+inf on both sides)".into(),
        },
        None => Verdict::Certified,
    };
    Ok(CertResult {
        verdict,
        tol: cfg.tol,
        pairs_scanned: pairs.len(),
        degenerate,
    })
}

pub fn certify_convex<T: Scalar>(
    g: &FunctionSpec<T>,
    domain: &BoxDomain<T>,
    cfg: &CertConfig<T>,
) -> Result<CertResult<T>> {
    certify_shape(g, domain, Shape::Convex, cfg)
}

pub fn certify_concave<T: Scalar>(
    g: &FunctionSpec<T>,
    domain: &BoxDomain<T>,
    cfg: &CertConfig<T>,
) -> Result<CertResult<T>> {
    certify_shape(g, domain, Shape::Concave, cfg)
}

pub fn certify_quasiconvex<T: Scalar>(
    g: &FunctionSpec<T>,
    domain: &BoxDomain<T>,
    cfg: &CertConfig<T>,
) -> Result<CertResult<T>> {
    certify_shape(g, domain, Shape::Quasiconvex, cfg)
}
