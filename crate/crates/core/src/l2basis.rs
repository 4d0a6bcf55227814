//! Finite-dimensional `L^2` block structures: per-cell orthonormal bases split
//! into a measurable part (e-blocks) and its in-cell complement (beta-blocks),
//! the coordinate cone preorder they induce, and sampled locality and natural
//! quasiconvexity checks expressed in those coordinates.

use std::fmt::Write as _;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::riskmeasure::checks::nqc_outcome;
use crate::riskmeasure::io::parse_index_list;
use crate::riskmeasure::{
    conditional_expectation, sample_triples, CheckConfig, FiniteProbSpace, PartitionSigma, PropertyReport,
    RandomVariable, RiskMeasure, RiskWitness,
};
use crate::scalar::Scalar;

const STREAM_BASIS: u64 = 0x4241_5349;
const STREAM_CONE: u64 = 0x434f_4e45;

/// Relative norm below which a projected vector counts as dependent.
const RANK_TOL: f64 = 1e-10;

/// Orthonormalizes under `<x, y> = E[xy]`, two projection passes per vector.
pub fn gram_schmidt<T: Scalar>(vectors: &[Vec<T>], space: &FiniteProbSpace<T>) -> Result<Vec<Vec<T>>> {
    gram_schmidt_with_transform(vectors, space).map(|(q, _)| q)
}

/// Row-major matrix.
pub type Rows<T> = Vec<Vec<T>>;

/// As [`gram_schmidt`], also returning `r` with `vectors[j] = sum_i r[j][i] q[i]`
/// (lower-triangular rows: only `i <= j` is nonzero).
pub fn gram_schmidt_with_transform<T: Scalar>(
    vectors: &[Vec<T>],
    space: &FiniteProbSpace<T>,
) -> Result<(Rows<T>, Rows<T>)> {
    let n = space.n();
    let mut q: Vec<Vec<T>> = Vec::with_capacity(vectors.len());
    let mut r: Vec<Vec<T>> = Vec::with_capacity(vectors.len());
    for (index, v) in vectors.iter().enumerate() {
        if v.len() != n {
            return Err(Error::InvalidArgument(format!(
                "vector {index} has length {}, space has {n} outcomes",
                v.len()
            )));
        }
        let original = space.norm(v);
        let mut w = v.clone();
        let mut coeffs = vec![T::zero(); vectors.len()];
        for _ in 0..2 {
            for (i, qi) in q.iter().enumerate() {
                let c = space.inner(qi, &w);
                coeffs[i] = coeffs[i] + c;
                w.iter_mut().zip(qi).for_each(|(a, &b)| *a = *a - c * b);
            }
        }
        let nw = space.norm(&w);
        if !(original > T::zero()) || !(nw > T::lit(RANK_TOL) * original) {
            return Err(Error::RankDeficient { index });
        }
        coeffs[q.len()] = nw;
        w.iter_mut().for_each(|a| *a = *a / nw);
        q.push(w);
        coeffs.truncate(q.len());
        r.push(coeffs);
    }
    Ok((q, r))
}

/// `X - E[X | G]`.
pub fn project_g_complement<T: Scalar>(
    x: &[T],
    sigma: &PartitionSigma,
    space: &FiniteProbSpace<T>,
) -> RandomVariable<T> {
    let e = conditional_expectation(x, sigma, space);
    RandomVariable::new(x.iter().zip(e.iter()).map(|(&a, &b)| a - b).collect())
        .expect("finite input gives finite output")
}

/// Orthonormal basis of one cell: measurable part and complement.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CellBlocks<T> {
    pub outcomes: Vec<usize>,
    pub e: Vec<Vec<T>>,
    pub beta: Vec<Vec<T>>,
    /// Raw complement generators as supplied.
    pub beta_generators: Vec<Vec<T>>,
    /// Orthonormalization record over `e` generators followed by the beta
    /// generators: `generator[j] = sum_i transform[j][i] basis[i]`.
    pub transform: Vec<Vec<T>>,
}

/// Cells `Omega_i` with per-cell orthonormal bases. The e-blocks span the
/// `G`-measurable vectors supported on the cell; e-blocks and beta-blocks
/// together span all vectors supported on the cell.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BlockStructure<T> {
    pub space: FiniteProbSpace<T>,
    pub sigma: PartitionSigma,
    pub cells: PartitionSigma,
    pub blocks: Vec<CellBlocks<T>>,
}

fn support_violation<T: Scalar>(v: &[T], inside: &[usize]) -> Option<usize> {
    (0..v.len()).find(|i| !inside.contains(i) && v[*i] != T::zero())
}

impl<T: Scalar> BlockStructure<T> {
    /// E-blocks are the normalized indicators of the atoms of `sigma` in each
    /// cell; `beta_generators[i]` spans the rest of cell `i`.
    pub fn new(
        space: FiniteProbSpace<T>,
        sigma: PartitionSigma,
        cells: PartitionSigma,
        beta_generators: Vec<Vec<Vec<T>>>,
    ) -> Result<Self> {
        if !sigma.refines(&cells) {
            return Err(Error::InvalidPartition(
                "every atom of G must lie inside one cell".into(),
            ));
        }
        let n = space.n();
        let e_generators = cells
            .atoms()
            .iter()
            .map(|cell| {
                sigma
                    .atoms()
                    .iter()
                    .filter(|a| cell.contains(&a[0]))
                    .map(|a| RandomVariable::indicator(n, a).into_vec())
                    .collect()
            })
            .collect();
        Self::from_generators(space, sigma, cells, e_generators, beta_generators)
    }

    pub fn from_generators(
        space: FiniteProbSpace<T>,
        sigma: PartitionSigma,
        cells: PartitionSigma,
        e_generators: Vec<Vec<Vec<T>>>,
        beta_generators: Vec<Vec<Vec<T>>>,
    ) -> Result<Self> {
        let n = space.n();
        if sigma.n_outcomes() != n || cells.n_outcomes() != n {
            return Err(Error::InvalidArgument("partition and space sizes differ".into()));
        }
        if e_generators.len() != cells.n_atoms() || beta_generators.len() != cells.n_atoms() {
            return Err(Error::InvalidArgument("one generator list per cell is required".into()));
        }
        let mut blocks = Vec::with_capacity(cells.n_atoms());
        for (i, cell) in cells.atoms().iter().enumerate() {
            let es = &e_generators[i];
            let bs = &beta_generators[i];
            for (k, v) in es.iter().chain(bs).enumerate() {
                if v.len() != n {
                    return Err(Error::InvalidArgument(format!("cell {i}, generator {k}: wrong length")));
                }
                if let Some(o) = support_violation(v, cell) {
                    return Err(Error::InvalidArgument(format!(
                        "cell {i}, generator {k} is nonzero at outcome {o} outside the cell"
                    )));
                }
            }
            if let Some(k) = es.iter().position(|v| sigma.first_nonconstant_atom(v).is_some()) {
                return Err(Error::InvalidArgument(format!(
                    "cell {i}, e generator {k} is not G-measurable"
                )));
            }
            let g_atoms = sigma.atoms().iter().filter(|a| cell.contains(&a[0])).count();
            if es.len() != g_atoms {
                return Err(Error::InvalidArgument(format!(
                    "cell {i} holds {g_atoms} atoms of G but {} e generators",
                    es.len()
                )));
            }
            if es.len() + bs.len() != cell.len() {
                return Err(Error::InvalidArgument(format!(
                    "cell {i} has {} outcomes but {} generators",
                    cell.len(),
                    es.len() + bs.len()
                )));
            }
            let all: Vec<Vec<T>> = es.iter().chain(bs).cloned().collect();
            let (q, transform) = gram_schmidt_with_transform(&all, &space).map_err(|e| match e {
                Error::RankDeficient { index } => Error::InvalidArgument(format!(
                    "cell {i}: generator {index} is dependent on the preceding ones"
                )),
                other => other,
            })?;
            let mut outcomes = cell.clone();
            outcomes.sort_unstable();
            blocks.push(CellBlocks {
                outcomes,
                e: q[..es.len()].to_vec(),
                beta: q[es.len()..].to_vec(),
                beta_generators: bs.clone(),
                transform,
            });
        }
        Ok(Self {
            space,
            sigma,
            cells,
            blocks,
        })
    }

    pub fn e_block_dims(&self) -> Vec<usize> {
        self.blocks.iter().map(|b| b.e.len()).collect()
    }

    pub fn beta_block_dims(&self) -> Vec<usize> {
        self.blocks.iter().map(|b| b.beta.len()).collect()
    }

    /// All e-vectors, cell by cell.
    pub fn e_vectors(&self) -> Vec<&Vec<T>> {
        self.blocks.iter().flat_map(|b| b.e.iter()).collect()
    }

    /// Every basis vector: per cell, the e-block then the beta-block.
    pub fn basis(&self) -> Vec<&Vec<T>> {
        self.blocks.iter().flat_map(|b| b.e.iter().chain(&b.beta)).collect()
    }

    /// Largest `|<u, v> - delta_uv|` over all pairs of basis vectors.
    pub fn orthonormality_residual(&self) -> T {
        let b = self.basis();
        let mut worst = T::zero();
        for i in 0..b.len() {
            for j in i..b.len() {
                let target = if i == j { T::one() } else { T::zero() };
                worst = worst.max((self.space.inner(b[i], b[j]) - target).abs());
            }
        }
        worst
    }

    /// `<x, e>` for every e-vector, cell by cell.
    pub fn e_coordinates(&self, x: &[T]) -> Vec<T> {
        self.e_vectors().iter().map(|e| self.space.inner(x, e)).collect()
    }

    /// `sum_k <x, e^i_k> e^i_k + sum_j <x, beta^i_j> beta^i_j`.
    pub fn cell_projection(&self, x: &[T], cell: usize) -> Vec<T> {
        let mut y = vec![T::zero(); self.space.n()];
        let b = &self.blocks[cell];
        for v in b.e.iter().chain(&b.beta) {
            let c = self.space.inner(x, v);
            y.iter_mut().zip(v).for_each(|(a, &b)| *a = *a + c * b);
        }
        y
    }
}

/// The uniform ten-outcome structure with cells of sizes 4, 3, 3 and `G`
/// generated by the cells.
pub fn build_example_10pt<T: Scalar>() -> BlockStructure<T> {
    let space = FiniteProbSpace::uniform(10).expect("ten outcomes");
    let cells = PartitionSigma::from_sizes(&[4, 3, 3]).expect("valid sizes");
    let h = T::lit(0.5);
    let at = |entries: &[(usize, T)]| {
        let mut v = vec![T::zero(); 10];
        entries.iter().for_each(|&(i, x)| v[i] = x);
        v
    };
    let (one, m1) = (T::one(), -T::one());
    let beta = vec![
        vec![
            at(&[(0, one), (1, one), (2, m1), (3, m1)]),
            at(&[(0, one), (1, m1), (2, one), (3, m1)]),
            at(&[(0, m1), (3, m1)]),
        ],
        vec![at(&[(4, -h), (5, -h), (6, one)]), at(&[(4, m1), (5, one)])],
        vec![at(&[(7, -h), (8, -h), (9, one)]), at(&[(7, m1), (8, one)])],
    ];
    BlockStructure::new(space, cells.clone(), cells, beta).expect("fixture generators are independent")
}

/// The ten-outcome structure with the first cell split into two atoms of `G`
/// (outcomes 1-2 and 3-4), so its e-block has dimension two.
pub fn build_refined_10pt<T: Scalar>() -> BlockStructure<T> {
    let space = FiniteProbSpace::uniform(10).expect("ten outcomes");
    let cells = PartitionSigma::from_sizes(&[4, 3, 3]).expect("valid sizes");
    let sigma = PartitionSigma::from_sizes(&[2, 2, 3, 3]).expect("valid sizes");
    let base = build_example_10pt::<T>();
    let mut beta: Vec<Vec<Vec<T>>> = base.blocks.iter().map(|b| b.beta_generators.clone()).collect();
    // The first generator of cell 1 is measurable for the finer G.
    beta[0].remove(0);
    BlockStructure::new(space, sigma, cells, beta).expect("fixture generators are independent")
}

/// `E[X | coarse cells]`, declared against the finer `G` of `b`.
pub fn coarse_mean_fixture<T: Scalar>(b: &BlockStructure<T>) -> RiskMeasure<T> {
    RiskMeasure::coarse_conditional_mean(b.cells.clone(), b.sigma.clone()).expect("G refines the cells")
}

/// `Y <= V` iff every e-coordinate of `V - Y` is at least `-1e-12`.
pub fn cone_leq<T: Scalar>(y: &[T], v: &[T], b: &BlockStructure<T>) -> bool {
    let d: Vec<T> = v.iter().zip(y).map(|(&a, &c)| a - c).collect();
    b.e_coordinates(&d).iter().all(|&c| c >= T::lit(-1e-12))
}

/// Basis locality: for every cell `i` and e-vector `e^i_k`,
/// `<rho(X), e^i_k> = <rho(P_i X), e^i_k>` where `P_i` projects onto the cell.
pub fn check_basis_locality<T: Scalar>(
    rho: &RiskMeasure<T>,
    b: &BlockStructure<T>,
    cfg: &CheckConfig<T>,
) -> Result<PropertyReport<T>> {
    let n = b.space.n();
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed ^ STREAM_BASIS.rotate_left(17));
    let (lo, hi) = (cfg.lo.to_f64_lossy(), cfg.hi.to_f64_lossy());
    let xs: Vec<Vec<T>> = (0..cfg.samples)
        .map(|_| (0..n).map(|_| T::lit(rng.random_range(lo..=hi))).collect())
        .collect();
    let out: Vec<Option<RiskWitness<T>>> = xs
        .par_iter()
        .map(|x| {
            let rx = rho.evaluate(x, &b.space)?;
            let mut best: Option<(T, usize, usize)> = None;
            for (i, blk) in b.blocks.iter().enumerate() {
                let ry = rho.evaluate(&b.cell_projection(x, i), &b.space)?;
                for (k, e) in blk.e.iter().enumerate() {
                    let d = (b.space.inner(&rx, e) - b.space.inner(&ry, e)).abs();
                    if d > cfg.tol && best.is_none_or(|(v, ..)| d > v) {
                        best = Some((d, i, k));
                    }
                }
            }
            Ok(best.map(|(violation, cell, k)| RiskWitness::BasisLocality {
                x: x.clone(),
                cell,
                k,
                violation,
            }))
        })
        .collect::<Result<_>>()?;
    Ok(PropertyReport::collect("basis_locality", rho.name(), cfg.tol, out))
}

/// Self-duality of the coordinate cone inside the span of the e-vectors:
/// sampled members pair nonnegatively with sampled members, and every sampled
/// non-member pairs negatively with the e-vector carrying its negative
/// coordinate.
pub fn check_cone_self_dual<T: Scalar>(b: &BlockStructure<T>, samples: usize, seed: u64, tol: T) -> PropertyReport<T> {
    let es = b.e_vectors();
    let m = es.len();
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ STREAM_CONE.rotate_left(17));
    let combine = |c: &[T]| {
        let mut v = vec![T::zero(); b.space.n()];
        for (e, &ci) in es.iter().zip(c) {
            v.iter_mut().zip(e.iter()).for_each(|(a, &x)| *a = *a + ci * x);
        }
        v
    };
    let mut out = Vec::with_capacity(2 * samples);
    for _ in 0..samples {
        let cy: Vec<T> = (0..m)
            .map(|_| {
                if rng.random_bool(0.2) {
                    T::zero()
                } else {
                    T::lit(rng.random_range(0.0..3.0))
                }
            })
            .collect();
        let cv: Vec<T> = (0..m).map(|_| T::lit(rng.random_range(0.0..3.0))).collect();
        let (y, v) = (combine(&cy), combine(&cv));
        let inner = b.space.inner(&y, &v);
        out.push((inner < -tol).then_some(RiskWitness::ConeDuality { y, v, inner }));
    }
    for _ in 0..samples {
        let mut cy: Vec<T> = (0..m).map(|_| T::lit(rng.random_range(-3.0..3.0))).collect();
        let neg = rng.random_range(0..m);
        cy[neg] = -T::lit(rng.random_range(0.01..3.0));
        let y = combine(&cy);
        let coords = b.e_coordinates(&y);
        // The e-vector at the most negative coordinate lies in the cone and
        // separates `y`; a failure here means `y` was wrongly left in the dual.
        let (k, _) = coords
            .iter()
            .enumerate()
            .fold((0, T::infinity()), |acc, (k, &c)| if c < acc.1 { (k, c) } else { acc });
        let inner = b.space.inner(&y, es[k]);
        out.push((!(inner < T::zero())).then(|| RiskWitness::ConeDuality {
            y: y.clone(),
            v: es[k].clone(),
            inner,
        }));
    }
    PropertyReport::collect("cone_self_duality", "", tol, out)
}

/// Natural quasiconvexity and convexity with respect to the cone preorder,
/// with the sampled implication
/// `nqc && basis-local && normalized => convex`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PreorderReport<T> {
    pub nqc: PropertyReport<T>,
    pub convexity: PropertyReport<T>,
    pub basis_locality: PropertyReport<T>,
    pub normalized: bool,
    /// False only when the premises hold and convexity fails.
    pub implication_holds: bool,
}

pub fn check_nqc_wrt_preorder<T: Scalar>(
    rho: &RiskMeasure<T>,
    b: &BlockStructure<T>,
    cfg: &CheckConfig<T>,
) -> Result<PreorderReport<T>> {
    if let Some(i) = b.blocks.iter().position(|blk| blk.e.len() != 1) {
        return Err(Error::AssumptionViolated(format!(
            "cell {i} has an e-block of dimension {}; one-dimensional blocks are required",
            b.blocks[i].e.len()
        )));
    }
    let triples = sample_triples(b.space.n(), cfg);
    let ones = vec![T::one(); b.blocks.len()];
    let coords: Vec<(Vec<T>, Vec<T>, Vec<T>)> = triples
        .par_iter()
        .map(|t| {
            Ok((
                b.e_coordinates(&rho.evaluate(&t.x, &b.space)?),
                b.e_coordinates(&rho.evaluate(&t.y, &b.space)?),
                b.e_coordinates(&rho.evaluate(&t.mix(), &b.space)?),
            ))
        })
        .collect::<Result<_>>()?;
    let nqc_out = triples
        .iter()
        .zip(&coords)
        .map(|(t, (cx, cy, cm))| nqc_outcome(t, cx.clone(), cy.clone(), cm.clone(), &ones, cfg.tol))
        .collect();
    let cvx_out = triples
        .iter()
        .zip(&coords)
        .map(|(t, (cx, cy, cm))| {
            let l = t.lambda;
            let (k, violation) = cm
                .iter()
                .zip(cx.iter().zip(cy))
                .map(|(&m, (&a, &c))| m - (l * a + (T::one() - l) * c))
                .enumerate()
                .fold(
                    (0, T::neg_infinity()),
                    |acc, (k, v)| if v > acc.1 { (k, v) } else { acc },
                );
            (violation > cfg.tol).then(|| RiskWitness::Convexity {
                triple: t.clone(),
                outcome: k,
                violation,
            })
        })
        .collect();
    let nqc = PropertyReport::collect("nqc_wrt_preorder", rho.name(), cfg.tol, nqc_out);
    let convexity = PropertyReport::collect("convexity_wrt_preorder", rho.name(), cfg.tol, cvx_out);
    let basis_locality = check_basis_locality(rho, b, cfg)?;
    let normalized = rho
        .evaluate(&vec![T::zero(); b.space.n()], &b.space)?
        .iter()
        .all(|v| v.abs() <= cfg.tol);
    let premises = nqc.is_pass() && basis_locality.is_pass() && normalized;
    let implication_holds = !premises || convexity.is_pass();
    Ok(PreorderReport {
        nqc,
        convexity,
        basis_locality,
        normalized,
        implication_holds,
    })
}

/// Parses a structure file.
///
/// ```text
/// outcomes 10            # required first; uniform unless `probs` follows
/// probs 0.1 0.1 ...      # optional
/// sigma 1-2 | 3-4 | 5-7 | 8-10   # optional, defaults to the cells
/// cell 1-4
/// e 1 1 1 1 0 0 0 0 0 0  # optional; defaults to atom indicators
/// beta 1 -1 1 -1 0 0 0 0 0 0
/// ```
pub fn parse_structure<T: Scalar>(text: &str) -> Result<BlockStructure<T>> {
    let mut n: Option<usize> = None;
    let mut probs: Option<Vec<T>> = None;
    let mut sigma_atoms: Option<Vec<Vec<usize>>> = None;
    let mut cells: Vec<Vec<usize>> = Vec::new();
    let mut es: Vec<Vec<Vec<T>>> = Vec::new();
    let mut betas: Vec<Vec<Vec<T>>> = Vec::new();
    let perr = |line: usize, message: String| Error::Parse { line, message };
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let l = raw.split('#').next().unwrap_or("").trim();
        if l.is_empty() {
            continue;
        }
        let (key, rest) = l.split_once(char::is_whitespace).unwrap_or((l, ""));
        let rest = rest.trim();
        let need_n = || n.ok_or_else(|| perr(line, "`outcomes` must come first".into()));
        let numbers = |s: &str| -> Result<Vec<T>> {
            s.split_whitespace()
                .map(|t| {
                    parse_number(t)
                        .map(T::lit)
                        .ok_or_else(|| perr(line, format!("bad number '{t}'")))
                })
                .collect()
        };
        match key {
            "outcomes" => {
                n = Some(
                    rest.parse()
                        .map_err(|_| perr(line, format!("bad outcome count '{rest}'")))?,
                );
            }
            "probs" => {
                need_n()?;
                probs = Some(numbers(rest)?);
            }
            "sigma" => {
                need_n()?;
                sigma_atoms = Some(
                    rest.split('|')
                        .map(|s| parse_index_list(s, line))
                        .collect::<Result<_>>()?,
                );
            }
            "cell" => {
                need_n()?;
                cells.push(parse_index_list(rest, line)?);
                es.push(Vec::new());
                betas.push(Vec::new());
            }
            "e" | "beta" => {
                let nn = need_n()?;
                let v = numbers(rest)?;
                if v.len() != nn {
                    return Err(perr(line, format!("expected {nn} entries, found {}", v.len())));
                }
                let target = if key == "e" { es.last_mut() } else { betas.last_mut() };
                target
                    .ok_or_else(|| perr(line, "vector before any `cell`".into()))?
                    .push(v);
            }
            other => return Err(perr(line, format!("unknown key '{other}'"))),
        }
    }
    let n = n.ok_or_else(|| perr(0, "missing `outcomes`".into()))?;
    let space = match probs {
        Some(p) => FiniteProbSpace::new(p)?,
        None => FiniteProbSpace::uniform(n)?,
    };
    let cells = PartitionSigma::new(n, cells)?;
    let sigma = match sigma_atoms {
        Some(a) => PartitionSigma::new(n, a)?,
        None => cells.clone(),
    };
    if es.iter().all(|e| e.is_empty()) {
        BlockStructure::new(space, sigma, cells, betas)
    } else {
        BlockStructure::from_generators(space, sigma, cells, es, betas)
    }
}

/// Accepts decimals and simple fractions such as `-1/2`.
fn parse_number(t: &str) -> Option<f64> {
    match t.split_once('/') {
        Some((a, b)) => Some(a.parse::<f64>().ok()? / b.parse::<f64>().ok()?),
        None => t.parse().ok(),
    }
}

/// Basis as a plain numeric matrix, one vector per row, preceded by comment
/// lines naming each row.
pub fn write_basis_matrix<T: Scalar>(b: &BlockStructure<T>) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "# {} outcomes, one basis vector per row", b.space.n());
    for (i, blk) in b.blocks.iter().enumerate() {
        for (kind, vs) in [("e", &blk.e), ("beta", &blk.beta)] {
            for (k, v) in vs.iter().enumerate() {
                let _ = writeln!(s, "# cell {} {kind} {}", i + 1, k + 1);
                let row: Vec<String> = v.iter().map(|x| format!("{:.17e}", x.to_f64_lossy())).collect();
                let _ = writeln!(s, "{}", row.join(" "));
            }
        }
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gram_schmidt_two_points() {
        let p = FiniteProbSpace::uniform(2).unwrap();
        let q = gram_schmidt(&[vec![1.0f64, 1.0], vec![1.0, 0.0]], &p).unwrap();
        assert!((q[0][0] - 1.0).abs() < 1e-12 && (q[0][1] - 1.0).abs() < 1e-12);
        assert!((q[1][0] - 1.0).abs() < 1e-12 && (q[1][1] + 1.0).abs() < 1e-12);
    }

    #[test]
    fn gram_schmidt_keeps_orthonormal_input() {
        let p = FiniteProbSpace::uniform(2).unwrap();
        let v = vec![vec![1.0f64, 1.0], vec![1.0, -1.0]];
        let q = gram_schmidt(&v, &p).unwrap();
        for (a, b) in q.iter().flatten().zip(v.iter().flatten()) {
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn gram_schmidt_ten_points() {
        let p = FiniteProbSpace::uniform(10).unwrap();
        let mut a = vec![0.0; 10];
        a[..4].copy_from_slice(&[1.0, 1.0, -1.0, -1.0]);
        let mut b = vec![0.0; 10];
        b[..4].copy_from_slice(&[1.0, -1.0, 1.0, -1.0]);
        let q = gram_schmidt(&[a.clone(), b], &p).unwrap();
        let s = 10f64.sqrt() / 2.0;
        assert!((q[0][0] - s).abs() < 1e-12);
        assert!(p.inner(&q[0], &q[1]).abs() < 1e-12);
        assert_eq!(
            gram_schmidt(&[a.clone(), a.iter().map(|x| 2.0 * x).collect()], &p),
            Err(Error::RankDeficient { index: 1 })
        );
    }

    #[test]
    fn example_structure() {
        let b = build_example_10pt::<f64>();
        assert_eq!(b.e_block_dims(), vec![1, 1, 1]);
        assert_eq!(b.beta_block_dims(), vec![3, 2, 2]);
        assert_eq!(b.basis().len(), 10);
        assert!(b.orthonormality_residual() < 1e-12);
        assert!((b.blocks[0].e[0][0] - 1.0 / 0.4f64.sqrt()).abs() < 1e-12);
        // third generator of cell 1 loses its e-component: (-1, 0, 0, -1) + 1/2
        let v = &b.blocks[0].beta[2];
        let s = v[1];
        assert!(s > 0.0);
        for (x, want) in v[..4].iter().zip([-1.0, 1.0, 1.0, -1.0]) {
            assert!((x - want * s).abs() < 1e-12);
        }
    }

    #[test]
    fn refined_structure() {
        let b = build_refined_10pt::<f64>();
        assert_eq!(b.e_block_dims(), vec![2, 1, 1]);
        assert_eq!(b.beta_block_dims(), vec![2, 2, 2]);
        assert!(b.orthonormality_residual() < 1e-12);
    }

    #[test]
    fn complement_projection() {
        let p = FiniteProbSpace::uniform(2).unwrap();
        let t = PartitionSigma::trivial(2);
        assert_eq!(project_g_complement(&[1.0, -1.0], &t, &p).values(), &[1.0, -1.0]);
        assert!(project_g_complement(&[3.0f64, 3.0], &t, &p)
            .iter()
            .all(|v| v.abs() < 1e-15));
        let b = build_example_10pt::<f64>();
        let x: Vec<f64> = (1..=10).map(f64::from).collect();
        let xp = project_g_complement(&x, &b.sigma, &b.space);
        for e in b.e_vectors() {
            assert!(b.space.inner(&xp, e).abs() < 1e-12);
        }
        assert!((xp[0] + 1.5).abs() < 1e-12 && (xp[9] - 1.0).abs() < 1e-12);
    }

    #[test]
    fn cone_examples() {
        let b = build_example_10pt::<f64>();
        let y: Vec<f64> = (0..10).map(|i| (i as f64).cos()).collect();
        let e1 = b.e_vectors()[0].clone();
        let up: Vec<f64> = y.iter().zip(&e1).map(|(a, c)| a + c).collect();
        let down: Vec<f64> = y.iter().zip(&e1).map(|(a, c)| a - c).collect();
        assert!(cone_leq(&y, &y, &b));
        assert!(cone_leq(&y, &up, &b));
        assert!(!cone_leq(&y, &down, &b));
        let r = check_cone_self_dual(&b, 100, 3, 1e-12);
        assert!(r.is_pass());
        assert_eq!(r.samples, 200);
    }

    #[test]
    fn basis_locality_examples() {
        let b = build_example_10pt::<f64>();
        let cfg = CheckConfig::new(100, 5);
        assert!(
            check_basis_locality(&RiskMeasure::neg_conditional_mean(b.sigma.clone()), &b, &cfg)
                .unwrap()
                .is_pass()
        );
        assert!(
            check_basis_locality(&RiskMeasure::mean_broadcast(b.sigma.clone()), &b, &cfg)
                .unwrap()
                .is_fail()
        );
    }

    #[test]
    fn preorder_requires_one_dimensional_blocks() {
        let b = build_refined_10pt::<f64>();
        let rho = RiskMeasure::neg_conditional_mean(b.sigma.clone());
        assert!(matches!(
            check_nqc_wrt_preorder(&rho, &b, &CheckConfig::new(10, 0)),
            Err(Error::AssumptionViolated(_))
        ));
    }

    #[test]
    fn preorder_examples() {
        let b = build_example_10pt::<f64>();
        let cfg = CheckConfig::new(100, 9);
        for rho in [
            RiskMeasure::neg_conditional_mean(b.sigma.clone()),
            RiskMeasure::entropic(b.sigma.clone()),
        ] {
            let r = check_nqc_wrt_preorder(&rho, &b, &cfg).unwrap();
            assert!(
                r.nqc.is_pass() && r.convexity.is_pass() && r.implication_holds,
                "{}",
                rho.name()
            );
        }
        let r = check_nqc_wrt_preorder(&RiskMeasure::sqrt_log_demo(b.sigma.clone()), &b, &cfg).unwrap();
        assert!(r.nqc.is_fail() && r.implication_holds);
    }

    #[test]
    fn structure_file_roundtrip() {
        let text = "outcomes 10\n\
                    cell 1-4\nbeta 1 1 -1 -1 0 0 0 0 0 0\nbeta 1 -1 1 -1 0 0 0 0 0 0\nbeta -1 0 0 -1 0 0 0 0 0 0\n\
                    cell 5-7\nbeta 0 0 0 0 -1/2 -1/2 1 0 0 0\nbeta 0 0 0 0 -1 1 0 0 0 0\n\
                    cell 8-10\nbeta 0 0 0 0 0 0 0 -1/2 -1/2 1\nbeta 0 0 0 0 0 0 0 -1 1 0\n";
        let parsed: BlockStructure<f64> = parse_structure(text).unwrap();
        assert_eq!(parsed, build_example_10pt());
        let m = write_basis_matrix(&parsed);
        let rows: Vec<&str> = m.lines().filter(|l| !l.starts_with('#')).collect();
        assert_eq!(rows.len(), 10);
        assert!(matches!(
            parse_structure::<f64>("cell 1-2\n"),
            Err(Error::Parse { line: 1, .. })
        ));
    }
}
