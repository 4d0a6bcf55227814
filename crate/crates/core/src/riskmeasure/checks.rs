use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Scalar;

use super::dual::{dual_directions, nqc_mu_interval, separating_dual_witness, DualWitness, MuInterval};
use super::measures::RiskMeasure;
use super::space::FiniteProbSpace;

// Independent random streams per sampled family.
const STREAM_TRIPLES: u64 = 0x5452_4950;
const STREAM_MONOTONE: u64 = 0x4d4f_4e4f;
const STREAM_SHIFT: u64 = 0x5348_4946;
const STREAM_LOCAL: u64 = 0x4c4f_4341;
const STREAM_DUAL: u64 = 0x4455_414c;

/// Sampling and tolerance settings shared by the property checkers.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CheckConfig<T> {
    pub samples: usize,
    pub seed: u64,
    pub lo: T,
    pub hi: T,
    pub lambdas: Vec<T>,
    pub tol: T,
    /// Simplex grid points per edge for the scalarization weights (up to three atoms).
    pub dual_per_edge: usize,
    /// Dirichlet draws for the scalarization weights (four atoms or more).
    pub dual_samples: usize,
}

impl<T: Scalar> CheckConfig<T> {
    pub fn new(samples: usize, seed: u64) -> Self {
        Self {
            samples,
            seed,
            lo: T::lit(-3.0),
            hi: T::lit(3.0),
            lambdas: (1..8).map(|k| T::lit(k as f64 / 8.0)).collect(),
            tol: T::lit(1e-6),
            dual_per_edge: 51,
            dual_samples: 500,
        }
    }

    pub fn with_tol(mut self, tol: T) -> Self {
        self.tol = tol;
        self
    }

    pub fn with_range(mut self, lo: T, hi: T) -> Self {
        self.lo = lo;
        self.hi = hi;
        self
    }

    fn rng(&self, stream: u64) -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(self.seed ^ stream.rotate_left(17))
    }

    fn uniform_vec(&self, rng: &mut ChaCha8Rng, n: usize) -> Vec<T> {
        let (lo, hi) = (self.lo.to_f64_lossy(), self.hi.to_f64_lossy());
        (0..n).map(|_| T::lit(rng.random_range(lo..=hi))).collect()
    }
}

impl Default for CheckConfig<f64> {
    fn default() -> Self {
        Self::new(200, 0)
    }
}

/// Sampled `(X, Y, lambda)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Triple<T> {
    pub x: Vec<T>,
    pub y: Vec<T>,
    pub lambda: T,
}

impl<T: Scalar> Triple<T> {
    pub fn mix(&self) -> Vec<T> {
        let l = self.lambda;
        self.x
            .iter()
            .zip(&self.y)
            .map(|(&a, &b)| l * a + (T::one() - l) * b)
            .collect()
    }
}

/// Triples shared by the mixture-based checkers; the same seed gives the same triples.
pub fn sample_triples<T: Scalar>(n: usize, cfg: &CheckConfig<T>) -> Vec<Triple<T>> {
    let mut rng = cfg.rng(STREAM_TRIPLES);
    (0..cfg.samples)
        .map(|_| {
            let x = cfg.uniform_vec(&mut rng, n);
            let y = cfg.uniform_vec(&mut rng, n);
            let lambda = cfg.lambdas[rng.random_range(0..cfg.lambdas.len())];
            Triple { x, y, lambda }
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LocalityForm {
    /// `rho(X 1_A) 1_A = rho(X) 1_A`.
    Restriction,
    /// `rho(X 1_A + U 1_{A^c}) 1_A = rho(X) 1_A`.
    Pasting,
}

/// Reproducible evidence of a property violation. Vectors are over outcomes
/// unless named per atom.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum RiskWitness<T> {
    Monotonicity {
        x: Vec<T>,
        y: Vec<T>,
        outcome: usize,
        violation: T,
    },
    Translativity {
        x: Vec<T>,
        z: Vec<T>,
        outcome: usize,
        violation: T,
    },
    Locality {
        x: Vec<T>,
        u: Option<Vec<T>>,
        form: LocalityForm,
        event_atoms: Vec<usize>,
        outcome: usize,
        violation: T,
    },
    Quasiconvexity {
        triple: Triple<T>,
        outcome: usize,
        violation: T,
    },
    Convexity {
        triple: Triple<T>,
        outcome: usize,
        violation: T,
    },
    NaturalQuasiconvexity {
        triple: Triple<T>,
        rho_x: Vec<T>,
        rho_y: Vec<T>,
        rho_mix: Vec<T>,
        certificate: MuInterval<T>,
        dual: Option<DualWitness<T>>,
    },
    Scalarization {
        triple: Triple<T>,
        z_star: Vec<T>,
        violation: T,
    },
    Sensitivity {
        epsilon: T,
        event: Vec<usize>,
    },
    ConstantScalarization {
        atom: usize,
        constants_tried: Vec<T>,
    },
    BasisLocality {
        x: Vec<T>,
        cell: usize,
        k: usize,
        violation: T,
    },
    ConeDuality {
        y: Vec<T>,
        v: Vec<T>,
        inner: T,
    },
}

impl<T: Scalar> RiskWitness<T> {
    /// Violation magnitude used to rank witnesses.
    pub fn magnitude(&self) -> T {
        match self {
            RiskWitness::Monotonicity { violation, .. }
            | RiskWitness::Translativity { violation, .. }
            | RiskWitness::Locality { violation, .. }
            | RiskWitness::Quasiconvexity { violation, .. }
            | RiskWitness::Convexity { violation, .. }
            | RiskWitness::Scalarization { violation, .. }
            | RiskWitness::BasisLocality { violation, .. } => *violation,
            RiskWitness::NaturalQuasiconvexity { dual, .. } => dual.as_ref().map_or(T::zero(), |d| d.margin),
            RiskWitness::ConeDuality { inner, .. } => -*inner,
            RiskWitness::Sensitivity { .. } | RiskWitness::ConstantScalarization { .. } => T::zero(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "verdict", rename_all = "snake_case")]
pub enum PropertyVerdict<T> {
    Pass,
    Fail { witness: Box<RiskWitness<T>> },
    Inconclusive { reason: String },
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PropertyReport<T> {
    pub property: String,
    pub measure: String,
    #[serde(flatten)]
    pub verdict: PropertyVerdict<T>,
    pub samples: usize,
    /// Samples left out because the measure is not finite there.
    pub skipped: usize,
    pub tol: T,
    pub failures: usize,
    /// Indices of the failing samples, in sampling order.
    pub failing: Vec<usize>,
}

impl<T: Scalar> PropertyReport<T> {
    pub fn is_pass(&self) -> bool {
        matches!(self.verdict, PropertyVerdict::Pass)
    }

    pub fn is_fail(&self) -> bool {
        matches!(self.verdict, PropertyVerdict::Fail { .. })
    }

    pub fn witness(&self) -> Option<&RiskWitness<T>> {
        match &self.verdict {
            PropertyVerdict::Fail { witness } => Some(witness),
            _ => None,
        }
    }

    pub(crate) fn inconclusive(property: &str, measure: &str, tol: T, reason: String) -> Self {
        Self {
            property: property.into(),
            measure: measure.into(),
            verdict: PropertyVerdict::Inconclusive { reason },
            samples: 0,
            skipped: 0,
            tol,
            failures: 0,
            failing: Vec::new(),
        }
    }

    /// Folds per-sample outcomes; the reported witness is the largest violation
    /// (earliest sample on ties).
    pub(crate) fn collect(property: &str, measure: &str, tol: T, outcomes: Vec<Option<RiskWitness<T>>>) -> Self {
        let samples = outcomes.len();
        let failing: Vec<usize> = outcomes
            .iter()
            .enumerate()
            .filter_map(|(i, o)| o.as_ref().map(|_| i))
            .collect();
        let mut worst: Option<RiskWitness<T>> = None;
        for w in outcomes.into_iter().flatten() {
            if worst.as_ref().is_none_or(|b| w.magnitude() > b.magnitude()) {
                worst = Some(w);
            }
        }
        Self {
            property: property.into(),
            measure: measure.into(),
            verdict: match worst {
                Some(w) => PropertyVerdict::Fail { witness: Box::new(w) },
                None => PropertyVerdict::Pass,
            },
            samples,
            skipped: 0,
            tol,
            failures: failing.len(),
            failing,
        }
    }

    /// Like `collect`, with `None` marking samples outside the measure's domain.
    /// Inconclusive when every sample was skipped.
    pub(crate) fn collect_sampled(
        property: &str,
        measure: &str,
        tol: T,
        outcomes: Vec<Option<Option<RiskWitness<T>>>>,
    ) -> Self {
        let skipped = outcomes.iter().filter(|o| o.is_none()).count();
        if skipped > 0 && skipped == outcomes.len() {
            let mut r = Self::inconclusive(property, measure, tol, "measure not finite on any sample".into());
            r.samples = outcomes.len();
            r.skipped = skipped;
            return r;
        }
        let mut r = Self::collect(
            property,
            measure,
            tol,
            outcomes.into_iter().map(Option::flatten).collect(),
        );
        r.skipped = skipped;
        r
    }
}

/// Largest entry of `a - b` with its position.
fn max_excess<T: Scalar>(a: &[T], b: &[T]) -> (usize, T) {
    let mut best = (0, T::neg_infinity());
    for (i, (&u, &v)) in a.iter().zip(b).enumerate() {
        if u - v > best.1 {
            best = (i, u - v);
        }
    }
    best
}

/// Runs `f` over the samples in parallel. A sample on which the measure is not
/// finite comes back as `None`.
fn par_outcomes<S, T, F>(samples: &[S], f: F) -> Result<Vec<Option<Option<RiskWitness<T>>>>>
where
    S: Sync,
    T: Scalar,
    F: Fn(&S) -> Result<Option<RiskWitness<T>>> + Sync + Send,
{
    samples
        .par_iter()
        .map(|s| match f(s) {
            Ok(w) => Ok(Some(w)),
            Err(Error::NonFinite { .. }) => Ok(None),
            Err(e) => Err(e),
        })
        .collect()
}

/// `X <= Y` implies `rho(X) >= rho(Y)`, on pairs `Y = X + Delta` with `Delta >= 0`.
pub fn check_monotonicity<T: Scalar>(
    rho: &RiskMeasure<T>,
    space: &FiniteProbSpace<T>,
    cfg: &CheckConfig<T>,
) -> Result<PropertyReport<T>> {
    let n = space.n();
    let mut rng = cfg.rng(STREAM_MONOTONE);
    let spread = (cfg.hi - cfg.lo).to_f64_lossy() / 2.0;
    let pairs: Vec<(Vec<T>, Vec<T>)> = (0..cfg.samples)
        .map(|_| {
            let x = cfg.uniform_vec(&mut rng, n);
            let y = x
                .iter()
                .map(|&v| {
                    if rng.random_bool(0.5) {
                        v + T::lit(rng.random_range(0.0..=spread))
                    } else {
                        v
                    }
                })
                .collect();
            (x, y)
        })
        .collect();
    let out = par_outcomes(&pairs, |(x, y)| {
        let rx = rho.evaluate(x, space)?;
        let ry = rho.evaluate(y, space)?;
        let (outcome, violation) = max_excess(&ry, &rx);
        Ok((violation > cfg.tol).then(|| RiskWitness::Monotonicity {
            x: x.clone(),
            y: y.clone(),
            outcome,
            violation,
        }))
    })?;
    Ok(PropertyReport::collect_sampled(
        "monotonicity",
        rho.name(),
        cfg.tol,
        out,
    ))
}

/// `rho(X + Z) = rho(X) - Z` for measurable `Z`.
pub fn check_translativity<T: Scalar>(
    rho: &RiskMeasure<T>,
    space: &FiniteProbSpace<T>,
    cfg: &CheckConfig<T>,
) -> Result<PropertyReport<T>> {
    let n = space.n();
    let sigma = rho.sigma();
    let mut rng = cfg.rng(STREAM_SHIFT);
    let pairs: Vec<(Vec<T>, Vec<T>)> = (0..cfg.samples)
        .map(|_| {
            let x = cfg.uniform_vec(&mut rng, n);
            let z = sigma.broadcast(&cfg.uniform_vec(&mut rng, sigma.n_atoms()));
            (x, z)
        })
        .collect();
    let out = par_outcomes(&pairs, |(x, z)| {
        let shifted: Vec<T> = x.iter().zip(z).map(|(&a, &b)| a + b).collect();
        let lhs = rho.evaluate(&shifted, space)?;
        let rhs: Vec<T> = rho.evaluate(x, space)?.iter().zip(z).map(|(&r, &b)| r - b).collect();
        let dev: Vec<T> = lhs.iter().zip(&rhs).map(|(&a, &b)| (a - b).abs()).collect();
        let (outcome, violation) = max_excess(&dev, &vec![T::zero(); n]);
        Ok((violation > cfg.tol).then(|| RiskWitness::Translativity {
            x: x.clone(),
            z: z.clone(),
            outcome,
            violation,
        }))
    })?;
    Ok(PropertyReport::collect_sampled(
        "translativity",
        rho.name(),
        cfg.tol,
        out,
    ))
}

/// Both locality forms on events that are unions of atoms.
pub fn check_locality<T: Scalar>(
    rho: &RiskMeasure<T>,
    space: &FiniteProbSpace<T>,
    cfg: &CheckConfig<T>,
) -> Result<PropertyReport<T>> {
    let n = space.n();
    let sigma = rho.sigma();
    let k = sigma.n_atoms();
    let mut rng = cfg.rng(STREAM_LOCAL);
    let cases: Vec<(Vec<T>, Vec<T>, Vec<usize>)> = (0..cfg.samples)
        .map(|_| {
            let x = cfg.uniform_vec(&mut rng, n);
            let u = cfg.uniform_vec(&mut rng, n);
            let mut atoms: Vec<usize> = (0..k).filter(|_| rng.random_bool(0.5)).collect();
            if atoms.is_empty() {
                atoms.push(rng.random_range(0..k));
            }
            (x, u, atoms)
        })
        .collect();
    let out = par_outcomes(&cases, |(x, u, atoms)| {
        let event = sigma.event(atoms);
        let inside: Vec<bool> = {
            let mut m = vec![false; n];
            event.iter().for_each(|&i| m[i] = true);
            m
        };
        let base = rho.evaluate(x, space)?;
        let restricted: Vec<T> = (0..n).map(|i| if inside[i] { x[i] } else { T::zero() }).collect();
        let pasted: Vec<T> = (0..n).map(|i| if inside[i] { x[i] } else { u[i] }).collect();
        let r1 = rho.evaluate(&restricted, space)?;
        let r2 = rho.evaluate(&pasted, space)?;
        let mut best: Option<(T, LocalityForm, usize)> = None;
        for &i in &event {
            for (form, r) in [(LocalityForm::Restriction, &r1), (LocalityForm::Pasting, &r2)] {
                let d = (r[i] - base[i]).abs();
                if d > cfg.tol && best.is_none_or(|(b, ..)| d > b) {
                    best = Some((d, form, i));
                }
            }
        }
        Ok(best.map(|(violation, form, outcome)| RiskWitness::Locality {
            x: x.clone(),
            u: (form == LocalityForm::Pasting).then(|| u.clone()),
            form,
            event_atoms: atoms.clone(),
            outcome,
            violation,
        }))
    })?;
    Ok(PropertyReport::collect_sampled("locality", rho.name(), cfg.tol, out))
}

/// Values of `rho` at `X`, `Y` and the mixture.
fn eval_triple<T: Scalar>(
    rho: &RiskMeasure<T>,
    space: &FiniteProbSpace<T>,
    t: &Triple<T>,
) -> Result<(Vec<T>, Vec<T>, Vec<T>)> {
    Ok((
        rho.evaluate(&t.x, space)?,
        rho.evaluate(&t.y, space)?,
        rho.evaluate(&t.mix(), space)?,
    ))
}

/// Componentwise `rho(mix) <= max(rho(X), rho(Y))`.
pub fn check_quasiconvexity<T: Scalar>(
    rho: &RiskMeasure<T>,
    space: &FiniteProbSpace<T>,
    cfg: &CheckConfig<T>,
) -> Result<PropertyReport<T>> {
    let triples = sample_triples(space.n(), cfg);
    let out = par_outcomes(&triples, |t| {
        let (rx, ry, rm) = eval_triple(rho, space, t)?;
        let hull: Vec<T> = rx.iter().zip(&ry).map(|(&a, &b)| a.max(b)).collect();
        let (outcome, violation) = max_excess(&rm, &hull);
        Ok((violation > cfg.tol).then(|| RiskWitness::Quasiconvexity {
            triple: t.clone(),
            outcome,
            violation,
        }))
    })?;
    Ok(PropertyReport::collect_sampled(
        "quasiconvexity",
        rho.name(),
        cfg.tol,
        out,
    ))
}

/// Componentwise `rho(mix) <= lambda rho(X) + (1 - lambda) rho(Y)`.
pub fn check_convexity<T: Scalar>(
    rho: &RiskMeasure<T>,
    space: &FiniteProbSpace<T>,
    cfg: &CheckConfig<T>,
) -> Result<PropertyReport<T>> {
    let triples = sample_triples(space.n(), cfg);
    let out = par_outcomes(&triples, |t| {
        let (rx, ry, rm) = eval_triple(rho, space, t)?;
        let l = t.lambda;
        let chord: Vec<T> = rx.iter().zip(&ry).map(|(&a, &b)| l * a + (T::one() - l) * b).collect();
        let (outcome, violation) = max_excess(&rm, &chord);
        Ok((violation > cfg.tol).then(|| RiskWitness::Convexity {
            triple: t.clone(),
            outcome,
            violation,
        }))
    })?;
    Ok(PropertyReport::collect_sampled("convexity", rho.name(), cfg.tol, out))
}

/// Natural quasiconvexity on vectors of coordinates: the mixing-weight
/// interval must be nonempty. Failures carry the emptiness certificate and the
/// separating dual vector.
pub(crate) fn nqc_outcome<T: Scalar>(
    t: &Triple<T>,
    rx: Vec<T>,
    ry: Vec<T>,
    rm: Vec<T>,
    weights: &[T],
    tol: T,
) -> Option<RiskWitness<T>> {
    let interval = nqc_mu_interval(&rx, &ry, &rm, tol);
    if !interval.is_empty() {
        return None;
    }
    let dual = separating_dual_witness(&rx, &ry, &rm, weights);
    Some(RiskWitness::NaturalQuasiconvexity {
        triple: t.clone(),
        rho_x: rx,
        rho_y: ry,
        rho_mix: rm,
        certificate: interval,
        dual,
    })
}

/// For each triple some `mu in [0, 1]` satisfies
/// `rho(mix) <= mu rho(X) + (1 - mu) rho(Y)` on every atom.
pub fn check_natural_quasiconvexity<T: Scalar>(
    rho: &RiskMeasure<T>,
    space: &FiniteProbSpace<T>,
    cfg: &CheckConfig<T>,
) -> Result<PropertyReport<T>> {
    let triples = sample_triples(space.n(), cfg);
    let sigma = rho.sigma();
    let probs = sigma.atom_probs(space);
    let out = par_outcomes(&triples, |t| {
        let (rx, ry, rm) = eval_triple(rho, space, t)?;
        Ok(nqc_outcome(
            t,
            sigma.atom_values(&rx),
            sigma.atom_values(&ry),
            sigma.atom_values(&rm),
            &probs,
            cfg.tol,
        ))
    })?;
    Ok(PropertyReport::collect_sampled(
        "natural_quasiconvexity",
        rho.name(),
        cfg.tol,
        out,
    ))
}

/// Every scalarization `X -> E[rho(X) Z*]`, `Z* >= 0`, is quasiconvex on the
/// sampled triples. `Z*` ranges over [`dual_directions`] rescaled by atom
/// probabilities.
pub fn check_star_quasiconvexity<T: Scalar>(
    rho: &RiskMeasure<T>,
    space: &FiniteProbSpace<T>,
    cfg: &CheckConfig<T>,
) -> Result<PropertyReport<T>> {
    let triples = sample_triples(space.n(), cfg);
    let sigma = rho.sigma();
    let probs = sigma.atom_probs(space);
    let dirs: Vec<Vec<T>> = dual_directions(
        sigma.n_atoms(),
        cfg.dual_per_edge,
        cfg.dual_samples,
        cfg.seed ^ STREAM_DUAL,
    );
    let out = par_outcomes(&triples, |t| {
        let (rx, ry, rm) = eval_triple(rho, space, t)?;
        let (ax, ay, am) = (sigma.atom_values(&rx), sigma.atom_values(&ry), sigma.atom_values(&rm));
        let dot = |w: &[T], r: &[T]| w.iter().zip(r).map(|(&a, &b)| a * b).sum::<T>();
        let mut best: Option<(T, usize)> = None;
        for (j, w) in dirs.iter().enumerate() {
            let v = dot(w, &am) - dot(w, &ax).max(dot(w, &ay));
            if v > cfg.tol && best.is_none_or(|(b, _)| v > b) {
                best = Some((v, j));
            }
        }
        Ok(best.map(|(violation, j)| RiskWitness::Scalarization {
            triple: t.clone(),
            z_star: dirs[j].iter().zip(&probs).map(|(&w, &p)| w / p).collect(),
            violation,
        }))
    })?;
    Ok(PropertyReport::collect_sampled(
        "star_quasiconvexity",
        rho.name(),
        cfg.tol,
        out,
    ))
}

/// Default sensitivity events: every single outcome and every atom.
pub fn default_events<T: Scalar>(rho: &RiskMeasure<T>) -> Vec<Vec<usize>> {
    let sigma = rho.sigma();
    let mut ev: Vec<Vec<usize>> = (0..sigma.n_outcomes()).map(|i| vec![i]).collect();
    ev.extend(sigma.atoms().iter().map(|a| {
        let mut a = a.clone();
        a.sort_unstable();
        a
    }));
    ev
}

pub fn default_epsilons<T: Scalar>() -> Vec<T> {
    [1e-3, 0.1, 1.0, 10.0].into_iter().map(T::lit).collect()
}

/// `rho(-eps 1_A) > 0` on a non-null set for every listed `eps` and event.
/// Requires `rho(0) = 0` within tolerance.
pub fn check_sensitivity<T: Scalar>(
    rho: &RiskMeasure<T>,
    space: &FiniteProbSpace<T>,
    epsilons: &[T],
    events: &[Vec<usize>],
    tol: T,
) -> Result<PropertyReport<T>> {
    let n = space.n();
    let at_zero = rho.evaluate(&vec![T::zero(); n], space)?;
    if let Some(i) = at_zero.iter().position(|v| v.abs() > tol) {
        return Ok(PropertyReport::inconclusive(
            "sensitivity",
            rho.name(),
            tol,
            format!("not normalized: rho(0) = {} at outcome {i}", at_zero[i]),
        ));
    }
    let cases: Vec<(T, &Vec<usize>)> = epsilons
        .iter()
        .flat_map(|&e| events.iter().map(move |ev| (e, ev)))
        .collect();
    let out = par_outcomes(&cases, |&(eps, ev)| {
        if ev.is_empty() {
            return Ok(None);
        }
        let mut x = vec![T::zero(); n];
        ev.iter().for_each(|&i| x[i] = -eps);
        let r = rho.evaluate(&x, space)?;
        let positive = r.iter().any(|&v| v > T::zero());
        Ok((!positive).then(|| RiskWitness::Sensitivity {
            epsilon: eps,
            event: ev.clone(),
        }))
    })?;
    Ok(PropertyReport::collect_sampled("sensitivity", rho.name(), tol, out))
}

/// For every atom `A` some constants `x1 != x2` give
/// `E[rho(x1) 1_A] != E[rho(x2) 1_A]`. Tries up to `budget` constants
/// `0, 1, -1, 2, -2, ..`.
pub fn check_assumption_nonconstant<T: Scalar>(
    rho: &RiskMeasure<T>,
    space: &FiniteProbSpace<T>,
    budget: usize,
    tol: T,
) -> Result<PropertyReport<T>> {
    let n = space.n();
    let sigma = rho.sigma();
    let constants: Vec<T> = (0..budget.max(2))
        .map(|j| {
            let m = T::from_usize(j.div_ceil(2)).unwrap();
            if j % 2 == 1 {
                m
            } else {
                -m
            }
        })
        .collect();
    let mut tried = Vec::with_capacity(constants.len());
    let mut outputs = Vec::with_capacity(constants.len());
    for &c in &constants {
        match rho.evaluate(&vec![c; n], space) {
            Ok(r) => {
                tried.push(c);
                outputs.push(r);
            }
            Err(Error::NonFinite { .. }) => {}
            Err(e) => return Err(e),
        }
    }
    let p = space.probs();
    let out: Vec<Option<RiskWitness<T>>> = sigma
        .atoms()
        .iter()
        .enumerate()
        .map(|(a, atom)| {
            let vals: Vec<T> = outputs
                .iter()
                .map(|r| atom.iter().map(|&i| p[i] * r[i]).sum::<T>())
                .collect();
            let varies = vals.iter().any(|&v| (v - vals[0]).abs() > tol);
            (!varies).then(|| RiskWitness::ConstantScalarization {
                atom: a,
                constants_tried: tried.clone(),
            })
        })
        .collect();
    Ok(PropertyReport::collect("assumption_nonconstant", rho.name(), tol, out))
}

/// Recomputes a witness against `rho`; returns the violation it reproduces, or
/// `None` when the witness kind is not a sampled inequality.
pub fn replay_witness<T: Scalar>(
    rho: &RiskMeasure<T>,
    space: &FiniteProbSpace<T>,
    w: &RiskWitness<T>,
) -> Result<Option<T>> {
    let v = match w {
        RiskWitness::Monotonicity { x, y, outcome, .. } => {
            Some(rho.evaluate(y, space)?[*outcome] - rho.evaluate(x, space)?[*outcome])
        }
        RiskWitness::Translativity { x, z, outcome, .. } => {
            let s: Vec<T> = x.iter().zip(z).map(|(&a, &b)| a + b).collect();
            Some((rho.evaluate(&s, space)?[*outcome] - rho.evaluate(x, space)?[*outcome] + z[*outcome]).abs())
        }
        RiskWitness::Locality {
            x,
            u,
            event_atoms,
            outcome,
            ..
        } => {
            let ev = rho.sigma().event(event_atoms);
            let mut y: Vec<T> = match u {
                Some(u) => u.clone(),
                None => vec![T::zero(); x.len()],
            };
            ev.iter().for_each(|&i| y[i] = x[i]);
            Some((rho.evaluate(&y, space)?[*outcome] - rho.evaluate(x, space)?[*outcome]).abs())
        }
        RiskWitness::Quasiconvexity { triple, outcome, .. } => {
            let (rx, ry, rm) = eval_triple(rho, space, triple)?;
            Some(rm[*outcome] - rx[*outcome].max(ry[*outcome]))
        }
        RiskWitness::Convexity { triple, outcome, .. } => {
            let (rx, ry, rm) = eval_triple(rho, space, triple)?;
            let l = triple.lambda;
            Some(rm[*outcome] - (l * rx[*outcome] + (T::one() - l) * ry[*outcome]))
        }
        RiskWitness::NaturalQuasiconvexity { triple, dual, .. } => {
            let (rx, ry, rm) = eval_triple(rho, space, triple)?;
            let s = rho.sigma();
            let (ax, ay, am) = (s.atom_values(&rx), s.atom_values(&ry), s.atom_values(&rm));
            match dual {
                Some(d) => {
                    let dot = |r: &[T]| d.weights.iter().zip(r).map(|(&a, &b)| a * b).sum::<T>();
                    Some(dot(&am) - dot(&ax).max(dot(&ay)))
                }
                None => separating_dual_witness(&ax, &ay, &am, &s.atom_probs(space)).map(|d| d.margin),
            }
        }
        RiskWitness::Scalarization { triple, z_star, .. } => {
            let (rx, ry, rm) = eval_triple(rho, space, triple)?;
            let s = rho.sigma();
            let probs = s.atom_probs(space);
            let e = |r: &[T]| {
                s.atom_values(r)
                    .iter()
                    .zip(z_star)
                    .zip(&probs)
                    .map(|((&a, &z), &p)| a * z * p)
                    .sum::<T>()
            };
            Some(e(&rm) - e(&rx).max(e(&ry)))
        }
        _ => None,
    };
    Ok(v)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::riskmeasure::space::PartitionSigma;

    fn setup() -> (FiniteProbSpace<f64>, PartitionSigma) {
        (
            FiniteProbSpace::uniform(10).unwrap(),
            PartitionSigma::from_sizes(&[4, 3, 3]).unwrap(),
        )
    }

    fn cfg() -> CheckConfig<f64> {
        CheckConfig::new(100, 11)
    }

    #[test]
    fn triples_are_reproducible() {
        let c = cfg();
        assert_eq!(sample_triples(10, &c), sample_triples(10, &c));
        let other = CheckConfig::new(100, 12);
        assert_ne!(sample_triples(10, &c), sample_triples(10, &other));
    }

    #[test]
    fn monotonicity_examples() {
        let (p, g) = setup();
        assert!(
            check_monotonicity(&RiskMeasure::neg_conditional_mean(g.clone()), &p, &cfg())
                .unwrap()
                .is_pass()
        );
        assert!(check_monotonicity(&RiskMeasure::entropic(g.clone()), &p, &cfg())
            .unwrap()
            .is_pass());
        let r = check_monotonicity(&RiskMeasure::conditional_mean(g.clone()), &p, &cfg()).unwrap();
        assert!(r.is_fail());
        let w = r.witness().unwrap();
        let v = replay_witness(&RiskMeasure::conditional_mean(g), &p, w)
            .unwrap()
            .unwrap();
        assert!((v - w.magnitude()).abs() < 1e-12);
    }

    #[test]
    fn translativity_examples() {
        let (p, g) = setup();
        assert!(
            check_translativity(&RiskMeasure::neg_conditional_mean(g.clone()), &p, &cfg())
                .unwrap()
                .is_pass()
        );
        assert!(check_translativity(&RiskMeasure::entropic(g.clone()), &p, &cfg())
            .unwrap()
            .is_pass());
        assert!(check_translativity(&RiskMeasure::cubed_mean(g), &p, &cfg())
            .unwrap()
            .is_fail());
    }

    #[test]
    fn locality_examples() {
        let (p, g) = setup();
        assert!(
            check_locality(&RiskMeasure::neg_conditional_mean(g.clone()), &p, &cfg())
                .unwrap()
                .is_pass()
        );
        assert!(check_locality(&RiskMeasure::sqrt_log_demo(g.clone()), &p, &cfg())
            .unwrap()
            .is_pass());
        let rho = RiskMeasure::mean_broadcast(g);
        let r = check_locality(&rho, &p, &cfg()).unwrap();
        assert!(r.is_fail());
        let w = r.witness().unwrap();
        assert!((replay_witness(&rho, &p, w).unwrap().unwrap() - w.magnitude()).abs() < 1e-12);
    }

    #[test]
    fn convexity_examples() {
        let (p, g) = setup();
        assert!(check_convexity(&RiskMeasure::entropic(g.clone()), &p, &cfg())
            .unwrap()
            .is_pass());
        assert!(
            check_convexity(&RiskMeasure::neg_conditional_mean(g.clone()), &p, &cfg())
                .unwrap()
                .is_pass()
        );
        assert!(check_convexity(&RiskMeasure::sqrt_log_demo(g), &p, &cfg())
            .unwrap()
            .is_fail());
    }

    #[test]
    fn nqc_examples() {
        let (p, g) = setup();
        assert!(
            check_natural_quasiconvexity(&RiskMeasure::neg_conditional_mean(g.clone()), &p, &cfg())
                .unwrap()
                .is_pass()
        );
        assert!(
            check_natural_quasiconvexity(&RiskMeasure::entropic(g.clone()), &p, &cfg())
                .unwrap()
                .is_pass()
        );
        let rho = RiskMeasure::sqrt_log_demo(g);
        let r = check_natural_quasiconvexity(&rho, &p, &cfg()).unwrap();
        assert!(r.is_fail());
        match r.witness().unwrap() {
            RiskWitness::NaturalQuasiconvexity { dual, certificate, .. } => {
                assert!(certificate.is_empty());
                assert!(dual.as_ref().unwrap().margin > 1e-6);
            }
            w => panic!("unexpected witness {w:?}"),
        }
        let w = r.witness().unwrap();
        assert!(replay_witness(&rho, &p, w).unwrap().unwrap() > 0.0);
    }

    #[test]
    fn star_examples() {
        let (p, g) = setup();
        assert!(
            check_star_quasiconvexity(&RiskMeasure::neg_conditional_mean(g.clone()), &p, &cfg())
                .unwrap()
                .is_pass()
        );
        assert!(check_star_quasiconvexity(&RiskMeasure::entropic(g.clone()), &p, &cfg())
            .unwrap()
            .is_pass());
        let rho = RiskMeasure::sqrt_log_demo(g);
        let r = check_star_quasiconvexity(&rho, &p, &cfg()).unwrap();
        assert!(r.is_fail());
        let w = r.witness().unwrap();
        assert!((replay_witness(&rho, &p, w).unwrap().unwrap() - w.magnitude()).abs() < 1e-9);
    }

    #[test]
    fn sensitivity_examples() {
        let (p, g) = setup();
        for rho in [
            RiskMeasure::entropic(g.clone()),
            RiskMeasure::neg_conditional_mean(g.clone()),
        ] {
            let r = check_sensitivity(&rho, &p, &default_epsilons(), &default_events(&rho), 1e-9).unwrap();
            assert!(r.is_pass(), "{}", rho.name());
        }
        let rho = RiskMeasure::blind_spot(g.clone(), 0).unwrap();
        let r = check_sensitivity(&rho, &p, &default_epsilons(), &default_events(&rho), 1e-9).unwrap();
        assert!(r.is_fail());
        let r = check_sensitivity(&RiskMeasure::sqrt_log_demo(g), &p, &[1.0], &[vec![0]], 1e-9).unwrap();
        assert!(matches!(r.verdict, PropertyVerdict::Inconclusive { .. }));
    }

    #[test]
    fn nonconstant_examples() {
        let (p, g) = setup();
        assert!(
            check_assumption_nonconstant(&RiskMeasure::entropic(g.clone()), &p, 8, 1e-12)
                .unwrap()
                .is_pass()
        );
        assert!(
            check_assumption_nonconstant(&RiskMeasure::neg_conditional_mean(g.clone()), &p, 8, 1e-12)
                .unwrap()
                .is_pass()
        );
        let r = check_assumption_nonconstant(&RiskMeasure::zero(g), &p, 8, 1e-12).unwrap();
        assert!(r.is_fail());
        assert_eq!(r.failures, 3);
    }
}
