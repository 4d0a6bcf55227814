//! Command drivers. Each produces a JSON document, a text summary and a status.

use std::fmt::Write as _;
use std::path::PathBuf;

use qcx_core::cindex::{classify, compute_index, smooth_index_1d, Classification, ConvexityIndex, IndexConfig};
use qcx_core::decomp::{
    brute_force_sum_quasiconvex, characterize, harmonic_index, index_sum_criterion, DecomposableSum, SumDecision,
    SumVerdict, DEFAULT_PAIR_BUDGET,
};
use qcx_core::extcore::{CertConfig, CertResult, ExtReal, PairScan, Verdict};
use qcx_core::l2basis::{
    build_example_10pt, build_refined_10pt, check_basis_locality, check_cone_self_dual, check_nqc_wrt_preorder,
    parse_structure, write_basis_matrix, BlockStructure, PreorderReport,
};
use qcx_core::riskmeasure::{
    check_assumption_nonconstant, check_convexity, check_locality, check_monotonicity, check_natural_quasiconvexity,
    check_quasiconvexity, check_sensitivity, check_star_quasiconvexity, check_translativity, default_events,
    parse_partition, parse_scenario, CheckConfig, FiniteProbSpace, PartitionSigma, PropertyReport, PropertyVerdict,
    RiskMeasure,
};
use serde::Serialize;
use thiserror::Error;

use crate::config::{
    ConfigError, Fixture, MeasureDecl, MeasureKind, PartitionDecl, Property, RunConfig, ScanDecl, SpaceDecl,
};
use crate::families::{build_domain, build_function};

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Command {
    Index,
    SumCheck,
    RiskCheck,
    L2Demo,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::Index => "index",
            Command::SumCheck => "sum-check",
            Command::RiskCheck => "risk-check",
            Command::L2Demo => "l2-demo",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    Pass,
    Inconclusive,
    Fail,
}

impl Status {
    pub fn exit_code(self) -> i32 {
        match self {
            Status::Pass => 0,
            Status::Fail => 2,
            Status::Inconclusive => 3,
        }
    }
}

#[derive(Debug, Clone, Default)]
pub struct Options {
    pub brute: bool,
    pub seed: Option<u64>,
}

#[derive(Debug)]
pub struct Outcome {
    pub json: String,
    pub text: String,
    pub status: Status,
    /// Side files requested by the configuration.
    pub files: Vec<(PathBuf, String)>,
}

#[derive(Debug, Error)]
pub enum CommandError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error("{0}")]
    Invalid(String),
    #[error("{0}")]
    Analysis(#[from] qcx_core::Error),
}

impl CommandError {
    pub fn exit_code(&self) -> i32 {
        use qcx_core::Error as E;
        match self {
            CommandError::Config(_) | CommandError::Invalid(_) => 64,
            CommandError::Analysis(e) => match e {
                E::NotMeasurable { .. } => 2,
                E::InvalidSpace(_)
                | E::InvalidPartition(_)
                | E::InvalidArgument(_)
                | E::InvalidDomain(_)
                | E::InverseMismatch { .. }
                | E::Parse { .. } => 64,
                _ => 3,
            },
        }
    }
}

type CmdResult<T> = std::result::Result<T, CommandError>;

#[derive(Serialize)]
struct Envelope<'a, R: Serialize> {
    schema_version: u32,
    tool: &'static str,
    version: &'static str,
    command: &'static str,
    seed: u64,
    status: Status,
    results: &'a R,
}

fn envelope<R: Serialize>(command: Command, seed: u64, status: Status, results: &R) -> String {
    let env = Envelope {
        schema_version: SCHEMA_VERSION,
        tool: "qcx",
        version: env!("CARGO_PKG_VERSION"),
        command: command.name(),
        seed,
        status,
        results,
    };
    let mut s = serde_json::to_string_pretty(&env).expect("reports serialize");
    s.push('\n');
    s
}

pub fn run_command(command: Command, cfg: &RunConfig, opts: &Options) -> CmdResult<Outcome> {
    let seed = opts.seed.unwrap_or(cfg.run.seed);
    match command {
        Command::Index => cmd_index(cfg, seed),
        Command::SumCheck => cmd_sum_check(cfg, seed, opts.brute),
        Command::RiskCheck => cmd_risk_check(cfg, seed),
        Command::L2Demo => cmd_l2_demo(cfg, seed),
    }
}

fn pair_scan(scan: ScanDecl, points: usize) -> PairScan {
    match scan {
        ScanDecl::Auto if points <= 257 => PairScan::Exhaustive,
        ScanDecl::Auto => PairScan::Hybrid { radius: 4, coarse: 65 },
        ScanDecl::Exhaustive => PairScan::Exhaustive,
        ScanDecl::Hybrid { radius, coarse } => PairScan::Hybrid { radius, coarse },
    }
}

fn index_config(cfg: &RunConfig, points: usize) -> IndexConfig<f64> {
    IndexConfig::new(cfg.run.index_tol).with_cert(CertConfig::new(1e-13).with_scan(pair_scan(cfg.run.scan, points)))
}

fn fmt_bracket(b: Option<(f64, f64)>) -> String {
    b.map_or_else(|| "-".to_string(), |(lo, hi)| format!("[{lo:.6}, {hi:.6}]"))
}

// ---------------------------------------------------------------- index

#[derive(Serialize)]
struct IndexEntry {
    name: String,
    family: &'static str,
    weight: f64,
    domain: [f64; 2],
    points: usize,
    index: ConvexityIndex<f64>,
    classification: Classification,
    smooth_index: Option<ExtReal<f64>>,
}

fn cmd_index(cfg: &RunConfig, seed: u64) -> CmdResult<Outcome> {
    if cfg.functions.is_empty() {
        return Err(CommandError::Invalid("no [function] declared".into()));
    }
    let mut entries = Vec::new();
    for d in &cfg.functions {
        let f = build_function(d);
        let dom = build_domain(d)?;
        let index = compute_index(&f, &dom, &index_config(cfg, d.points))?;
        let smooth = smooth_index_1d(&f, &dom).ok();
        entries.push(IndexEntry {
            name: d.name.clone(),
            family: d.family.name(),
            weight: d.weight,
            domain: [d.domain.0, d.domain.1],
            points: d.points,
            classification: classify(&index),
            index,
            smooth_index: smooth,
        });
    }
    let mut text = format!(
        "{:<16} {:<10} {:>14} {:<30} {:<6} {:<10} {:>14}\n",
        "function", "family", "index", "bracket", "case", "class", "smooth"
    );
    for e in &entries {
        let class = match (e.classification.constant, e.classification.convex) {
            (true, _) => "constant",
            (false, true) => "convex",
            (false, false) => "nonconvex",
        };
        let _ = writeln!(
            text,
            "{:<16} {:<10} {:>14} {:<30} {:<6} {:<10} {:>14}",
            e.name,
            e.family,
            fmt_ext(e.index.value),
            fmt_bracket(e.index.bracket),
            match e.index.case {
                qcx_core::cindex::IndexCase::CaseI => "I",
                qcx_core::cindex::IndexCase::CaseII => "II",
            },
            class,
            e.smooth_index.map_or("-".to_string(), fmt_ext)
        );
    }
    let mut files = Vec::new();
    if let Some(path) = &cfg.run.sweep_csv {
        let mut csv = String::from("function,step,lambda,holds\n");
        for e in &entries {
            for (k, p) in e.index.trace.iter().enumerate() {
                let _ = writeln!(csv, "{},{k},{:e},{}", e.name, p.lambda, p.holds);
            }
        }
        files.push((path.clone(), csv));
    }
    Ok(Outcome {
        json: envelope(Command::Index, seed, Status::Pass, &entries),
        text,
        status: Status::Pass,
        files,
    })
}

fn fmt_ext(v: ExtReal<f64>) -> String {
    match v {
        ExtReal::Finite(x) => format!("{x:.6}"),
        other => other.to_string(),
    }
}

// ---------------------------------------------------------------- sum-check

#[derive(Serialize)]
struct TermEntry {
    function: String,
    index: ExtReal<f64>,
    bracket: Option<(f64, f64)>,
}

#[derive(Serialize)]
struct OracleEntry {
    points_per_axis: usize,
    quasiconvex: Option<bool>,
    agrees: Option<bool>,
    error: Option<String>,
    result: Option<CertResult<f64>>,
}

#[derive(Serialize)]
struct SumEntry {
    name: String,
    terms: Vec<TermEntry>,
    error: Option<String>,
    index_sum: Option<SumVerdict<f64>>,
    characterization: Option<SumVerdict<f64>>,
    harmonic_index: Option<ExtReal<f64>>,
    oracle: Option<OracleEntry>,
    status: Status,
}

fn decision_name(d: SumDecision) -> &'static str {
    match d {
        SumDecision::Quasiconvex => "quasiconvex",
        SumDecision::NotQuasiconvex => "not-quasiconvex",
        SumDecision::BoundaryInconclusive => "boundary",
    }
}

fn cmd_sum_check(cfg: &RunConfig, seed: u64, brute: bool) -> CmdResult<Outcome> {
    if cfg.sums.is_empty() {
        return Err(CommandError::Invalid("no [sum] declared".into()));
    }
    let mut entries = Vec::new();
    for s in &cfg.sums {
        let decls: Vec<_> = s.terms.iter().map(|t| cfg.function(t).expect("validated")).collect();
        let mut terms = Vec::new();
        for d in &decls {
            let idx = compute_index(&build_function(d), &build_domain(d)?, &index_config(cfg, d.points))?;
            terms.push(TermEntry {
                function: d.name.clone(),
                index: idx.value,
                bracket: idx.bracket,
            });
        }
        let mut entry = SumEntry {
            name: s.name.clone(),
            terms,
            error: None,
            index_sum: None,
            characterization: None,
            harmonic_index: None,
            oracle: None,
            status: Status::Pass,
        };
        let finite: Vec<Option<f64>> = entry.terms.iter().map(|t| t.index.finite()).collect();
        if let Some(k) = finite.iter().position(Option::is_none) {
            entry.error = Some(format!(
                "coordinate '{}' has infinite index {}; the criteria need non-constant coordinates",
                entry.terms[k].function, entry.terms[k].index
            ));
            entry.status = Status::Inconclusive;
            entries.push(entry);
            continue;
        }
        let c: Vec<f64> = finite.into_iter().map(Option::unwrap).collect();
        let tm = cfg.run.tol_margin;
        let charac = characterize(&c, tm)?;
        entry.index_sum = Some(index_sum_criterion(&c, tm)?);
        if c.iter().all(|&v| v >= 0.0) {
            let ext: Vec<ExtReal<f64>> = c.iter().map(|&v| ExtReal::Finite(v)).collect();
            entry.harmonic_index = Some(harmonic_index(&ext)?);
        }
        if charac.verdict == SumDecision::BoundaryInconclusive {
            entry.status = Status::Inconclusive;
        }
        if brute {
            let coords = decls
                .iter()
                .map(|d| Ok((build_function(d), build_domain(d)?.with_points(s.brute_points)?)))
                .collect::<qcx_core::Result<Vec<_>>>()?;
            let sum = DecomposableSum::new(coords)?;
            let oracle = match brute_force_sum_quasiconvex(&sum, 1e-9, DEFAULT_PAIR_BUDGET) {
                Ok(r) => {
                    let qc = match r.verdict {
                        Verdict::Certified => Some(true),
                        Verdict::Refuted(_) => Some(false),
                        Verdict::Inconclusive { .. } => None,
                    };
                    let predicted = match charac.verdict {
                        SumDecision::Quasiconvex => Some(true),
                        SumDecision::NotQuasiconvex => Some(false),
                        SumDecision::BoundaryInconclusive => None,
                    };
                    let agrees = qc.zip(predicted).map(|(a, b)| a == b);
                    match agrees {
                        Some(false) => entry.status = Status::Fail,
                        None => entry.status = entry.status.max(Status::Inconclusive),
                        Some(true) => {}
                    }
                    OracleEntry {
                        points_per_axis: s.brute_points,
                        quasiconvex: qc,
                        agrees,
                        error: None,
                        result: Some(r),
                    }
                }
                Err(e) => {
                    entry.status = entry.status.max(Status::Inconclusive);
                    OracleEntry {
                        points_per_axis: s.brute_points,
                        quasiconvex: None,
                        agrees: None,
                        error: Some(e.to_string()),
                        result: None,
                    }
                }
            };
            entry.oracle = Some(oracle);
        }
        entry.characterization = Some(charac);
        entries.push(entry);
    }
    let status = entries.iter().map(|e| e.status).max().unwrap_or(Status::Pass);
    let mut text = format!(
        "{:<14} {:<28} {:<16} {:<24} {:>10} {:>10} {:<10}\n",
        "sum", "indices", "verdict", "rule", "margin", "harmonic", "oracle"
    );
    for e in &entries {
        let idx: Vec<String> = e.terms.iter().map(|t| fmt_ext(t.index)).collect();
        match (&e.error, &e.characterization) {
            (Some(err), _) => {
                let _ = writeln!(text, "{:<14} {:<28} error: {err}", e.name, idx.join(" "));
            }
            (None, Some(v)) => {
                let oracle = e
                    .oracle
                    .as_ref()
                    .map_or("-".to_string(), |o| match (o.quasiconvex, o.agrees) {
                        (Some(q), Some(a)) => format!(
                            "{} ({})",
                            if q { "qc" } else { "not-qc" },
                            if a { "agrees" } else { "DISAGREES" }
                        ),
                        _ => o.error.clone().unwrap_or_else(|| "inconclusive".into()),
                    });
                let _ = writeln!(
                    text,
                    "{:<14} {:<28} {:<16} {:<24} {:>10} {:>10} {:<10}",
                    e.name,
                    idx.join(" "),
                    decision_name(v.verdict),
                    format!("{:?}", v.rule),
                    fmt_ext(v.margin),
                    e.harmonic_index.map_or("-".to_string(), fmt_ext),
                    oracle
                );
                if let Some(Verdict::Refuted(w)) = e.oracle.as_ref().and_then(|o| o.result.as_ref()).map(|r| &r.verdict)
                {
                    let _ = writeln!(
                        text,
                        "{:<14} witness x1={:?} x2={:?} eta={} violation={}",
                        "", w.x1, w.x2, w.eta, w.violation
                    );
                }
            }
            (None, None) => unreachable!(),
        }
    }
    Ok(Outcome {
        json: envelope(Command::SumCheck, seed, status, &entries),
        text,
        status,
        files: Vec::new(),
    })
}

// ---------------------------------------------------------------- risk-check

fn build_measure(
    d: &MeasureDecl,
    sigma: &PartitionSigma,
    cells: Option<&PartitionSigma>,
) -> CmdResult<RiskMeasure<f64>> {
    let s = sigma.clone();
    let m = match d.kind {
        MeasureKind::NegCondMean => RiskMeasure::neg_conditional_mean(s),
        MeasureKind::CondMean => RiskMeasure::conditional_mean(s),
        MeasureKind::CoarseCondMean => {
            let coarse = match (&d.coarse, cells) {
                (Some(atoms), _) => PartitionSigma::new(sigma.n_outcomes(), atoms.clone())?,
                (None, Some(c)) => c.clone(),
                (None, None) => {
                    return Err(CommandError::Invalid(format!(
                        "measure '{}' (line {}) needs `coarse`",
                        d.name, d.line
                    )))
                }
            };
            RiskMeasure::coarse_conditional_mean(coarse, s)?
        }
        MeasureKind::Entropic => RiskMeasure::entropic(s),
        MeasureKind::CubedMean => RiskMeasure::cubed_mean(s),
        MeasureKind::MeanBroadcast => RiskMeasure::mean_broadcast(s),
        MeasureKind::BlindSpot => RiskMeasure::blind_spot(s, d.atom.expect("validated"))?,
        MeasureKind::SqrtLogDemo => RiskMeasure::sqrt_log_demo(s),
        MeasureKind::Zero => RiskMeasure::zero(s),
        MeasureKind::NegIdentity => RiskMeasure::new("neg-identity", s, |x: &[f64], _| x.iter().map(|v| -v).collect()),
    };
    Ok(m)
}

fn read(path: &PathBuf) -> CmdResult<String> {
    std::fs::read_to_string(path).map_err(|e| {
        CommandError::Config(ConfigError::Io {
            path: path.display().to_string(),
            message: e.to_string(),
        })
    })
}

fn build_space(cfg: &RunConfig) -> CmdResult<(FiniteProbSpace<f64>, PartitionSigma)> {
    let space = match &cfg.space {
        Some(SpaceDecl::Uniform(n)) => FiniteProbSpace::uniform(*n)?,
        Some(SpaceDecl::Probs(p)) => FiniteProbSpace::new(p.clone())?,
        Some(SpaceDecl::File(path)) => parse_scenario(&read(path)?)?.space,
        None => return Err(CommandError::Invalid("no [space] declared".into())),
    };
    let sigma = match &cfg.partition {
        Some(PartitionDecl::Atoms(a)) => PartitionSigma::new(space.n(), a.clone())?,
        Some(PartitionDecl::File(path)) => parse_partition(&read(path)?, space.n())?,
        None => return Err(CommandError::Invalid("no [partition] declared".into())),
    };
    Ok((space, sigma))
}

fn check_config(cfg: &RunConfig, seed: u64, samples: usize) -> CheckConfig<f64> {
    CheckConfig::new(samples, seed).with_tol(cfg.run.tol)
}

#[derive(Serialize)]
struct MeasureEntry {
    measure: String,
    reports: Vec<PropertyReport<f64>>,
}

fn report_status(r: &PropertyReport<f64>) -> Status {
    match r.verdict {
        PropertyVerdict::Pass => Status::Pass,
        PropertyVerdict::Fail { .. } => Status::Fail,
        PropertyVerdict::Inconclusive { .. } => Status::Inconclusive,
    }
}

fn verdict_word(r: &PropertyReport<f64>) -> &'static str {
    match r.verdict {
        PropertyVerdict::Pass => "pass",
        PropertyVerdict::Fail { .. } => "FAIL",
        PropertyVerdict::Inconclusive { .. } => "inconclusive",
    }
}

fn run_property(
    p: Property,
    rho: &RiskMeasure<f64>,
    space: &FiniteProbSpace<f64>,
    cc: &CheckConfig<f64>,
    cfg: &RunConfig,
) -> qcx_core::Result<PropertyReport<f64>> {
    match p {
        Property::Monotonicity => check_monotonicity(rho, space, cc),
        Property::Translativity => check_translativity(rho, space, cc),
        Property::Locality => check_locality(rho, space, cc),
        Property::Quasiconvexity => check_quasiconvexity(rho, space, cc),
        Property::Convexity => check_convexity(rho, space, cc),
        Property::Nqc => check_natural_quasiconvexity(rho, space, cc),
        Property::Star => check_star_quasiconvexity(rho, space, cc),
        Property::Sensitivity => check_sensitivity(rho, space, &cfg.run.epsilons, &default_events(rho), cc.tol),
        Property::Nonconstant => check_assumption_nonconstant(rho, space, 8, cc.tol),
    }
}

fn cmd_risk_check(cfg: &RunConfig, seed: u64) -> CmdResult<Outcome> {
    if cfg.measures.is_empty() {
        return Err(CommandError::Invalid("no [measure] declared".into()));
    }
    let (space, sigma) = build_space(cfg)?;
    let cc = check_config(cfg, seed, cfg.run.samples);
    let mut entries = Vec::new();
    for d in &cfg.measures {
        let rho = build_measure(d, &sigma, None)?;
        let reports = cfg
            .run
            .properties
            .iter()
            .map(|&p| run_property(p, &rho, &space, &cc, cfg))
            .collect::<qcx_core::Result<Vec<_>>>()?;
        entries.push(MeasureEntry {
            measure: d.name.clone(),
            reports,
        });
    }
    let status = entries
        .iter()
        .flat_map(|e| e.reports.iter().map(report_status))
        .max()
        .unwrap_or(Status::Pass);
    let mut text = format!(
        "{:<16} {:<24} {:<13} {:>8} {:>8} {:>8}\n",
        "measure", "property", "verdict", "failures", "samples", "skipped"
    );
    for e in &entries {
        for r in &e.reports {
            let _ = writeln!(
                text,
                "{:<16} {:<24} {:<13} {:>8} {:>8} {:>8}",
                e.measure,
                r.property,
                verdict_word(r),
                r.failures,
                r.samples,
                r.skipped
            );
        }
    }
    Ok(Outcome {
        json: envelope(Command::RiskCheck, seed, status, &entries),
        text,
        status,
        files: Vec::new(),
    })
}

// ---------------------------------------------------------------- l2-demo

#[derive(Serialize)]
struct L2MeasureEntry {
    measure: String,
    locality: PropertyReport<f64>,
    basis_locality: PropertyReport<f64>,
    preorder: Option<PreorderReport<f64>>,
    preorder_skipped: Option<String>,
}

#[derive(Serialize)]
struct L2Results {
    fixture: String,
    e_block_dims: Vec<usize>,
    beta_block_dims: Vec<usize>,
    orthonormality_residual: f64,
    cone_self_duality: PropertyReport<f64>,
    measures: Vec<L2MeasureEntry>,
}

fn cmd_l2_demo(cfg: &RunConfig, seed: u64) -> CmdResult<Outcome> {
    let l2 = cfg
        .l2
        .as_ref()
        .ok_or_else(|| CommandError::Invalid("no [l2] section".into()))?;
    let (b, fixture): (BlockStructure<f64>, String) = match &l2.fixture {
        Fixture::TenPoint => (build_example_10pt(), "ten-point".into()),
        Fixture::TenPointRefined => (build_refined_10pt(), "ten-point-refined".into()),
        Fixture::File(p) => (parse_structure(&read(p)?)?, p.display().to_string()),
    };
    let cc = check_config(cfg, seed, l2.samples);
    let cone = check_cone_self_dual(&b, l2.cone_samples, seed, 1e-12);
    let mut measures = Vec::new();
    for name in &l2.measures {
        let d = cfg.measure(name).expect("validated");
        let rho = build_measure(d, &b.sigma, Some(&b.cells))?;
        let locality = check_locality(&rho, &b.space, &cc)?;
        let basis_locality = check_basis_locality(&rho, &b, &cc)?;
        let (preorder, preorder_skipped) = match check_nqc_wrt_preorder(&rho, &b, &cc) {
            Ok(r) => (Some(r), None),
            Err(qcx_core::Error::AssumptionViolated(m)) => (None, Some(m)),
            Err(e) => return Err(e.into()),
        };
        measures.push(L2MeasureEntry {
            measure: name.clone(),
            locality,
            basis_locality,
            preorder,
            preorder_skipped,
        });
    }
    let res = L2Results {
        fixture,
        e_block_dims: b.e_block_dims(),
        beta_block_dims: b.beta_block_dims(),
        orthonormality_residual: b.orthonormality_residual(),
        cone_self_duality: cone,
        measures,
    };
    let mut status = report_status(&res.cone_self_duality);
    for m in &res.measures {
        status = status
            .max(report_status(&m.locality))
            .max(report_status(&m.basis_locality));
        if let Some(p) = &m.preorder {
            status = status.max(report_status(&p.nqc)).max(report_status(&p.convexity));
            if !p.implication_holds {
                status = Status::Fail;
            }
        }
    }
    let mut text = String::new();
    let _ = writeln!(text, "fixture                  {}", res.fixture);
    let _ = writeln!(text, "e-block dims             {:?}", res.e_block_dims);
    let _ = writeln!(text, "beta-block dims          {:?}", res.beta_block_dims);
    let _ = writeln!(text, "orthonormality residual  {:.3e}", res.orthonormality_residual);
    let _ = writeln!(
        text,
        "cone self-duality        {}",
        verdict_word(&res.cone_self_duality)
    );
    let _ = writeln!(
        text,
        "{:<16} {:<10} {:<12} {:<10} {:<12}",
        "measure", "locality", "basis-local", "nqc-pre", "convex-pre"
    );
    for m in &res.measures {
        let (n, c) = m.preorder.as_ref().map_or(("skipped", "skipped"), |p| {
            (verdict_word(&p.nqc), verdict_word(&p.convexity))
        });
        let _ = writeln!(
            text,
            "{:<16} {:<10} {:<12} {:<10} {:<12}",
            m.measure,
            verdict_word(&m.locality),
            verdict_word(&m.basis_locality),
            n,
            c
        );
        if let Some(w) = m.locality.witness() {
            let _ = writeln!(
                text,
                "  locality witness: {}",
                serde_json::to_string(w).expect("serializable")
            );
        }
    }
    let files = l2
        .basis_out
        .as_ref()
        .map(|p| vec![(p.clone(), write_basis_matrix(&b))])
        .unwrap_or_default();
    Ok(Outcome {
        json: envelope(Command::L2Demo, seed, status, &res),
        text,
        status,
        files,
    })
}
