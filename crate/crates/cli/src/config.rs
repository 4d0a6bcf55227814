//! Line-oriented run configuration.
//!
//! ```text
//! [function sq]
//! family = square
//! domain = 1 2
//! points = 1025
//!
//! [sum s]
//! terms = sq nl
//!
//! [space]
//! uniform = 10
//! [partition]
//! atoms = 1-4 | 5-7 | 8-10
//! [measure ent]
//! kind = entropic
//! [run]
//! seed = 7
//! ```

use std::path::{Path, PathBuf};

use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum ConfigError {
    #[error("{path}: {message}")]
    Io { path: String, message: String },
    #[error("line {line}: {message}")]
    Syntax { line: usize, message: String },
}

fn syntax(line: usize, message: impl Into<String>) -> ConfigError {
    ConfigError::Syntax {
        line,
        message: message.into(),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Family {
    Affine,
    Square,
    Sqrt,
    Neglog,
    Exp,
    Negsquare,
    Const,
    Table,
}

impl Family {
    fn parse(s: &str) -> Option<Self> {
        Some(match s {
            "affine" => Family::Affine,
            "square" => Family::Square,
            "sqrt" => Family::Sqrt,
            "neglog" => Family::Neglog,
            "exp" => Family::Exp,
            "negsquare" => Family::Negsquare,
            "const" => Family::Const,
            "table" => Family::Table,
            _ => return None,
        })
    }

    pub fn name(self) -> &'static str {
        match self {
            Family::Affine => "affine",
            Family::Square => "square",
            Family::Sqrt => "sqrt",
            Family::Neglog => "neglog",
            Family::Exp => "exp",
            Family::Negsquare => "negsquare",
            Family::Const => "const",
            Family::Table => "table",
        }
    }

    /// Allowed parameter counts.
    fn arity(self) -> &'static [usize] {
        match self {
            Family::Affine => &[2],
            Family::Exp => &[0, 1],
            Family::Const => &[1],
            _ => &[0],
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct FunctionDecl {
    pub name: String,
    pub family: Family,
    pub params: Vec<f64>,
    pub weight: f64,
    pub domain: (f64, f64),
    pub points: usize,
    pub values: Vec<f64>,
    pub line: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SumDecl {
    pub name: String,
    pub terms: Vec<String>,
    pub brute_points: usize,
    pub line: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub enum SpaceDecl {
    Uniform(usize),
    Probs(Vec<f64>),
    File(PathBuf),
}

#[derive(Debug, Clone, PartialEq)]
pub enum PartitionDecl {
    /// 0-based atoms.
    Atoms(Vec<Vec<usize>>),
    File(PathBuf),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MeasureKind {
    NegCondMean,
    CondMean,
    CoarseCondMean,
    Entropic,
    CubedMean,
    MeanBroadcast,
    BlindSpot,
    SqrtLogDemo,
    Zero,
    NegIdentity,
}

impl MeasureKind {
    fn parse(s: &str) -> Option<Self> {
        Some(match s {
            "neg-cond-mean" | "condexp" => MeasureKind::NegCondMean,
            "cond-mean" => MeasureKind::CondMean,
            "coarse-cond-mean" => MeasureKind::CoarseCondMean,
            "entropic" => MeasureKind::Entropic,
            "cubed-mean" => MeasureKind::CubedMean,
            "mean-broadcast" => MeasureKind::MeanBroadcast,
            "blind-spot" => MeasureKind::BlindSpot,
            "sqrt-log-demo" => MeasureKind::SqrtLogDemo,
            "zero" => MeasureKind::Zero,
            "neg-identity" => MeasureKind::NegIdentity,
            _ => return None,
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct MeasureDecl {
    pub name: String,
    pub kind: MeasureKind,
    /// 0-based atom for `blind-spot`.
    pub atom: Option<usize>,
    /// 0-based atoms of the coarse partition for `coarse-cond-mean`.
    pub coarse: Option<Vec<Vec<usize>>>,
    pub line: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ScanDecl {
    Auto,
    Exhaustive,
    Hybrid { radius: usize, coarse: usize },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Property {
    Monotonicity,
    Translativity,
    Locality,
    Quasiconvexity,
    Convexity,
    Nqc,
    Star,
    Sensitivity,
    Nonconstant,
}

impl Property {
    pub const ALL: [Property; 9] = [
        Property::Monotonicity,
        Property::Translativity,
        Property::Locality,
        Property::Quasiconvexity,
        Property::Convexity,
        Property::Nqc,
        Property::Star,
        Property::Sensitivity,
        Property::Nonconstant,
    ];

    fn parse(s: &str) -> Option<Self> {
        Some(match s {
            "monotonicity" => Property::Monotonicity,
            "translativity" => Property::Translativity,
            "locality" => Property::Locality,
            "quasiconvexity" => Property::Quasiconvexity,
            "convexity" => Property::Convexity,
            "nqc" => Property::Nqc,
            "star" => Property::Star,
            "sensitivity" => Property::Sensitivity,
            "nonconstant" => Property::Nonconstant,
            _ => return None,
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunSection {
    pub seed: u64,
    pub samples: usize,
    pub tol: f64,
    pub properties: Vec<Property>,
    pub index_tol: f64,
    pub scan: ScanDecl,
    pub tol_margin: f64,
    pub sweep_csv: Option<PathBuf>,
    pub epsilons: Vec<f64>,
}

impl Default for RunSection {
    fn default() -> Self {
        Self {
            seed: 0,
            samples: 200,
            tol: 1e-6,
            properties: Property::ALL.to_vec(),
            index_tol: 1e-4,
            scan: ScanDecl::Auto,
            tol_margin: 1e-3,
            sweep_csv: None,
            epsilons: vec![1e-3, 0.1, 1.0, 10.0],
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Fixture {
    TenPoint,
    TenPointRefined,
    File(PathBuf),
}

#[derive(Debug, Clone, PartialEq)]
pub struct L2Section {
    pub fixture: Fixture,
    pub measures: Vec<String>,
    pub basis_out: Option<PathBuf>,
    pub samples: usize,
    pub cone_samples: usize,
    pub line: usize,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct RunConfig {
    pub functions: Vec<FunctionDecl>,
    pub sums: Vec<SumDecl>,
    pub space: Option<SpaceDecl>,
    pub partition: Option<PartitionDecl>,
    pub measures: Vec<MeasureDecl>,
    pub run: RunSection,
    pub l2: Option<L2Section>,
}

impl RunConfig {
    pub fn function(&self, name: &str) -> Option<&FunctionDecl> {
        self.functions.iter().find(|f| f.name == name)
    }

    pub fn measure(&self, name: &str) -> Option<&MeasureDecl> {
        self.measures.iter().find(|m| m.name == name)
    }
}

pub fn load(path: &Path) -> Result<RunConfig, ConfigError> {
    let text = std::fs::read_to_string(path).map_err(|e| ConfigError::Io {
        path: path.display().to_string(),
        message: e.to_string(),
    })?;
    parse(&text, path.parent().unwrap_or(Path::new(".")))
}

#[derive(Debug, Clone, PartialEq)]
enum Section {
    None,
    Function(usize),
    Sum(usize),
    Space,
    Partition,
    Measure(usize),
    Run,
    L2,
}

fn numbers(v: &str, line: usize) -> Result<Vec<f64>, ConfigError> {
    v.split_whitespace()
        .map(|t| {
            let x = match t {
                "e" => std::f64::consts::E,
                "-e" => -std::f64::consts::E,
                _ => t
                    .parse::<f64>()
                    .map_err(|_| syntax(line, format!("bad number '{t}'")))?,
            };
            if x.is_finite() {
                Ok(x)
            } else {
                Err(syntax(line, format!("number '{t}' is not finite")))
            }
        })
        .collect()
}

fn number(v: &str, line: usize) -> Result<f64, ConfigError> {
    match numbers(v, line)?.as_slice() {
        [x] => Ok(*x),
        _ => Err(syntax(line, format!("expected one number, found '{v}'"))),
    }
}

fn integer(v: &str, line: usize) -> Result<usize, ConfigError> {
    v.parse()
        .map_err(|_| syntax(line, format!("expected a nonnegative integer, found '{v}'")))
}

/// `1-4 | 5-7 | 8-10`, 1-based, to 0-based atoms.
fn atom_list(v: &str, line: usize) -> Result<Vec<Vec<usize>>, ConfigError> {
    v.split('|')
        .map(|s| qcx_core::riskmeasure::io::parse_index_list(s, line).map_err(|e| syntax(line, e.to_string())))
        .collect()
}

pub fn parse(text: &str, base: &Path) -> Result<RunConfig, ConfigError> {
    let mut cfg = RunConfig::default();
    let mut section = Section::None;
    let mut seen_run = false;
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let l = raw.split('#').next().unwrap_or("").trim();
        if l.is_empty() {
            continue;
        }
        if let Some(head) = l.strip_prefix('[') {
            let head = head
                .strip_suffix(']')
                .ok_or_else(|| syntax(line, "unterminated section header"))?
                .trim();
            let (kind, name) = match head.split_once(char::is_whitespace) {
                Some((k, n)) => (k, Some(n.trim().to_string())),
                None => (head, None),
            };
            let need_name = |n: Option<String>| n.ok_or_else(|| syntax(line, format!("[{kind}] needs a name")));
            let check_unique = |exists: bool, n: &str| {
                if exists {
                    Err(syntax(line, format!("duplicate name '{n}'")))
                } else {
                    Ok(())
                }
            };
            section = match kind {
                "function" => {
                    let name = need_name(name)?;
                    check_unique(cfg.functions.iter().any(|f| f.name == name), &name)?;
                    cfg.functions.push(FunctionDecl {
                        name,
                        family: Family::Square,
                        params: Vec::new(),
                        weight: 1.0,
                        domain: (f64::NAN, f64::NAN),
                        points: 1025,
                        values: Vec::new(),
                        line,
                    });
                    Section::Function(cfg.functions.len() - 1)
                }
                "sum" => {
                    let name = need_name(name)?;
                    check_unique(cfg.sums.iter().any(|s| s.name == name), &name)?;
                    cfg.sums.push(SumDecl {
                        name,
                        terms: Vec::new(),
                        brute_points: 33,
                        line,
                    });
                    Section::Sum(cfg.sums.len() - 1)
                }
                "measure" => {
                    let name = need_name(name)?;
                    check_unique(cfg.measures.iter().any(|m| m.name == name), &name)?;
                    cfg.measures.push(MeasureDecl {
                        name,
                        kind: MeasureKind::NegCondMean,
                        atom: None,
                        coarse: None,
                        line,
                    });
                    Section::Measure(cfg.measures.len() - 1)
                }
                "space" => Section::Space,
                "partition" => Section::Partition,
                "run" => {
                    if seen_run {
                        return Err(syntax(line, "duplicate [run] section"));
                    }
                    seen_run = true;
                    Section::Run
                }
                "l2" => {
                    cfg.l2 = Some(L2Section {
                        fixture: Fixture::TenPoint,
                        measures: Vec::new(),
                        basis_out: None,
                        samples: 500,
                        cone_samples: 200,
                        line,
                    });
                    Section::L2
                }
                other => return Err(syntax(line, format!("unknown section '{other}'"))),
            };
            continue;
        }
        let (key, value) = l
            .split_once('=')
            .map(|(k, v)| (k.trim(), v.trim()))
            .ok_or_else(|| syntax(line, "expected `key = value`"))?;
        let unknown = || syntax(line, format!("unknown key '{key}'"));
        match &section {
            Section::None => return Err(syntax(line, "key outside any section")),
            Section::Function(i) => {
                let f = &mut cfg.functions[*i];
                match key {
                    "family" => {
                        f.family =
                            Family::parse(value).ok_or_else(|| syntax(line, format!("unknown family '{value}'")))?
                    }
                    "params" => f.params = numbers(value, line)?,
                    "weight" => f.weight = number(value, line)?,
                    "domain" => match numbers(value, line)?.as_slice() {
                        [a, b] if a < b => f.domain = (*a, *b),
                        _ => return Err(syntax(line, "domain needs `lo hi` with lo < hi")),
                    },
                    "points" => f.points = integer(value, line)?,
                    "values" => f.values = numbers(value, line)?,
                    _ => return Err(unknown()),
                }
            }
            Section::Sum(i) => {
                let s = &mut cfg.sums[*i];
                match key {
                    "terms" => s.terms = value.split_whitespace().map(String::from).collect(),
                    "points" => s.brute_points = integer(value, line)?,
                    _ => return Err(unknown()),
                }
            }
            Section::Space => {
                cfg.space = Some(match key {
                    "uniform" => SpaceDecl::Uniform(integer(value, line)?),
                    "probs" => SpaceDecl::Probs(numbers(value, line)?),
                    "file" => SpaceDecl::File(base.join(value)),
                    _ => return Err(unknown()),
                })
            }
            Section::Partition => {
                cfg.partition = Some(match key {
                    "atoms" => PartitionDecl::Atoms(atom_list(value, line)?),
                    "file" => PartitionDecl::File(base.join(value)),
                    _ => return Err(unknown()),
                })
            }
            Section::Measure(i) => {
                let m = &mut cfg.measures[*i];
                match key {
                    "kind" => {
                        m.kind = MeasureKind::parse(value)
                            .ok_or_else(|| syntax(line, format!("unknown measure kind '{value}'")))?
                    }
                    "atom" => {
                        let a = integer(value, line)?;
                        if a == 0 {
                            return Err(syntax(line, "atoms are numbered from 1"));
                        }
                        m.atom = Some(a - 1)
                    }
                    "coarse" => m.coarse = Some(atom_list(value, line)?),
                    _ => return Err(unknown()),
                }
            }
            Section::Run => {
                let r = &mut cfg.run;
                match key {
                    "seed" => r.seed = value.parse().map_err(|_| syntax(line, format!("bad seed '{value}'")))?,
                    "samples" => r.samples = integer(value, line)?,
                    "tol" => r.tol = number(value, line)?,
                    "index_tol" => r.index_tol = number(value, line)?,
                    "tol_margin" => r.tol_margin = number(value, line)?,
                    "epsilons" => r.epsilons = numbers(value, line)?,
                    "sweep_csv" => r.sweep_csv = Some(base.join(value)),
                    "properties" => {
                        r.properties = if value == "all" {
                            Property::ALL.to_vec()
                        } else {
                            value
                                .split_whitespace()
                                .map(|p| {
                                    Property::parse(p).ok_or_else(|| syntax(line, format!("unknown property '{p}'")))
                                })
                                .collect::<Result<_, _>>()?
                        }
                    }
                    "scan" => {
                        let parts: Vec<&str> = value.split_whitespace().collect();
                        r.scan = match parts.as_slice() {
                            ["auto"] => ScanDecl::Auto,
                            ["exhaustive"] => ScanDecl::Exhaustive,
                            ["hybrid", a, b] => ScanDecl::Hybrid {
                                radius: integer(a, line)?,
                                coarse: integer(b, line)?,
                            },
                            _ => return Err(syntax(line, "scan is `auto`, `exhaustive` or `hybrid RADIUS COARSE`")),
                        }
                    }
                    _ => return Err(unknown()),
                }
            }
            Section::L2 => {
                let s = cfg.l2.as_mut().expect("section opened");
                match key {
                    "fixture" => {
                        s.fixture = match value {
                            "ten-point" => Fixture::TenPoint,
                            "ten-point-refined" => Fixture::TenPointRefined,
                            _ => return Err(syntax(line, format!("unknown fixture '{value}'"))),
                        }
                    }
                    "structure" => s.fixture = Fixture::File(base.join(value)),
                    "measures" => s.measures = value.split_whitespace().map(String::from).collect(),
                    "basis_out" => s.basis_out = Some(base.join(value)),
                    "samples" => s.samples = integer(value, line)?,
                    "cone_samples" => s.cone_samples = integer(value, line)?,
                    _ => return Err(unknown()),
                }
            }
        }
    }
    validate(&cfg)?;
    Ok(cfg)
}

fn validate(cfg: &RunConfig) -> Result<(), ConfigError> {
    for f in &cfg.functions {
        let line = f.line;
        if !f.domain.0.is_finite() {
            return Err(syntax(line, format!("function '{}' has no domain", f.name)));
        }
        if !f.family.arity().contains(&f.params.len()) {
            return Err(syntax(
                line,
                format!(
                    "family {} takes {:?} parameters, got {}",
                    f.family.name(),
                    f.family.arity(),
                    f.params.len()
                ),
            ));
        }
        if f.points < 3 {
            return Err(syntax(line, "points must be at least 3"));
        }
        if !(f.weight >= 0.0) {
            return Err(syntax(line, "weight must be nonnegative"));
        }
        match f.family {
            Family::Sqrt if f.domain.0 < 0.0 => return Err(syntax(line, "sqrt needs a domain in [0, inf)")),
            Family::Neglog if f.domain.0 <= 0.0 => return Err(syntax(line, "neglog needs a domain in (0, inf)")),
            Family::Table if f.values.len() < 2 => return Err(syntax(line, "table needs at least two values")),
            Family::Table => {}
            _ if !f.values.is_empty() => return Err(syntax(line, "values only apply to family table")),
            _ => {}
        }
    }
    for s in &cfg.sums {
        if s.terms.len() < 2 {
            return Err(syntax(s.line, format!("sum '{}' needs at least two terms", s.name)));
        }
        if let Some(t) = s.terms.iter().find(|t| cfg.function(t).is_none()) {
            return Err(syntax(
                s.line,
                format!("sum '{}' references undeclared function '{t}'", s.name),
            ));
        }
    }
    for m in &cfg.measures {
        if m.kind == MeasureKind::BlindSpot && m.atom.is_none() {
            return Err(syntax(m.line, format!("measure '{}' needs `atom`", m.name)));
        }
    }
    if let Some(l2) = &cfg.l2 {
        if let Some(t) = l2.measures.iter().find(|t| cfg.measure(t).is_none()) {
            return Err(syntax(l2.line, format!("[l2] references undeclared measure '{t}'")));
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(s: &str) -> Result<RunConfig, ConfigError> {
        parse(s, Path::new("."))
    }

    #[test]
    fn parses_sections() {
        let c = p("[function sq]\nfamily = square\ndomain = 1 2\n\n[function nl]\nfamily = neglog\ndomain = 1 e\nweight = 0.9\n\
                   [sum s]\nterms = sq nl\n[space]\nuniform = 10\n[partition]\natoms = 1-4 | 5-7 | 8-10\n\
                   [measure ent]\nkind = entropic\n[run]\nseed = 3\nproperties = nqc star\n")
            .unwrap();
        assert_eq!(c.functions.len(), 2);
        assert_eq!(c.functions[1].domain.1, std::f64::consts::E);
        assert_eq!(c.functions[1].weight, 0.9);
        assert_eq!(c.sums[0].terms, vec!["sq", "nl"]);
        assert_eq!(
            c.partition,
            Some(PartitionDecl::Atoms(vec![
                vec![0, 1, 2, 3],
                vec![4, 5, 6],
                vec![7, 8, 9]
            ]))
        );
        assert_eq!(c.run.seed, 3);
        assert_eq!(c.run.properties, vec![Property::Nqc, Property::Star]);
    }

    #[test]
    fn reports_line_numbers() {
        assert_eq!(
            p("[function f]\nfamily = cube\n"),
            Err(syntax(2, "unknown family 'cube'"))
        );
        assert!(matches!(
            p("[sum s]\nterms = a b\n"),
            Err(ConfigError::Syntax { line: 1, .. })
        ));
        assert!(matches!(p("seed = 1\n"), Err(ConfigError::Syntax { line: 1, .. })));
        assert!(matches!(p("[run]\nseed 1\n"), Err(ConfigError::Syntax { line: 2, .. })));
        assert!(matches!(
            p("[function f]\nfamily = sqrt\ndomain = -1 1\n"),
            Err(ConfigError::Syntax { line: 1, .. })
        ));
        assert!(matches!(
            p("[function f]\nfamily = affine\nparams = 1\ndomain = 0 1\n"),
            Err(ConfigError::Syntax { .. })
        ));
    }
}
