use std::path::{Path, PathBuf};
use std::process::Command as Proc;

use qcx_cli::config::parse;
use qcx_cli::{run_command, Command, Options, Status};
use qcx_core::extcore::{replay_violation, ExtReal, FunctionSpec, Shape, Witness};
use qcx_core::riskmeasure::{replay_witness, FiniteProbSpace, PartitionSigma, RiskMeasure, RiskWitness};
use serde_json::Value;

fn run(cmd: Command, text: &str, brute: bool) -> (Value, Status, String) {
    let cfg = parse(text, Path::new(".")).expect("config parses");
    let out = run_command(cmd, &cfg, &Options { brute, seed: None }).expect("command runs");
    (serde_json::from_str(&out.json).unwrap(), out.status, out.text)
}

fn configs() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs")
}

const FUNCTIONS: &str = "
[function sqrt]
family = sqrt
domain = 1 4

[function neglog]
family = neglog
domain = 1 e

[function three]
family = const
params = 3
domain = 0 1
";

#[test]
fn index_reports_value_case_and_class() {
    let (j, status, _) = run(Command::Index, FUNCTIONS, false);
    assert_eq!(status, Status::Pass);
    let r = j["results"].as_array().unwrap();
    let sqrt = &r[0]["index"];
    assert!((sqrt["value"].as_f64().unwrap() + 1.0).abs() < 1e-3);
    assert_eq!(sqrt["case"], "I");
    assert!((r[1]["index"]["value"].as_f64().unwrap() - 1.0).abs() < 1e-3);
    assert_eq!(r[1]["index"]["case"], "II");
    assert_eq!(r[2]["index"]["value"], "+inf");
    assert_eq!(r[2]["classification"]["constant"], true);
}

fn sum_config(weight: f64) -> String {
    format!(
        "{FUNCTIONS}
[function w]
family = neglog
weight = {weight}
domain = 1 e

[sum s]
terms = sqrt w
"
    )
}

#[test]
fn sum_check_with_oracle() {
    let (j, status, _) = run(Command::SumCheck, &sum_config(0.9), true);
    assert_eq!(status, Status::Pass);
    let s = &j["results"][0];
    assert_eq!(s["characterization"]["verdict"], "quasiconvex");
    assert_eq!(s["oracle"]["agrees"], true);

    let (j, status, text) = run(Command::SumCheck, &sum_config(1.1), true);
    assert_eq!(status, Status::Pass);
    let s = &j["results"][0];
    assert_eq!(s["characterization"]["verdict"], "not_quasiconvex");
    assert_eq!(s["oracle"]["quasiconvex"], false);
    assert_eq!(s["oracle"]["agrees"], true);
    assert!(text.contains("witness"));

    // The printed witness reproduces the violation on the joint function.
    assert_eq!(s["oracle"]["result"]["verdict"]["verdict"], "refuted");
    let w: Witness<f64> = serde_json::from_value(s["oracle"]["result"]["verdict"].clone()).unwrap();
    let f = FunctionSpec::separable_sum(&[
        FunctionSpec::univariate(f64::sqrt),
        FunctionSpec::univariate(|y: f64| -1.1 * y.ln()),
    ]);
    let v = replay_violation(&f, Shape::Quasiconvex, &w);
    assert!(v > ExtReal::Finite(1e-9), "replayed violation {v}");
}

#[test]
fn square_plus_neglog_has_harmonic_index() {
    let text = format!(
        "{FUNCTIONS}
[function sq]
family = square
domain = 1 2

[sum s]
terms = sq neglog
"
    );
    let (j, _, _) = run(Command::SumCheck, &text, false);
    let s = &j["results"][0];
    assert_eq!(s["characterization"]["rule"], "all_convex");
    assert!((s["harmonic_index"].as_f64().unwrap() - 1.0 / 9.0).abs() < 1e-3);
}

#[test]
fn infinite_index_names_the_coordinate() {
    let text = format!("{FUNCTIONS}\n[sum s]\nterms = sqrt three\n");
    let (j, status, _) = run(Command::SumCheck, &text, false);
    assert_eq!(status, Status::Inconclusive);
    assert!(j["results"][0]["error"].as_str().unwrap().contains("'three'"));
}

const RISK: &str = "
[space]
uniform = 10

[partition]
atoms = 1-4 | 5-7 | 8-10

[measure ent]
kind = entropic

[measure demo]
kind = sqrt-log-demo

[measure broadcast]
kind = mean-broadcast

[run]
seed = 3
samples = 120
";

fn report<'a>(j: &'a Value, measure: usize, property: &str) -> &'a Value {
    j["results"][measure]["reports"]
        .as_array()
        .unwrap()
        .iter()
        .find(|r| r["property"] == property)
        .unwrap()
}

fn measure(kind: &str) -> RiskMeasure<f64> {
    let g = PartitionSigma::from_sizes(&[4, 3, 3]).unwrap();
    match kind {
        "ent" => RiskMeasure::entropic(g),
        "demo" => RiskMeasure::sqrt_log_demo(g),
        _ => RiskMeasure::mean_broadcast(g),
    }
}

#[test]
fn risk_check_verdicts_and_replay() {
    let (j, status, _) = run(Command::RiskCheck, RISK, false);
    assert_eq!(status, Status::Fail);
    for r in j["results"][0]["reports"].as_array().unwrap() {
        assert_eq!(r["verdict"], "pass", "entropic {}", r["property"]);
    }
    assert_eq!(report(&j, 1, "quasiconvexity")["verdict"], "pass");
    let nqc = report(&j, 1, "natural_quasiconvexity");
    assert_eq!(nqc["verdict"], "fail");
    assert_eq!(nqc["witness"]["certificate"]["status"], "empty");
    assert!(nqc["witness"]["dual"]["z_star"].is_array());
    assert_eq!(report(&j, 2, "locality")["verdict"], "fail");

    // Every embedded witness reproduces its violation through the library.
    let space = FiniteProbSpace::<f64>::uniform(10).unwrap();
    let mut replayed = 0;
    for (m, name) in ["ent", "demo", "broadcast"].iter().enumerate() {
        let rho = measure(name);
        for r in j["results"][m]["reports"].as_array().unwrap() {
            if r["verdict"] != "fail" {
                continue;
            }
            let w: RiskWitness<f64> = serde_json::from_value(r["witness"].clone()).unwrap();
            if let Some(v) = replay_witness(&rho, &space, &w).unwrap() {
                assert!(
                    v > r["tol"].as_f64().unwrap(),
                    "{name} {} replays to {v}",
                    r["property"]
                );
                replayed += 1;
            }
        }
    }
    assert!(replayed >= 5);
}

#[test]
fn unmeasurable_output_is_a_hard_error() {
    let text = "
[space]
uniform = 4
[partition]
atoms = 1-2 | 3-4
[measure m]
kind = neg-identity
[run]
properties = monotonicity
";
    let cfg = parse(text, Path::new(".")).unwrap();
    let err = run_command(Command::RiskCheck, &cfg, &Options::default()).unwrap_err();
    assert_eq!(err.exit_code(), 2);
    assert!(err.to_string().contains("atom"));
}

#[test]
fn l2_demo_tables() {
    let (j, status, _) = run(
        Command::L2Demo,
        "[measure c]\nkind = condexp\n[measure b]\nkind = mean-broadcast\n[l2]\nfixture = ten-point\nmeasures = c b\n",
        false,
    );
    assert_eq!(status, Status::Fail);
    let r = &j["results"];
    assert!(r["orthonormality_residual"].as_f64().unwrap() < 1e-12);
    assert_eq!(r["cone_self_duality"]["verdict"], "pass");
    assert_eq!(r["measures"][0]["locality"]["verdict"], "pass");
    assert_eq!(r["measures"][0]["basis_locality"]["verdict"], "pass");
    assert_eq!(r["measures"][1]["basis_locality"]["verdict"], "fail");

    let (j, _, text) = run(
        Command::L2Demo,
        "[measure c]\nkind = coarse-cond-mean\n[l2]\nfixture = ten-point-refined\nmeasures = c\n",
        false,
    );
    let m = &j["results"]["measures"][0];
    assert_eq!(m["basis_locality"]["verdict"], "pass");
    assert_eq!(m["locality"]["verdict"], "fail");
    assert!(m["preorder_skipped"].is_string());
    assert!(text.contains("locality witness"));
}

fn qcx(args: &[&str]) -> std::process::Output {
    Proc::new(env!("CARGO_BIN_EXE_qcx")).args(args).output().unwrap()
}

#[test]
fn binary_exit_codes() {
    let c = configs();
    let code = |sub: &str, file: &str| qcx(&[sub, "--config", c.join(file).to_str().unwrap()]).status.code();
    assert_eq!(code("index", "index.cfg"), Some(0));
    assert_eq!(code("sum-check", "sums.cfg"), Some(0));
    assert_eq!(code("risk-check", "risk.cfg"), Some(2));
    assert_eq!(code("l2-demo", "l2_refined.cfg"), Some(2));

    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.cfg");
    std::fs::write(&bad, "[function f]\nfamily = sqrt\ndomain = 1\n").unwrap();
    let out = qcx(&["index", "--config", bad.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(64));
    assert!(String::from_utf8_lossy(&out.stderr).contains("line 3"));

    let incon = dir.path().join("incon.cfg");
    std::fs::write(&incon, format!("{FUNCTIONS}\n[sum s]\nterms = sqrt three\n")).unwrap();
    assert_eq!(
        qcx(&["sum-check", "--config", incon.to_str().unwrap()]).status.code(),
        Some(3)
    );
}

#[test]
fn same_seed_gives_identical_json() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = configs().join("risk.cfg");
    let mut docs = Vec::new();
    for (k, threads) in ["1", "4"].iter().enumerate() {
        let out = dir.path().join(format!("r{k}.json"));
        let args = [
            "risk-check",
            "--config",
            cfg.to_str().unwrap(),
            "--seed",
            "11",
            "--threads",
            threads,
            "--out",
            out.to_str().unwrap(),
        ];
        qcx(&args);
        docs.push(std::fs::read(&out).unwrap());
    }
    assert_eq!(docs[0], docs[1]);
    let j: Value = serde_json::from_slice(&docs[0]).unwrap();
    assert_eq!(j["seed"], 11);
    assert_eq!(j["schema_version"], 1);
}

#[test]
fn sweep_csv_is_written() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("i.cfg");
    std::fs::write(&cfg, format!("{FUNCTIONS}\n[run]\nsweep_csv = sweep.csv\n")).unwrap();
    let out = qcx(&["index", "--config", cfg.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let csv = std::fs::read_to_string(dir.path().join("sweep.csv")).unwrap();
    assert!(csv.starts_with("function,step,lambda,holds\n"));
    assert!(csv.lines().any(|l| l.starts_with("sqrt,")));
}
