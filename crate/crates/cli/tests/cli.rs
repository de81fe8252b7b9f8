use std::process::Command;

use serde_json::Value;
use vancycle_cli::{run_with, EXIT_FAILURE, EXIT_INPUT, EXIT_OK};

const WORKED_G: &str = "(x+3)*(x+2)*(x+1)*(x-1)*(x-2)*(x-4)";
const WORKED_H: &str = "(3-y)*(y-1)*(y+1)*(y+2)";

fn run(args: &[&str]) -> (i32, String, String) {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let code = run_with(std::iter::once("vancycle").chain(args.iter().copied()), &mut out, &mut err);
    (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
}

fn json(args: &[&str]) -> Value {
    let (code, out, err) = run(args);
    assert_eq!(code, EXIT_OK, "{err}");
    serde_json::from_str(&out).unwrap()
}

#[test]
fn dynkin_worked_example() {
    let (code, out, _) = run(&["dynkin", "--g", WORKED_G, "--h", WORKED_H]);
    assert_eq!(code, EXIT_OK);
    assert!(out.contains("g labels: 3 4 2 5 1"));
    assert!(out.contains("h labels: 2 3 1"));
    let psi_start = out.find("psi:\n").unwrap() + 5;
    let fixture = include_str!("../../core/tests/fixtures/worked_example_psi.txt");
    let norm = |s: &str| s.split_whitespace().collect::<Vec<_>>().join(" ");
    assert_eq!(norm(&out[psi_start..]), norm(fixture));
}

#[test]
fn dynkin_minus_mode_negates() {
    let plus = json(&["dynkin", "--g", WORKED_G, "--h", WORKED_H, "--json"]);
    let minus = json(&["dynkin", "--g", WORKED_G, "--h", WORKED_H, "--sign", "minus", "--json"]);
    let neg = |v: &Value| -> Vec<Vec<i64>> {
        v["psi"]
            .as_array()
            .unwrap()
            .iter()
            .map(|r| r.as_array().unwrap().iter().map(|x| -x.as_i64().unwrap()).collect())
            .collect()
    };
    assert_eq!(serde_json::to_value(neg(&plus)).unwrap(), minus["psi"]);
}

#[test]
fn coefficient_list_input() {
    let a = json(&["dynkin", "--g", "x^3-3x", "--h", "y^2", "--json"]);
    let b = json(&["dynkin", "--g", "coeffs: 0,-3,0,1", "--h", "coeffs: 0,0,1", "--json"]);
    assert_eq!(a, b);
}

#[test]
fn check_example_prints_six_true_lines() {
    let (code, out, _) = run(&["krylov", "--d", "6", "--e", "4", "--cycle", "2,2", "--check-example"]);
    assert_eq!(code, EXIT_OK);
    let lines: Vec<&str> = out.lines().filter(|l| l.starts_with("v(")).collect();
    assert_eq!(lines.len(), 6);
    assert!(lines.iter().all(|l| l.ends_with(": true")));
    assert!(out.starts_with("dimension 15, exact rank 8"));
}

#[test]
fn check_example_needs_the_worked_pair() {
    let (code, _, err) = run(&["krylov", "--d", "5", "--e", "4", "--cycle", "2,2", "--check-example"]);
    assert_eq!(code, EXIT_INPUT);
    assert!(!err.is_empty());
}

#[test]
fn krylov_from_matrix_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("psi.txt");
    std::fs::write(&path, "3\n0 1 0\n-1 0 1\n0 -1 0\n").unwrap();
    let v = json(&["krylov", "--matrix", path.to_str().unwrap(), "--vector", "0 1 0", "--json"]);
    assert_eq!(v["dim"], 3);
    assert_eq!(v["rank"], 2);
}

#[test]
fn krylov_backends_agree_on_rank() {
    let exact = json(&["krylov", "--d", "6", "--e", "4", "--cycle", "1,3", "--json"]);
    let eigen = json(&["krylov", "--d", "6", "--e", "4", "--cycle", "1,3", "--backend", "eigen", "--json"]);
    assert_eq!(exact["rank"], eigen["rank"]);
    assert_eq!(eigen["reliable"], true);
}

#[test]
fn verify_lemma_refuses_large_gcd() {
    let (code, out, err) = run(&["verify-lemma", "--d", "4", "--e", "4"]);
    assert_eq!(code, EXIT_INPUT);
    assert!(out.is_empty());
    assert!(err.contains("gcd"), "{err}");
}

#[test]
fn verify_lemma_passes() {
    let (code, out, _) = run(&["verify-lemma", "--d", "6", "--e", "4"]);
    assert_eq!(code, EXIT_OK);
    assert!(out.contains("15 cycles") && out.ends_with("pass\n"), "{out}");
    let v = json(&["verify-lemma", "--d", "6", "--e", "4", "--backend", "eigen", "--json"]);
    assert_eq!(v["failures"], Value::Array(vec![]));
}

#[test]
fn classify_double_well() {
    let v = json(&["classify", "--g", "(x^2-1)^2", "--h", "y^3-3y", "--cycle", "2,2", "--json"]);
    assert_eq!(v["verdict"], "symmetric");
    assert_eq!(v["axis"], "horizontal");
    assert_eq!(v["p"], 2);
    assert_eq!(v["orbit_rank"], 4);
    assert_eq!(v["kernel_check"], true);
    let full = json(&["classify", "--g", "(x^2-1)^2", "--h", "y^3-3y", "--cycle", "2,1", "--json"]);
    assert_eq!(full["verdict"], "full_homology");
}

#[test]
fn classify_bad_cell_is_input_error() {
    let (code, _, _) = run(&["classify", "--g", "(x^2-1)^2", "--h", "y^3-3y", "--cycle", "3,1"]);
    assert_eq!(code, EXIT_INPUT);
}

#[test]
fn decompose_and_pushforward() {
    let v = json(&["decompose", "--g", "(x^2-1)^2", "--inner-degree", "2", "--json"]);
    assert_eq!(v[0]["decomposition"]["outer"], "coeffs: 1,-2,1");
    let (code, out, _) = run(&["decompose", "--g", "x^3+x", "--inner-degree", "2"]);
    assert_ne!(code, EXIT_OK, "{out}");

    let (code, out, _) = run(&[
        "pushforward",
        "--g",
        "(x^2-1)^2",
        "--g1",
        "x^2",
        "--h",
        "y^3-3y",
        "--verify-cycle",
        "1,2",
    ]);
    assert_eq!(code, EXIT_OK);
    assert!(out.starts_with("2 6\n-1 0 0 0 1 0\n0 -1 0 0 0 1\n"), "{out}");
    assert!(out.contains("column 2: collapsed"));
}

#[test]
fn pushforward_non_symmetric_cycle() {
    let (code, _, err) = run(&[
        "pushforward",
        "--g",
        "(x^2-1)^2",
        "--g1",
        "x^2",
        "--h",
        "y^3-3y",
        "--verify-cycle",
        "1,1",
    ]);
    assert_eq!(code, EXIT_INPUT, "{err}");
}

#[test]
fn usage_errors() {
    assert_eq!(run(&["dynkin", "--g", "x^2"]).0, EXIT_INPUT);
    assert_eq!(run(&["dynkin", "--g", "x^2", "--h", "y^2", "--frobnicate"]).0, EXIT_INPUT);
    assert_eq!(run(&["krylov", "--d", "6"]).0, EXIT_INPUT);
    assert_eq!(run(&["verify-lemma", "--d", "3", "--e", "2", "--backend", "both"]).0, EXIT_INPUT);
    assert_eq!(run(&["dynkin", "--g", "x^2 + + 1", "--h", "y^2"]).0, EXIT_INPUT);
    assert_eq!(run(&["sweep", "--max-product", "3"]).0, EXIT_INPUT);
    let (code, out, _) = run(&["--help"]);
    assert_eq!(code, EXIT_OK);
    assert!(out.contains("verify-lemma"));
}

#[test]
fn sweep_exit_code_and_summary() {
    let (code, out, _) = run(&["sweep", "--max-product", "20"]);
    assert_eq!(code, EXIT_OK);
    assert!(out.contains("total 23, passed 23, failed 0"), "{out}");
    assert_ne!(EXIT_FAILURE, EXIT_OK);
}

#[test]
fn jobs_from_environment() {
    let dir = tempfile::tempdir().unwrap();
    let run_bin = |jobs: &str| {
        let out = Command::new(env!("CARGO_BIN_EXE_vancycle"))
            .args(["sweep", "--max-product", "24", "--backend", "both", "--json"])
            .env("VANCYCLE_JOBS", jobs)
            .current_dir(dir.path())
            .output()
            .unwrap();
        assert!(out.status.success());
        out.stdout
    };
    assert_eq!(run_bin("1"), run_bin("4"));
}

#[test]
fn outputs_are_deterministic() {
    let cases: &[&[&str]] = &[
        &["dynkin", "--g", WORKED_G, "--h", WORKED_H],
        &["dynkin", "--g", WORKED_G, "--h", WORKED_H, "--json"],
        &["krylov", "--d", "6", "--e", "4", "--cycle", "2,2", "--targets", "--json"],
        &["krylov", "--d", "6", "--e", "4", "--cycle", "2,3", "--backend", "eigen"],
        &["classify", "--g", "(x^2-1)^2", "--h", "y^3-3y", "--cycle", "1,2"],
        &["verify-lemma", "--d", "5", "--e", "4", "--json"],
        &["decompose", "--g", "(x^3-3x)^2"],
        &["pushforward", "--g", "(x^2-1)^2", "--g1", "x^2", "--h", "y^3-3y", "--json"],
        &["sweep", "--max-product", "16", "--jobs", "2", "--json"],
    ];
    for args in cases {
        assert_eq!(run(args), run(args), "{args:?}");
    }
}
