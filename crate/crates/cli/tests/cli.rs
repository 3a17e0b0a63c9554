use std::process::{Command, Output};

use serde_json::Value;

fn tgl(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_tgl"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn json(args: &[&str]) -> (Value, i32) {
    let out = tgl(args);
    let v = serde_json::from_slice(&out.stdout).unwrap_or_else(|e| {
        panic!(
            "{args:?}: {e}\nstdout: {}\nstderr: {}",
            String::from_utf8_lossy(&out.stdout),
            String::from_utf8_lossy(&out.stderr)
        )
    });
    (v, out.status.code().expect("exit code"))
}

#[test]
fn witt_example() {
    let (v, code) = json(&["witt", "--m", "2", "--n", "9"]);
    assert_eq!(code, 0);
    assert_eq!(v["value"], 56);
    assert_eq!(v["oracle"], 56);
    assert_eq!(v["pass"], true);
    assert_eq!(v["schema_version"], 1);
    assert!(v["provenance"].is_string());
}

#[test]
fn straighten_example() {
    let (v, code) = json(&["lambda", "straighten", "--indices", "0,2", "--oracle"]);
    assert_eq!(code, 0);
    assert_eq!(v["terms"], serde_json::json!([[1, 1]]));
    assert_eq!(v["pass"], true);
}

#[test]
fn usage_errors_exit_2() {
    assert_eq!(tgl(&["witt", "--m", "2", "--n", "9", "--bogus"]).status.code(), Some(2));
    assert_eq!(tgl(&["witt", "--m", "0", "--n", "9"]).status.code(), Some(2));
    let out = tgl(&["dsw", "verify", "--p", "4", "--k", "3"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("--p"));
    assert_eq!(tgl(&["nonsense"]).status.code(), Some(2));
}

#[test]
fn refused_certificate_exits_1() {
    let (v, code) = json(&[
        "certify", "thm22", "--p", "2", "--m", "1", "--l", "2", "--modulus", "3", "--k", "1",
    ]);
    assert_eq!(code, 1);
    assert_eq!(v["refused"], true);
    assert_eq!(v["failing_i"], 1);
}

#[test]
fn certificates() {
    let (v, code) = json(&["certify", "mod2-moore", "--p-aux", "3", "--n", "2", "--s-max", "100"]);
    assert_eq!(code, 0);
    assert_eq!(v["certificate"]["analytic_limit"], "(1/9)·ln2");
    assert_eq!(v["certificate"]["verdict"], "positive");
    let (v, code) = json(&[
        "certify", "odd-moore", "--p", "3", "--n-alpha", "8", "--n-beta", "8", "--s-max", "50",
    ]);
    assert_eq!(code, 0);
    assert_eq!(v["certificate"]["analytic_limit"], "(1/28)·ln2");
    assert_eq!(v["threshold"], 7);
    let (v, code) = json(&[
        "certify", "thm22", "--p", "2", "--m", "1", "--l", "2", "--modulus", "2", "--k", "1",
        "--s-max", "40",
    ]);
    assert_eq!(code, 0);
    assert_eq!(v["cover_checked"], true);
}

#[test]
fn moore_and_lie_commands() {
    let (v, _) = json(&["moore", "power", "--n", "3", "--k", "4", "--p", "3", "--r", "1"]);
    assert_eq!(v["result"], "P^12(3^1) ∨ 3·P^11(3^1) ∨ 3·P^10(3^1) ∨ P^9(3^1)");
    let (v, code) = json(&["moore", "smash", "--p", "3", "--r", "1", "--left", "5", "--right", "4:2"]);
    assert_eq!(code, 0);
    assert_eq!(v["moore_count"], 4);
    assert_eq!(tgl(&["moore", "power", "--n", "3", "--k", "2", "--p", "2", "--r", "1"]).status.code(), Some(2));
    let (v, _) = json(&["moore", "cube", "--s", "5"]);
    assert_eq!((v["dimension"].clone(), v["count"].clone()), (17.into(), 32.into()));
    let (v, code) = json(&["hilton-milnor", "--weight", "10", "--oracle"]);
    assert_eq!(code, 0);
    assert_eq!(v["total"], 99);
    let (v, code) = json(&["lyndon", "--m", "2", "--n", "4"]);
    assert_eq!(code, 0);
    assert_eq!(v["words"], serde_json::json!([{"word": "aaab"}, {"word": "aabb"}, {"word": "abbb"}]));
    let (v, code) = json(&["dsw", "verify", "--p", "5", "--k", "3", "--degrees", "1,1", "--mode", "koszul"]);
    assert_eq!((code, v["square_identity"].clone()), (0, true.into()));
    let (v, code) = json(&["lemma51", "--l", "2", "--p", "5", "--oracle"]);
    assert_eq!(code, 0);
    assert_eq!(v["kernel_dimension"], 2);
}

#[test]
fn lambda_commands() {
    let (v, code) = json(&["lambda", "basis", "--s", "2", "--t", "6", "--oracle"]);
    assert_eq!(code, 0);
    assert_eq!(v["count"], v["oracle"]);
    let (v, code) = json(&["lambda", "diff", "--indices", "2", "--oracle"]);
    assert_eq!(code, 0);
    assert_eq!(v["terms"], serde_json::json!([[1, 0]]));
    let (v, code) = json(&["lambda", "count", "--q", "2", "--oracle"]);
    assert_eq!(code, 0);
    assert_eq!((v["count"].clone(), v["bound"].clone()), ("3".into(), "4".into()));
    let (v, code) = json(&["--seed", "7", "lambda", "homology", "--n", "3", "--max-degree", "6", "--oracle"]);
    assert_eq!(code, 0);
    assert!(v["entries"].as_array().unwrap().len() > 10);
    let (_, code) = json(&["bound", "appendix", "--a", "2", "--q", "6"]);
    assert_eq!(code, 0);
}

#[test]
fn output_is_deterministic() {
    let args = ["--format", "csv", "--seed", "3", "lambda", "homology", "--n", "4", "--max-degree", "8", "--shuffle"];
    assert_eq!(tgl(&args).stdout, tgl(&args).stdout);
    let out = tgl(&["--format", "csv", "witt", "--m", "3", "--n", "4"]);
    let text = String::from_utf8(out.stdout).unwrap();
    assert_eq!(text, "m,n,value,oracle,pass\n3,4,18,18,true\n");
}

#[test]
fn verify_subset() {
    let (v, code) = json(&["verify-all", "--only", "2,8"]);
    assert_eq!(code, 0);
    assert_eq!(v["passed"], 2);
    assert!(v["results"][0].get("elapsed_ms").is_none());
}
