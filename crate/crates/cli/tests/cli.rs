use std::io::Write;
use std::process::{Command, Output, Stdio};

use serde_json::Value;
use vop_core::ring::Poly;
use vop_core::{NPoly, Param, Scalar};

const HERMITE3: &str = r#"{"kind":"weyl","q":[["-1/2",2]],"N":3}"#;
const LAGUERRE: &str = r#"{"kind":"sl2","q":[[1,1]],"params":{"beta":"symbolic"},"N":10}"#;

fn vop(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_vop")).args(args).output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn json(o: &Output) -> Value {
    serde_json::from_slice(&o.stdout).unwrap()
}

#[test]
fn gen_hermite_text() {
    let o = vop(&["gen", "--spec", HERMITE3, "--format", "text"]);
    assert_eq!(o.status.code(), Some(0));
    let lines: Vec<String> = stdout(&o).lines().skip(1).map(str::to_string).collect();
    assert_eq!(lines, ["P_0 = 1", "P_1 = x", "P_2 = x^2 - 1", "P_3 = x^3 - 3*x"]);
}

#[test]
fn gen_json_is_a_table_document() {
    let v = json(&vop(&["gen", "--spec", HERMITE3]));
    assert_eq!(v["kind"], "weyl");
    assert_eq!(v["polys"].as_array().unwrap().len(), 4);
    assert_eq!(v["polys"][2][1]["coeff"][0]["coeff"], "-1");
}

#[test]
fn recur_laguerre_closed_forms() {
    let v = json(&vop(&["recur", "--spec", LAGUERRE]));
    assert_eq!(v["bandwidth"], 1);
    let beta = Scalar::var(Param::Beta);
    let g0: NPoly = Poly::from_coeffs(vec![-beta.clone(), Scalar::from(-2)]);
    let g1: NPoly = Poly::from_coeffs(vec![Scalar::from(0), &beta - &Scalar::from(1), Scalar::from(1)]);
    assert_eq!(v["closed_forms"]["0"], serde_json::to_value(&g0).unwrap());
    assert_eq!(v["closed_forms"]["1"], serde_json::to_value(&g1).unwrap());
    assert_eq!(v["rows"].as_array().unwrap().len(), 10);
}

#[test]
fn verify_round_trip_through_gen() {
    let spec = r#"{"kind":"sl2","q":[["1/2",2]],"N":7}"#;
    let dir = std::env::temp_dir().join(format!("vop-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let table = dir.join("table.json");
    let g = vop(&["gen", "--spec", spec, "--out", table.to_str().unwrap()]);
    assert_eq!(g.status.code(), Some(0));
    assert!(g.stdout.is_empty());
    let direct = vop(&["verify", "--spec", spec]);
    let replay = vop(&["verify", "--spec", spec, "--table", table.to_str().unwrap()]);
    assert_eq!(direct.status.code(), Some(1));
    assert_eq!(replay.status.code(), Some(1));
    assert_eq!(direct.stdout, replay.stdout);

    let mismatched = vop(&["verify", "--spec", spec, "--n", "6", "--table", table.to_str().unwrap()]);
    assert_eq!(mismatched.status.code(), Some(2));
    std::fs::remove_dir_all(&dir).unwrap();
}

#[test]
fn exit_codes() {
    // all weyl claims hold
    let ok = vop(&["verify", "--spec", HERMITE3]);
    assert_eq!(ok.status.code(), Some(0));
    assert_eq!(json(&ok)["summary"]["mismatch"], 0);
    // usage errors
    assert_eq!(vop(&["gen"]).status.code(), Some(2));
    assert_eq!(vop(&["frobnicate"]).status.code(), Some(2));
    assert_eq!(vop(&["gen", "--spec", "/nonexistent/spec.json"]).status.code(), Some(2));
    // spec errors, reported with location
    let bad = vop(&["gen", "--spec", "{\"kind\":\"weyl\",\n\"q\":[[1,1]],\"extra\":0}"]);
    assert_eq!(bad.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&bad.stderr).contains("line 2"));
    assert_eq!(vop(&["gen", "--spec", r#"{"kind":"weyl","q":[[1,0]]}"#]).status.code(), Some(2));
    assert_eq!(
        vop(&["gen", "--spec", r#"{"kind":"weyl","q":[[1,1]],"params":{"beta":1}}"#]).status.code(),
        Some(2)
    );
    // d = 0: no functionals to speak of
    assert_eq!(vop(&["functionals", "--spec", r#"{"kind":"weyl","q":[[1,1]],"N":5}"#]).status.code(), Some(2));
}

#[test]
fn spec_from_stdin() {
    let mut child = Command::new(env!("CARGO_BIN_EXE_vop"))
        .args(["gen", "--spec", "-", "--format", "text"])
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .spawn()
        .unwrap();
    child.stdin.take().unwrap().write_all(HERMITE3.as_bytes()).unwrap();
    let o = child.wait_with_output().unwrap();
    assert!(stdout(&o).contains("P_3 = x^3 - 3*x"));
}

#[test]
fn ordering_flag_restricts_checks() {
    let spec = r#"{"kind":"sl2","q":[["1/2",2]],"N":6}"#;
    let both = json(&vop(&["verify", "--spec", spec]));
    let one = json(&vop(&["verify", "--spec", spec, "--ordering", "as-written"]));
    let ids = |v: &Value| -> Vec<String> {
        v["checks"].as_array().unwrap().iter().map(|c| c["id"].as_str().unwrap().to_string()).collect()
    };
    assert!(ids(&both).iter().any(|i| i.ends_with("/reversed")));
    assert!(!ids(&one).iter().any(|i| i.ends_with("/reversed")));
    assert!(ids(&one).iter().any(|i| i.ends_with("thm-4.4-ii/as-written")));
}

#[test]
fn text_and_json_agree() {
    let spec = r#"{"kind":"cubic","q":[[1,1]],"N":6}"#;
    let j = json(&vop(&["verify", "--spec", spec]));
    let t = stdout(&vop(&["verify", "--spec", spec, "--format", "text"]));
    for c in j["checks"].as_array().unwrap() {
        let id = c["id"].as_str().unwrap();
        let status = c["status"].as_str().unwrap();
        assert!(
            t.lines().any(|l| l.starts_with(status) && l.split_whitespace().nth(1) == Some(id)),
            "{id} missing from text"
        );
        if let Some(w) = c["witness"].as_object() {
            if status == "mismatch" {
                assert!(t.contains(w["got"].as_str().unwrap()));
            }
        }
    }
    let s = &j["summary"];
    assert!(t.contains(&format!("{} match, {} mismatch", s["match"], s["mismatch"])));
}

#[test]
fn functionals_for_hermite() {
    let v = json(&vop(&["functionals", "--spec", r#"{"kind":"weyl","q":[["-1/2",2]],"N":8}"#]));
    assert_eq!(v["functionals"]["d"], 1);
    let m = &v["functionals"]["moments"][0];
    // u(x^4) = 3
    assert_eq!(m[4], serde_json::to_value(Scalar::from(3)).unwrap());
    assert!(v["checks"].as_array().unwrap().iter().all(|c| c["status"] == "match"));
}

#[test]
fn output_is_deterministic() {
    let a = vop(&["verify", "--spec", LAGUERRE]);
    let b = vop(&["verify", "--spec", LAGUERRE]);
    assert_eq!(a.stdout, b.stdout);
    assert_eq!(a.status.code(), b.status.code());
}
