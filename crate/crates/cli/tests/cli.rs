use std::process::{Command, Output};

use proptest::prelude::*;
use serde_json::Value;

fn qtop(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qtop"))
        .args(args)
        .env_remove("QTOP_OUT_DIR")
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

#[test]
fn homology_of_lens_5() {
    let o = qtop(&["homology", "--desc", "lens:5"]);
    assert!(o.status.success());
    assert_eq!(stdout(&o).trim(), "Z/5");
}

#[test]
fn hyperplane_probability_by_enumeration() {
    let o = qtop(&["walk", "prob", "--q", "3", "--n", "2", "--m", "1", "--mode", "enumerate"]);
    assert!(o.status.success());
    assert_eq!(stdout(&o).trim(), "1/4");
}

#[test]
fn dw_of_lens_3_with_s3() {
    let o = qtop(&["invariant", "dw", "--desc", "lens:3", "--group", "S3"]);
    assert!(o.status.success());
    assert_eq!(stdout(&o).trim(), "1/2");
}

#[test]
fn dw_oracles_agree_through_the_cli() {
    let o = qtop(&["invariant", "dw", "--desc", "lens:4", "--group", "Q8", "--method", "both", "--format", "json"]);
    assert!(o.status.success(), "{}", stderr(&o));
    let v: Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["result"]["agree"], Value::Bool(true));
}

#[test]
fn obstruct_exit_codes() {
    let none = qtop(&["obstruct", "--candidate", "lens:3"]);
    assert_eq!(none.status.code(), Some(1));
    assert!(stdout(&none).starts_with("NO_OBSTRUCTION_FOUND"));

    let found = qtop(&["obstruct", "--candidate", "compress:0:", "--q", "41", "--search", "--seed", "12"]);
    assert_eq!(found.status.code(), Some(0), "{}", stderr(&found));
    assert!(stdout(&found).starts_with("OBSTRUCTED"));

    let bad = qtop(&["obstruct", "--candidate", "lens:"]);
    assert_eq!(bad.status.code(), Some(2));
    assert!(stderr(&bad).starts_with("error[usage]"));
}

#[test]
fn obstruct_json_certificate_recomputes_verdict() {
    let o = qtop(&["obstruct", "--candidate", "compress:0:", "--q", "41", "--search", "--seed", "12", "--format", "json"]);
    assert_eq!(o.status.code(), Some(0));
    let v: Value = serde_json::from_slice(&o.stdout).unwrap();
    let r = &v["result"];
    assert_eq!(r["verdict"], "OBSTRUCTED");
    let decisive = r["certificate"]
        .as_array()
        .unwrap()
        .iter()
        .any(|row| row["mResidue"].as_u64() != Some(0) && row["nVector"].as_array().unwrap().iter().all(|x| x == 0));
    assert!(decisive);
    assert_eq!(r["search"]["found"], true);
}

#[test]
fn bad_q_is_rejected_before_running() {
    let o = qtop(&["invariant", "rt", "--desc", "lens:3", "--q", "43"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("not 1 mod 20"), "{}", stderr(&o));
}

#[test]
fn json_envelope_carries_schema_and_config() {
    let o = qtop(&["invariant", "rt", "--desc", "lens:3", "--q", "41", "--format", "json"]);
    assert!(o.status.success(), "{}", stderr(&o));
    let v: Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["schemaVersion"], 1);
    assert_eq!(v["command"], "invariant-rt");
    assert_eq!(v["config"]["p"], 5);
    let coeffs = v["result"]["value"]["coeffs"].as_array().unwrap();
    assert_eq!(coeffs.len(), 8);
    assert!(coeffs.iter().all(Value::is_string));
}

#[test]
fn out_dir_from_environment() {
    let dir = tempfile::tempdir().unwrap();
    let o = Command::new(env!("CARGO_BIN_EXE_qtop"))
        .args(["homology", "--desc", "lens:7", "--format", "json"])
        .env("QTOP_OUT_DIR", dir.path())
        .output()
        .unwrap();
    assert!(o.status.success());
    let written = std::fs::read_to_string(dir.path().join("homology.json")).unwrap();
    assert_eq!(written, stdout(&o));
    let v: Value = serde_json::from_str(&written).unwrap();
    assert_eq!(v["result"]["group"], "Z/7");
}

#[test]
fn explicit_out_wins_over_out_dir() {
    let dir = tempfile::tempdir().unwrap();
    let target = dir.path().join("mix.csv");
    let o = Command::new(env!("CARGO_BIN_EXE_qtop"))
        .args(["walk", "mix", "--steps", "5", "--format", "csv", "--out"])
        .arg(&target)
        .env("QTOP_OUT_DIR", dir.path().join("unused"))
        .output()
        .unwrap();
    assert!(o.status.success());
    let text = std::fs::read_to_string(&target).unwrap();
    assert!(text.starts_with("step,tv,tv_exact\n0,"));
    assert_eq!(text.lines().count(), 7);
    assert!(!dir.path().join("unused").exists());
}

#[test]
fn desc_file_errors_carry_position() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("n.json");
    std::fs::write(&path, "{\n  \"kind\": \"lens\",\n  \"bb\": 3\n}").unwrap();
    let o = qtop(&["homology", "--desc-file", path.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    let err = stderr(&o);
    assert!(err.starts_with("error[parse]: line 3, column"), "{err}");
    assert!(err.contains("unknown field `bb`"));
}

#[test]
fn desc_file_accepts_nested_descriptions() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("n.json");
    std::fs::write(
        &path,
        r#"{"kind":"connectedSum","left":{"kind":"lens","b":4},"right":{"kind":"double","half":{"kind":"compression","boundaryGenus":1,"word":""}}}"#,
    )
    .unwrap();
    let o = qtop(&["homology", "--desc-file", path.to_str().unwrap()]);
    assert!(o.status.success(), "{}", stderr(&o));
    assert_eq!(stdout(&o).trim(), "Z/4 + Z^3");
}

#[test]
fn group_tables_from_csv() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("z2.csv");
    std::fs::write(&path, "e,x\n0,1\n1,0\n").unwrap();
    let o = qtop(&["invariant", "dw", "--desc", "lens:2", "--group-file", path.to_str().unwrap()]);
    assert!(o.status.success(), "{}", stderr(&o));
    // |Hom(Z/2, Z/2)| / |Z/2|
    assert_eq!(stdout(&o).trim(), "1");
}

#[test]
fn csv_is_refused_where_there_is_no_table() {
    let o = qtop(&["homology", "--desc", "lens:5", "--format", "csv"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn rep_check_reports_all_relations() {
    let o = qtop(&["rep", "check", "--genus", "1", "--words", "40", "--format", "json"]);
    assert!(o.status.success(), "{}", stderr(&o));
    let v: Value = serde_json::from_slice(&o.stdout).unwrap();
    let dim = v["result"]["dim"].as_u64().unwrap();
    assert_eq!(dim, 2);
    assert_eq!(v["result"]["spanDim"].as_u64().unwrap(), dim * dim);
}

fn gcd(a: u64, b: u64) -> u64 {
    if b == 0 { a } else { gcd(b, a % b) }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn lens_homology_is_cyclic(b in 2i64..60) {
        let o = qtop(&["homology", "--desc", &format!("lens:{b}")]);
        prop_assert_eq!(stdout(&o).trim().to_string(), format!("Z/{b}"));
    }

    #[test]
    fn connected_sums_of_lens_spaces(a in 2u64..12, b in 2u64..12) {
        let o = qtop(&["homology", "--desc", &format!("lens:{a} # lens:{b}")]);
        // Smith form of diag(a, b)
        let g = gcd(a, b);
        let l = a * b / g;
        let expected = if g == 1 { format!("Z/{l}") } else { format!("Z/{g} + Z/{l}") };
        prop_assert_eq!(stdout(&o).trim().to_string(), expected);
    }

    #[test]
    fn formula_matches_enumeration(q in prop::sample::select(vec![2u64, 3, 5]), m in 0usize..3) {
        let run = |mode: &str| {
            let o = qtop(&["walk", "prob", "--q", &q.to_string(), "--n", "2", "--m", &m.to_string(), "--mode", mode]);
            stdout(&o).trim().to_string()
        };
        let formula = run("formula");
        prop_assert_eq!(run("enumerate"), formula);
    }

    #[test]
    fn json_reports_reparse_to_the_same_value(b in 2i64..20) {
        let o = qtop(&["homology", "--desc", &format!("lens:{b}"), "--format", "json"]);
        let v: Value = serde_json::from_slice(&o.stdout).unwrap();
        let again: Value = serde_json::from_str(&serde_json::to_string(&v).unwrap()).unwrap();
        prop_assert_eq!(&again, &v);
        prop_assert_eq!(&v["result"]["torsion"][0], &Value::String(b.to_string()));
    }
}
