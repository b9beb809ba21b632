use std::io::Write;

use mixed_nim::cli::run;
use serde_json::Value;

fn call(args: &[&str]) -> (i32, String, String) {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let argv = std::iter::once("mixed-nim").chain(args.iter().copied());
    let code = run(argv, &mut out, &mut err);
    (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
}

fn json(args: &[&str]) -> Value {
    let (code, out, err) = call(args);
    assert_eq!(code, 0, "{err}");
    serde_json::from_str(&out).unwrap()
}

#[test]
fn nimsum_golden() {
    let (code, out, _) = call(&["--base", "60,24,7:7", "nimsum", "--pos", "1770,9580"]);
    assert_eq!(code, 0);
    assert_eq!(out, "{\"digits\":[10,20,0],\"value\":1210}\n");
}

#[test]
fn digits_round_trip() {
    let v = json(&["--base", "60,24,7:7", "digits", "--value", "1770"]);
    assert_eq!(v["digits"], serde_json::json!([30, 5, 1]));
    let v = json(&["--base", "60,24,7:7", "digits", "--from", "30,5,1"]);
    assert_eq!(v["value"], 1770);
}

#[test]
fn carry_and_ord() {
    let v = json(&["--base", ":10", "carry", "--n", "37", "--h", "65"]);
    assert_eq!(v["carry"], 110);
    let (_, out, _) = call(&["--base", ":3", "--output", "plain", "ord", "--value", "18"]);
    assert_eq!(out, "2\n");
    let v = json(&["--base", ":3", "ord", "--value", "0"]);
    assert_eq!(v["ord"], "inf");
}

#[test]
fn member_certificates() {
    let (code, out, _) = call(&["--base", ":3", "--output", "plain", "member", "--system", "max", "--move", "2,4"]);
    assert_eq!(code, 0);
    assert_eq!(out, "false\nlevel 1\nwitness 1,2\n");

    let v = json(&["--base", ":5", "member", "--system", "nmin", "--move", "10,5,5"]);
    assert_eq!(v["member"], true);
    assert!(v["nj"]["form"].as_str().is_some());

    let v = json(&["--base", ":3", "member", "--system", "ord", "--move", "7,4"]);
    assert_eq!(v["member"], true);

    let v = json(&["--base", ":3", "member", "--system", "nmin-{(1,0)}", "--move", "1,0"]);
    assert_eq!(v["member"], false);
}

#[test]
fn verify_reports() {
    let v = json(&["--base", "2,3:2", "verify", "--system", "nmin-{(2,2)}", "--box", "4,4"]);
    assert_eq!(v, serde_json::json!({"outcome": "sg2_violation", "x": [2, 2], "h": 0}));
    let v = json(&["--base", "2,3:2", "verify", "--system", "nmin-{(2,1),(2,3)}", "--box", "4,4"]);
    assert_eq!(v["outcome"], "ok");
    let (_, out, _) = call(&["--base", "2,3:2", "--output", "plain", "verify", "--system", "nmin+{(1,1)}", "--box", "4,4"]);
    assert!(out.starts_with("sg1 violation"), "{out}");
}

#[test]
fn sg_table_outputs() {
    let (code, out, _) = call(&["--output", "tsv", "sg-table", "--system", "wt1", "--box", "2,3"]);
    assert_eq!(code, 0);
    assert!(out.contains("0\t1\t2") && out.contains("1\t0\t3"), "{out}");

    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("table.json");
    let (code, _, err) = call(&["sg-table", "--box", "3,3", "--out", path.to_str().unwrap()]);
    assert_eq!(code, 0, "{err}");
    let v: Value = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    assert_eq!(v["values"].as_array().unwrap().len(), 9);

    let (code, _, _) = call(&["--output", "tsv", "sg-table", "--box", "2,2,2"]);
    assert_eq!(code, 2);
}

#[test]
fn explicit_system_from_file() {
    let mut file = tempfile::NamedTempFile::new().unwrap();
    write!(file, "[[1,0],[0,1],[1,1]]").unwrap();
    let system = format!("explicit@{}", file.path().display());
    let v = json(&["enumerate", "--system", &system, "--box", "3,3"]);
    assert_eq!(v, serde_json::json!([[0, 1], [1, 0], [1, 1]]));
    let v = json(&["verify", "--system", &system, "--box", "3,3"]);
    assert_eq!(v, serde_json::json!({"outcome": "sg2_violation", "x": [0, 2], "h": 0}));
}

#[test]
fn best_move_and_losing_position() {
    let (code, out, _) = call(&["--base", ":4", "--output", "plain", "best-move", "--pos", "105,86,356", "--target", "292"]);
    assert_eq!(code, 0);
    assert_eq!(out, "43,64,64\n");
    let (code, out, _) = call(&["--output", "plain", "best-move", "--pos", "3,3"]);
    assert_eq!(code, 1);
    assert_eq!(out, "losing position\n");
}

#[test]
fn audit_and_props() {
    let v = json(&["--base", "2,3:2", "audit-minimal", "--system", "nmin", "--box", "4,4"]);
    let necessary: Vec<&Value> = v["necessary"].as_array().unwrap().iter().map(|n| &n["move"]).collect();
    assert!(necessary.contains(&&serde_json::json!([2, 2])));
    assert_eq!(v["undetermined"].as_array().unwrap().len(), 4);

    let (_, out, _) = call(&["--base", "2,4:2", "--output", "plain", "props", "--check", "min-symmetric", "-m", "3"]);
    assert_eq!(out, "false\n");
    let v = json(&["--base", ":3", "props", "--check", "max-eq-ord", "-m", "2"]);
    assert_eq!(v["holds"], false);
}

#[test]
fn exit_codes() {
    assert_eq!(call(&["--help"]).0, 0);
    assert_eq!(call(&["nimsum"]).0, 2);
    assert_eq!(call(&["--base", "1:2", "nimsum", "--pos", "1"]).0, 2);
    assert_eq!(call(&["--base", ":2", "member", "--system", "bogus", "--move", "1"]).0, 2);
    let (code, _, err) = call(&["--base", ":3", "nimsum", "--pos", "18446744073709551615,18446744073709551615"]);
    assert_eq!(code, 3, "{err}");
    let (code, _, err) = call(&["--base", "2:2", "nimsum", "--pos", "1,x"]);
    assert_eq!(code, 2);
    assert!(err.contains("error"));
}

#[test]
fn thread_option() {
    let v = json(&["--threads", "2", "--base", "4:2", "enumerate", "--system", "ord", "--box", "3,3"]);
    assert_eq!(v.as_array().unwrap().len(), 7);
    assert!(!v.as_array().unwrap().contains(&serde_json::json!([2, 2])));
}
