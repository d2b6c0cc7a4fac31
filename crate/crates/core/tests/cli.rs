use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_semifree"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn json(args: &[&str]) -> (i32, Value) {
    let mut all = args.to_vec();
    all.extend(["--format", "json"]);
    let out = run(&all);
    let v = serde_json::from_slice(&out.stdout).unwrap_or(Value::Null);
    (out.status.code().expect("exit code"), v)
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p.to_str().unwrap().to_string()
}

const C11: &str = "colors: R G Y X\nsolutions: R G\norder: R > G\nRXX GGX YXX XXX\n";

#[test]
fn validate_reports_violations_and_accepts_empty_files() {
    let dir = tempfile::tempdir().unwrap();
    let c = write(dir.path(), "c", C11);
    let empty = write(dir.path(), "empty", "# nothing\n");
    assert_eq!(run(&["validate", &empty, &c]).status.code(), Some(0));

    let bad = write(dir.path(), "bad", "3\n0 1 G\n0 2 G\n1 2 X\n");
    let (code, v) = json(&["validate", &bad, &c]);
    assert_eq!(code, 1);
    assert_eq!(v["schema"], 1);
    assert_eq!(v["command"], "validate");
    assert_eq!(v["result"]["violations"][0]["triangle"], "GGX");
}

#[test]
fn malformed_input_exits_two_with_line_number() {
    let dir = tempfile::tempdir().unwrap();
    let c = write(dir.path(), "c", C11);
    let bad = write(dir.path(), "bad", "3\n0 1 G\n0 2 Q\n1 2 X\n");
    let out = run(&["validate", &bad, &c]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("line 3"));

    let bad_c = write(dir.path(), "badc", "colors: R G\nRRZ\n");
    let out = run(&["check-closure", "--constraints", &bad_c, "--order", "R>G"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("line 2"));
}

#[test]
fn limits_and_unknown_entries_are_input_errors() {
    assert_eq!(
        run(&["check-closure", "--entry", "#11", "--bound", "9"])
            .status
            .code(),
        Some(2)
    );
    assert_eq!(
        run(&["check-sir", "--entry", "#11", "--max-size", "12"])
            .status
            .code(),
        Some(2)
    );
    assert_eq!(run(&["classify", "--entry", "#99"]).status.code(), Some(2));
    assert_eq!(
        run(&["verify-table", "--order", "#99=R>G"]).status.code(),
        Some(2)
    );
}

#[test]
fn wrong_order_gives_ggx_counterexample() {
    let (code, v) = json(&["check-closure", "--entry", "#11", "--order", "G>R"]);
    assert_eq!(code, 1);
    let r = &v["result"]["verdict"];
    assert_eq!(r["passes"], false);
    assert_eq!(
        r["witness"]["completion"]["violations"][0]["triangle"],
        "GGX"
    );

    let (code, v) = json(&["check-closure", "--entry", "#11"]);
    assert_eq!(code, 0);
    assert_eq!(v["result"]["verdict"]["passes"], true);
}

#[test]
fn amalgamate_instance_file() {
    let dir = tempfile::tempdir().unwrap();
    let inst = write(
        dir.path(),
        "inst",
        "base: 2\nleft:\n3\n0 1 R\n0 2 X\n1 2 R\nright:\n3\n0 1 R\n0 2 X\n1 2 G\n",
    );
    let (code, v) = json(&["amalgamate", &inst, "--entry", "#11"]);
    assert_eq!(code, 0);
    assert_eq!(
        v["result"]["completion"]["cross_edges"][0],
        serde_json::json!([2, 3, "G"])
    );
}

#[test]
fn catalogue_export_prints_the_embedded_catalogue() {
    let out = run(&["catalogue", "export"]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    assert_eq!(text, semifree::catalogue::catalogue_text());
}

#[test]
fn verify_table_with_wrong_override_fails() {
    let (code, v) = json(&[
        "verify-table",
        "--entry",
        "#5",
        "--entry",
        "#11",
        "--order",
        "#11=G>R",
        "--deletion-size",
        "0",
    ]);
    assert_eq!(code, 1);
    assert_eq!(v["result"]["total"], 2);
    assert_eq!(v["result"]["passed"], 1);
}

#[test]
fn build_generic_output_file() {
    let dir = tempfile::tempdir().unwrap();
    let out_path = dir.path().join("g.json");
    let o = out_path.to_str().unwrap();
    let out = run(&[
        "build-generic",
        "--entry",
        "#11",
        "--t",
        "1",
        "--format",
        "json",
        "--output",
        o,
    ]);
    assert_eq!(out.status.code(), Some(0));
    let v: Value = serde_json::from_str(&std::fs::read_to_string(&out_path).unwrap()).unwrap();
    assert_eq!(v["result"]["approximation"]["unrealized_types"], 0);
    assert_eq!(
        v["result"]["approximation"]["violations"]
            .as_array()
            .unwrap()
            .len(),
        0
    );

    let (code, v) = json(&[
        "build-generic",
        "--entry",
        "#26",
        "--order",
        "R>G",
        "--t",
        "1",
    ]);
    assert_eq!(code, 1);
    assert_eq!(v["result"]["failure"]["instance"]["base"], 1);
}
