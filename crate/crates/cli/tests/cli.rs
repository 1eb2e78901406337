use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn hpd(args: &[&str], dir: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_hpd")).args(args).current_dir(dir).output().expect("run hpd")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn error_line(o: &Output) -> Value {
    let err = String::from_utf8(o.stderr.clone()).unwrap();
    serde_json::from_str(err.lines().last().expect("an error line")).expect("JSON error line")
}

#[test]
fn norm_of_two_unit_terms_is_sqrt_two() {
    let dir = tempfile::tempdir().unwrap();
    fs::write(
        dir.path().join("d.json"),
        r#"{"id": "d", "frequency": {"family": "linear", "N": 2}, "terms": [{"n": 1, "re": 1}, {"n": 2, "re": 1}]}"#,
    )
    .unwrap();
    let o = hpd(&["norm", "d.json", "--p", "2"], dir.path());
    assert!(o.status.success(), "{o:?}");
    let text = stdout(&o);
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "series_id,p,method,value,error,lower_bound");
    let fields: Vec<&str> = lines[1].split(',').collect();
    assert_eq!(&fields[..3], &["d", "2", "parseval"]);
    assert!((fields[3].parse::<f64>().unwrap() - 2f64.sqrt()).abs() < 1e-15);
}

#[test]
fn series_with_frequency_reference() {
    let dir = tempfile::tempdir().unwrap();
    fs::write(dir.path().join("f.toml"), "family = \"qli\"\ncount = 5\n").unwrap();
    fs::write(dir.path().join("s.json"), r#"{"frequency_ref": "f.toml", "terms": [{"n": 5, "re": 3, "im": 4}]}"#)
        .unwrap();
    let o = hpd(&["norm", "s.json", "--p", "2,inf"], dir.path());
    assert!(o.status.success(), "{o:?}");
    let text = stdout(&o);
    for line in text.lines().skip(1) {
        assert!(line.starts_with("s,"));
        let v: f64 = line.split(',').nth(3).unwrap().parse().unwrap();
        assert!((v - 5.0).abs() < 1e-12, "{line}");
    }
}

#[test]
fn lift_of_ordinary_prefix() {
    let dir = tempfile::tempdir().unwrap();
    let o = hpd(&["lift", "--family", "ordinary", "--count", "4", "--terms", "1:1,2:1,3:1,4:1"], dir.path());
    assert!(o.status.success(), "{o:?}");
    let doc: Value = serde_json::from_str(&stdout(&o)).unwrap();
    let rows: Vec<Value> = doc["terms"].as_array().unwrap().iter().map(|t| t["exponents"].clone()).collect();
    assert_eq!(
        rows,
        vec![
            serde_json::json!([0, 0]),
            serde_json::json!([1, 0]),
            serde_json::json!([0, 1]),
            serde_json::json!([2, 0])
        ]
    );
    assert_eq!(doc["basis_elements"], serde_json::json!(["log2", "log3"]));
    let index: Vec<&str> =
        doc["terms"].as_array().unwrap().iter().map(|t| t["ordinary_index"].as_str().unwrap()).collect();
    assert_eq!(index, ["1", "2", "3", "4"]);
}

#[test]
fn verify_is_deterministic_and_passes() {
    let dir = tempfile::tempdir().unwrap();
    let run = |out: &str| hpd(&["verify", "--suites", "vertical_isometry", "--seed", "7", "--out", out], dir.path());
    let a = run("a.csv");
    let b = run("b.csv");
    assert!(a.status.success() && b.status.success());
    assert!(stdout(&a).starts_with("vertical_isometry PASS"));
    let (ca, cb) = (fs::read(dir.path().join("a.csv")).unwrap(), fs::read(dir.path().join("b.csv")).unwrap());
    assert!(ca.len() > 100);
    assert_eq!(ca, cb);
    assert!(!ca.contains(&b'\r'));
}

#[test]
fn spec_file_with_flag_override() {
    let dir = tempfile::tempdir().unwrap();
    fs::write(
        dir.path().join("job.json"),
        r#"{"command": "norm", "options": {"family": "linear", "count": 2, "terms": "1:1,2:1", "p": "4"}}"#,
    )
    .unwrap();
    let from_file = hpd(&["run", "--spec", "job.json"], dir.path());
    assert!(from_file.status.success(), "{from_file:?}");
    assert!(stdout(&from_file).lines().nth(1).unwrap().starts_with("inline,4,even_exact,"));
    let overridden = hpd(&["norm", "--spec", "job.json", "--p", "2"], dir.path());
    assert!(stdout(&overridden).lines().nth(1).unwrap().starts_with("inline,2,parseval,"));
    let clash = hpd(&["lift", "--spec", "job.json"], dir.path());
    assert!(!clash.status.success());
    assert_eq!(error_line(&clash)["error"], "spec");
}

#[test]
fn errors_are_json_lines_with_nonzero_exit() {
    let dir = tempfile::tempdir().unwrap();
    fs::write(dir.path().join("bad.json"), "{ not json").unwrap();
    let o = hpd(&["norm", "bad.json"], dir.path());
    assert_eq!(o.status.code(), Some(1));
    assert_eq!(error_line(&o)["error"], "parse");

    let o = hpd(&["norm", "missing.json"], dir.path());
    assert_eq!(o.status.code(), Some(1));
    assert_eq!(error_line(&o)["error"], "spec");

    let o = hpd(&["verify", "--suites", "riesz_mean", "--tolerance", "-1"], dir.path());
    assert_eq!(o.status.code(), Some(2));
    assert_eq!(error_line(&o)["error"], "suite_failure");
    assert!(stdout(&o).contains("riesz_mean FAIL"));
}

#[test]
fn help_lists_defaults() {
    let o = hpd(&["norm", "--help"], Path::new("."));
    let text = stdout(&o);
    assert!(text.contains("[default: 2]") && text.contains("[default: auto]"));
}

#[test]
fn usage_errors_are_json_too() {
    let o = hpd(&["norm", "--p"], Path::new("."));
    assert_eq!(o.status.code(), Some(1));
    assert_eq!(error_line(&o)["error"], "usage");
}
