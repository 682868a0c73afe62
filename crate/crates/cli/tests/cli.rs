use std::process::{Command, Output};

fn principal(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_principal")).args(args).output().expect("binary runs")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exited normally")
}

#[test]
fn basis_and_fermionic_emit_identical_bytes() {
    let base = ["char", "--n", "2", "--k", "1", "--weights", "1,0,0", "--cutoff", "3"];
    let a = principal(&[&base[..], &["--method", "basis"]].concat());
    let b = principal(&[&base[..], &["--method", "fermionic"]].concat());
    assert_eq!(code(&a), 0);
    assert_eq!(a.stdout, b.stdout);
    let text = String::from_utf8(a.stdout).unwrap();
    assert!(text.starts_with(r#"{"n":2,"cutoff":3,"terms":[{"x":[0,0],"q":0,"coeff":"1"}"#));
}

#[test]
fn oracle_matches_fermionic_bytes() {
    let base = ["char", "--n", "2", "--weights", "0*L0+1*L2", "--cutoff", "5", "--format", "csv"];
    let a = principal(&[&base[..], &["--method", "oracle"]].concat());
    let b = principal(&[&base[..], &["--method", "fermionic"]].concat());
    assert_eq!(code(&a), 0);
    assert_eq!(a.stdout, b.stdout);
    assert!(String::from_utf8(a.stdout).unwrap().starts_with("r1,r2,s,coeff\n0,0,0,1\n"));
}

#[test]
fn output_is_independent_of_worker_count() {
    let run = |w: &str| principal(&["--workers", w, "char", "--n", "3", "--weights", "1,1,0,0", "--cutoff", "8", "--format", "text"]);
    let (a, b) = (run("1"), run("4"));
    assert_eq!(code(&a), 0);
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn unsupported_weight_is_a_usage_error() {
    let o = principal(&["char", "--n", "3", "--weights", "0,1,1,1", "--cutoff", "3", "--method", "basis"]);
    assert_eq!(code(&o), 2);
    assert!(o.stdout.is_empty());
    assert!(String::from_utf8(o.stderr).unwrap().contains("outside"));
}

#[test]
fn malformed_arguments_are_usage_errors() {
    assert_eq!(code(&principal(&["char", "--n", "2", "--weights", "1,0", "--cutoff", "3"])), 2);
    assert_eq!(code(&principal(&["char", "--n", "2", "--k", "2", "--weights", "1,0,0", "--cutoff", "3"])), 2);
    assert_eq!(code(&principal(&["char", "--n", "2", "--weights", "1,0,0", "--cutoff", "3", "--method", "nope"])), 2);
    assert_eq!(code(&principal(&["char", "--n", "2", "--weights", "0,1,1", "--cutoff", "3", "--method", "oracle"])), 2);
    assert_eq!(code(&principal(&["verify", "nonsense"])), 2);
    assert_eq!(code(&principal(&["--workers", "0", "verify", "ag", "--k", "1"])), 2);
}

#[test]
fn verification_suites_pass() {
    for args in [
        &["verify", "recursion", "--n", "3", "--k", "2", "--cutoff", "10"][..],
        &["verify", "pform", "--n", "2", "--k", "2", "--cutoff", "8"],
        &["verify", "level1-seq", "--n", "2", "--cutoff", "8"],
        &["verify", "ag", "--k", "1", "--cutoff", "30"],
        &["verify", "appendix", "--n", "2", "--window", "2"],
        &["verify", "oracle", "--n", "2", "--cutoff", "5"],
        &["verify", "dynkin", "--n", "3", "--k", "2", "--cutoff", "6"],
    ] {
        let o = principal(args);
        assert_eq!(code(&o), 0, "{args:?}");
        let report = String::from_utf8(o.stdout).unwrap();
        assert!(!report.is_empty() && report.lines().all(|l| l.starts_with("PASS ")), "{args:?}");
    }
}

#[test]
fn json_report_lists_every_check() {
    let o = principal(&["verify", "ag", "--cutoff", "20", "--format", "json"]);
    assert_eq!(code(&o), 0);
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    let checks = v.as_array().unwrap();
    assert_eq!(checks.len(), 3);
    assert!(checks.iter().all(|c| c["pass"] == true && c["order"] == 20));
}

#[test]
fn compare_reports_agreement() {
    let o = principal(&["compare", "--n", "2", "--k", "2", "--weights", "1,1,0", "--cutoff", "8"]);
    assert_eq!(code(&o), 0);
    assert_eq!(String::from_utf8(o.stdout).unwrap(), "PASS compare weights=1*L0+1*L1 fermionic/basis order=8\n");
    let o = principal(&["compare", "--n", "2", "--weights", "0,1,1", "--cutoff", "8", "--methods", "fermionic,pform"]);
    assert_eq!(code(&o), 0);
    assert_eq!(code(&principal(&["compare", "--n", "2", "--weights", "1,0,0", "--cutoff", "4", "--methods", "basis"])), 2);
}

#[test]
fn writes_to_out_path() {
    let path = std::env::temp_dir().join(format!("principal-cli-{}.json", std::process::id()));
    let o = principal(&["char", "--n", "2", "--weights", "1,0,0", "--cutoff", "2", "--out", path.to_str().unwrap()]);
    assert_eq!(code(&o), 0);
    assert!(o.stdout.is_empty());
    let body = std::fs::read_to_string(&path).unwrap();
    std::fs::remove_file(&path).unwrap();
    assert!(body.contains(r#""cutoff":2"#));
}
