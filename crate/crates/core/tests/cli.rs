use cmident::cli::{run, DEFAULT_SEED};
use std::io::Write;
use std::process::{Command, Stdio};

fn call(args: &[&str]) -> (i32, String, String) {
    let (mut out, mut err) = (Vec::new(), Vec::new());
    let mut full = vec!["cmident"];
    full.extend_from_slice(args);
    let code = run(full, &mut out, &mut err);
    (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
}

#[test]
fn identify_json_schema() {
    let (code, out, _) = call(&["identify", "--coeffs", "3375,1"]);
    assert_eq!(code, 0);
    let v: serde_json::Value = serde_json::from_str(out.trim()).unwrap();
    assert_eq!(v["is_hcp"], true);
    assert_eq!(v["discriminant"], -7);
    assert_eq!(v["method"], "alg2");
    for key in ["witness_prime", "primes_tried", "grh_conditional", "verified"] {
        assert!(v.get(key).is_some(), "missing {key}");
    }

    let (code, out, _) = call(&["identify", "--coeffs", "3376,1", "--algorithm", "1"]);
    assert_eq!(code, 0);
    let v: serde_json::Value = serde_json::from_str(out.trim()).unwrap();
    assert_eq!(v["is_hcp"], false);
    assert!(v["discriminant"].is_null());
}

#[test]
fn identify_methods_agree() {
    let coeffs = "-121287375,191025,1"; // H_-15
    for alg in ["1", "2", "screen", "real-root"] {
        let (code, out, err) = call(&["identify", "--coeffs", coeffs, "--algorithm", alg]);
        assert_eq!(code, 0, "{alg}: {err}");
        assert!(out.contains("\"is_hcp\":true"), "{alg}: {out}");
    }
}

#[test]
fn text_subcommands() {
    let (code, out, _) = call(&["hcp", "-D", "-4"]);
    assert_eq!(code, 0);
    assert_eq!(out.lines().next(), Some("X - 1728"));
    assert_eq!(call(&["classnum", "-D", "-571"]).1, "5\nh2 1\nw 1\n");
    let (code, out, _) = call(&["discs", "--class-number", "1", "--bound", "200"]);
    assert_eq!(code, 0);
    assert_eq!(out.lines().filter(|l| !l.starts_with('#')).count(), 13);
    assert_eq!(call(&["endring", "-p", "31", "-j", "28"]).1.trim(), "-27");
    let (code, out, _) = call(&["--format", "json", "classnum", "-D", "-4"]);
    assert_eq!(code, 0);
    let v: serde_json::Value = serde_json::from_str(out.trim()).unwrap();
    assert_eq!(v["w"], 2);
}

#[test]
fn exit_codes() {
    assert_eq!(call(&["frobnicate"]).0, 2);
    assert_eq!(call(&["identify"]).0, 2);
    assert_eq!(call(&["classnum", "-D", "-5"]).0, 3);
    assert_eq!(call(&["identify", "--coeffs", "1,x"]).0, 3);
    assert_eq!(call(&["endring", "-p", "33", "-j", "1"]).0, 3);
    assert_eq!(call(&["--modpoly-dir", "/nonexistent", "identify", "--coeffs", "-121287375,191025,1", "--algorithm", "1"]).0, 3);
    assert_eq!(call(&["discs", "--class-number", "1", "--bound", "1000000000000"]).0, 4);
    assert_eq!(call(&["--help"]).0, 0);
}

#[test]
fn seed_is_reproducible() {
    let seed = DEFAULT_SEED.to_string();
    let a = call(&["identify", "--coeffs", "-121287375,191025,1", "--seed", &seed]).1;
    let b = call(&["identify", "--coeffs", "-121287375,191025,1"]).1;
    assert_eq!(a, b);
}

#[test]
fn binary_reads_stdin() {
    let mut child = Command::new(env!("CARGO_BIN_EXE_cmident"))
        .args(["--format", "text", "identify", "-"])
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .spawn()
        .unwrap();
    child.stdin.take().unwrap().write_all(b"# H_-8\n-8000\n1\n").unwrap();
    let out = child.wait_with_output().unwrap();
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("is_hcp: true") && text.contains("discriminant: -8"), "{text}");
}
