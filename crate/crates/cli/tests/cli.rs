use std::process::{Command, Output};

fn moyal(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_moyal")).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn ok(args: &[&str]) -> String {
    let o = moyal(args);
    assert!(o.status.success(), "{args:?} failed: {}", String::from_utf8_lossy(&o.stderr));
    stdout(&o)
}

#[test]
fn bracket_commands() {
    assert_eq!(ok(&["star", "q", "p", "--s", "0"]), "q*p - (1/2)*i*hbar\n");
    assert_eq!(ok(&["moyal", "q", "p", "--s", "formal"]), "-i*hbar\n");
    assert_eq!(ok(&["moyal", "q", "p"]), "-i*hbar\n");
    assert_eq!(ok(&["pb", "q^2", "p^2"]), "-4*q*p\n");
    assert_eq!(ok(&["star", "q", "p", "--s", "-1"]), "q*p\n");
}

#[test]
fn quantization_commands() {
    assert_eq!(ok(&["quantize", "q*p", "--s", "0"]), "qh*ph - (1/2)*i*hbar\n");
    assert_eq!(ok(&["dequantize", "qh*ph", "--s", "1"]), "q*p\n");
    assert_eq!(ok(&["convert-order", "1", "1", "--from", "1", "--to", "0"]), "(1,1): 1\n(0,0): (1/2)*i*hbar\n");
    assert_eq!(ok(&["commutator", "qh", "ph"]), "i*hbar\n");
    assert_eq!(ok(&["commutator", "dq", "q", "--kind", "diffop"]), "1\n");
}

#[test]
fn output_formats() {
    assert_eq!(ok(&["quantize", "q*p", "--s", "0", "--format", "latex"]), "\\hat{q} \\hat{p} - \\frac{1}{2} i \\hbar\n");
    let js: serde_json::Value = serde_json::from_str(&ok(&["star", "q", "p", "--format", "json"])).unwrap();
    assert_eq!(js["vars"], "qp");
    let conv: serde_json::Value =
        serde_json::from_str(&ok(&["convert-order", "2", "1", "--from", "1", "--to", "0", "--format", "json"])).unwrap();
    assert_eq!(conv["terms"].as_array().unwrap().len(), 2);
}

#[test]
fn parse_errors_exit_2() {
    for args in [
        &["star", "q +", "p"][..],
        &["star", "q", "qh"],
        &["star", "q", "xi"],
        &["dequantize", "q"],
        &["pb", "q^-1", "p"],
        &["quantize", "q", "--s", "nonsense/"],
        &["verify", "no-such-suite"],
        &["realization", "nope"],
    ] {
        let o = moyal(args);
        assert_eq!(o.status.code(), Some(2), "{args:?}");
        assert!(!o.stderr.is_empty());
    }
}

#[test]
fn syntax_error_reports_position() {
    let o = moyal(&["star", "q * )", "p"]);
    let err = String::from_utf8(o.stderr).unwrap();
    assert!(err.contains("line 1, column 5"), "{err}");
}

#[test]
fn structure_constants_examples() {
    let csv = ok(&["structure-constants", "--nmax", "0", "--format", "csv"]);
    assert_eq!(csv, "n,m,k,l,j,q_exp,p_exp,coefficient\n0,0,0,0,0,0,0,0\n");
    let csv = ok(&["structure-constants", "--nmax", "1", "--s", "formal", "--format", "csv"]);
    assert!(csv.lines().any(|l| l == "1,0,0,1,1,0,0,-i*hbar"));
    let csv = ok(&["structure-constants", "--nmax", "3", "--s", "0", "--format", "csv"]);
    for row in csv.lines().skip(1) {
        let f: Vec<&str> = row.split(',').collect();
        if f[7] != "0" {
            assert_eq!(f[4].parse::<u32>().unwrap() % 2, 1, "{row}");
        }
    }
    let js: serde_json::Value = serde_json::from_str(&ok(&["structure-constants", "--nmax", "1"])).unwrap();
    assert_eq!(js["schema_version"], 1);
    assert_eq!(js["entries"].as_array().unwrap().len(), 16);
    assert!(ok(&["structure-constants", "--nmax", "1", "--format", "latex"]).starts_with("\\begin{tabular}"));
}

#[test]
fn structure_constants_independent_of_jobs() {
    let a = ok(&["structure-constants", "--nmax", "3", "--jobs", "1"]);
    let b = ok(&["structure-constants", "--nmax", "3", "--jobs", "8"]);
    assert_eq!(a, b);
    let c = Command::new(env!("CARGO_BIN_EXE_moyal"))
        .args(["structure-constants", "--nmax", "3"])
        .env("MOYAL_JOBS", "3")
        .output()
        .unwrap();
    assert_eq!(stdout(&c), a);
}

#[test]
fn verify_suites() {
    let out = ok(&["verify", "isp2"]);
    assert!(out.contains("isp2: all 60 identities verified"), "{out}");
    let out = ok(&["verify", "table1"]);
    assert!(out.contains("table1: all 18 identities verified"));
    let out = ok(&["verify", "homomorphism", "--nmax", "4"]);
    assert!(out.contains("PASS  dequantize(Q(g)·Q(f)) = f ⋆ g"));
    for s in ["formal", "0", "1", "-1"] {
        for suite in ["jacobi", "bopp", "virasoro", "kac-moody", "h-tower", "hermiticity", "closed-form", "gamma-closure"] {
            ok(&["verify", suite, "--nmax", "2", "--s", s]);
        }
    }
    ok(&["verify", "metaplectic", "--seed", "7"]);
}

#[test]
fn verify_json_report() {
    let js: serde_json::Value = serde_json::from_str(&ok(&["verify", "table1", "--json"])).unwrap();
    assert_eq!(js["status"], "verified");
    assert_eq!(js["checks"].as_array().unwrap().len(), 18);
}

#[test]
fn realization_and_gamma() {
    let out = ok(&["realization", "delta"]);
    assert!(out.contains("J = -(1/2)*i*q*dp + (1/2)*i*p*dq"), "{out}");
    let out = ok(&["realization", "quantum"]);
    assert!(out.starts_with("N1 = qh\n"));
    assert_eq!(ok(&["gamma", "1", "0"]), "-i*hbar*dp\n");
    assert_eq!(ok(&["gamma", "1", "0", "--t"]), "-hbar*eta\n");
}
