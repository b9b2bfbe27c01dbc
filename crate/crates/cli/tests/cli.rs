use std::fs;
use std::process::{Command, Output};

const BIN: &str = env!("CARGO_BIN_EXE_certcalc");

fn run(args: &[&str]) -> Output {
    Command::new(BIN).args(args).output().expect("binary runs")
}

fn stdout(args: &[&str]) -> String {
    let out = run(args);
    assert!(out.status.success(), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    String::from_utf8(out.stdout).unwrap()
}

fn code(args: &[&str]) -> i32 {
    run(args).status.code().expect("exit code")
}

fn value_column(csv: &str) -> Vec<f64> {
    let mut lines = csv.lines();
    let header: Vec<&str> = lines.next().unwrap().split(',').collect();
    let idx = header.iter().position(|h| *h == "value").unwrap();
    lines.map(|l| l.split(',').nth(idx).unwrap().parse().unwrap()).collect()
}

#[test]
fn eval_examples() {
    let v = value_column(&stdout(&["eval", "--prior", "bayes-laplace", "--N", "100", "--n", "10"]));
    assert!((v[0] - 11.0 / 101.0).abs() < 1e-12);
    let v = value_column(&stdout(&["eval", "--prior", "jeffreys", "--k", "0.25", "--N", "limit", "--n", "7"]));
    assert_eq!(v[0], 0.8);
    let v = value_column(&stdout(&["eval", "--prior", "j-shaped", "--beta", "0.1", "--n", "0", "--N", "1"]));
    assert!((v[0] - 1.0 / 1.1).abs() < 1e-12);
}

#[test]
fn eval_csv_row() {
    let out = stdout(&["eval", "--prior", "bayes-laplace", "--N", "100", "--n", "10"]);
    assert_eq!(
        out,
        "prior,n,N,value,method,clamped,diverged\nbayes-laplace,10,100,0.108910891089,closed-form,false,false\n"
    );
}

#[test]
fn json_record_round_trips_through_config() {
    let dir = tempfile::tempdir().unwrap();
    let first = stdout(&[
        "eval", "--prior", "left-truncated", "--beta", "0.3", "--omega", "0.15", "--n", "4", "--N", "25", "--format",
        "json",
    ]);
    let path = dir.path().join("record.json");
    fs::write(&path, &first).unwrap();
    let second = stdout(&["eval", "--config", path.to_str().unwrap(), "--format", "json"]);
    assert_eq!(first, second);

    let a: serde_json::Value = serde_json::from_str(&first).unwrap();
    let b: serde_json::Value = serde_json::from_str(&second).unwrap();
    assert_eq!(a["value"].as_f64().unwrap().to_bits(), b["value"].as_f64().unwrap().to_bits());
}

#[test]
fn flags_override_config() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("s.json");
    fs::write(&path, r#"{"prior": {"family": "jeffreys", "k": 0.25}, "n": 7, "N": 100}"#).unwrap();
    let p = path.to_str().unwrap();
    let out = stdout(&["eval", "--config", p, "--N", "limit"]);
    assert!(out.contains("jeffreys(k=0.25),7,limit,0.8,"), "{out}");
    let out = stdout(&["eval", "--config", p, "--k", "0.5", "--N", "limit"]);
    assert!(out.contains("jeffreys(k=0.5),7,limit,"), "{out}");
    // a different family discards the file's parameters
    let out = stdout(&["eval", "--config", p, "--prior", "j-shaped", "--beta", "0.5"]);
    assert!(out.contains("j-shaped(beta=0.5),7,100,"), "{out}");
    assert_eq!(code(&["eval", "--config", p, "--prior", "beta", "--alpha", "1"]), 2);
}

#[test]
fn sweep_rows_and_columns() {
    let out = stdout(&["sweep", "--prior", "j-shaped", "--beta", "0.1", "--N", "10000", "--n", "1:10000:log"]);
    let mut lines = out.lines();
    assert_eq!(lines.next(), Some("axis_name,axis_value,value,method,clamped,diverged"));
    let rows: Vec<&str> = lines.collect();
    assert!(rows.iter().all(|r| r.starts_with("n,") && r.split(',').count() == 6));
    let v = value_column(&out);
    assert!(v.windows(2).all(|w| w[1] > w[0]));

    let out = stdout(&["sweep", "--prior", "l-shaped", "--alpha", "0.5", "--n", "100", "--N", "10:1e6:log"]);
    assert!(out.lines().skip(1).all(|r| r.starts_with("N,")));
    let last = *value_column(&out).last().unwrap();
    assert!((last - 100.5 / (100.5 + 1e6)).abs() < 1e-15);
    assert!(last < 1.01e-4);
}

#[test]
fn sweep_json_is_an_array() {
    let out = stdout(&["sweep", "--prior", "bayes-laplace", "--N", "20", "--n", "1,5,20", "--format", "json"]);
    let v: serde_json::Value = serde_json::from_str(&out).unwrap();
    let rows = v.as_array().unwrap();
    assert_eq!(rows.len(), 3);
    assert_eq!(rows[2]["value"].as_f64(), Some(1.0));
    assert_eq!(rows[0]["axis_name"].as_str(), Some("n"));
}

#[test]
fn config_errors_exit_2() {
    assert_eq!(code(&["sweep", "--prior", "j-shaped", "--beta", "0.1", "--N", "100", "--n", ""]), 2);
    assert_eq!(code(&["sweep", "--prior", "j-shaped", "--beta", "0.1", "--N", "1,2", "--n", "1,2"]), 2);
    assert_eq!(code(&["sweep", "--prior", "j-shaped", "--beta", "0.1", "--N", "100", "--n", "5,3"]), 2);
    assert_eq!(code(&["eval", "--prior", "nope", "--n", "1", "--N", "1"]), 2);
    assert_eq!(code(&["eval", "--prior", "jeffreys", "--k", "0.9", "--n", "1", "--N", "1"]), 2);
    assert_eq!(code(&["eval", "--prior", "bayes-laplace", "--n", "1", "--N", "1", "--format", "xml"]), 2);
    assert_eq!(code(&["eval", "--config", "/nonexistent/scenario.json"]), 2);
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.json");
    fs::write(&path, "{\"prior\": ").unwrap();
    assert_eq!(code(&["eval", "--config", path.to_str().unwrap()]), 2);
}

#[test]
fn non_convergence_exits_3() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("quad.json");
    fs::write(&path, r#"{"quadrature": {"rel_tol": 1e-15, "abs_tol": 1e-300, "max_depth": 1}}"#).unwrap();
    let out = run(&[
        "eval", "--prior", "omega-averaged", "--beta", "0.5", "--a", "4", "--b", "0.3", "--c", "0.5", "--n", "2",
        "--N", "10", "--config", path.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(3), "{}", String::from_utf8_lossy(&out.stderr));
    assert!(String::from_utf8_lossy(&out.stderr).contains("averaged_predictive"));
}

#[test]
fn plan_verbs() {
    let out = stdout(&["plan", "--prior", "jeffreys", "--k", "0.25", "--N", "limit", "--target", "0.99"]);
    assert!(out.lines().nth(1).unwrap().contains(",found,197,"), "{out}");
    let out = stdout(&["plan", "--prior", "bernardo", "--k", "0.5", "--N", "limit", "--target", "0.99"]);
    assert!(out.lines().nth(1).unwrap().contains(",found,98,"), "{out}");
    let out = run(&["plan", "--prior", "bayes-laplace", "--N", "limit", "--target", "0.5"]);
    assert_eq!(out.status.code(), Some(4));
    assert!(String::from_utf8_lossy(&out.stdout).contains("unattainable"));
    assert_eq!(code(&["plan", "--prior", "bayes-laplace", "--N", "limit", "--target", "1"]), 2);
    assert_eq!(code(&["plan", "--prior", "bayes-laplace", "--N", "limit"]), 2);
}

#[test]
fn density_outputs() {
    let out = stdout(&["density", "--prior", "beta", "--alpha", "1", "--beta", "1"]);
    let rows: Vec<&str> = out.lines().skip(1).collect();
    assert_eq!(rows.len(), 101);
    assert!(rows.iter().all(|r| r.ends_with(",1,1")));

    let out = stdout(&["density", "--prior", "reflected", "--alpha", "3", "--beta", "2", "--eta", "0.5"]);
    let first: f64 = out.lines().nth(1).unwrap().split(',').next().unwrap().parse().unwrap();
    assert!((first - 0.393469340287).abs() < 1e-12);

    let out = stdout(&["density", "--prior", "j-shaped", "--beta", "0.5", "--grid", "0.5,1"]);
    assert!(out.ends_with("1,inf,inf\n"), "{out}");
    let out = stdout(&["density", "--prior", "j-shaped", "--beta", "0.5", "--grid", "1", "--format", "json"]);
    assert!(out.contains("\"prior_density\":\"inf\""), "{out}");

    assert_eq!(code(&["density", "--prior", "bayes-laplace"]), 2);
    assert_eq!(code(&["density", "--prior", "j-shaped", "--beta", "0.5", "--grid", "0:2:0.5"]), 2);
}

#[test]
fn csv_is_plain() {
    for args in [
        vec!["sweep", "--prior", "portmanteau", "--q", "0.5", "--decay-k", "0.01", "--lambda", "2", "--N", "500", "--n", "1:50:5"],
        vec!["density", "--prior", "left-truncated", "--beta", "0.5", "--omega", "0.2", "--n", "3"],
        vec!["eval", "--prior", "custom", "--masses", "1,1,2", "--n", "1", "--N", "2"],
    ] {
        let out = stdout(&args);
        assert!(!out.contains('\r') && !out.contains('"'));
        assert!(out.ends_with('\n'));
        let width = out.lines().next().unwrap().split(',').count();
        assert!(out.lines().all(|l| l.split(',').count() == width), "{args:?}");
    }
}

#[test]
fn out_flag_writes_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("o.csv");
    let out = stdout(&["eval", "--prior", "bayes-laplace", "--N", "4", "--n", "1", "--out", path.to_str().unwrap()]);
    assert!(out.is_empty());
    assert!(fs::read_to_string(&path).unwrap().starts_with("prior,"));
}

#[test]
fn identical_invocations_are_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let args = ["sweep", "--prior", "omega-averaged", "--beta", "0.5", "--N", "100", "--n", "1:40"];
    let a = dir.path().join("a.csv");
    let b = dir.path().join("b.csv");
    for p in [&a, &b] {
        let mut full: Vec<&str> = args.to_vec();
        full.extend(["--out", p.to_str().unwrap()]);
        stdout(&full);
    }
    assert_eq!(fs::read(&a).unwrap(), fs::read(&b).unwrap());
}

#[test]
fn hidden_verify() {
    let out = stdout(&["verify", "--seed", "7"]);
    assert!(out.lines().all(|l| l.starts_with("PASS ")), "{out}");
    let help = stdout(&["--help"]);
    assert!(!help.contains("verify"));
}
