use std::process::{Command, Output};

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_povm-tradeoff"))
        .args(args)
        .env_remove("POVM_TRADEOFF_SEED")
        .output()
        .unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

#[test]
fn curve_rows() {
    let o = run(&[
        "curve", "--a", "0.8", "--b", "0.9", "--alpha", "1", "--n", "3",
    ]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(
        stdout(&o),
        "z,delta_in,delta_out\n-1,0.108986710963,0\n0,0.1458,0.2592\n1,0.108986710963,0\n"
    );
}

#[test]
fn figure_parameter_set_has_requested_rows() {
    let o = run(&[
        "curve", "--a", "0.78", "--b", "0.1", "--alpha", "1", "--n", "101",
    ]);
    assert_eq!(o.status.code(), Some(0));
    let out = stdout(&o);
    let zs: Vec<f64> = out
        .lines()
        .skip(1)
        .map(|l| l.split(',').next().unwrap().parse().unwrap())
        .collect();
    assert_eq!(zs.len(), 101);
    assert!(zs.windows(2).all(|w| w[0] < w[1]));
}

#[test]
fn parameter_errors_exit_2_with_one_line() {
    for args in [
        vec!["curve", "--a", "1.5", "--b", "0.5", "--alpha", "1"],
        vec!["curve", "--a", "0.5", "--b", "0.5", "--alpha", "1.9"],
        vec!["classify", "--a", "0", "--b", "0.5"],
        vec!["strength", "--k", "2", "--a", "0.5"],
        vec!["entropy", "--spectrum", "0.5,0.6", "--measure", "S"],
        vec!["entropy", "--spectrum", "0.5,0.5", "--measure", "X"],
        vec!["verify", "--suite", "nonsense"],
        vec!["verify", "--dims", "1"],
        vec!["bogus"],
    ] {
        let o = run(&args);
        assert_eq!(o.status.code(), Some(2), "{args:?}");
        assert!(o.stdout.is_empty(), "{args:?}");
        assert_eq!(stderr(&o).lines().count(), 1, "{args:?}: {}", stderr(&o));
    }
}

#[test]
fn verify_suites_pass() {
    let o = run(&[
        "verify",
        "--samples",
        "500",
        "--seed",
        "7",
        "--dims",
        "2,3,4",
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let out = stdout(&o);
    let lines: Vec<&str> = out.lines().collect();
    assert_eq!(
        lines[0],
        "suite,seed,samples,passed,failed,max_violation,tolerance,first_failure"
    );
    assert_eq!(lines.len(), 5);
    for l in &lines[1..] {
        let cols: Vec<&str> = l.split(',').collect();
        assert_eq!(cols[3], "500");
        assert_eq!(cols[4], "0");
    }
}

#[test]
fn classify_reports_discrepancy() {
    let o = run(&["classify", "--a", "0.8", "--b", "0.9"]);
    assert_eq!(o.status.code(), Some(0));
    let out = stdout(&o);
    let summary = out.lines().nth(1).unwrap();
    assert!(summary.ends_with(",true"));
    assert!(stderr(&o).contains("upper no-tradeoff range"));
}

#[test]
fn output_file_and_jsonl() {
    let dir = std::env::temp_dir().join(format!("povm-tradeoff-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("strength.jsonl");
    let o = run(&[
        "strength",
        "--k",
        "1",
        "--a",
        "0.8",
        "--grid",
        "101",
        "--format",
        "jsonl",
        "--output",
        path.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0));
    assert!(o.stdout.is_empty());
    let text = std::fs::read_to_string(&path).unwrap();
    let v: serde_json::Value = serde_json::from_str(text.trim()).unwrap();
    assert_eq!(v["closed_max"].as_f64().unwrap(), 0.18);
    assert_eq!(v["delta_out_at_max"].as_f64().unwrap(), 0.0);
    std::fs::remove_dir_all(&dir).unwrap();
}

#[test]
fn entropy_from_bloch_modulus() {
    let o = run(&["entropy", "--a", "1", "--measure", "Hbar"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o), "measure,dim,value\nHbar,2,0.721347520444\n");
}
