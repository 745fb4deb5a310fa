use std::path::Path;
use std::process::{Command, Output};

fn bin() -> Command {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_iqp-verify"));
    cmd.env("IQP_VERIFY_THREADS", "2");
    cmd
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn keygen(dir: &Path, secrets: &str, seed: &str) -> (String, String) {
    let p = dir.join("p.txt").display().to_string();
    let k = dir.join("k.txt").display().to_string();
    let o = run(&["keygen", "--n", "8", "--secrets", secrets, "--weight", "3", "--seed", seed, "--program-out", &p, "--key-out", &k]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    (p, k)
}

fn values(out: &str) -> Vec<String> {
    out.lines()
        .flat_map(|l| l.split_whitespace().filter_map(|w| w.strip_prefix("value=")).map(str::to_string))
        .collect()
}

#[test]
fn subspace_and_statevector_print_identical_values() {
    let dir = tempfile::tempdir().unwrap();
    let (p, k) = keygen(dir.path(), "2", "4");
    let a = run(&["eval", "--program", &p, "--key", &k, "--backend", "subspace"]);
    let b = run(&["eval", "--program", &p, "--key", &k, "--backend", "statevector"]);
    assert!(a.status.success() && b.status.success());
    let (va, vb) = (values(&stdout(&a)), values(&stdout(&b)));
    assert_eq!(va.len(), 2);
    assert_eq!(va, vb);
}

#[test]
fn keygen_two_secrets_then_honest_verify_accepts() {
    let dir = tempfile::tempdir().unwrap();
    let (p, k) = keygen(dir.path(), "2", "7");
    let o = run(&["verify", "--program", &p, "--key", &k, "--local-prover", "honest", "--seed", "1"]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    assert!(stdout(&o).contains("verdict=accept"));
}

#[test]
fn uniform_prover_is_rejected_with_exit_1() {
    let dir = tempfile::tempdir().unwrap();
    let (p, k) = keygen(dir.path(), "1", "9");
    let o = run(&["verify", "--program", &p, "--key", &k, "--local-prover", "uniform", "--seed", "1"]);
    assert_eq!(o.status.code(), Some(1), "{}", stdout(&o));
}

#[test]
fn usage_and_runtime_exit_codes() {
    assert_eq!(run(&["eval", "--frobnicate"]).status.code(), Some(2));
    assert_eq!(run(&["no-such-command"]).status.code(), Some(2));
    assert_eq!(run(&["--help"]).status.code(), Some(0));
    let missing = run(&["eval", "--program", "/nonexistent/p.txt", "--secret", "1"]);
    assert_eq!(missing.status.code(), Some(3));
}

#[test]
fn sample_is_reproducible_and_scramble_preserves_values() {
    let dir = tempfile::tempdir().unwrap();
    let (p, k) = keygen(dir.path(), "1", "3");
    let a = run(&["sample", "--program", &p, "--count", "50", "--seed", "5"]);
    let b = run(&["sample", "--program", &p, "--count", "50", "--seed", "5"]);
    assert_eq!(a.stdout, b.stdout);
    assert_eq!(stdout(&a).lines().count(), 50);

    let p2 = dir.path().join("p2.txt").display().to_string();
    let k2 = dir.path().join("k2.txt").display().to_string();
    let o = run(&["scramble", "--program", &p, "--key", &k, "--ops", "40", "--seed", "2", "--program-out", &p2, "--key-out", &k2]);
    assert!(o.status.success());
    let before = run(&["eval", "--program", &p, "--key", &k, "--backend", "clifford"]);
    let after = run(&["eval", "--program", &p2, "--key", &k2, "--backend", "clifford"]);
    assert_eq!(values(&stdout(&before)), values(&stdout(&after)));
}

#[test]
fn experiment_csv_is_reproducible() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("fig1b.csv");
    let hist = dir.path().join("hist.csv");
    let out_s = out.display().to_string();
    let o = run(&["exp-fig1b", "--n", "4", "--count", "20", "--seed", "3", "--out", &out_s, "--histogram-out", &hist.display().to_string()]);
    assert!(o.status.success());
    let first = std::fs::read_to_string(&out).unwrap();
    let again = run(&["exp-fig1b", "--n", "4", "--count", "20", "--seed", "3"]);
    let strip = |s: &str| s.lines().filter(|l| !l.starts_with("# wall_clock")).collect::<Vec<_>>().join("\n");
    assert_eq!(strip(&first), strip(&stdout(&again)));
    assert!(std::fs::read_to_string(&hist).unwrap().contains("g,level,count"));
    for cmd in [
        vec!["exp-fig1a", "--n-min", "2", "--n-max", "3", "--count", "10"],
        vec!["exp-anticoncentration", "--n-min", "2", "--n-max", "3", "--circuits", "10"],
        vec!["exp-parseval", "--n", "3", "--instances", "2"],
    ] {
        let o = run(&cmd);
        assert!(o.status.success(), "{cmd:?}");
        assert!(stdout(&o).starts_with("# experiment = "));
    }
}

#[test]
fn bad_thread_setting_is_a_usage_error() {
    let o = bin().env("IQP_VERIFY_THREADS", "zero").args(["exp-parseval", "--n", "2", "--instances", "1"]).output().unwrap();
    assert_eq!(o.status.code(), Some(2));
}
