//! The command-line front end, driven as a subprocess.

use std::io::Write;
use std::path::Path;
use std::process::{Command, Output, Stdio};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_onlinefdr"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().unwrap()
}

fn run_stdin(args: &[&str], input: &str) -> Output {
    let mut child = bin()
        .args(args)
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .stderr(Stdio::piped())
        .spawn()
        .unwrap();
    child.stdin.take().unwrap().write_all(input.as_bytes()).unwrap();
    child.wait_with_output().unwrap()
}

fn fixture() -> String {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("fixtures/stampede.csv")
        .display()
        .to_string()
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

#[test]
fn casestudy_prints_the_table() {
    let o = run(&["casestudy", "stampede"]);
    assert!(o.status.success());
    let text = stdout(&o);
    for line in [
        "Uncorrected    | C, E, G    | 0.0500",
        "Alpha-spending | G          | 0.0025",
        "BH             | C, G       | --",
        "ADDIS          | G          | 0.0016",
        "SAFFRON        | C, G       | 0.0165",
        "LORD           | --         | 0.0002",
    ] {
        assert!(text.contains(line), "missing `{line}` in\n{text}");
    }
}

#[test]
fn calibrate_writes_the_bundled_manifest() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("m.toml");
    let o = run(&["calibrate-w0", "--out", out.to_str().unwrap()]);
    assert!(o.status.success());
    assert_eq!(
        std::fs::read_to_string(out).unwrap(),
        onlinefdr::io::STAMPEDE_MANIFEST
    );
}

#[test]
fn run_then_resume_equals_single_run() {
    let dir = tempfile::tempdir().unwrap();
    let lines: Vec<String> = [0.2, 1e-4, 0.03, 0.5, 0.001, 0.8]
        .iter()
        .enumerate()
        .map(|(i, p)| format!("{{\"t\":{},\"p\":{p}}}\n", i + 1))
        .collect();
    let flags = ["--procedure", "saffron", "--alpha", "0.05", "--lambda", "0.5"];

    let whole = run_stdin(&[&["run"][..], &flags].concat(), &lines.concat());
    assert!(whole.status.success());

    let state = dir.path().join("s.json");
    let s = state.to_str().unwrap();
    let first = run_stdin(&[&["run", "--state", s][..], &flags].concat(), &lines[..2].concat());
    assert!(first.status.success(), "{}", String::from_utf8_lossy(&first.stderr));
    let second = run_stdin(&["run", "--state", s], &lines[2..].concat());
    assert!(second.status.success(), "{}", String::from_utf8_lossy(&second.stderr));
    assert_eq!(stdout(&first) + &stdout(&second), stdout(&whole));

    let preview = run(&["preview", "--state", s]);
    assert!(preview.status.success());
    assert!(stdout(&preview).starts_with("t = 7 "));
}

#[test]
fn decision_log_replays() {
    let dir = tempfile::tempdir().unwrap();
    let log = dir.path().join("log.ndjson");
    let flags = ["--procedure", "lord", "--gamma", "bounded:20"];
    let o = run(&[&["run", "--input", &fixture(), "--out", log.to_str().unwrap()][..], &flags].concat());
    assert!(o.status.success());
    let replay = run(&[&["run", "--input", log.to_str().unwrap()][..], &flags].concat());
    assert!(replay.status.success());
    assert_eq!(stdout(&replay), std::fs::read_to_string(&log).unwrap());
}

#[test]
fn csv_output_for_decision_log() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("log.csv");
    let o = run(&["run", "--procedure", "uncorrected", "--input", &fixture(), "--out", out.to_str().unwrap()]);
    assert!(o.status.success());
    let csv = std::fs::read_to_string(out).unwrap();
    assert!(csv.starts_with("t,label,p,alpha,rejected,wealth\n1,B,0.45,0.05,false,\n"));
}

#[test]
fn input_errors_exit_2() {
    let o = run_stdin(&["run", "--procedure", "lord"], "{\"t\":1,\"p\":1.5}\n");
    assert_eq!(o.status.code(), Some(2));
    let o = run_stdin(&["run", "--procedure", "lord"], "{\"t\":2,\"p\":0.5}\n");
    assert_eq!(o.status.code(), Some(2));
    let o = run(&["run", "--procedure", "nonsense"]);
    assert_eq!(o.status.code(), Some(2));
    let o = run(&["run", "--procedure", "lord", "--input", "/no/such/file.ndjson"]);
    assert_eq!(o.status.code(), Some(2));
    let o = run(&["run", "--procedure", "lord", "--lambda", "0.5"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn state_errors_exit_3() {
    let dir = tempfile::tempdir().unwrap();
    let state = dir.path().join("s.json");
    let s = state.to_str().unwrap();
    assert!(run_stdin(&["run", "--procedure", "lord", "--state", s], "").status.success());

    // Held lock.
    std::fs::write(dir.path().join("s.json.lock"), "1").unwrap();
    let o = run(&["preview", "--state", s]);
    assert!(o.status.success(), "preview does not need the lock");
    let o = run_stdin(&["run", "--state", s], "");
    assert_eq!(o.status.code(), Some(3));
    std::fs::remove_file(dir.path().join("s.json.lock")).unwrap();

    // Corrupted checkpoint.
    let text = std::fs::read_to_string(&state).unwrap();
    std::fs::write(&state, text.replace("\"t\": 0", "\"t\": 5")).unwrap();
    assert_eq!(run(&["preview", "--state", s]).status.code(), Some(3));
    assert_eq!(run_stdin(&["run", "--state", s], "").status.code(), Some(3));
}

#[test]
fn simulate_is_deterministic() {
    let args = ["simulate", "--replicates", "40", "--horizon", "200", "--pi1", "0.1,0.5", "--seed", "7"];
    let (a, b) = (run(&args), run(&args));
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
    assert!(stdout(&a).starts_with("procedure,pi1,fdr,mfdr,fdx,fwer,power,mean_rejections\n"));
}

#[test]
fn simulate_reads_a_config_file() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("grid.toml");
    std::fs::write(
        &cfg,
        "horizon = 100\nreplicates = 20\npi1_grid = [0.2]\nroster = [\"lord\", \"bh\"]\n\n[f0]\nkind = \"point-mass\"\nvalue = 0.0\n",
    )
    .unwrap();
    let o = run(&["simulate", "--config", cfg.to_str().unwrap(), "--format", "long"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let text = stdout(&o);
    assert!(text.starts_with("pi1,procedure,metric,value,mc_se\n"));
    assert_eq!(text.lines().count(), 1 + 2 * 6);
}
