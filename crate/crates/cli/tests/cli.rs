use std::path::PathBuf;
use std::process::{Command, Output};

fn rspir(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_rspir"))
        .args(args)
        .output()
        .unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn scratch(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_TARGET_TMPDIR")).join(name)
}

fn built(variant: &str, k: &str, name: &str) -> PathBuf {
    let path = scratch(name);
    let o = rspir(&["build", variant, "--k", k, "--out", path.to_str().unwrap()]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    path
}

#[test]
fn verify_k4_passes_at_rate_one_third() {
    let path = built("k4", "4", "k4.scheme");
    let o = rspir(&["verify", path.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    assert!(text.contains("MEASURE rate 1/3"), "{text}");
    assert!(text.contains("overall: PASS"));
}

#[test]
fn flipped_coefficient_in_b3_fails_with_witness() {
    let path = built("pairwise", "3", "pairwise3.scheme");
    let text = std::fs::read_to_string(&path).unwrap();
    let mut lines: Vec<String> = text.lines().map(str::to_string).collect();
    let header = lines
        .iter()
        .position(|l| l == "answer 2 3 1")
        .expect("B_3 header");
    let row = &mut lines[header + 1];
    let mut coeffs: Vec<&str> = row.split(' ').collect();
    coeffs[0] = if coeffs[0] == "0" { "1" } else { "0" };
    *row = coeffs.join(" ");
    let mutated = scratch("pairwise3-mutated.scheme");
    std::fs::write(&mutated, lines.join("\n") + "\n").unwrap();

    let o = rspir(&["verify", mutated.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    let out = stdout(&o);
    let failing: Vec<&str> = out
        .lines()
        .filter(|l| l.starts_with("CHECK") && l.contains(" FAIL"))
        .collect();
    assert!(!failing.is_empty(), "{out}");
    assert!(
        failing
            .iter()
            .any(|l| l.contains("a=") && l.contains("b=3")),
        "{failing:?}"
    );
}

#[test]
fn graph_of_k4_has_sixteen_edges() {
    let path = built("k4", "4", "k4-graph.scheme");
    let o = rspir(&["graph", path.to_str().unwrap()]);
    assert!(o.status.success());
    assert_eq!(
        stdout(&o).lines().filter(|l| l.contains(" -- ")).count(),
        16
    );
}

#[test]
fn usage_errors_exit_with_two() {
    assert_eq!(rspir(&["frobnicate"]).status.code(), Some(2));
    assert_eq!(rspir(&["verify"]).status.code(), Some(2));
    assert_eq!(
        rspir(&["build", "pairwise", "--bogus"]).status.code(),
        Some(2)
    );
}

#[test]
fn runtime_errors_exit_with_one() {
    assert_eq!(
        rspir(&["verify", "/nonexistent/scheme"]).status.code(),
        Some(1)
    );
    assert_eq!(rspir(&["build", "nonsense"]).status.code(), Some(1));
}

#[test]
fn run_is_deterministic_and_accepts_messages_file() {
    let path = built("rotation", "2", "rotation2.scheme");
    let msgs = scratch("rotation2.messages");
    std::fs::write(&msgs, "1 0 1\n0 1 1\n").unwrap();
    let args = [
        "run",
        path.to_str().unwrap(),
        "--seed",
        "5",
        "--blocks",
        "3",
        "--messages-file",
        msgs.to_str().unwrap(),
    ];
    let (a, b) = (rspir(&args), rspir(&args));
    assert!(a.status.success(), "{}", String::from_utf8_lossy(&a.stderr));
    assert_eq!(a.stdout, b.stdout);
    let text = stdout(&a);
    let theta: usize = text
        .lines()
        .find_map(|l| l.strip_prefix("decoded "))
        .unwrap()
        .split(' ')
        .next()
        .unwrap()
        .parse()
        .unwrap();
    let expected = ["decoded 1 1 0 1", "decoded 2 0 1 1"][theta - 1];
    assert!(text.contains(expected), "{text}");
    assert!(text.contains("download symbols 9 index_bits 2"));
}

#[test]
fn rate_reports_finite_block_accounting() {
    let path = built("rotation", "2", "rotation2-rate.scheme");
    let o = rspir(&["rate", path.to_str().unwrap(), "--blocks", "64"]);
    let text = stdout(&o);
    assert!(text.contains("rate 1/3"));
    assert!(text.contains("finite_rate 32/97 blocks 64"), "{text}");
}

#[test]
fn search_without_randomness_is_empty_and_budget_resumes() {
    let o = rspir(&["search", "--k", "2", "--r", "0", "--max-len", "2"]);
    assert!(stdout(&o).contains("exhausted-with-none"));
    let o = rspir(&[
        "search",
        "--k",
        "2",
        "--r",
        "1",
        "--max-len",
        "1",
        "--budget",
        "5",
    ]);
    assert_eq!(o.status.code(), Some(1));
    let err = String::from_utf8(o.stderr).unwrap();
    let cursor = err.trim().rsplit(' ').next().unwrap().to_string();
    let o = rspir(&[
        "search",
        "--k",
        "2",
        "--r",
        "1",
        "--max-len",
        "1",
        "--resume",
        &cursor,
    ]);
    assert!(o.status.success());
}
