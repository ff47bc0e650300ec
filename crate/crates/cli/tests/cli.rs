//! End-to-end tests of the installed binary: exit codes, pinned report
//! lines, input channels and the certification cache.

use std::path::{Path, PathBuf};
use std::process::{Command, Output, Stdio};

fn bin() -> &'static str {
    env!("CARGO_BIN_EXE_qforms")
}

fn corpus(name: &str) -> String {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("../../corpus")
        .join(name)
        .to_str()
        .expect("utf-8 path")
        .to_string()
}

fn run_in(dir: &Path, args: &[&str]) -> Output {
    Command::new(bin())
        .args(args)
        .current_dir(dir)
        .output()
        .expect("binary runs")
}

fn run(args: &[&str]) -> Output {
    run_in(Path::new(env!("CARGO_MANIFEST_DIR")), args)
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).expect("utf-8 stdout")
}

fn stderr(out: &Output) -> String {
    String::from_utf8(out.stderr.clone()).expect("utf-8 stderr")
}

fn temp_dir(tag: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("qforms-cli-{tag}-{}", std::process::id()));
    let _ = std::fs::remove_dir_all(&dir);
    std::fs::create_dir_all(&dir).expect("temp dir");
    dir
}

#[test]
fn bracket_for_three_forms_is_the_pinned_line() {
    let out = run(&["bounds", "--r", "3"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(stdout(&out), "12 <= beta(3;Qp) <= 16\n");
}

#[test]
fn bound_table_lists_the_first_seven_values() {
    let out = run(&["bounds", "--table", "7"]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("r\tlower\tupper\trule\tcomparison"));
    let uppers: Vec<u64> = lines
        .map(|l| l.split('\t').nth(2).unwrap().parse().unwrap())
        .collect();
    assert_eq!(uppers, [4, 8, 16, 24, 40, 56, 84]);
}

#[test]
fn certified_singularity_miss_exits_one_with_the_pinned_message() {
    let out = run(&["zeros", &corpus("f2-triple.qfs"), "--nonsingular"]);
    assert_eq!(out.status.code(), Some(1));
    assert_eq!(stdout(&out), "no nonsingular common zero (certified)\n");
}

#[test]
fn solving_a_visible_hyperbolic_plane_succeeds() {
    let out = run(&["solve", &corpus("hyperbolic.qfs")]);
    assert_eq!(out.status.code(), Some(0), "stderr: {}", stderr(&out));
    assert!(stdout(&out).starts_with("solved: primitive zero"));
}

#[test]
fn documents_arrive_on_standard_input_with_a_dash() {
    let text = std::fs::read_to_string(corpus("f4-conic.qfs")).unwrap();
    let mut child = Command::new(bin())
        .args(["zeros", "-", "--count-only"])
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .stderr(Stdio::piped())
        .spawn()
        .expect("binary runs");
    use std::io::Write;
    child
        .stdin
        .take()
        .expect("piped stdin")
        .write_all(text.as_bytes())
        .unwrap();
    let out = child.wait_with_output().unwrap();
    assert_eq!(out.status.code(), Some(0));
    assert!(stdout(&out).starts_with("count=16 "));
}

#[test]
fn malformed_documents_give_positioned_errors_and_exit_two() {
    let dir = temp_dir("malformed");
    let path = dir.join("bad.qfs");
    std::fs::write(&path, "field Fq 3\nvars 2\nform q = x1^2 + x2^3\n").unwrap();
    let out = run(&["zeros", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    let err = stderr(&out);
    assert!(err.starts_with("error:"), "stderr: {err}");
    assert!(err.contains("3:17"), "position missing: {err}");
    std::fs::remove_dir_all(&dir).ok();
}

#[test]
fn unknown_subcommands_exit_two() {
    let out = run(&["frobnicate"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn json_reports_parse_and_carry_the_same_facts() {
    let out = run(&["bounds", "--r", "5", "--format", "json"]);
    assert_eq!(out.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_str(&stdout(&out)).expect("valid json");
    assert_eq!(v["lower"], 20);
    assert_eq!(v["upper"], 40);
    assert_eq!(v["rule"], "chain");
}

#[test]
fn anisotropy_is_a_negative_verdict_with_invariants() {
    let out = run(&["isotropy", &corpus("anisotropic-p5.qfs")]);
    assert_eq!(out.status.code(), Some(1));
    let text = stdout(&out);
    assert!(text.starts_with("anisotropic\n"));
    assert!(text.contains("hasse="));
}

#[test]
fn isotropy_rejects_multi_form_documents() {
    let out = run(&["isotropy", &corpus("f2-triple.qfs")]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("single form"));
}

#[test]
fn minimize_reports_the_single_improving_step() {
    let out = run(&["minimize", &corpus("q3-worked.qfs")]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    assert!(text.starts_with("converged=true steps=1 reason=minimized\n"));
    assert!(text.contains("form q = x1^2 + x2^2 + x3*x4 + x5^2"));
}

#[test]
fn subspace_search_prints_basis_lines() {
    let out = run(&["subspace", &corpus("f3-minimized.qfs"), "--dim", "1"]);
    assert_eq!(out.status.code(), Some(0));
    assert!(stdout(&out).lines().any(|l| l.starts_with("basis ")));
}

#[test]
fn lift_rejects_singular_seeds_as_errors() {
    let out = run(&["lift", &corpus("q3-worked.qfs"), "--point", "0,0,0,0,1"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("singular seed"));
}

#[test]
fn lift_from_a_unit_seed_reaches_document_precision() {
    let out = run(&["lift", &corpus("q3-worked.qfs"), "--point", "1,1,1,1,0"]);
    assert_eq!(out.status.code(), Some(0));
    assert!(stdout(&out).starts_with("lifted to precision 8"));
}

#[test]
fn ffreduce_decodes_the_degree_one_solution() {
    let out = run(&["ffreduce", &corpus("ft-square.qfs"), "--solve"]);
    assert_eq!(out.status.code(), Some(0));
    assert!(stdout(&out).contains("solution: (T, 1)"));

    let out = run(&["ffreduce", &corpus("ft-nonsquare.qfs"), "--solve"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stdout(&out).contains("compiled zeros: 1 (trivial only)"));
}

#[test]
fn verify_paper_filter_runs_the_bound_entries() {
    let out = run(&["verify-paper", "--filter", "bounds"]);
    assert_eq!(out.status.code(), Some(0), "stdout: {}", stdout(&out));
    let text = stdout(&out);
    assert_eq!(text.matches("PASS ").count(), 3);
    assert!(text.ends_with("summary: 3/3 passed\n"));
}

#[test]
fn verify_paper_rejects_filters_matching_nothing() {
    let out = run(&["verify-paper", "--filter", "no-such-entry"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn certified_searches_are_cached_by_input_hash() {
    let dir = temp_dir("cache");
    let args = ["verify-paper", "--filter", "f2-pair-no-ts4"];
    let first = run_in(&dir, &args);
    assert_eq!(first.status.code(), Some(0), "stdout: {}", stdout(&first));
    assert!(!stdout(&first).contains("(cached)"));
    let second = run_in(&dir, &args);
    assert_eq!(second.status.code(), Some(0));
    assert!(stdout(&second).contains("(cached)"), "stdout: {}", stdout(&second));
    let third = run_in(&dir, &["verify-paper", "--filter", "f2-pair-no-ts4", "--no-cache"]);
    assert_eq!(third.status.code(), Some(0));
    assert!(!stdout(&third).contains("(cached)"));
    std::fs::remove_dir_all(&dir).ok();
}

#[test]
fn a_tampered_cache_fails_loudly_instead_of_passing() {
    let dir = temp_dir("tamper");
    let args = ["verify-paper", "--filter", "f2-pair-no-ts4"];
    assert_eq!(run_in(&dir, &args).status.code(), Some(0));
    let cache = dir.join(".qforms-cache");
    let entry = std::fs::read_dir(&cache)
        .unwrap()
        .next()
        .expect("one cache file")
        .unwrap()
        .path();
    std::fs::write(&entry, "found one of dimension 4").unwrap();
    let out = run_in(&dir, &args);
    assert_eq!(out.status.code(), Some(1));
    assert!(stdout(&out).contains("FAIL f2-pair-no-ts4"));
    std::fs::remove_dir_all(&dir).ok();
}

#[test]
fn explore_beta_affirms_the_pair_guarantee_in_seven_variables() {
    let out = run(&[
        "explore-beta", "--p", "3", "--r", "2", "--m", "1", "--n", "7", "--trials", "5",
    ]);
    assert_eq!(out.status.code(), Some(0));
    assert!(stdout(&out).contains("guarantee_holds=true"));
}

#[test]
fn reports_are_byte_deterministic_for_fixed_seeds() {
    let a = run(&["solve", &corpus("q3-worked.qfs"), "--seed", "7"]);
    let b = run(&["solve", &corpus("q3-worked.qfs"), "--seed", "7"]);
    assert_eq!(stdout(&a), stdout(&b));
    assert_eq!(a.status.code(), b.status.code());
}
