//! End-to-end checks of the command-line surface: the pinned worked
//! examples, the JSON round-trip and lowest-terms invariants, exit codes,
//! and the environment-variable precision override.

use clap::Parser;
use inversio::{execute, Cli};
use serde_json::Value;
use std::process::Command;

fn render(args: &[&str]) -> String {
    let mut full = vec!["inversio"];
    full.extend_from_slice(args);
    let cli = Cli::try_parse_from(full).expect("arguments parse");
    execute(&cli).expect("command succeeds")
}

fn render_json(args: &[&str]) -> (String, Value) {
    let mut full = args.to_vec();
    full.extend_from_slice(&["--format", "json"]);
    let text = render(&full);
    let value = serde_json::from_str(text.trim_end()).expect("output is JSON");
    (text, value)
}

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_inversio"))
}

#[test]
fn moral_certainty_example_prints_25550() {
    let table = render(&["bernoulli-n", "--theta", "3/5", "--eps", "1/50", "--odds", "1000"]);
    assert!(table.contains("25550"), "table output: {table}");

    let (_, v) = render_json(&["bernoulli-n", "--theta", "3/5", "--eps", "1/50", "--odds", "1000"]);
    assert_eq!(v["result"]["n"], 25550);
    assert_eq!(v["result"]["m1"], 301);
    assert_eq!(v["result"]["n1"], 495);
    assert_eq!(v["result"]["m2"], 211);
    assert_eq!(v["result"]["n2"], 511);
    assert_eq!(v["result"]["method"], "bernoulli-bound");
}

#[test]
fn bernoulli_target_form_matches_odds_form() {
    let (_, by_odds) = render_json(&["bernoulli-n", "--theta", "3/5", "--eps", "1/50", "--odds", "1000"]);
    // 999/1000 is exactly odds 999, and the bound lands on the same n.
    let (_, by_target) =
        render_json(&["bernoulli-n", "--theta", "3/5", "--eps", "1/50", "--target", "999/1000"]);
    assert_eq!(by_target["result"]["odds"], 999);
    assert_eq!(by_target["result"]["n"], by_odds["result"]["n"]);
}

#[test]
fn runs_example_is_exact_three_eighths() {
    let (text, v) = render_json(&["runs", "--n", "3", "--r", "2", "--theta", "1/2"]);
    assert_eq!(v["result"]["prob"], "3/8");
    assert_eq!(v["mode"], "exact");
    assert_eq!(v["command"], "runs");

    // Reparse and reserialize: byte-identical.
    let round = serde_json::to_string(&v).expect("serializes");
    assert_eq!(format!("{round}\n"), text);
}

#[test]
fn bayes_interval_exact_example_is_three_quarters() {
    let table = render(&["bayes-interval", "--p", "1", "--q", "0", "--l1", "1/2", "--l2", "1", "--exact"]);
    assert!(table.contains("3/4"), "table output: {table}");

    let (_, v) = render_json(&["bayes-interval", "--p", "1", "--q", "0", "--l1", "1/2", "--l2", "1", "--exact"]);
    assert_eq!(v["result"]["prob"], "3/4");
    assert_eq!(v["result"]["posterior_a"], "2");
    assert_eq!(v["result"]["posterior_b"], "1");
    assert_eq!(v["mode"], "exact");
}

#[test]
fn rationals_echo_and_print_in_lowest_terms() {
    // 2/4 is accepted but every printed rational is reduced.
    let (_, v) = render_json(&["runs", "--n", "2", "--r", "1", "--theta", "2/4"]);
    assert_eq!(v["inputs"]["theta"], "1/2");
    assert_eq!(v["result"]["prob"], "3/4");
}

#[test]
fn decimal_rational_arguments_are_parsed_exactly() {
    let (_, v) = render_json(&["runs", "--n", "2", "--r", "1", "--theta", "0.5"]);
    assert_eq!(v["inputs"]["theta"], "1/2");
    assert_eq!(v["result"]["prob"], "3/4");
}

#[test]
fn direct_prob_single_count_is_exact() {
    let (_, v) = render_json(&["direct-prob", "--n", "4", "--theta", "1/3", "--k", "2"]);
    assert_eq!(v["result"]["prob"], "8/27");
    assert_eq!(v["mode"], "exact");
}

#[test]
fn direct_prob_band_and_interval_forms_agree() {
    // n = 10, theta = 1/2, eps = 1/5: band is counts 4..=6 after clipping.
    let (_, band) = render_json(&["direct-prob", "--n", "10", "--theta", "1/2", "--eps", "1/5"]);
    let (_, ival) = render_json(&["direct-prob", "--n", "10", "--theta", "1/2", "--lo", "4", "--hi", "6"]);
    assert_eq!(band["result"]["prob"], ival["result"]["prob"]);
}

#[test]
fn search_n_reports_method_and_window_flag() {
    let (_, v) = render_json(&["search-n", "--theta", "1/2", "--eps", "1/4", "--target", "10/11"]);
    assert_eq!(v["result"]["n"], 11);
    assert_eq!(v["result"]["achieved_prob"], "957/1024");
    assert_eq!(v["result"]["method"], "exact-search");
    assert!(v["result"]["dips_below_in_window"].is_boolean());
}

#[test]
fn stirling_terms_exact_rendering() {
    let (_, v) = render_json(&["stirling-terms", "--n", "5", "--k-max", "2", "--exact"]);
    assert_eq!(v["result"]["terms"]["1"], "1/60");
    assert_eq!(v["result"]["terms"]["2"], "-1/45000");
    assert_eq!(v["mode"], "exact");
}

#[test]
fn stirling_terms_csv_is_one_row_per_term() {
    let csv = render(&["stirling-terms", "--n", "5", "--k-max", "2", "--exact", "--format", "csv"]);
    assert_eq!(csv, "k,term\n1,1/60\n2,-1/45000\n");
}

#[test]
fn runs_csv_has_fixed_columns() {
    let csv = render(&["runs", "--n", "3", "--r", "2", "--theta", "1/2", "--format", "csv"]);
    assert_eq!(csv, "n,r,theta,mode,prob\n3,2,1/2,exact,3/8\n");
}

#[test]
fn runs_float_mode_switches_representation() {
    let (_, v) = render_json(&["runs", "--n", "200", "--r", "3", "--theta", "1/2", "--float"]);
    assert_eq!(v["mode"], "float");
    let prob = v["result"]["prob"].as_str().expect("prob is a string");
    assert!(prob.contains('.'), "float rendering expected, got {prob}");
}

#[test]
fn precision_flag_controls_float_digits() {
    let (_, v) = render_json(&["demoivre", "--n", "100", "--theta", "1/2", "--eps", "1/10", "--precision", "5"]);
    let approx = v["result"]["approx"].as_str().expect("approx is a string");
    let frac = approx.split('.').nth(1).expect("has a fractional part");
    assert_eq!(frac.len(), 5, "got {approx}");
}

#[test]
fn hartley_reports_clipped_band() {
    let (_, v) = render_json(&["hartley", "--p", "5", "--q", "0", "--eps", "1/10"]);
    assert_eq!(v["result"]["center"], "1/1");
    assert_eq!(v["result"]["band_lo"], "9/10");
    assert_eq!(v["result"]["band_hi"], "1/1");
}

#[test]
fn hartley_float_agrees_with_exact() {
    let (_, f) = render_json(&["hartley", "--p", "3", "--q", "2", "--eps", "1/10"]);
    let (_, e) = render_json(&["hartley", "--p", "3", "--q", "2", "--eps", "1/10", "--exact"]);
    assert_eq!(e["result"]["prob"], "5007/12500");
    let fv: f64 = f["result"]["prob"].as_str().unwrap().parse().unwrap();
    assert!((fv - 0.40056).abs() < 1e-9);
}

#[test]
fn trichotomy_without_theta_has_null_direct_answer() {
    let (text, v) = render_json(&["trichotomy", "--p", "3", "--q", "2", "--eps", "1/10", "--target", "9/10"]);
    assert!(v["result"]["direct"].is_null());
    assert_eq!(v["result"]["inverse_use"]["estimate"], "3/5");
    assert_eq!(v["result"]["bayes"]["posterior_a"], "4");
    assert_eq!(v["result"]["bayes"]["posterior_b"], "3");
    assert_eq!(v["result"]["bayes"]["band_prob"], "5007/12500");
    assert_eq!(v["result"]["notes"].as_array().map(Vec::len), Some(3));

    let round = serde_json::to_string(&v).expect("serializes");
    assert_eq!(format!("{round}\n"), text);
}

#[test]
fn trichotomy_csv_leaves_missing_cells_empty() {
    let csv = render(&["trichotomy", "--p", "3", "--q", "2", "--eps", "1/10", "--target", "9/10", "--format", "csv"]);
    let mut lines = csv.lines();
    let header = lines.next().expect("header row");
    let row = lines.next().expect("value row");
    assert_eq!(header.split(',').count(), row.split(',').count());
    assert!(row.contains(",,"), "direct columns should be empty: {row}");
}

#[test]
fn envelope_key_order_is_fixed() {
    let (text, _) = render_json(&["middle-term", "--n", "10"]);
    let pos = |needle: &str| text.find(needle).unwrap_or_else(|| panic!("missing {needle}"));
    assert!(pos("\"command\"") < pos("\"inputs\""));
    assert!(pos("\"inputs\"") < pos("\"result\""));
    assert!(pos("\"result\"") < pos("\"mode\""));
}

#[test]
fn binary_succeeds_with_exit_zero() {
    let out = bin()
        .args(["bernoulli-n", "--theta", "3/5", "--eps", "1/50", "--odds", "1000"])
        .output()
        .expect("binary runs");
    assert_eq!(out.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&out.stdout).contains("25550"));
}

#[test]
fn binary_usage_errors_exit_two() {
    for args in [l(&["runs", "--n", "3", "--theta", "1/2"]), l(&["nonsense"]), l(&["direct-prob", "--n", "4", "--theta", "1/3"])] {
        let out = bin().args(&args).output().expect("binary runs");
        assert_eq!(out.status.code(), Some(2), "args: {args:?}");
    }
    fn l(a: &[&str]) -> Vec<String> {
        a.iter().map(|s| s.to_string()).collect()
    }
}

#[test]
fn binary_domain_errors_exit_one() {
    let out = bin()
        .args(["runs", "--n", "3", "--r", "5", "--theta", "1/2"])
        .output()
        .expect("binary runs");
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("error"));
}

#[test]
fn binary_rejects_theta_above_one() {
    let out = bin()
        .args(["direct-prob", "--n", "4", "--theta", "5/3", "--k", "2"])
        .output()
        .expect("binary runs");
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn precision_env_var_is_honored_and_validated() {
    let out = bin()
        .args(["middle-term", "--n", "100", "--format", "csv"])
        .env("INVERSIO_FLOAT_PRECISION", "3")
        .output()
        .expect("binary runs");
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8_lossy(&out.stdout);
    assert!(text.contains("0.080"), "three digits expected: {text}");
    assert!(!text.contains("0.0800"), "three digits expected: {text}");

    let bad = bin()
        .args(["middle-term", "--n", "100"])
        .env("INVERSIO_FLOAT_PRECISION", "99")
        .output()
        .expect("binary runs");
    assert_eq!(bad.status.code(), Some(2));
}

#[test]
fn out_flag_writes_file_and_keeps_stdout_quiet() {
    let dir = tempfile::tempdir().expect("temp dir");
    let path = dir.path().join("answer.json");
    let out = bin()
        .args(["runs", "--n", "3", "--r", "2", "--theta", "1/2", "--format", "json", "--out"])
        .arg(&path)
        .output()
        .expect("binary runs");
    assert_eq!(out.status.code(), Some(0));
    assert!(out.stdout.is_empty());
    let text = std::fs::read_to_string(&path).expect("file written");
    let v: Value = serde_json::from_str(text.trim_end()).expect("valid JSON");
    assert_eq!(v["result"]["prob"], "3/8");
}

#[test]
fn help_exits_zero() {
    let out = bin().arg("--help").output().expect("binary runs");
    assert_eq!(out.status.code(), Some(0));
}
