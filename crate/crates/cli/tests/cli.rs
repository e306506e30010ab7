use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn bin() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_ising-qec"));
    c.env_remove("ISING_QEC_THREADS");
    c
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn bundled() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("data/postselected_exact.csv")
}

/// Data rows of a CSV report as header-keyed maps.
fn rows(text: &str) -> Vec<std::collections::HashMap<String, String>> {
    let body: String = text.lines().filter(|l| !l.starts_with('#')).map(|l| format!("{l}\n")).collect();
    let mut r = csv::Reader::from_reader(body.as_bytes());
    let h: Vec<String> = r.headers().unwrap().iter().map(str::to_string).collect();
    r.records().map(|rec| h.iter().cloned().zip(rec.unwrap().iter().map(str::to_string)).collect()).collect()
}

fn meta<'a>(text: &'a str, key: &str) -> Option<&'a str> {
    text.lines().find_map(|l| l.strip_prefix(&format!("# {key}: ")))
}

fn num(s: &str) -> f64 {
    s.parse().unwrap()
}

#[test]
fn exact_crosses_half_at_threshold() {
    let pc = format!("{}", 1.0 / (2.0 + 2f64.sqrt()));
    let o = run(&["exact", "--L", "8", "--L", "16", "--L", "64", "--p", &pc]);
    assert!(o.status.success());
    let text = stdout(&o);
    assert!(text.starts_with("# config: {"));
    for r in rows(&text) {
        assert!((num(&r["pfail"]) - 0.5).abs() < 1e-12);
    }
}

#[test]
fn exact_high_p_limit() {
    let o = run(&["exact", "--L", "64", "--p", "0.49"]);
    let r = rows(&stdout(&o));
    assert!((num(&r[0]["pfail"]) - 0.75).abs() < 1e-4);
}

#[test]
fn empty_grid_is_usage_error_without_file() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("x.csv");
    let o = run(&["exact", "--p-grid", "0.3:0.1:0.01", "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(!out.exists());
    assert_eq!(run(&["exact", "--p-grid", "0.1:0.3:0"]).status.code(), Some(2));
}

#[test]
fn bad_flag_and_domain_exit_codes() {
    assert_eq!(run(&["exact", "--nonsense"]).status.code(), Some(2));
    assert_eq!(run(&["capillary", "--L", "32", "--p", "0.4"]).status.code(), Some(3));
    assert_eq!(run(&["simulate", "--L", "5", "--p", "0.1", "--shots", "0"]).status.code(), Some(2));
}

#[test]
fn simulate_noiseless_never_fails() {
    let o = run(&["simulate", "--geometry", "torus", "--L", "5", "--p", "0", "--shots", "200"]);
    assert!(o.status.success());
    let r = rows(&stdout(&o));
    assert_eq!(r[0]["shots"], "200");
    assert_eq!(num(&r[0]["pfail_hat"]), 0.0);
    assert_eq!(num(&r[0]["ci_low"]), 0.0);
}

#[test]
fn gap_support_is_even() {
    let o = run(&["gapdist", "--geometry", "planar", "--L", "5", "--p", "0.103", "--shots", "10000"]);
    let r = rows(&stdout(&o));
    let total: u64 = r.iter().map(|x| x["count"].parse::<u64>().unwrap()).sum();
    assert_eq!(total, 10_000);
    assert!(r.iter().all(|x| x["delta_e"].parse::<i64>().unwrap() % 2 == 0));
}

#[test]
fn thread_count_does_not_change_output() {
    let args = ["simulate", "--geometry", "torus", "--L", "5", "--p-grid", "0.05:0.1:0.05", "--shots", "3000"];
    let a = bin().args(args).args(["--threads", "1"]).output().unwrap();
    let b = bin().args(args).env("ISING_QEC_THREADS", "4").output().unwrap();
    assert!(a.status.success() && b.status.success());
    assert_eq!(a.stdout, b.stdout);
    assert!(!stdout(&a).contains("threads"));
}

#[test]
fn erf_fit_on_bundled_exact_data_gives_ising_nu() {
    let o = run(&["fit", "--model", "erf2", "--input", bundled().to_str().unwrap()]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    let nu = v["fit"]["params"]["nu"].as_f64().unwrap();
    assert!((0.9..=1.1).contains(&nu), "nu = {nu}");
    for key in ["params", "stderrs", "rss", "aic", "bic", "n", "k"] {
        assert!(!v["fit"][key].is_null(), "{key}");
    }
    assert_eq!(v["config"]["model"], "erf2");
}

#[test]
fn compare_reports_four_fits_and_ranking() {
    let o = run(&["fit", "--model", "compare", "--input", bundled().to_str().unwrap()]);
    // the five-parameter family has a flat direction on exact data
    assert!(matches!(o.status.code(), Some(0 | 5)));
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["fits"].as_array().unwrap().len(), 4);
    assert_eq!(v["ranking_aic"].as_array().unwrap().len(), 4);
    assert_eq!(v["ranking_aic"][0], "erf_quadratic");
}

#[test]
fn nonconvergence_writes_output_then_exits_5() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("fit.json");
    let o = run(&["fit", "--model", "poly_L", "--input", bundled().to_str().unwrap(), "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(5));
    let v: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(out).unwrap()).unwrap();
    assert_eq!(v["fit"]["converged"], false);
}

#[test]
fn malformed_csv_names_row() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.csv");
    std::fs::write(&path, "L,p,pfail\n8,0.29,0.4\n8,0.30,oops\n").unwrap();
    let o = run(&["fit", "--input", path.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(4));
    assert!(String::from_utf8_lossy(&o.stderr).contains("row 2"));
}

#[test]
fn duality_residual_is_tiny() {
    let o = run(&["duality", "--L", "16", "--p-grid", "0.05:0.28:0.01"]);
    let text = stdout(&o);
    assert_eq!(rows(&text).len(), 24);
    assert!(num(meta(&text, "max_abs_residual").unwrap()) <= 1e-9);
}

#[test]
fn pathcount_boundary_substitutes_l_equals_one_over_p() {
    let o = run(&["pathcount", "--L", "16", "--p-grid", "0.02:0.1:0.02"]);
    for r in rows(&stdout(&o)) {
        let p = num(&r["p"]);
        let l = 1.0 / p;
        let want = 2.0 * l * (p / (1.0 - p)).powf(l);
        assert!((num(&r["boundary_pfail"]) - want).abs() <= 1e-12 * want);
    }
    let o = run(&["pathcount", "--regime", "nonpost", "--geometry", "torus", "--L", "5", "--p", "0.001"]);
    assert_eq!(num(&rows(&stdout(&o))[0]["coefficient"]), 100.0);
}

#[test]
fn collapse_window_contains_zero() {
    let o = run(&["collapse", "--epsilon", "0.0025"]);
    let text = stdout(&o);
    let lo = num(meta(&text, "window_low").expect("window reported"));
    let hi = num(meta(&text, "window_high").unwrap());
    assert!(lo < 0.0 && hi > 0.0);
}

#[test]
fn failpoly_reports_leading_term() {
    let o = run(&["failpoly", "--geometry", "torus", "--L", "3"]);
    let r = rows(&stdout(&o));
    let w2 = r.iter().find(|x| x["w"] == "2").unwrap();
    assert_eq!(num(&w2["coefficient"]), 18.0);
    assert_eq!(num(&w2["formula_leading"]), 18.0);
}

#[test]
fn config_file_with_flag_override_and_json_format() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.json");
    std::fs::write(&cfg, r#"{"l_list":[8],"p_spec":"0.1:0.2:0.05","format":"json"}"#).unwrap();
    let o = run(&["exact", "--config", cfg.to_str().unwrap(), "--L", "16"]);
    assert!(o.status.success());
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["config"]["l_list"], serde_json::json!([16]));
    let rows = v["rows"].as_array().unwrap();
    assert_eq!(rows.len(), 3);
    assert_eq!(rows[0]["L"], 16);
}

#[test]
fn output_reproducible_from_embedded_config() {
    let o = run(&["simulate", "--geometry", "planar", "--L", "5", "--p", "0.1", "--shots", "500", "--seed", "9"]);
    let text = stdout(&o);
    let echo = meta(&text, "config").unwrap();
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("c.json");
    std::fs::write(&cfg, echo).unwrap();
    let again = run(&["simulate", "--config", cfg.to_str().unwrap()]);
    assert_eq!(o.stdout, again.stdout);
}

#[test]
fn gap_fits_from_gapdist_output() {
    let dir = tempfile::tempdir().unwrap();
    let gaps = dir.path().join("gaps.csv");
    let o = run(&[
        "gapdist", "--L", "5", "--L", "7", "--L", "9", "--L", "11", "--p", "0.103", "--shots", "2000", "--out",
        gaps.to_str().unwrap(),
    ]);
    assert!(o.status.success());
    let o = run(&["fit", "--model", "stiffness", "--input", gaps.to_str().unwrap()]);
    assert!(o.status.success());
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    let theta = v["stiffness"]["theta"].as_f64().unwrap();
    assert!(theta > 0.0 && theta < 1.0, "{theta}");
    let o = run(&["fit", "--model", "gaussian", "--input", gaps.to_str().unwrap()]);
    assert!(o.status.success());
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert!(v["implied_pfail"].as_f64().unwrap() > 0.0);
}
