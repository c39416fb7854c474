use std::path::Path;
use std::process::{Command, Output};

fn run(out: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_heightlab")).arg("--out").arg(out).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn files_with_ext(dir: &Path, ext: &str) -> Vec<std::path::PathBuf> {
    let mut v: Vec<_> =
        std::fs::read_dir(dir).map(|rd| rd.filter_map(|e| e.ok().map(|e| e.path())).collect()).unwrap_or_default();
    v.retain(|p: &std::path::PathBuf| p.extension().is_some_and(|x| x == ext));
    v.sort();
    v
}

#[test]
fn radical_height_is_exact() {
    let tmp = tempfile::tempdir().unwrap();
    let o = run(tmp.path(), &["height", "rad: 2/3 ^ 1/5"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).starts_with("1/5*log(3)"), "{}", stdout(&o));
    let o = run(tmp.path(), &["height", "rad: 1"]);
    assert_eq!(stdout(&o).trim(), "0");
}

#[test]
fn golden_ratio_height() {
    let tmp = tempfile::tempdir().unwrap();
    let o = run(tmp.path(), &["height", "alg: x^2 - x - 1"]);
    assert_eq!(o.status.code(), Some(0));
    // log of the golden ratio over 2
    let v: f64 = stdout(&o).trim().trim_start_matches('≈').trim().parse().unwrap();
    assert!((v - 0.5 * ((1.0 + 5f64.sqrt()) / 2.0).ln()).abs() < 1e-9);
}

#[test]
fn weighted_height_uses_the_degree() {
    let tmp = tempfile::tempdir().unwrap();
    let o = run(tmp.path(), &["height", "rad: 17/2 ^ 1/2", "--gamma", "-1"]);
    assert_eq!(o.status.code(), Some(0));
    let s = stdout(&o);
    let v: f64 = s.rsplit('≈').next().unwrap().trim().parse().unwrap();
    assert!((v - 17f64.ln() / 4.0).abs() < 1e-9, "{s}");
}

#[test]
fn parse_errors_exit_2_with_a_caret() {
    let tmp = tempfile::tempdir().unwrap();
    let o = run(tmp.path(), &["height", "rad: 2 ^ 1/"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains('^'), "{}", stderr(&o));
    let o = run(tmp.path(), &["height", "poly: x"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn precision_below_the_floor_is_a_usage_error() {
    let tmp = tempfile::tempdir().unwrap();
    let o = run(tmp.path(), &["--precision", "8", "height", "rad: 2"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn tower_gen_then_certify() {
    let tmp = tempfile::tempdir().unwrap();
    let o = run(tmp.path(), &["tower", "gen", "--gamma", "-1", "--c", "0.69", "--levels", "2", "--schedule", "2,3"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let doc: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(doc["levels"].as_array().unwrap().len(), 2);
    assert_eq!(doc["levels"][0]["p"], "17");
    let json = files_with_ext(tmp.path(), "json");
    assert_eq!(json.len(), 1);
    let name = json[0].file_name().unwrap().to_string_lossy().into_owned();
    assert!(name.starts_with("tower-") && name.len() == "tower-".len() + 12 + ".json".len(), "{name}");

    let o = run(tmp.path(), &["tower", "certify", json[0].to_str().unwrap(), "--budget", "40"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert!(stdout(&o).contains("certificate: pass"));
    let csv = files_with_ext(tmp.path(), "csv");
    assert_eq!(csv.len(), 1);
    let text = std::fs::read_to_string(&csv[0]).unwrap();
    assert_eq!(text.lines().count(), 1 + 2 * 40);
}

#[test]
fn failing_tower_exits_1() {
    let tmp = tempfile::tempdir().unwrap();
    let f = tmp.path().join("control.json");
    std::fs::write(&f, r#"{"gamma": -1.0, "C": 1.0, "levels": [{"p": "3", "q": "2", "d": 2}]}"#).unwrap();
    let o = run(tmp.path(), &["tower", "certify", f.to_str().unwrap(), "--budget", "10"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).contains("certificate: fail"));
}

#[test]
fn malformed_tower_file_is_rejected() {
    let tmp = tempfile::tempdir().unwrap();
    let f = tmp.path().join("bad.json");
    std::fs::write(&f, r#"{"gamma": -1.0, "C": 1.0, "levels": [{"p": "4", "q": "2", "d": 2}]}"#).unwrap();
    let o = run(tmp.path(), &["tower", "certify", f.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn lemma_check_reports_the_chain() {
    let tmp = tempfile::tempdir().unwrap();
    let o = run(tmp.path(), &["lemma-check", "[1 : 17^1/4 : 17^1/2]", "--gamma", "-1"]);
    assert_eq!(o.status.code(), Some(0));
    let s = stdout(&o);
    assert!(s.contains("verdict: holds"), "{s}");
    assert!(s.contains("index set: {1, 2}"), "{s}");
}

#[test]
fn point_height_prints_all_variants() {
    let tmp = tempfile::tempdir().unwrap();
    let o = run(tmp.path(), &["point-height", "[1 : 2^1/2 : -3/4]", "--gamma", "-1"]);
    assert_eq!(o.status.code(), Some(0));
    let s = stdout(&o);
    for key in ["point:", "h:", "h_2:", "h_gamma:"] {
        assert!(s.lines().any(|l| l.starts_with(key)), "{key} missing in {s}");
    }
}

#[test]
fn finiteness_census_output() {
    let tmp = tempfile::tempdir().unwrap();
    let o = run(tmp.path(), &["cm", "finiteness", "--cprime", "10", "--dmax", "200"]);
    assert_eq!(o.status.code(), Some(0));
    let s = stdout(&o);
    assert!(s.contains("class number one: {-3, -4, -7, -8, -11, -19, -43, -67, -163}"), "{s}");
    assert!(s.contains("cardinality: 9"), "{s}");
}

#[test]
fn scan_csv_layout() {
    let tmp = tempfile::tempdir().unwrap();
    let o = run(tmp.path(), &["cm", "scan", "--dmax", "50"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let csv = files_with_ext(tmp.path(), "csv");
    let text = std::fs::read_to_string(&csv[0]).unwrap();
    let mut lines = text.lines();
    assert_eq!(
        lines.next().unwrap(),
        "D,class_number,j_height,faltings_height,theta_height_est,residual,ratio,error_radius,precision,version,errors"
    );
    let first: Vec<&str> = lines.next().unwrap().split(',').collect();
    assert_eq!(first[0], "-3");
    assert_eq!(first[1], "1");
    assert_eq!(files_with_ext(tmp.path(), "dat").len(), 1);
}

#[test]
fn json_format_round_trips() {
    let tmp = tempfile::tempdir().unwrap();
    let o = run(tmp.path(), &["--format", "json", "cm", "faltings", "--d", "-3"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let json = files_with_ext(tmp.path(), "json");
    let v: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&json[0]).unwrap()).unwrap();
    assert!(v.is_array() || v.is_object());
    let hf: f64 = stdout(&o).lines().find(|l| l.starts_with("faltings height:")).unwrap()["faltings height:".len()..]
        .split('±')
        .next()
        .unwrap()
        .trim()
        .parse()
        .unwrap();
    assert!((hf - 0.170186047701335).abs() < 1e-12, "{hf}");
}

#[test]
fn config_file_and_flag_precedence() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = tmp.path().join("run.cfg");
    std::fs::write(&cfg, "# test run\nprecision = 40\nformat = json\n").unwrap();
    let o = run(tmp.path(), &["--config", cfg.to_str().unwrap(), "--format", "csv", "cm", "theta", "--d", "-4"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let csv = files_with_ext(tmp.path(), "csv");
    assert_eq!(csv.len(), 1);
    let text = std::fs::read_to_string(&csv[0]).unwrap();
    assert!(text.lines().nth(1).unwrap().contains(",40,"), "{text}");

    std::fs::write(&cfg, "colour = blue\n").unwrap();
    let o = run(tmp.path(), &["--config", cfg.to_str().unwrap(), "height", "rad: 2"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn out_of_range_scans_are_refused() {
    let tmp = tempfile::tempdir().unwrap();
    let o = run(tmp.path(), &["cm", "scan", "--dmax", "2"]);
    assert_eq!(o.status.code(), Some(2));
    let o = run(tmp.path(), &["cm", "faltings", "--d", "-5"]);
    assert_eq!(o.status.code(), Some(2));
}
