use std::path::Path;
use std::process::{Command, Output};

use vatom::report::SERIES_HEADER;

fn vatom(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_vatom")).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

/// Minimal well-formedness check: every element closes in order.
fn assert_well_formed(xml: &str) {
    let mut stack: Vec<String> = Vec::new();
    let mut rest = xml;
    while let Some(i) = rest.find('<') {
        let j = rest[i..].find('>').expect("unterminated tag") + i;
        let tag = &rest[i + 1..j];
        rest = &rest[j + 1..];
        if tag.starts_with('?') || tag.starts_with('!') {
            continue;
        }
        if let Some(name) = tag.strip_prefix('/') {
            assert_eq!(stack.pop().as_deref(), Some(name.trim()), "mismatched </{name}>");
        } else if !tag.ends_with('/') {
            stack.push(tag.split_whitespace().next().unwrap().to_string());
        }
    }
    assert!(stack.is_empty(), "unclosed: {stack:?}");
}

#[test]
fn evolve_writes_the_series_schema() {
    let o = vatom(&["evolve", "--d1", "0.5", "--d2", "-0.5", "--theta", "pi/4", "--tau-max", "20", "--steps", "201"]);
    assert!(o.status.success());
    let text = stdout(&o);
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], SERIES_HEADER);
    assert_eq!(lines.len(), 202);
    let first: Vec<f64> = lines[1].split(',').map(|v| v.parse().unwrap()).collect();
    let s = std::f64::consts::FRAC_1_SQRT_2;
    assert_eq!(first[0], 0.0);
    assert!((first[1] - s).abs() < 1e-11 && first[2].abs() < 1e-11);
    assert!((first[3] - s).abs() < 1e-11 && first[4].abs() < 1e-11);
    let mut last = -1.0;
    for l in &lines[1..] {
        let v: Vec<f64> = l.split(',').map(|v| v.parse().unwrap()).collect();
        assert_eq!(v.len(), 8);
        assert!(v[0] > last);
        last = v[0];
        // 12 significant digits at most
        for field in l.split(',') {
            let mantissa = field.split('e').next().unwrap();
            let digits: String = mantissa.chars().filter(char::is_ascii_digit).collect();
            assert!(digits.trim_start_matches('0').len() <= 12, "{field}");
        }
    }
}

#[test]
fn identical_flags_give_identical_bytes() {
    let args = ["evolve", "--model", "iso", "--d1", "-0.5", "--d2", "-0.25", "--theta", "0.3", "--steps", "301"];
    assert_eq!(vatom(&args).stdout, vatom(&args).stdout);
    let sweep = ["sweep", "--d1-steps", "9", "--thetas", "0,pi/4"];
    assert_eq!(vatom(&sweep).stdout, vatom(&sweep).stdout);
}

#[test]
fn exit_codes() {
    assert_eq!(vatom(&["evolve", "--bogus"]).status.code(), Some(1));
    assert_eq!(vatom(&["frobnicate"]).status.code(), Some(1));
    assert_eq!(vatom(&["evolve", "--d1", "1"]).status.code(), Some(1));
    assert_eq!(vatom(&["evolve", "--d1", "1", "--d2", "1", "--steps", "1"]).status.code(), Some(1));
    // both init specifications
    assert_eq!(vatom(&["evolve", "--d1", "1", "--d2", "1", "--theta", "0", "--a1-re", "1"]).status.code(), Some(1));
    // explicit amplitudes must be normalized
    assert_eq!(vatom(&["evolve", "--d1", "1", "--d2", "1", "--a1-re", "0.5", "--a2-re", "0.5"]).status.code(), Some(1));
    // confluent roots at the band edge
    let o = vatom(&["roots", "--d1", "0", "--d2", "0", "--theta", "0"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("degenerate"));
    assert_eq!(vatom(&["--help"]).status.code(), Some(0));
}

#[test]
fn roots_report_fixtures() {
    let text = stdout(&vatom(&["roots", "--model", "aniso", "--d1", "-1", "--d2", "-1", "--theta", "0"]));
    assert!(text.contains("0.414213562373"), "{text}");
    assert!(text.contains("0.828427124746"), "{text}");
    let decay = stdout(&vatom(&["roots", "--model", "aniso", "--d1", "0.5", "--d2", "0.25"]));
    assert!(decay.contains("non-markovian-decay") && decay.contains("0 bound"), "{decay}");
    let iso = stdout(&vatom(&["roots", "--model", "iso", "--d1", "0", "--two-level"]));
    assert!(iso.contains("|X| = 1 ") && iso.contains("bound"), "{iso}");
}

#[test]
fn roots_json_parses() {
    let o = vatom(&["roots", "--d1", "-1", "--d2", "-1", "--format", "json"]);
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["bound_count"], 2);
    assert_eq!(v["modes"].as_array().unwrap().len(), 4);
}

#[test]
fn map_writes_csv_and_svg() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("map.csv");
    let svg = dir.path().join("map.svg");
    let o = vatom(&[
        "map",
        "--out",
        csv.to_str().unwrap(),
        "--svg",
        svg.to_str().unwrap(),
        "--d1-steps",
        "21",
        "--d2-steps",
        "11",
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let text = std::fs::read_to_string(&csv).unwrap();
    assert_eq!(text.lines().count(), 1 + 21 * 11);
    assert!(text.starts_with("delta1,delta2,bound_count,regime_code,regime,degenerate,band_edge\n"));
    assert_well_formed(&std::fs::read_to_string(&svg).unwrap());
}

#[test]
fn evolve_svg_is_well_formed() {
    let dir = tempfile::tempdir().unwrap();
    let svg = dir.path().join("p.svg");
    let o = vatom(&["evolve", "--d1", "-0.5", "--d2", "-0.25", "--theta", "0", "--svg", svg.to_str().unwrap()]);
    assert!(o.status.success());
    assert_well_formed(&std::fs::read_to_string(&svg).unwrap());
}

#[test]
fn config_file_and_flags_compose() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.json");
    std::fs::write(&cfg, r#"{"d1": -0.5, "d2": -0.25, "theta": "pi/4", "steps": 11, "tau-max": 5}"#).unwrap();
    let from_file = stdout(&vatom(&["evolve", "--config", cfg.to_str().unwrap()]));
    assert_eq!(from_file.lines().count(), 12);
    let overridden = stdout(&vatom(&["evolve", "--config", cfg.to_str().unwrap(), "--steps", "21"]));
    assert_eq!(overridden.lines().count(), 22);
    let direct = stdout(&vatom(&["evolve", "--d1", "-0.5", "--d2", "-0.25", "--theta", "pi/4", "--steps", "11", "--tau-max", "5"]));
    assert_eq!(from_file, direct);
    std::fs::write(&cfg, r#"{"d1": 1, "dee2": 1}"#).unwrap();
    assert_eq!(vatom(&["evolve", "--config", cfg.to_str().unwrap()]).status.code(), Some(1));
    assert!(!Path::new(&dir.path().join("missing.json")).exists());
    assert_eq!(vatom(&["evolve", "--config", dir.path().join("missing.json").to_str().unwrap()]).status.code(), Some(1));
}

#[test]
fn oracle_compare_reports_small_deviation() {
    let o = vatom(&[
        "oracle-compare",
        "--d1",
        "0.5",
        "--d2",
        "-0.5",
        "--theta",
        "0",
        "--tau-max",
        "10",
        "--steps",
        "101",
        "--n-modes",
        "4000",
        "--u-max",
        "12",
        "--dt",
        "2e-3",
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let text = stdout(&o);
    let mut lines = text.lines();
    assert_eq!(lines.next().unwrap(), format!("{SERIES_HEADER},reservoir_pop"));
    assert_eq!(lines.count(), 101);
    let report = String::from_utf8_lossy(&o.stderr).to_string();
    let dev: f64 = report
        .lines()
        .find_map(|l| l.strip_prefix("max |dP|: "))
        .unwrap_or_else(|| panic!("{report}"))
        .parse()
        .unwrap();
    // coarse oracle; the small-tau cutoff artifact dominates
    assert!(dev < 1e-2, "{dev}");
    assert!(report.contains("norm drift"));
}

#[test]
fn decoupled_oracle_matches_exactly() {
    let o = vatom(&[
        "oracle-compare", "--d1", "0.3", "--d2", "-0.7", "--theta", "0.4", "--coupling", "0", "--tau-max", "5", "--steps",
        "51", "--n-modes", "500", "--u-max", "5", "--dt", "1e-2", "--format", "json",
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert!(v["max_deviation"].as_f64().unwrap() < 1e-12, "{v}");
}
