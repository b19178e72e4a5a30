use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ballharm")).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

fn temp(name: &str) -> PathBuf {
    std::env::temp_dir().join(format!("ballharm-cli-{}-{name}", std::process::id()))
}

fn cells(line: &str) -> Vec<String> {
    line.split(',').map(str::to_string).collect()
}

#[test]
fn verify_constant_reports_four_over_pi() {
    let o = run(&["verify-constant", "--dim", "1", "--radii", "0,0.5"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let text = stdout(&o);
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("r,sharp_constant,estimate,relative_deviation,mc_estimate,pass"));
    let rows: Vec<Vec<String>> = lines.map(cells).collect();
    assert_eq!(rows.len(), 2);
    for row in &rows {
        let c: f64 = row[1].parse().unwrap();
        assert!((c - 4.0 / std::f64::consts::PI).abs() < 1e-15);
        assert!(row[3].parse::<f64>().unwrap().abs() < 1e-2);
        assert_eq!(row[5], "true");
    }
    assert!(stderr(&o).contains("pass"));
}

#[test]
fn verify_constant_with_monte_carlo_column() {
    let o = run(&["verify-constant", "--dim", "1", "--radii", "0.3", "--mc", "20000", "--format", "json"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let v: Value = serde_json::from_str(&stdout(&o)).unwrap();
    let row = &v["rows"][0];
    let mc = row["mc_estimate"].as_f64().unwrap();
    assert!((mc - 4.0 / std::f64::consts::PI).abs() < 0.05, "{mc}");
}

#[test]
fn profile_rows_and_alignment() {
    let o = run(&["profile", "--dim", "2", "--grid", "25", "--z", "0.1,0.2,-0.3,0.1"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let text = stdout(&o);
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("dir_index,l_re1,l_im1,l_re2,l_im2,c_closed,c_quadrature"));
    let rows: Vec<Vec<String>> = lines.map(cells).collect();
    // radial and tangential directions precede the grid
    assert_eq!(rows.len(), 27);
    for (k, row) in rows.iter().enumerate() {
        assert_eq!(row.len(), 7);
        assert_eq!(row[0], k.to_string());
        for cell in &row[1..] {
            let digits = cell.split('e').next().unwrap().trim_start_matches('-').replace('.', "");
            assert_eq!(digits.len(), 17, "{cell}");
        }
    }
    let best = rows.iter().map(|r| r[5].parse::<f64>().unwrap()).fold(f64::MIN, f64::max);
    assert_eq!(rows[0][5].parse::<f64>().unwrap(), best);
}

#[test]
fn profile_at_origin_is_flagged_degenerate() {
    let o = run(&["profile", "--dim", "2", "--grid", "5", "--z", "0,0,0,0"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stderr(&o).contains("degenerate"));
    let text = stdout(&o);
    let values: Vec<f64> = text.lines().skip(1).map(|l| cells(l)[5].parse().unwrap()).collect();
    assert!(values.iter().all(|v| (v - values[0]).abs() < 1e-14));
}

#[test]
fn burgeth_origin_rows_equal_two_c_minus_one() {
    for dim in ["1", "2"] {
        let o = run(&["burgeth", "--dim", dim, "--c", "0.3", "--radii", "0,0.4"]);
        assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
        let text = stdout(&o);
        let mut lines = text.lines();
        assert_eq!(lines.next(), Some("r,M,method,n,c"));
        let rows: Vec<Vec<String>> = lines.map(cells).collect();
        assert_eq!(rows.len(), 4);
        for row in rows.iter().filter(|r| r[0].parse::<f64>().unwrap() == 0.0) {
            assert!((row[1].parse::<f64>().unwrap() + 0.4).abs() < 1e-3, "{row:?}");
            assert_eq!(row[3], dim);
        }
    }
}

#[test]
fn audit_json_has_report_sections() {
    let path = temp("audit.json");
    let o = run(&["audit", "--dim", "1", "--out", path.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    assert!(stdout(&o).contains("checks passed"));
    let v: Value = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    let keys: Vec<&str> = v.as_object().unwrap().keys().map(String::as_str).collect();
    for k in ["config", "reports", "diagnostics", "timing"] {
        assert!(keys.contains(&k), "{keys:?}");
    }
    let reports = v["reports"].as_array().unwrap();
    assert!(reports.len() > 20);
    for r in reports {
        for field in ["suite", "name", "pass", "lhs", "rhs", "slack", "tolerance", "metadata"] {
            assert!(r.get(field).is_some(), "{field} missing in {r}");
        }
    }
    let _ = std::fs::remove_file(path);
}

#[test]
fn audit_csv_format() {
    let o = run(&["audit", "--dim", "1", "--format", "csv"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).starts_with("suite,name,pass,lhs,rhs,slack,tolerance\n"));
}

#[test]
fn config_file_then_flags() {
    let path = temp("run.cfg");
    std::fs::write(&path, "# sample\ndim = 1\nradii = 0.1, 0.2, 0.3\nc = 0.7\n").unwrap();
    let cfg = path.to_str().unwrap();
    let o = run(&["burgeth", "--config", cfg, "--format", "json"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let v: Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["config"]["dim"], 1);
    assert_eq!(v["config"]["c"], 0.7);
    assert_eq!(v["config"]["radii"].as_array().unwrap().len(), 3);
    let o = run(&["burgeth", "--config", cfg, "--format", "json", "--c", "0.2", "--radius", "0.5"]);
    let v: Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["config"]["c"], 0.2);
    assert_eq!(v["config"]["radii"], serde_json::json!([0.5]));
    let _ = std::fs::remove_file(path);
}

#[test]
fn rule_file_header() {
    let o = run(&["rule", "--dim", "1", "--level", "4"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    assert!(text.starts_with("ball-quad v1 n=1 kind=product count=4 sigma="));
    assert_eq!(text.lines().count(), 5);
}

#[test]
fn invalid_configuration_exits_two() {
    let bad: [&[&str]; 8] = [
        &["verify-constant", "--radii", ""],
        &["verify-constant", "--dim", "0"],
        &["burgeth", "--c", "1.5"],
        &["profile", "--dim", "1", "--z", "0.6,0.8"],
        &["profile", "--dim", "2", "--z", "0.1,0.2"],
        &["audit", "--format", "xml"],
        &["audit", "--no-such-flag"],
        &["burgeth", "--config", "/nonexistent/ballharm.cfg"],
    ];
    for args in bad {
        let o = run(args);
        assert_eq!(o.status.code(), Some(2), "{args:?}: {}", stderr(&o));
        assert!(!stderr(&o).is_empty());
    }
}

#[test]
fn help_exits_zero() {
    let o = run(&["--help"]);
    assert_eq!(o.status.code(), Some(0));
    for cmd in ["verify-constant", "profile", "burgeth", "audit"] {
        assert!(stdout(&o).contains(cmd));
    }
}
