//! CSV, JSON and rule-file writers.

use std::fmt::Write as _;

use ballharm_core::burgeth::BurgethCurve;
use ballharm_core::quadrature::QuadratureRule;
use ballharm_core::sharpness::DirectionalProfile;
use ballharm_core::{Error, Result, RuleKind, VerificationReport};
use serde_json::{json, Map, Value};

use crate::suites::{Diagnostic, Suite};

/// Seventeen significant digits.
pub fn num(x: f64) -> String {
    format!("{x:.16e}")
}

/// Joins cells with commas and terminates the row with LF.
pub fn csv_row<S: AsRef<str>>(cells: &[S]) -> String {
    let mut s = cells.iter().map(|c| c.as_ref()).collect::<Vec<_>>().join(",");
    s.push('\n');
    s
}

/// `dir_index,l_re1,l_im1,…,c_closed,c_quadrature`.
pub fn profile_csv(p: &DirectionalProfile) -> String {
    let n = p.z.dim();
    let mut header = vec!["dir_index".to_string()];
    for j in 1..=n {
        header.push(format!("l_re{j}"));
        header.push(format!("l_im{j}"));
    }
    header.push("c_closed".into());
    header.push("c_quadrature".into());
    let mut out = csv_row(&header);
    for (k, l) in p.directions.iter().enumerate() {
        let mut row = vec![k.to_string()];
        row.extend(l.coords().iter().map(|&x| num(x)));
        row.push(num(p.closed_values[k]));
        row.push(p.quadrature_values.as_ref().map_or(String::new(), |q| num(q[k])));
        out.push_str(&csv_row(&row));
    }
    out
}

/// `r,M,method,n,c`, one row per radius and curve, radius-major.
pub fn burgeth_csv(curves: &[BurgethCurve]) -> String {
    let mut out = csv_row(&["r", "M", "method", "n", "c"]);
    let Some(first) = curves.first() else { return out };
    for (i, &r) in first.radii.iter().enumerate() {
        for c in curves {
            out.push_str(&csv_row(&[num(r), num(c.values[i]), c.method.as_str().into(), c.n.to_string(), num(c.c)]));
        }
    }
    out
}

pub fn report_json(r: &VerificationReport) -> Value {
    let meta: Map<String, Value> = r.metadata.iter().map(|(k, v)| (k.clone(), Value::String(v.clone()))).collect();
    json!({
        "name": r.name,
        "pass": r.pass,
        "lhs": r.lhs,
        "rhs": r.rhs,
        "slack": r.slack,
        "tolerance": r.tolerance,
        "metadata": meta,
    })
}

pub fn diagnostic_json(suite: &str, d: &Diagnostic) -> Value {
    let values: Map<String, Value> = d.values.iter().map(|(k, v)| (k.clone(), json!(v))).collect();
    json!({ "suite": suite, "name": d.name, "message": d.message, "values": values })
}

/// Reports of several suites, one object per report with its suite name.
pub fn suites_json(suites: &[Suite]) -> (Vec<Value>, Vec<Value>) {
    let mut reports = Vec::new();
    let mut diags = Vec::new();
    for s in suites {
        for r in &s.reports {
            let mut v = report_json(r);
            v["suite"] = json!(s.name);
            reports.push(v);
        }
        diags.extend(s.diagnostics.iter().map(|d| diagnostic_json(&s.name, d)));
    }
    (reports, diags)
}

/// `suite,name,pass,lhs,rhs,slack,tolerance`.
pub fn reports_csv(suites: &[Suite]) -> String {
    let mut out = csv_row(&["suite", "name", "pass", "lhs", "rhs", "slack", "tolerance"]);
    for s in suites {
        for r in &s.reports {
            out.push_str(&csv_row(&[
                s.name.clone(),
                r.name.clone(),
                r.pass.to_string(),
                num(r.lhs),
                num(r.rhs),
                num(r.slack),
                num(r.tolerance),
            ]));
        }
    }
    out
}

/// Pretty JSON with a trailing newline.
pub fn json_text(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("JSON values always serialise");
    s.push('\n');
    s
}

/// `ball-quad v1 n=<n> kind=<product|mc> count=<k> sigma=<σ>` followed by
/// one line of `2n` coordinates and the weight per node.
pub fn rule_text(rule: &QuadratureRule) -> String {
    let n = rule.dim();
    let mut out = format!("ball-quad v1 n={n} kind={} count={} sigma={}\n", rule.kind().as_str(), rule.len(), num(rule.sigma()));
    rule.for_each_node(|_, w, weight| {
        for x in w {
            let _ = write!(out, "{} ", num(*x));
        }
        let _ = writeln!(out, "{}", num(weight));
    });
    out
}

fn bad(msg: impl Into<String>) -> Error {
    Error::Domain(msg.into())
}

/// Reads a rule written by [`rule_text`].
pub fn parse_rule(text: &str) -> Result<QuadratureRule> {
    let mut lines = text.lines();
    let header = lines.next().ok_or_else(|| bad("empty rule file"))?;
    let mut fields = header.split_whitespace();
    if fields.next() != Some("ball-quad") || fields.next() != Some("v1") {
        return Err(bad("not a ball-quad v1 file"));
    }
    let (mut n, mut kind, mut count) = (None, None, None);
    for f in fields {
        match f.split_once('=') {
            Some(("n", v)) => n = v.parse::<usize>().ok(),
            Some(("kind", "product")) => kind = Some(RuleKind::Product),
            Some(("kind", "mc")) => kind = Some(RuleKind::MonteCarlo),
            Some(("count", v)) => count = v.parse::<usize>().ok(),
            Some(("sigma", _)) => {}
            _ => return Err(bad(format!("unexpected header field {f:?}"))),
        }
    }
    let (n, kind, count) = match (n, kind, count) {
        (Some(n), Some(k), Some(c)) if n >= 1 => (n, k, c),
        _ => return Err(bad("incomplete header")),
    };
    let mut nodes = Vec::with_capacity(2 * n * count);
    let mut weights = Vec::with_capacity(count);
    for (i, line) in lines.enumerate() {
        let vals = line
            .split_whitespace()
            .map(|s| s.parse::<f64>())
            .collect::<core::result::Result<Vec<_>, _>>()
            .map_err(|_| bad(format!("bad number on node line {}", i + 1)))?;
        if vals.len() != 2 * n + 1 {
            return Err(bad(format!("node line {} has {} values, expected {}", i + 1, vals.len(), 2 * n + 1)));
        }
        nodes.extend_from_slice(&vals[..2 * n]);
        weights.push(vals[2 * n]);
    }
    if weights.len() != count {
        return Err(bad(format!("header announces {count} nodes, found {}", weights.len())));
    }
    QuadratureRule::tabulated(n, kind, count, None, nodes, weights)
}

#[cfg(test)]
mod tests {
    use super::*;
    use ballharm_core::quadrature::{integrate, product_rule};

    #[test]
    fn number_cells_have_seventeen_digits() {
        assert_eq!(num(0.1), "1.0000000000000001e-1");
        assert_eq!(num(0.1).parse::<f64>().unwrap(), 0.1);
        assert_eq!(csv_row(&["a", "b"]), "a,b\n");
    }

    #[test]
    fn rule_file_round_trip() {
        let rule = product_rule(2, 4).unwrap();
        let text = rule_text(&rule);
        assert!(text.starts_with("ball-quad v1 n=2 kind=product count=64 sigma="));
        let back = parse_rule(&text).unwrap();
        assert_eq!(back.len(), rule.len());
        let f = |w: &[f64]| w[0] * w[0] + w[3];
        assert_eq!(integrate(&rule, f).unwrap(), integrate(&back, f).unwrap());
        assert!(parse_rule("ball-quad v2 n=1").is_err());
        assert!(parse_rule("ball-quad v1 n=1 kind=product count=2 sigma=6\n1 0 3\n").is_err());
    }
}
