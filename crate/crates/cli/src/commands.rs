//! The subcommands. Each returns the output document and a short summary;
//! `main` decides where they go.

use std::sync::Arc;

use ballharm_core::burgeth::{burgeth_curve, BurgethMethod, DOUBLE_INTEGRAL_LEVEL};
use ballharm_core::quadrature::{mc_rule, product_rule};
use ballharm_core::sharpness::{extremal_field, khavinson_argmax, radial_direction, sharp_constant};
use ballharm_core::{ball, CPoint, Error};
use serde_json::{json, Value};

use crate::config::{ConfigError, Format, RunConfig};
use crate::output::{burgeth_csv, csv_row, json_text, num, profile_csv, reports_csv, rule_text, suites_json};
use crate::suites::{self, Suite};

/// Relative deviation allowed between the sharpness witness and `C_n`.
pub const WITNESS_TOL: f64 = 1e-2;
/// Required `|⟨argmax, ẑ⟩|` in the profile command.
pub const ALIGNMENT_TOL: f64 = 1e-9;

#[derive(Debug)]
pub enum CommandError {
    Config(ConfigError),
    Compute(Error),
}

impl From<ConfigError> for CommandError {
    fn from(e: ConfigError) -> Self {
        Self::Config(e)
    }
}

impl From<Error> for CommandError {
    fn from(e: Error) -> Self {
        Self::Compute(e)
    }
}

impl std::fmt::Display for CommandError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Self::Config(e) => write!(f, "configuration error: {e}"),
            Self::Compute(e) => write!(f, "computation failed: {e}"),
        }
    }
}

impl CommandError {
    pub fn exit_code(&self) -> i32 {
        match self {
            Self::Config(_) => 2,
            Self::Compute(_) => 1,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CommandOutput {
    pub body: String,
    pub summary: Vec<String>,
    pub pass: bool,
}

impl CommandOutput {
    pub fn exit_code(&self) -> i32 {
        if self.pass {
            0
        } else {
            1
        }
    }
}

/// `cfg.z` as a point, or `default` if unset.
fn config_point(cfg: &RunConfig, default: CPoint) -> Result<CPoint, CommandError> {
    match &cfg.z {
        Some(z) => Ok(CPoint::new(z.clone())?),
        None => Ok(default),
    }
}

/// The sharp constant next to the extremal-field estimate of
/// `‖∇h_{z,ẑ}(z)‖(1−‖z‖²)` at each radius, along `ẑ` from `--z` or `e_1`.
pub fn verify_constant(cfg: &RunConfig) -> Result<CommandOutput, CommandError> {
    let n = cfg.dim;
    let dir = radial_direction(&config_point(cfg, CPoint::basis(n, 0))?);
    let level = cfg.level.max(8).next_multiple_of(4);
    let sharp = sharp_constant(n)?;
    let mc = if cfg.mc > 0 { Some(Arc::new(mc_rule(n, cfg.mc, cfg.seed)?)) } else { None };
    let mut rows = Vec::new();
    let mut pass = true;
    for &r in &cfg.radii {
        let z = dir.scale(r);
        let estimate = suites::extremal_ratio(&z, level)? * sharp;
        let dev = (estimate - sharp) / sharp;
        let mc_estimate = match &mc {
            Some(rule) => {
                let f = extremal_field(&z, &radial_direction(&z), rule.clone())?.allow_near_boundary();
                Some(ball::norm_sqr(&f.gradient(&z)?).sqrt() * (1.0 - r * r))
            }
            None => None,
        };
        let ok = dev.abs() <= WITNESS_TOL && estimate <= sharp * (1.0 + cfg.tol.nonsmooth);
        pass &= ok;
        rows.push((r, estimate, dev, mc_estimate, ok));
    }
    let body = match cfg.format_or(Format::Csv) {
        Format::Csv => {
            let mut s = csv_row(&["r", "sharp_constant", "estimate", "relative_deviation", "mc_estimate", "pass"]);
            for &(r, e, d, m, ok) in &rows {
                s.push_str(&csv_row(&[num(r), num(sharp), num(e), num(d), m.map(num).unwrap_or_default(), ok.to_string()]));
            }
            s
        }
        Format::Json => json_text(&json!({
            "command": "verify-constant",
            "config": cfg.to_json(),
            "level": level,
            "direction": dir.coords(),
            "sharp_constant": sharp,
            "rows": rows.iter().map(|&(r, e, d, m, ok)| json!({
                "r": r, "estimate": e, "relative_deviation": d, "mc_estimate": m, "pass": ok,
            })).collect::<Vec<_>>(),
        })),
    };
    let worst = rows.iter().map(|row| row.2.abs()).fold(0.0, f64::max);
    let summary = vec![format!(
        "sharp constant C_{n} = {}; largest relative deviation of the extremal estimate {worst:.3e} over {} radii: {}",
        num(sharp),
        rows.len(),
        if pass { "pass" } else { "FAIL" }
    )];
    Ok(CommandOutput { body, summary, pass })
}

/// `C(z, ·)` over the axes and `grid` sphere directions.
pub fn profile(cfg: &RunConfig) -> Result<CommandOutput, CommandError> {
    let n = cfg.dim;
    let z = config_point(cfg, CPoint::radial(n, 0.5))?;
    let rule = product_rule(n, cfg.level)?;
    let p = khavinson_argmax(&z, cfg.grid, Some(&rule))?;
    let alignment = p.alignment();
    let pass = p.degenerate || alignment >= 1.0 - ALIGNMENT_TOL;
    let body = match cfg.format_or(Format::Csv) {
        Format::Csv => profile_csv(&p),
        Format::Json => json_text(&json!({
            "command": "profile",
            "config": cfg.to_json(),
            "z": z.coords(),
            "degenerate": p.degenerate,
            "argmax_index": p.argmax_index,
            "argmax_direction": p.argmax_direction.coords(),
            "alignment": alignment,
            "rows": p.directions.iter().enumerate().map(|(k, l)| json!({
                "dir_index": k,
                "l": l.coords(),
                "c_closed": p.closed_values[k],
                "c_quadrature": p.quadrature_values.as_ref().map(|q| q[k]),
            })).collect::<Vec<_>>(),
        })),
    };
    let mut summary = vec![format!(
        "argmax direction #{} = [{}], alignment |<argmax, z/|z|>| = {}",
        p.argmax_index,
        p.argmax_direction.coords().iter().map(|&x| num(x)).collect::<Vec<_>>().join(", "),
        num(alignment)
    )];
    if p.degenerate {
        summary.push("degenerate tie: z = 0, so C(0, l) is the same for every direction and the profile is uniform".into());
    }
    Ok(CommandOutput { body, summary, pass })
}

/// The envelope by indicator quadrature and by the reference form.
pub fn burgeth(cfg: &RunConfig) -> Result<CommandOutput, CommandError> {
    let n = cfg.dim;
    let quad = burgeth_curve(n, cfg.c, &cfg.radii, BurgethMethod::IndicatorQuadrature, cfg.level.max(8))?;
    let reference = if n == 1 {
        burgeth_curve(1, cfg.c, &cfg.radii, BurgethMethod::ClosedFormN1, 0)?
    } else {
        burgeth_curve(n, cfg.c, &cfg.radii, BurgethMethod::DoubleIntegral, DOUBLE_INTEGRAL_LEVEL)?
    };
    let dev = quad.values.iter().zip(&reference.values).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
    let pass = dev <= cfg.tol.nonsmooth;
    let curves = [quad, reference];
    let body = match cfg.format_or(Format::Csv) {
        Format::Csv => burgeth_csv(&curves),
        Format::Json => json_text(&json!({
            "command": "burgeth",
            "config": cfg.to_json(),
            "max_deviation": dev,
            "curves": curves.iter().map(|c| json!({
                "method": c.method.as_str(), "n": c.n, "c": c.c, "r": c.radii, "M": c.values,
            })).collect::<Vec<_>>(),
        })),
    };
    let summary = vec![format!(
        "max cross-method deviation ({} vs {}) = {}: {}",
        curves[0].method.as_str(),
        curves[1].method.as_str(),
        num(dev),
        if pass { "pass" } else { "FAIL" }
    )];
    Ok(CommandOutput { body, summary, pass })
}

/// Every suite at audit size for `cfg.dim`.
pub fn audit_suites(cfg: &RunConfig) -> Vec<Suite> {
    let n = cfg.dim;
    let (seed, tol, level) = (cfg.seed, &cfg.tol, cfg.level);
    let ns: Vec<usize> = (1..=n.min(4)).collect();
    let small: Vec<usize> = (1..=n.min(3)).collect();
    // product rules grow like level^(2n-1)
    let (fields, points) = if n <= 2 { (6, 6) } else { (2, 3) };
    vec![
        suites::ball_suite(&ns, 500, seed),
        suites::quadrature_suite(&small, 200, seed),
        suites::poisson_suite(n, level, fields.min(4), points, seed, tol),
        suites::sharpness_suite(n, level, fields, points, seed, tol),
        suites::bounds_suite(n, level, fields, points, seed, tol),
        suites::burgeth_suite(n, level, fields, seed, tol),
    ]
}

pub fn audit(cfg: &RunConfig) -> Result<CommandOutput, CommandError> {
    let suites = audit_suites(cfg);
    let pass = suites.iter().all(Suite::passed);
    let total: usize = suites.iter().map(|s| s.reports.len()).sum();
    let failed: Vec<String> =
        suites.iter().flat_map(|s| s.reports.iter().filter(|r| !r.pass).map(move |r| format!("{}/{}", s.name, r.name))).collect();
    let body = match cfg.format_or(Format::Json) {
        Format::Csv => reports_csv(&suites),
        Format::Json => {
            let (reports, diagnostics) = suites_json(&suites);
            let work: Vec<Value> =
                suites.iter().map(|s| json!({ "suite": s.name, "reports": s.reports.len(), "cases": s.cases() })).collect();
            json_text(&json!({
                "config": cfg.to_json(),
                "reports": reports,
                "diagnostics": diagnostics,
                "timing": {
                    "unit": "cases",
                    "note": "deterministic work counts; wall-clock time is not recorded so that reports are reproducible",
                    "suites": work,
                },
            }))
        }
    };
    let mut summary = vec![format!("{} of {total} checks passed (seed {})", total - failed.len(), cfg.seed)];
    summary.extend(failed.iter().map(|f| format!("FAILED {f}")));
    for s in &suites {
        for d in &s.diagnostics {
            let vals: Vec<String> = d.values.iter().map(|(k, v)| format!("{k}={v:.6}")).collect();
            summary.push(format!("note [{}] {}: {}", d.name, vals.join(" "), d.message));
        }
    }
    Ok(CommandOutput { body, summary, pass })
}

/// The product rule at `cfg.level`, or a Monte Carlo rule when `cfg.mc > 0`.
pub fn rule(cfg: &RunConfig) -> Result<CommandOutput, CommandError> {
    let rule = if cfg.mc > 0 { mc_rule(cfg.dim, cfg.mc, cfg.seed)? } else { product_rule(cfg.dim, cfg.level)? };
    let summary = vec![format!("{} rule, {} nodes", rule.kind().as_str(), rule.len())];
    Ok(CommandOutput { body: rule_text(&rule), summary, pass: true })
}
