//! Structured results of checked inequalities.

use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;

use crate::poisson::BoundaryFunction;
use crate::quadrature::QuadratureRule;

/// Acceptance tolerances. `smooth` is absolute, `nonsmooth` relative.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerances {
    pub smooth: f64,
    pub nonsmooth: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self { smooth: 1e-4, nonsmooth: 1e-3 }
    }
}

impl Tolerances {
    /// The absolute tolerance to apply to a quantity of size `scale` computed
    /// from the given boundary data.
    pub fn for_boundary(&self, boundary: &BoundaryFunction, scale: f64) -> f64 {
        if boundary.is_discontinuous() {
            self.nonsmooth * libm::fabs(scale).max(1.0)
        } else {
            self.smooth
        }
    }
}

/// One checked inequality `lhs ≤ rhs`, with `slack = rhs − lhs`.
#[derive(Debug, Clone, PartialEq)]
pub struct VerificationReport {
    pub name: String,
    pub lhs: f64,
    pub rhs: f64,
    pub slack: f64,
    pub tolerance: f64,
    pub metadata: Vec<(String, String)>,
    pub pass: bool,
}

impl VerificationReport {
    pub fn new(name: impl Into<String>, lhs: f64, rhs: f64, tolerance: f64) -> Self {
        Self::with_slack(name, lhs, rhs, rhs - lhs, tolerance)
    }

    /// For checks whose slack is not simply `rhs − lhs` (two-sided chains).
    pub fn with_slack(name: impl Into<String>, lhs: f64, rhs: f64, slack: f64, tolerance: f64) -> Self {
        Self { name: name.into(), lhs, rhs, slack, tolerance, metadata: Vec::new(), pass: slack >= -tolerance }
    }

    /// A two-sided check `|lhs − rhs| ≤ tolerance`.
    pub fn agreement(name: impl Into<String>, lhs: f64, rhs: f64, tolerance: f64) -> Self {
        let slack = -libm::fabs(lhs - rhs);
        Self::with_slack(name, lhs, rhs, slack, tolerance)
    }

    pub fn with_meta(mut self, key: &str, value: impl ToString) -> Self {
        self.metadata.push((key.into(), value.to_string()));
        self
    }

    pub fn with_meta_f64(self, key: &str, value: f64) -> Self {
        self.with_meta(key, format!("{value:.16e}"))
    }

    pub fn with_meta_point(self, key: &str, coords: &[f64]) -> Self {
        let s: Vec<String> = coords.iter().map(|c| format!("{c:.16e}")).collect();
        self.with_meta(key, s.join(","))
    }

    /// Records the rule kind, its level or sample count and the seed.
    pub fn with_rule(self, rule: &QuadratureRule) -> Self {
        let r = self.with_meta("rule", rule.kind().as_str()).with_meta("rule_size", rule.size_parameter());
        match rule.seed() {
            Some(seed) => r.with_meta("seed", seed),
            None => r,
        }
    }

    pub fn meta(&self, key: &str) -> Option<&str> {
        self.metadata.iter().find(|(k, _)| k == key).map(|(_, v)| v.as_str())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pass_follows_slack() {
        let r = VerificationReport::new("x", 1.0, 1.0 - 1e-5, 1e-4);
        assert!(r.pass);
        assert!((r.slack + 1e-5).abs() < 1e-15);
        assert!(!VerificationReport::new("x", 1.0, 0.9, 1e-4).pass);
        assert!(!VerificationReport::agreement("x", 1.0, 1.1, 1e-4).pass);
        assert!(VerificationReport::agreement("x", 1.0, 1.0 + 1e-6, 1e-4).pass);
    }

    #[test]
    fn metadata_lookup() {
        let r = VerificationReport::new("x", 0.0, 1.0, 0.0).with_meta("n", 2).with_meta_f64("r", 0.5);
        assert_eq!(r.meta("n"), Some("2"));
        assert_eq!(r.meta("r"), Some("5.0000000000000000e-1"));
        assert_eq!(r.meta("missing"), None);
    }
}
