//! Consequences of the sharp gradient estimate: the Bergman-gradient bound,
//! the Lipschitz estimate for the Bergman distance and the operator-norm
//! bound for vector-valued maps.

use alloc::format;
use alloc::sync::Arc;
use alloc::vec;
use alloc::vec::Vec;

use crate::ball::{self, hyperbolic_distance, CPoint};
use crate::error::{Error, Result};
use crate::poisson::HarmonicField;
use crate::report::{Tolerances, VerificationReport};
use crate::sharpness::sharp_constant;

/// Iteration cap for the power method.
pub const POWER_MAX_ITER: usize = 1000;

/// `2Γ(n+1) / (√(π(n+1)) Γ(n+½))`.
pub fn bergman_constant(n: usize) -> Result<f64> {
    Ok(sharp_constant(n)? / libm::sqrt((n + 1) as f64))
}

fn require_bounded(field: &HarmonicField) -> Result<()> {
    if field.sup_bound() > 1.0 {
        return Err(Error::Hypothesis(format!("sup bound {} exceeds 1", field.sup_bound())));
    }
    Ok(())
}

/// `a ≤ ‖∇_B h(z)‖_B ≤ c` with `a = (1−‖z‖²)‖∇h(z)‖/(2√(n+1))`.
///
/// The report carries `lhs = b`, `rhs = c` and `slack = min(c − b, b − a)`;
/// `a` and the ratio `b/c` are in the metadata.
pub fn bergman_bound_check(field: &HarmonicField, z: &CPoint, tol: &Tolerances) -> Result<VerificationReport> {
    require_bounded(field)?;
    let r2 = z.require_interior()?;
    let n = z.dim();
    let dbar = field.dbar(z)?;
    let grad_norm = 2.0 * libm::sqrt(dbar.iter().map(|d| d.norm_sqr()).sum::<f64>());
    let a = (1.0 - r2) * grad_norm / (2.0 * libm::sqrt((n + 1) as f64));
    let b = ball::bergman_grad_norm(z, &dbar)?;
    let c = bergman_constant(n)?;
    let t = tol.for_boundary(field.boundary(), c);
    Ok(VerificationReport::with_slack("bergman_bound", b, c, (c - b).min(b - a), t)
        .with_meta("n", n)
        .with_meta_point("z", z.coords())
        .with_meta_f64("a", a)
        .with_meta_f64("b_over_c", b / c)
        .with_meta("boundary", field.boundary().label())
        .with_rule(field.rule()))
}

/// `|h(z) − h(w)| ≤ c · d(z, w)` with `d = √(n+1) atanh ‖φ_z(w)‖`.
pub fn lipschitz_check(field: &HarmonicField, z: &CPoint, w: &CPoint, tol: &Tolerances) -> Result<VerificationReport> {
    require_bounded(field)?;
    let lhs = libm::fabs(field.eval(z)? - field.eval(w)?);
    let d = hyperbolic_distance(z, w)?;
    let rhs = bergman_constant(z.dim())? * d;
    let t = tol.for_boundary(field.boundary(), 1.0);
    Ok(VerificationReport::new("lipschitz", lhs, rhs, t)
        .with_meta("n", z.dim())
        .with_meta_point("z", z.coords())
        .with_meta_point("w", w.coords())
        .with_meta_f64("distance", d)
        .with_meta("boundary", field.boundary().label())
        .with_rule(field.rule()))
}

/// `H = (h_1, …, h_m)` with components on a common rule.
#[derive(Debug, Clone)]
pub struct VectorField {
    components: Vec<HarmonicField>,
}

impl VectorField {
    pub fn new(components: Vec<HarmonicField>) -> Result<Self> {
        let first = components.first().ok_or_else(|| Error::domain("a vector field needs a component"))?;
        for h in &components[1..] {
            if h.dim() != first.dim() {
                return Err(Error::DimensionMismatch { expected: first.dim(), got: h.dim() });
            }
            if !Arc::ptr_eq(h.rule(), first.rule()) && h.rule() != first.rule() {
                return Err(Error::domain("components must share a quadrature rule"));
            }
        }
        Ok(Self { components })
    }

    pub fn dim(&self) -> usize {
        self.components[0].dim()
    }

    pub fn len(&self) -> usize {
        self.components.len()
    }

    pub fn is_empty(&self) -> bool {
        self.components.is_empty()
    }

    pub fn components(&self) -> &[HarmonicField] {
        &self.components
    }

    pub fn values(&self, z: &CPoint) -> Result<Vec<f64>> {
        self.components.iter().map(|h| h.eval(z)).collect()
    }

    /// The `m × 2n` real Jacobian, one component gradient per row.
    pub fn jacobian(&self, z: &CPoint) -> Result<Vec<Vec<f64>>> {
        self.components.iter().map(|h| h.gradient(z)).collect()
    }
}

/// Largest singular value of a real matrix given by rows, by power
/// iteration on `JᵀJ` from the normalised all-ones vector. If that start
/// is (nearly) orthogonal to the top singular vector the iteration is
/// rerun from the longest row.
pub fn largest_singular_value(rows: &[Vec<f64>]) -> Result<f64> {
    let cols = rows.first().map(|r| r.len()).ok_or_else(|| Error::domain("empty matrix"))?;
    if rows.iter().any(|r| r.len() != cols) {
        return Err(Error::domain("ragged matrix"));
    }
    let mut gram = vec![0.0; cols * cols];
    for r in rows {
        for i in 0..cols {
            for j in 0..cols {
                gram[i * cols + j] += r[i] * r[j];
            }
        }
    }
    let start = vec![1.0 / libm::sqrt(cols as f64); cols];
    let mut best = power_iteration(&gram, cols, start);
    let longest = rows.iter().map(|r| ball::norm_sqr(r)).enumerate().fold((0, 0.0), |acc, (k, v)| if v > acc.1 { (k, v) } else { acc });
    if best < longest.1 * (1.0 - 1e-12) {
        let r = &rows[longest.0];
        let norm = libm::sqrt(longest.1);
        best = best.max(power_iteration(&gram, cols, r.iter().map(|x| x / norm).collect()));
    }
    Ok(libm::sqrt(best.max(0.0)))
}

/// Top eigenvalue of a symmetric positive semidefinite matrix.
fn power_iteration(a: &[f64], d: usize, mut x: Vec<f64>) -> f64 {
    let mut y = vec![0.0; d];
    let mut lambda = 0.0;
    for _ in 0..POWER_MAX_ITER {
        for i in 0..d {
            y[i] = (0..d).map(|j| a[i * d + j] * x[j]).sum();
        }
        let rayleigh = ball::real_dot(&x, &y);
        let norm = libm::sqrt(ball::norm_sqr(&y));
        if norm == 0.0 {
            return 0.0;
        }
        x.iter_mut().zip(&y).for_each(|(xi, yi)| *xi = yi / norm);
        let done = libm::fabs(rayleigh - lambda) <= 1e-15 * rayleigh.max(f64::MIN_POSITIVE);
        lambda = rayleigh;
        if done {
            break;
        }
    }
    lambda
}

/// `‖DH(z)‖_op ≤ C_n / (1−‖z‖²)` for `‖H‖ ≤ 1`.
pub fn operator_norm_check(h: &VectorField, z: &CPoint, tol: &Tolerances) -> Result<VerificationReport> {
    let r2 = z.require_interior()?;
    let discontinuous = h.components.iter().any(|c| c.boundary().is_discontinuous());
    let t = if discontinuous { tol.nonsmooth } else { tol.smooth };
    let value_norm = libm::sqrt(ball::norm_sqr(&h.values(z)?));
    if value_norm > 1.0 + t {
        return Err(Error::Hypothesis(format!("‖H(z)‖ = {value_norm} exceeds 1")));
    }
    let lhs = largest_singular_value(&h.jacobian(z)?)?;
    let rhs = sharp_constant(z.dim())? / (1.0 - r2);
    let t = if discontinuous { tol.nonsmooth * rhs } else { tol.smooth / (1.0 - r2) };
    Ok(VerificationReport::new("operator_norm", lhs, rhs, t)
        .with_meta("n", z.dim())
        .with_meta("m", h.len())
        .with_meta_point("z", z.coords())
        .with_meta_f64("value_norm", value_norm)
        .with_rule(h.components[0].rule()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poisson::BoundaryFunction;
    use crate::quadrature::product_rule;

    #[test]
    fn bergman_constants() {
        let want = [0.900_316_316_157_106_069_56, 0.980_140_258_527_630_310_24, 1.018_591_635_788_130_148_9];
        for (k, w) in want.iter().enumerate() {
            assert!((bergman_constant(k + 1).unwrap() - w).abs() < 1e-14);
        }
    }

    #[test]
    fn singular_values() {
        let rows = vec![vec![3.0, 0.0], vec![0.0, 4.0]];
        assert!((largest_singular_value(&rows).unwrap() - 4.0).abs() < 1e-12);
        // start vector orthogonal to the only nonzero direction
        let rows = vec![vec![1.0, -1.0]];
        assert!((largest_singular_value(&rows).unwrap() - libm::sqrt(2.0)).abs() < 1e-14);
        let rows = vec![vec![0.0, 0.0]];
        assert_eq!(largest_singular_value(&rows).unwrap(), 0.0);
        let g = [0.3, -0.2, 0.5, 0.1];
        let (c, s) = (libm::cos(0.7), libm::sin(0.7));
        let rows = vec![g.iter().map(|x| x * c).collect(), g.iter().map(|x| x * s).collect()];
        let want = libm::sqrt(ball::norm_sqr(&g));
        assert!((largest_singular_value(&rows).unwrap() - want).abs() < 1e-14);
    }

    #[test]
    fn constant_field_reports() {
        let rule = Arc::new(product_rule(2, 32).unwrap());
        let f = HarmonicField::new(BoundaryFunction::constant(2, 0.5).unwrap(), rule).unwrap();
        let z = CPoint::from_slice(&[0.2, 0.1, 0.0, -0.3]).unwrap();
        let tol = Tolerances::default();
        let r = bergman_bound_check(&f, &z, &tol).unwrap();
        assert!(r.pass);
        assert!(r.lhs < 1e-12);
        let r = lipschitz_check(&f, &z, &z, &tol).unwrap();
        assert!(r.pass && r.lhs == 0.0 && r.rhs == 0.0);
    }
}
