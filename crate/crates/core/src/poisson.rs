//! Poisson–Szegő kernel and Poisson integrals of boundary data.
//!
//! Conventions: `∂/∂z = ½(∂/∂x − i∂/∂y)`, `∂/∂z̄ = ½(∂/∂x + i∂/∂y)`. For a real
//! function the Euclidean gradient in interleaved coordinates is
//! `(∂h/∂x_j, ∂h/∂y_j) = 2(Re, Im)(∂h/∂z̄_j)`, so `‖∇h‖² = 4Σ_j|∂h/∂z_j|²`.

use alloc::string::String;
use alloc::sync::Arc;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use num_complex::Complex64;

use crate::ball::{self, inner_slices, CPoint, Involution};
use crate::error::{Error, Result};
use crate::quadrature::{integrate_vec, QuadratureRule};
use crate::special::ball_boundary_area;

/// Radius above which field evaluation is refused unless overridden.
pub const DEFAULT_MAX_RADIUS: f64 = 0.95;
/// Default step for first-order finite differences.
pub const DEFAULT_FD_STEP: f64 = 1e-4;
/// Default step for second-order finite differences.
pub const DEFAULT_FD_STEP2: f64 = 1e-3;

pub type Evaluator = Arc<dyn Fn(&[f64]) -> f64 + Send + Sync>;

/// A real function on `∂B^n` with a declared bound on `|f|`.
#[derive(Clone)]
pub struct BoundaryFunction {
    dim: usize,
    eval: Evaluator,
    sup_bound: f64,
    label: String,
    discontinuous: bool,
}

impl fmt::Debug for BoundaryFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("BoundaryFunction")
            .field("dim", &self.dim)
            .field("sup_bound", &self.sup_bound)
            .field("label", &self.label)
            .field("discontinuous", &self.discontinuous)
            .finish()
    }
}

impl BoundaryFunction {
    pub fn new<F>(dim: usize, sup_bound: f64, label: impl Into<String>, f: F) -> Result<Self>
    where
        F: Fn(&[f64]) -> f64 + Send + Sync + 'static,
    {
        if dim < 1 {
            return Err(Error::ZeroDimension);
        }
        if !(sup_bound > 0.0) {
            return Err(Error::domain("sup bound must be positive"));
        }
        Ok(Self { dim, eval: Arc::new(f), sup_bound, label: label.into(), discontinuous: false })
    }

    pub fn constant(dim: usize, value: f64) -> Result<Self> {
        Self::new(dim, libm::fabs(value).max(f64::MIN_POSITIVE), "constant", move |_| value)
    }

    /// Marks the data as having jumps; tolerances switch to the non-smooth
    /// budget.
    pub fn with_discontinuities(mut self) -> Self {
        self.discontinuous = true;
        self
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn sup_bound(&self) -> f64 {
        self.sup_bound
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn is_discontinuous(&self) -> bool {
        self.discontinuous
    }

    #[inline]
    pub fn evaluate(&self, w: &[f64]) -> f64 {
        (self.eval)(w)
    }

    pub fn evaluator(&self) -> Evaluator {
        self.eval.clone()
    }
}

/// The Poisson–Szegő kernel with the pole `z` fixed.
#[derive(Debug, Clone)]
pub struct KernelAt<'a> {
    z: &'a [f64],
    n: usize,
    one_minus_r2: f64,
    prefactor: f64,
}

impl<'a> KernelAt<'a> {
    pub fn new(z: &'a CPoint) -> Result<Self> {
        let r2 = z.require_interior()?;
        let n = z.dim();
        let sigma = ball_boundary_area(n)?;
        let prefactor = libm::pow(1.0 - r2, n as f64) / sigma;
        Ok(Self { z: z.coords(), n, one_minus_r2: 1.0 - r2, prefactor })
    }

    /// `P_z(w)`.
    #[inline]
    pub fn value(&self, w: &[f64]) -> f64 {
        let d = (Complex64::new(1.0, 0.0) - inner_slices(self.z, w)).norm_sqr();
        self.prefactor / powi(d, self.n)
    }

    /// Writes `∂P_z(w)/∂z̄` as interleaved (Re, Im) pairs and returns
    /// `P_z(w)`.
    #[inline]
    pub fn dbar_into(&self, w: &[f64], out: &mut [f64]) -> f64 {
        let zw = inner_slices(self.z, w);
        let one_minus = Complex64::new(1.0 - zw.re, -zw.im);
        let p = self.prefactor / powi(one_minus.norm_sqr(), self.n);
        // 1 − ⟨w, z⟩ = conj(1 − ⟨z, w⟩)
        let inv = one_minus.conj().inv();
        let np = self.n as f64 * p;
        let a = 1.0 / self.one_minus_r2;
        for j in 0..self.n {
            let wj = Complex64::new(w[2 * j], w[2 * j + 1]) * inv;
            out[2 * j] = np * (wj.re - a * self.z[2 * j]);
            out[2 * j + 1] = np * (wj.im - a * self.z[2 * j + 1]);
        }
        p
    }
}

#[inline]
fn powi(x: f64, n: usize) -> f64 {
    let mut acc = x;
    for _ in 1..n {
        acc *= x;
    }
    acc
}

fn check_pair(z: &CPoint, w: &CPoint) -> Result<()> {
    if z.dim() != w.dim() {
        return Err(Error::DimensionMismatch { expected: z.dim(), got: w.dim() });
    }
    w.require_boundary()
}

/// `P_z(w) = (1/σ(∂B^n)) (1−‖z‖²)^n / |1−⟨z,w⟩|^{2n}`.
pub fn ps_kernel(z: &CPoint, w: &CPoint) -> Result<f64> {
    check_pair(z, w)?;
    Ok(KernelAt::new(z)?.value(w.coords()))
}

/// `∂P_z(w)/∂z̄`, one complex entry per coordinate.
pub fn ps_kernel_dbar(z: &CPoint, w: &CPoint) -> Result<Vec<Complex64>> {
    check_pair(z, w)?;
    let mut out = vec![0.0; 2 * z.dim()];
    KernelAt::new(z)?.dbar_into(w.coords(), &mut out);
    Ok(out.chunks_exact(2).map(|c| Complex64::new(c[0], c[1])).collect())
}

/// `∇P_z(w) · l = 2 Re⟨∂P_z/∂z̄, l⟩`, the derivative of `z ↦ P_z(w)` in the
/// real direction `l`.
pub fn kernel_grad_dot(z: &CPoint, w: &CPoint, l: &CPoint) -> Result<f64> {
    check_pair(z, w)?;
    if l.dim() != z.dim() {
        return Err(Error::DimensionMismatch { expected: z.dim(), got: l.dim() });
    }
    l.require_unit(1e-10)?;
    let mut out = vec![0.0; 2 * z.dim()];
    KernelAt::new(z)?.dbar_into(w.coords(), &mut out);
    Ok(2.0 * ball::real_dot(&out, l.coords()))
}

/// `((1−‖z‖²)/|1−⟨z,η⟩|²)^n`, the density of the pulled-back surface
/// measure under an automorphism sending `z` to the origin.
pub fn boundary_jacobian(z: &CPoint, eta: &CPoint) -> Result<f64> {
    check_pair(z, eta)?;
    let r2 = z.require_interior()?;
    Ok(boundary_jacobian_slice(z.coords(), r2, eta.coords()))
}

#[inline]
pub(crate) fn boundary_jacobian_slice(z: &[f64], r2: f64, eta: &[f64]) -> f64 {
    let d = (Complex64::new(1.0, 0.0) - inner_slices(z, eta)).norm_sqr();
    powi((1.0 - r2) / d, z.len() / 2)
}

/// `max_w P_z(w) · σ = ((1+‖z‖)/(1−‖z‖))^n`, how sharply the kernel peaks.
pub fn peaking_diagnostic(z: &CPoint) -> f64 {
    let r = z.norm();
    libm::pow((1.0 + r) / (1.0 - r), z.dim() as f64)
}

/// Where the rule nodes are placed when integrating against `P_z`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum EvalStrategy {
    /// The rule's own nodes.
    #[default]
    Fixed,
    /// Nodes `φ_z(η_k)` with weights multiplied by the boundary Jacobian
    /// at `η_k`, so the kernel's peak at `ẑ` is resolved at any radius.
    Mobius,
}

impl EvalStrategy {
    pub fn as_str(&self) -> &'static str {
        match self {
            Self::Fixed => "fixed",
            Self::Mobius => "mobius",
        }
    }
}

/// The Poisson integral `h = P[h*]` of boundary data, evaluated with a
/// quadrature rule and an [`EvalStrategy`].
#[derive(Debug, Clone)]
pub struct HarmonicField {
    boundary: BoundaryFunction,
    rule: Arc<QuadratureRule>,
    strategy: EvalStrategy,
    fd_step: f64,
    max_radius: f64,
}

impl HarmonicField {
    pub fn new(boundary: BoundaryFunction, rule: Arc<QuadratureRule>) -> Result<Self> {
        if boundary.dim() != rule.dim() {
            return Err(Error::DimensionMismatch { expected: rule.dim(), got: boundary.dim() });
        }
        Ok(Self { boundary, rule, strategy: EvalStrategy::Fixed, fd_step: DEFAULT_FD_STEP, max_radius: DEFAULT_MAX_RADIUS })
    }

    pub fn with_strategy(mut self, strategy: EvalStrategy) -> Self {
        self.strategy = strategy;
        self
    }

    pub fn strategy(&self) -> EvalStrategy {
        self.strategy
    }

    pub fn with_fd_step(mut self, step: f64) -> Self {
        self.fd_step = step;
        self
    }

    /// Lifts the default refusal to evaluate beyond radius 0.95.
    pub fn allow_near_boundary(mut self) -> Self {
        self.max_radius = 1.0;
        self
    }

    pub fn dim(&self) -> usize {
        self.boundary.dim()
    }

    pub fn boundary(&self) -> &BoundaryFunction {
        &self.boundary
    }

    pub fn rule(&self) -> &Arc<QuadratureRule> {
        &self.rule
    }

    pub fn fd_step(&self) -> f64 {
        self.fd_step
    }

    pub fn sup_bound(&self) -> f64 {
        self.boundary.sup_bound()
    }

    fn check_point(&self, z: &CPoint) -> Result<()> {
        if z.dim() != self.dim() {
            return Err(Error::DimensionMismatch { expected: self.dim(), got: z.dim() });
        }
        z.require_interior()?;
        let r = z.norm();
        if r > self.max_radius {
            return Err(Error::NearBoundary(r));
        }
        Ok(())
    }

    /// Integrates `kernel_part(w) · h*(w)` where `kernel_part` fills
    /// `out.len()` values, checking the declared bound on the way.
    fn integrate_against<K>(&self, z: &CPoint, out: &mut [f64], mut kernel_part: K) -> Result<()>
    where
        K: FnMut(&[f64], &mut [f64]),
    {
        let bound = self.boundary.sup_bound() * (1.0 + 1e-12) + 1e-15;
        let mut index = 0usize;
        let mut violation: Option<Error> = None;
        let mobius = match self.strategy {
            EvalStrategy::Fixed => None,
            EvalStrategy::Mobius => Some((Involution::new(z)?, z.norm_sqr())),
        };
        let mut mapped = vec![0.0; 2 * self.dim()];
        integrate_vec(&self.rule, out, |eta, vals| {
            let (w, jac) = match &mobius {
                None => (eta, 1.0),
                Some((phi, r2)) => {
                    if phi.apply_into(eta, &mut mapped).is_err() {
                        vals.iter_mut().for_each(|v| *v = f64::NAN);
                        return;
                    }
                    (&mapped[..], boundary_jacobian_slice(z.coords(), *r2, eta))
                }
            };
            let hv = self.boundary.evaluate(w);
            if violation.is_none() && !(libm::fabs(hv) <= bound) && hv.is_finite() {
                violation = Some(Error::SupBoundExceeded { node: index, value: hv, bound: self.boundary.sup_bound() });
            }
            kernel_part(w, vals);
            vals.iter_mut().for_each(|v| *v *= hv * jac);
            index += 1;
        })?;
        match violation {
            Some(e) => Err(e),
            None => Ok(()),
        }
    }

    /// `h(z) = ∫ P_z(w) h*(w) dσ(w)`.
    pub fn eval(&self, z: &CPoint) -> Result<f64> {
        self.check_point(z)?;
        let kernel = KernelAt::new(z)?;
        let mut out = [0.0];
        self.integrate_against(z, &mut out, |w, o| o[0] = kernel.value(w))?;
        Ok(out[0])
    }

    /// Wirtinger derivatives `∂h/∂z̄_j = ∫ ∂P_z(w)/∂z̄_j h*(w) dσ(w)`.
    pub fn dbar(&self, z: &CPoint) -> Result<Vec<Complex64>> {
        self.check_point(z)?;
        let kernel = KernelAt::new(z)?;
        let mut out = vec![0.0; 2 * self.dim()];
        self.integrate_against(z, &mut out, |w, o| {
            kernel.dbar_into(w, o);
        })?;
        Ok(out.chunks_exact(2).map(|c| Complex64::new(c[0], c[1])).collect())
    }

    /// Euclidean gradient as a real `2n`-vector, `∇h = 4 Re Σ_j (∂h/∂z̄_j) ∂/∂z_j`.
    pub fn gradient(&self, z: &CPoint) -> Result<Vec<f64>> {
        Ok(self.dbar(z)?.iter().flat_map(|d| [2.0 * d.re, 2.0 * d.im]).collect())
    }

    /// Central finite differences of [`HarmonicField::eval`] with the field's
    /// step.
    pub fn gradient_fd(&self, z: &CPoint) -> Result<Vec<f64>> {
        let h = self.fd_step;
        let mut grad = vec![0.0; 2 * self.dim()];
        let mut p = z.clone().into_coords();
        for (a, g) in grad.iter_mut().enumerate() {
            let x0 = p[a];
            p[a] = x0 + h;
            let fp = self.eval(&CPoint::from_slice(&p)?)?;
            p[a] = x0 - h;
            let fm = self.eval(&CPoint::from_slice(&p)?)?;
            p[a] = x0;
            *g = (fp - fm) / (2.0 * h);
        }
        Ok(grad)
    }

    /// `‖∇_B h(z)‖_B`.
    pub fn bergman_grad_norm(&self, z: &CPoint) -> Result<f64> {
        ball::bergman_grad_norm(z, &self.dbar(z)?)
    }

    /// `Δ_B h(z)` by finite differences of [`HarmonicField::eval`].
    pub fn invariant_laplacian(&self, z: &CPoint, step: f64) -> Result<f64> {
        invariant_laplacian_fd(|p| self.eval(p), z, step)
    }
}

/// `h(z)` for the field.
pub fn poisson_eval(field: &HarmonicField, z: &CPoint) -> Result<f64> {
    field.eval(z)
}

/// `∇h(z)` for the field.
pub fn poisson_gradient(field: &HarmonicField, z: &CPoint) -> Result<Vec<f64>> {
    field.gradient(z)
}

/// The invariant Laplacian
/// `Δ_B f(z) = 4(1−‖z‖²) Σ_{ij} (δ_ij − z_i z̄_j) ∂²f/∂z_i∂z̄_j`
/// with the real Hessian taken by central differences (three-point on the
/// diagonal, four-corner for mixed partials).
pub fn invariant_laplacian_fd<F>(mut f: F, z: &CPoint, step: f64) -> Result<f64>
where
    F: FnMut(&CPoint) -> Result<f64>,
{
    if !(step > 0.0) {
        return Err(Error::domain("finite-difference step must be positive"));
    }
    let r2 = z.require_interior()?;
    if libm::sqrt(r2) + 2.0 * step >= 1.0 {
        return Err(Error::StencilOutside);
    }
    let m = 2 * z.dim();
    let base = z.coords();
    let mut eval_at = |shifts: &[(usize, f64)]| -> Result<f64> {
        let mut p = base.to_vec();
        for &(a, s) in shifts {
            p[a] += s;
        }
        f(&CPoint::new(p)?)
    };
    let f0 = eval_at(&[])?;
    let h = step;
    let mut hess = vec![0.0; m * m];
    for a in 0..m {
        let fp = eval_at(&[(a, h)])?;
        let fm = eval_at(&[(a, -h)])?;
        hess[a * m + a] = (fp - 2.0 * f0 + fm) / (h * h);
        for b in 0..a {
            let fpp = eval_at(&[(a, h), (b, h)])?;
            let fpm = eval_at(&[(a, h), (b, -h)])?;
            let fmp = eval_at(&[(a, -h), (b, h)])?;
            let fmm = eval_at(&[(a, -h), (b, -h)])?;
            let v = (fpp - fpm - fmp + fmm) / (4.0 * h * h);
            hess[a * m + b] = v;
            hess[b * m + a] = v;
        }
    }
    let n = z.dim();
    let mut acc = Complex64::new(0.0, 0.0);
    for i in 0..n {
        for j in 0..n {
            let (xi, yi, xj, yj) = (2 * i, 2 * i + 1, 2 * j, 2 * j + 1);
            // ∂²f/∂z_i∂z̄_j = ¼[(f_{x_i x_j} + f_{y_i y_j}) + i(f_{x_i y_j} − f_{y_i x_j})]
            let w = Complex64::new(hess[xi * m + xj] + hess[yi * m + yj], hess[xi * m + yj] - hess[yi * m + xj]) * 0.25;
            let delta = if i == j { 1.0 } else { 0.0 };
            let coef = Complex64::new(delta, 0.0) - z.component(i) * z.component(j).conj();
            acc += coef * w;
        }
    }
    Ok(4.0 * (1.0 - r2) * acc.re)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quadrature::product_rule;
    use core::f64::consts::PI;

    fn pt(c: &[f64]) -> CPoint {
        CPoint::from_slice(c).unwrap()
    }

    #[test]
    fn kernel_at_origin_is_uniform() {
        let w = pt(&[0.6, 0.0, 0.0, 0.8]);
        let p = ps_kernel(&CPoint::zeros(2), &w).unwrap();
        assert!((p - 1.0 / (2.0 * PI * PI)).abs() < 1e-16);
    }

    #[test]
    fn kernel_value_n1() {
        // (1/2π) · 0.75 / |1 − 0.5|²
        let p = ps_kernel(&pt(&[0.5, 0.0]), &pt(&[1.0, 0.0])).unwrap();
        assert!((p - 3.0 / (2.0 * PI)).abs() < 1e-15);
        assert!(ps_kernel(&pt(&[1.0, 0.0]), &pt(&[1.0, 0.0])).is_err());
        assert!(ps_kernel(&pt(&[0.5, 0.0]), &pt(&[0.9, 0.0])).is_err());
    }

    #[test]
    fn dbar_at_origin() {
        let w = pt(&[0.6, 0.0, 0.0, 0.8]);
        let d = ps_kernel_dbar(&CPoint::zeros(2), &w).unwrap();
        let s = 2.0 / (2.0 * PI * PI);
        assert!((d[0] - Complex64::new(0.6 * s, 0.0)).norm() < 1e-16);
        assert!((d[1] - Complex64::new(0.0, 0.8 * s)).norm() < 1e-16);
    }

    #[test]
    fn grad_dot_at_origin_and_antisymmetry() {
        let w = pt(&[0.6, 0.0, 0.0, 0.8]);
        let l = pt(&[0.0, 0.6, 0.8, 0.0]);
        let z0 = CPoint::zeros(2);
        let v = kernel_grad_dot(&z0, &w, &l).unwrap();
        let sigma = 2.0 * PI * PI;
        let want = 4.0 / sigma * w.real_dot(&l).unwrap();
        assert!((v - want).abs() < 1e-16);
        let z = pt(&[0.1, 0.2, -0.3, 0.1]);
        let a = kernel_grad_dot(&z, &w, &l).unwrap();
        let b = kernel_grad_dot(&z, &w, &l.neg()).unwrap();
        assert_eq!(a, -b);
        assert!(kernel_grad_dot(&z, &w, &l.scale(1.1)).is_err());
    }

    #[test]
    fn boundary_jacobian_at_origin() {
        let eta = pt(&[0.0, 1.0, 0.0, 0.0]);
        assert_eq!(boundary_jacobian(&CPoint::zeros(2), &eta).unwrap(), 1.0);
    }

    #[test]
    fn laplacian_of_pluriharmonic_and_of_norm_squared() {
        let z1 = pt(&[0.3, -0.2]);
        let lap = invariant_laplacian_fd(|p| Ok(p.coords()[0]), &z1, 1e-3).unwrap();
        assert!(lap.abs() < 1e-9);
        let z2 = pt(&[0.3, -0.2, 0.1, 0.25]);
        let got = invariant_laplacian_fd(|p| Ok(p.norm_sqr()), &z2, 1e-3).unwrap();
        let r2 = z2.norm_sqr();
        let want = 4.0 * (1.0 - r2) * (2.0 - r2);
        assert!((got - want).abs() < 1e-7, "{got} vs {want}");
        assert!(matches!(invariant_laplacian_fd(|p| Ok(p.norm_sqr()), &pt(&[0.999, 0.0]), 1e-3), Err(Error::StencilOutside)));
    }

    #[test]
    fn field_refuses_near_boundary_by_default() {
        let rule = Arc::new(product_rule(1, 16).unwrap());
        let field = HarmonicField::new(BoundaryFunction::constant(1, 1.0).unwrap(), rule).unwrap();
        assert!(matches!(field.eval(&pt(&[0.96, 0.0])), Err(Error::NearBoundary(_))));
        let field = field.allow_near_boundary();
        assert!(field.eval(&pt(&[0.96, 0.0])).is_ok());
    }

    #[test]
    fn sup_bound_violation_is_reported() {
        let rule = Arc::new(product_rule(1, 16).unwrap());
        let bf = BoundaryFunction::new(1, 0.5, "too big", |w| w[0]).unwrap();
        let field = HarmonicField::new(bf, rule).unwrap();
        assert!(matches!(field.eval(&CPoint::zeros(1)), Err(Error::SupBoundExceeded { .. })));
    }

    #[test]
    fn odd_data_vanishes_at_center() {
        let rule = Arc::new(product_rule(2, 8).unwrap());
        let bf = BoundaryFunction::new(2, 1.0, "Re w1", |w| w[0]).unwrap();
        let field = HarmonicField::new(bf, rule).unwrap();
        assert!(field.eval(&CPoint::zeros(2)).unwrap().abs() < 1e-15);
    }

    #[test]
    fn peaking_diagnostic_value() {
        assert!((peaking_diagnostic(&pt(&[0.5, 0.0, 0.0, 0.0])) - 9.0).abs() < 1e-12);
    }

    #[test]
    fn mobius_strategy_agrees_with_fixed_rule() {
        let rule = Arc::new(product_rule(2, 24).unwrap());
        let bf = BoundaryFunction::new(2, 2.0, "smooth", |w| w[0] * w[3] - 0.5 * w[1] + w[2] * w[2]).unwrap();
        let fixed = HarmonicField::new(bf, rule).unwrap();
        let mobius = fixed.clone().with_strategy(EvalStrategy::Mobius);
        let z = pt(&[0.3, -0.2, 0.1, 0.25]);
        assert!((fixed.eval(&z).unwrap() - mobius.eval(&z).unwrap()).abs() < 1e-10);
        let (a, b) = (fixed.gradient(&z).unwrap(), mobius.gradient(&z).unwrap());
        assert!(a.iter().zip(&b).all(|(x, y)| (x - y).abs() < 1e-8), "{a:?} {b:?}");
    }

    #[test]
    fn change_of_variables_preserves_integrals() {
        let rule = product_rule(2, 24).unwrap();
        let z = pt(&[0.4, 0.1, -0.2, 0.3]);
        let phi = Involution::new(&z).unwrap();
        let f = |w: &[f64]| 1.0 + w[0] * w[0] - w[1] * w[3] + 0.3 * w[2];
        let direct = crate::quadrature::integrate(&rule, f).unwrap();
        let pulled = crate::quadrature::integrate(&rule, |eta| {
            let mut w = [0.0; 4];
            phi.apply_into(eta, &mut w).unwrap();
            f(&w) * boundary_jacobian_slice(z.coords(), z.norm_sqr(), eta)
        })
        .unwrap();
        assert!((direct - pulled).abs() < 1e-6 * direct.abs(), "{direct} {pulled}");
    }
}
