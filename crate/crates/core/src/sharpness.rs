//! The directional functional `C(z, l) = ∫ |∇P_z(w)·l| dσ(w)`, the sharp
//! constant, extremal boundary data and the radial-direction property.

use alloc::format;
use alloc::sync::Arc;
use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;

use num_complex::Complex64;

use crate::ball::{self, hermitian_inner, inner_slices, CPoint, Involution, Unitary};
use crate::directions::sphere_grid;
use crate::error::{Error, Result};
use crate::poisson::{BoundaryFunction, HarmonicField, KernelAt};
use crate::quadrature::{integrate, integrate_abs_split, product_rule_with, PsiScheme, QuadratureRule};
use crate::report::{Tolerances, VerificationReport};
use crate::special::{ball_boundary_area, gamma};

const UNIT_TOL: f64 = 1e-10;

/// `2Γ(n+1) / (√π Γ(n+½))`, the best constant in
/// `‖∇h(z)‖ (1−‖z‖²) ≤ C_n` for `|h| ≤ 1`.
///
/// ```
/// # use ballharm_core::sharpness::sharp_constant;
/// let c2 = sharp_constant(2).unwrap();
/// assert!((c2 - 16.0 / (3.0 * core::f64::consts::PI)).abs() < 1e-14);
/// ```
pub fn sharp_constant(n: usize) -> Result<f64> {
    if n < 1 {
        return Err(Error::ZeroDimension);
    }
    let nf = n as f64;
    Ok(2.0 * gamma(nf + 1.0)? / (libm::sqrt(PI) * gamma(nf + 0.5)?))
}

fn check_direction(z: &CPoint, l: &CPoint) -> Result<f64> {
    if z.dim() != l.dim() {
        return Err(Error::DimensionMismatch { expected: z.dim(), got: l.dim() });
    }
    l.require_unit(UNIT_TOL)?;
    z.require_interior()
}

/// `v(z, l) = s l + ⟨l, z⟩ z / (1 + s)` with `s = √(1−‖z‖²)`; this is
/// `s l + (1−s)⟨l,z⟩ z/‖z‖²` without the cancellation at small `‖z‖`.
pub fn v_vector(z: &CPoint, l: &CPoint) -> Result<CPoint> {
    let r2 = check_direction(z, l)?;
    let s = libm::sqrt(1.0 - r2);
    let lz = hermitian_inner(l, z)?;
    l.scale(s).add(&z.scale_complex(lz / (1.0 + s)))
}

/// `C(z, l) = 2n‖v‖Γ(n) / ((1−‖z‖²) √π Γ(n+½))`.
pub fn c_closed(z: &CPoint, l: &CPoint) -> Result<f64> {
    let r2 = check_direction(z, l)?;
    let v = v_vector(z, l)?;
    Ok(sharp_constant(z.dim())? * v.norm() / (1.0 - r2))
}

/// `∫ |∇P_z(w)·l| dσ(w)` with the given rule.
pub fn c_quadrature(z: &CPoint, l: &CPoint, rule: &QuadratureRule) -> Result<f64> {
    check_direction(z, l)?;
    if rule.dim() != z.dim() {
        return Err(Error::DimensionMismatch { expected: z.dim(), got: rule.dim() });
    }
    let kernel = KernelAt::new(z)?;
    let lc = l.coords();
    let mut d = vec![0.0; 2 * z.dim()];
    integrate(rule, |w| {
        kernel.dbar_into(w, &mut d);
        libm::fabs(2.0 * ball::real_dot(&d, lc))
    })
}

/// [`c_quadrature`] with the kink-aware rule of
/// [`integrate_abs_split`], its first axis turned towards `l`: the zero set
/// of `∇P_z·l` is located numerically along the first phase axis and never
/// straddled by a Gauss panel.
pub fn c_quadrature_split(z: &CPoint, l: &CPoint, level: usize) -> Result<f64> {
    check_direction(z, l)?;
    let kernel = KernelAt::new(z)?;
    let lc = l.coords();
    let u = Unitary::with_first_column(l)?;
    let mut d = vec![0.0; 2 * z.dim()];
    integrate_abs_split(z.dim(), level, Some(&u), |w| {
        kernel.dbar_into(w, &mut d);
        2.0 * ball::real_dot(&d, lc)
    })
}

/// `2n / (σ (1−‖z‖²)) ∫ |Re⟨η, v(z,l)⟩| dσ(η)` with the given rule.
pub fn c_transformed(z: &CPoint, l: &CPoint, rule: &QuadratureRule) -> Result<f64> {
    let r2 = check_direction(z, l)?;
    if rule.dim() != z.dim() {
        return Err(Error::DimensionMismatch { expected: z.dim(), got: rule.dim() });
    }
    let v = v_vector(z, l)?;
    let vc = v.coords();
    let integral = integrate(rule, |eta| libm::fabs(ball::real_dot(eta, vc)))?;
    let n = z.dim() as f64;
    Ok(2.0 * n / (ball_boundary_area(z.dim())? * (1.0 - r2)) * integral)
}

/// A quadrant-Gauss product rule rotated so that its first complex axis
/// lies along `v(z, l)`. The kink of `|Re⟨η, v⟩|` then falls on the
/// quadrant boundaries of the first phase axis.
pub fn aligned_rule(z: &CPoint, l: &CPoint, level: usize) -> Result<QuadratureRule> {
    let v = v_vector(z, l)?;
    let u = Unitary::with_first_column(&v)?;
    product_rule_with(z.dim(), level, PsiScheme::QuadrantGauss)?.rotated(u)
}

/// [`c_transformed`] with [`aligned_rule`] at the given level.
pub fn c_transformed_aligned(z: &CPoint, l: &CPoint, level: usize) -> Result<f64> {
    c_transformed(z, l, &aligned_rule(z, l, level)?)
}

/// `ẑ = z/‖z‖`, or `e_1` at the origin.
pub fn radial_direction(z: &CPoint) -> CPoint {
    z.normalized().unwrap_or_else(|| CPoint::basis(z.dim(), 0))
}

/// A unit direction with `⟨l, z⟩ = 0` in `n ≥ 2`, and `i ẑ` in `n = 1`.
pub fn tangential_direction(z: &CPoint) -> Result<CPoint> {
    let r = radial_direction(z);
    if z.dim() == 1 {
        return Ok(r.scale_complex(Complex64::new(0.0, 1.0)));
    }
    Unitary::with_first_column(&r)?.apply(&CPoint::basis(z.dim(), 1))
}

/// `h*_{z,l}(w) = sgn(Re⟨φ_z(w), v(z,l)⟩)` with `sgn(0) = +1`.
pub fn extremal_boundary(z: &CPoint, l: &CPoint) -> Result<BoundaryFunction> {
    let v = v_vector(z, l)?;
    let phi = Involution::new(z)?;
    let n = z.dim();
    let vc = v.into_coords();
    let f = move |w: &[f64]| {
        let mut eta = [0.0; 12];
        let eta = &mut eta[..2 * n];
        if phi.apply_into(w, eta).is_err() {
            return f64::NAN;
        }
        if ball::real_dot(eta, &vc) >= 0.0 {
            1.0
        } else {
            -1.0
        }
    };
    Ok(BoundaryFunction::new(n, 1.0, format!("extremal(z={:?}, l={:?})", z.coords(), l.coords()), f)?.with_discontinuities())
}

/// Poisson integral of [`extremal_boundary`].
///
/// With the sign convention above, `∇h_{z,l}(z)·l = −C(z,l)`; the magnitude
/// is what the sharpness statement concerns.
pub fn extremal_field(z: &CPoint, l: &CPoint, rule: Arc<QuadratureRule>) -> Result<HarmonicField> {
    HarmonicField::new(extremal_boundary(z, l)?, rule)
}

/// The values of `l ↦ C(z, l)` over a direction set.
#[derive(Debug, Clone, PartialEq)]
pub struct DirectionalProfile {
    pub z: CPoint,
    pub directions: Vec<CPoint>,
    pub closed_values: Vec<f64>,
    pub quadrature_values: Option<Vec<f64>>,
    pub argmax_index: usize,
    pub argmax_direction: CPoint,
    /// Set at `z = 0`, where every direction attains the maximum.
    pub degenerate: bool,
}

impl DirectionalProfile {
    /// `|⟨argmax, ẑ⟩|`.
    pub fn alignment(&self) -> f64 {
        let zhat = radial_direction(&self.z);
        inner_slices(self.argmax_direction.coords(), zhat.coords()).norm()
    }

    pub fn len(&self) -> usize {
        self.directions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.directions.is_empty()
    }
}

/// Evaluates `C(z, ·)` on the radial axis, a tangential axis and
/// `grid_size` equidistributed directions (in that order), and locates the
/// maximiser. Ties go to the lowest index.
pub fn khavinson_argmax(z: &CPoint, grid_size: usize, rule: Option<&QuadratureRule>) -> Result<DirectionalProfile> {
    z.require_interior()?;
    let degenerate = z.norm() == 0.0;
    let mut directions = vec![radial_direction(z), tangential_direction(z)?];
    directions.extend(sphere_grid(z.dim(), grid_size)?);
    let closed_values = directions.iter().map(|l| c_closed(z, l)).collect::<Result<Vec<_>>>()?;
    let quadrature_values = match rule {
        Some(r) => Some(directions.iter().map(|l| c_quadrature(z, l, r)).collect::<Result<Vec<_>>>()?),
        None => None,
    };
    let mut argmax_index = 0;
    for (k, v) in closed_values.iter().enumerate() {
        if *v > closed_values[argmax_index] {
            argmax_index = k;
        }
    }
    Ok(DirectionalProfile {
        z: z.clone(),
        argmax_direction: directions[argmax_index].clone(),
        directions,
        closed_values,
        quadrature_values,
        argmax_index,
        degenerate,
    })
}

/// `‖∇h(z)‖ (1−‖z‖²) ≤ C_n` for a field with `|h*| ≤ 1`.
pub fn gradient_bound_check(field: &HarmonicField, z: &CPoint, tol: &Tolerances) -> Result<VerificationReport> {
    if field.sup_bound() > 1.0 {
        return Err(Error::Hypothesis(format!("sup bound {} exceeds 1", field.sup_bound())));
    }
    let r2 = z.require_interior()?;
    let grad = field.gradient(z)?;
    let lhs = libm::sqrt(ball::norm_sqr(&grad)) * (1.0 - r2);
    let rhs = sharp_constant(z.dim())?;
    let t = tol.for_boundary(field.boundary(), rhs);
    Ok(VerificationReport::new("gradient_bound", lhs, rhs, t)
        .with_meta("n", z.dim())
        .with_meta_point("z", z.coords())
        .with_meta("boundary", field.boundary().label())
        .with_rule(field.rule()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quadrature::{mc_rule, product_rule};

    fn pt(c: &[f64]) -> CPoint {
        CPoint::from_slice(c).unwrap()
    }

    fn rel(a: f64, b: f64) -> f64 {
        ((a - b) / b).abs()
    }

    // mpmath, 20 digits
    const SHARP: [f64; 6] = [
        1.273_239_544_735_162_686_2,
        1.697_652_726_313_550_248_2,
        2.037_183_271_576_260_297_8,
        2.328_209_453_230_011_769,
        2.586_899_392_477_790_854_4,
        2.822_072_064_521_226_386_6,
    ];

    #[test]
    fn sharp_constants_match_reference() {
        for (k, want) in SHARP.iter().enumerate() {
            assert!(rel(sharp_constant(k + 1).unwrap(), *want) < 1e-13, "n={}", k + 1);
        }
        assert!(rel(sharp_constant(1).unwrap(), 4.0 / PI) < 1e-14);
        assert!(rel(sharp_constant(3).unwrap(), 32.0 / (5.0 * PI)) < 1e-14);
        assert!(sharp_constant(0).is_err());
    }

    #[test]
    fn v_vector_cases() {
        let l = pt(&[0.0, 0.6, 0.8, 0.0]);
        assert!(v_vector(&CPoint::zeros(2), &l).unwrap().max_abs_diff(&l) < 1e-16);
        let z = pt(&[0.3, 0.4, 0.0, 0.0]);
        let v = v_vector(&z, &radial_direction(&z)).unwrap();
        assert!((v.norm() - 1.0).abs() < 1e-15);
        let t = tangential_direction(&z).unwrap();
        let v = v_vector(&z, &t).unwrap();
        assert!(v.max_abs_diff(&t.scale(libm::sqrt(0.75))) < 1e-15);
        assert!(v_vector(&z, &t.scale(2.0)).is_err());
    }

    #[test]
    fn c_closed_values() {
        let z = pt(&[0.5, 0.0, 0.0, 0.0]);
        let c = c_closed(&z, &CPoint::basis(2, 0)).unwrap();
        assert!(rel(c, 2.263_536_968_418_066_997_6) < 1e-14);
        let z1 = pt(&[0.5, 0.0]);
        let c = c_closed(&z1, &pt(&[0.0, 1.0])).unwrap();
        assert!(rel(c, 4.0 / PI / 0.75) < 1e-14);
    }

    #[test]
    fn split_quadrature_matches_closed_form() {
        let c = c_quadrature_split(&CPoint::zeros(1), &pt(&[1.0, 0.0]), 64).unwrap();
        assert!(rel(c, 4.0 / PI) < 1e-10);
        let z = pt(&[0.3, -0.4]);
        let l = pt(&[0.6, 0.8]);
        let c = c_quadrature_split(&z, &l, 64).unwrap();
        assert!(rel(c, c_closed(&z, &l).unwrap()) < 1e-9);
        let z = pt(&[0.3, -0.2, 0.1, 0.25]);
        let l = pt(&[0.0, 0.6, 0.0, 0.8]);
        let c = c_quadrature_split(&z, &l, 32).unwrap();
        assert!(rel(c, c_closed(&z, &l).unwrap()) < 1e-4);
    }

    #[test]
    fn transformed_form_at_origin_and_scaling() {
        let z = CPoint::zeros(2);
        let l = CPoint::basis(2, 0);
        let c = c_transformed_aligned(&z, &l, 32).unwrap();
        assert!(rel(c, sharp_constant(2).unwrap()) < 1e-10);
        let z = pt(&[0.2, 0.1, -0.3, 0.2]);
        let l = pt(&[0.0, 0.6, 0.0, 0.8]);
        let c = c_transformed_aligned(&z, &l, 32).unwrap();
        assert!(rel(c, c_closed(&z, &l).unwrap()) < 1e-10);
    }

    #[test]
    fn product_quadrature_at_origin() {
        // the kink of |Re w_1| limits the uniform ψ rule to O(L⁻²)
        let rule = product_rule(2, 48).unwrap();
        let c = c_quadrature(&CPoint::zeros(2), &CPoint::basis(2, 0), &rule).unwrap();
        assert!(rel(c, 16.0 / (3.0 * PI)) < 1e-3);
    }

    #[test]
    fn extremal_boundary_at_origin() {
        let h = extremal_boundary(&CPoint::zeros(2), &CPoint::basis(2, 0)).unwrap();
        assert!(h.is_discontinuous());
        assert_eq!(h.evaluate(&[0.6, 0.0, 0.0, 0.8]), -1.0);
        assert_eq!(h.evaluate(&[-0.6, 0.0, 0.0, 0.8]), 1.0);
        assert_eq!(h.evaluate(&[0.0, 1.0, 0.0, 0.0]), 1.0);
    }

    #[test]
    fn extremal_field_is_near_sharp() {
        let rule = Arc::new(mc_rule(2, 200_000, 7).unwrap());
        let z = pt(&[0.5, 0.0, 0.0, 0.0]);
        let l = radial_direction(&z);
        let field = extremal_field(&z, &l, rule).unwrap();
        let g = field.gradient(&z).unwrap();
        let along = ball::real_dot(&g, l.coords());
        let c = c_closed(&z, &l).unwrap();
        assert!(along < 0.0);
        assert!(rel(-along, c) < 2e-2, "{along} vs {c}");
    }

    #[test]
    fn khavinson_profile() {
        let z = pt(&[0.5, 0.0, 0.0, 0.0]);
        let p = khavinson_argmax(&z, 1000, None).unwrap();
        assert_eq!(p.len(), 1002);
        assert!(!p.degenerate);
        assert!(p.alignment() >= 1.0 - 1e-9);
        let top = p.closed_values[p.argmax_index] * 0.75;
        assert!(rel(top, sharp_constant(2).unwrap()) < 1e-14);
        let p0 = khavinson_argmax(&CPoint::zeros(2), 50, None).unwrap();
        assert!(p0.degenerate);
        let s = sharp_constant(2).unwrap();
        assert!(p0.closed_values.iter().all(|v| rel(*v, s) < 1e-14));
    }

    #[test]
    fn bound_check_on_constant_field() {
        let rule = Arc::new(product_rule(2, 32).unwrap());
        let f = HarmonicField::new(BoundaryFunction::constant(2, 0.3).unwrap(), rule).unwrap();
        let r = gradient_bound_check(&f, &pt(&[0.1, 0.2, 0.3, 0.0]), &Tolerances::default()).unwrap();
        assert!(r.pass);
        assert!(r.lhs < 1e-12);
        let big = BoundaryFunction::constant(2, 2.0).unwrap();
        let f = HarmonicField::new(big, Arc::new(product_rule(2, 4).unwrap())).unwrap();
        assert!(gradient_bound_check(&f, &CPoint::zeros(2), &Tolerances::default()).is_err());
    }
}
