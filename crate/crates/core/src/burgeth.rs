//! The Schwarz-type envelope
//! `M_c^n(r) = 2 ∫ 𝟙_{S(c,ẑ)} P_{rẑ} dσ − 1`
//! and the domination check `h(z) ≤ M_c^n(‖z‖)` with `c = (h(0)+1)/2`.

use alloc::format;
use alloc::sync::Arc;
use alloc::vec::Vec;
use core::f64::consts::PI;

use crate::ball::CPoint;
use crate::error::{Error, Result};
use crate::poisson::{BoundaryFunction, HarmonicField};
use crate::quad1d::{self, GaussLegendre};
use crate::quadrature::{cap_alpha, zonal_rule, CapSpec, QuadratureRule};
use crate::report::{Tolerances, VerificationReport};
use crate::special::gamma;

/// Gauss points per axis for [`m_double_integral`].
pub const DOUBLE_INTEGRAL_LEVEL: usize = 96;
/// Degenerate-data threshold for `|h(0)|`.
pub const DEGENERATE_TOL: f64 = 1e-9;

/// How a curve was computed.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BurgethMethod {
    IndicatorQuadrature,
    ClosedFormN1,
    DoubleIntegral,
}

impl BurgethMethod {
    pub fn as_str(&self) -> &'static str {
        match self {
            Self::IndicatorQuadrature => "indicator-quadrature",
            Self::ClosedFormN1 => "closed-form-n1",
            Self::DoubleIntegral => "double-integral",
        }
    }
}

/// `r ↦ M_c^n(r)` sampled on a radius grid.
#[derive(Debug, Clone, PartialEq)]
pub struct BurgethCurve {
    pub n: usize,
    pub c: f64,
    pub radii: Vec<f64>,
    pub values: Vec<f64>,
    pub method: BurgethMethod,
}

fn check_c_r(c: f64, r: f64) -> Result<()> {
    if !(c > 0.0 && c < 1.0) {
        return Err(Error::domain("cap measure must lie in (0, 1)"));
    }
    if !(0.0..1.0).contains(&r) {
        return Err(Error::domain("radius must lie in [0, 1)"));
    }
    Ok(())
}

/// `w ↦ 1` on the open cap, `0` elsewhere.
pub fn cap_indicator(spec: &CapSpec) -> Result<BoundaryFunction> {
    let s = spec.clone();
    let label = format!("cap(c={}, center={:?})", spec.c, spec.center.coords());
    Ok(BoundaryFunction::new(spec.dim(), 1.0, label, move |w| if s.contains(w) { 1.0 } else { 0.0 })?.with_discontinuities())
}

/// `2 h(r e_1) − 1` for `h` the Poisson integral of the cap indicator
/// centred at `e_1`, integrated with `rule`.
pub fn m_envelope(n: usize, c: f64, r: f64, rule: Arc<QuadratureRule>) -> Result<f64> {
    check_c_r(c, r)?;
    let spec = CapSpec::new(CPoint::basis(n, 0), c)?;
    let field = HarmonicField::new(cap_indicator(&spec)?, rule)?;
    Ok(2.0 * field.eval(&CPoint::radial(n, r))? - 1.0)
}

/// [`m_envelope`] with a zonal rule split at the cap boundary.
pub fn m_envelope_zonal(n: usize, c: f64, r: f64, level: usize) -> Result<f64> {
    check_c_r(c, r)?;
    let rule = zonal_rule(n, level, Some(cap_alpha(n, c)?))?;
    m_envelope(n, c, r, Arc::new(rule))
}

/// `(4/π) atan((1+r)/(1−r) · tan(α/2)) − 1` with `α = πc`.
pub fn m_closed_n1(c: f64, r: f64) -> Result<f64> {
    check_c_r(c, r)?;
    let alpha = PI * c;
    Ok(4.0 / PI * libm::atan((1.0 + r) / (1.0 - r) * libm::tan(0.5 * alpha)) - 1.0)
}

/// The `n ≥ 2` reduction
/// `2Γ(n)(1−r²)^n/(πΓ(n−1)) ∫_0^α ∫_0^π sin^{2n−2}θ₁ sin^{2n−3}θ₂ /
/// [(1−r cos θ₁)² + (r sin θ₁ cos θ₂)²]^n dθ₂ dθ₁ − 1`
/// by a tensor Gauss–Legendre rule with `level` points per axis.
pub fn m_double_integral(n: usize, c: f64, r: f64, level: usize) -> Result<f64> {
    if n < 2 {
        return Err(Error::domain("the double-integral form needs n >= 2"));
    }
    check_c_r(c, r)?;
    if level < 2 {
        return Err(Error::domain("level must be at least 2"));
    }
    let alpha = cap_alpha(n, c)?;
    let nf = n as f64;
    let pre = 2.0 * gamma(nf)? * libm::pow(1.0 - r * r, nf) / (PI * gamma(nf - 1.0)?);
    let gl = GaussLegendre::new(level);
    let inner: Vec<(f64, f64, f64)> =
        gl.on_interval(0.0, PI).map(|(t, w)| (libm::cos(t), w * libm::pow(libm::sin(t), 2.0 * nf - 3.0), t)).collect();
    let total = gl.integrate(0.0, alpha, |t1| {
        let (s1, c1) = (libm::sin(t1), libm::cos(t1));
        let a = 1.0 - r * c1;
        let mut acc = crate::sum::CompensatedSum::new();
        for &(c2, w2, _) in &inner {
            let b = r * s1 * c2;
            acc.add(w2 / libm::pow(a * a + b * b, nf));
        }
        libm::pow(s1, 2.0 * nf - 2.0) * acc.value()
    });
    Ok(pre * total - 1.0)
}

/// `M_c^n(r)` by the closed form (`n = 1`) or the double integral.
pub fn m_reference(n: usize, c: f64, r: f64) -> Result<f64> {
    if n == 1 {
        m_closed_n1(c, r)
    } else {
        m_double_integral(n, c, r, DOUBLE_INTEGRAL_LEVEL)
    }
}

/// Evaluates a curve. `level` is the zonal-rule level for
/// [`BurgethMethod::IndicatorQuadrature`] and the per-axis level for
/// [`BurgethMethod::DoubleIntegral`].
pub fn burgeth_curve(n: usize, c: f64, radii: &[f64], method: BurgethMethod, level: usize) -> Result<BurgethCurve> {
    let values = radii
        .iter()
        .map(|&r| match method {
            BurgethMethod::IndicatorQuadrature => m_envelope_zonal(n, c, r, level),
            BurgethMethod::ClosedFormN1 if n == 1 => m_closed_n1(c, r),
            BurgethMethod::ClosedFormN1 => Err(Error::domain("the closed form is for n = 1")),
            BurgethMethod::DoubleIntegral => m_double_integral(n, c, r, level),
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(BurgethCurve { n, c, radii: radii.to_vec(), values, method })
}

/// `h(z) ≤ M_c^n(‖z‖)` with `c = (h(0)+1)/2`.
pub fn schwarz_check(field: &HarmonicField, z: &CPoint, tol: &Tolerances) -> Result<VerificationReport> {
    if field.sup_bound() > 1.0 {
        return Err(Error::Hypothesis(format!("sup bound {} exceeds 1", field.sup_bound())));
    }
    z.require_interior()?;
    let n = field.dim();
    let a = field.eval(&CPoint::zeros(n))?;
    if libm::fabs(a) >= 1.0 - DEGENERATE_TOL {
        return Err(Error::Degenerate(format!("h(0) = {a} is within {DEGENERATE_TOL} of ±1")));
    }
    let c = 0.5 * (a + 1.0);
    let lhs = field.eval(z)?;
    let rhs = m_reference(n, c, z.norm())?;
    let t = tol.nonsmooth * libm::fabs(rhs).max(1.0);
    Ok(VerificationReport::new("schwarz", lhs, rhs, t)
        .with_meta("n", n)
        .with_meta_point("z", z.coords())
        .with_meta_f64("h0", a)
        .with_meta_f64("c", c)
        .with_meta("boundary", field.boundary().label())
        .with_rule(field.rule()))
}

/// Largest value of `2∫ f P_{re_1} dσ − 1` over `0 ≤ f ≤ 1` with
/// `∫ f dσ/σ = c`, attained by the indicator of a superlevel set
/// `{w : |1 − r w_1| < ρ}` of the kernel. Returns `(value, ρ)`.
///
/// Computed in the `w_1` disk, where `w_1` has density
/// `(n−1)/π (1−|u|²)^{n−2}` for `n ≥ 2`; the disk is swept by circles
/// `|1 − r u| = t` for `t ∈ [1−r, 1+r]`. Requires `n ≥ 2` and `r > 0`.
pub fn superlevel_envelope(n: usize, c: f64, r: f64) -> Result<(f64, f64)> {
    if n < 2 {
        return Err(Error::domain("superlevel envelope needs n >= 2"));
    }
    check_c_r(c, r)?;
    if r == 0.0 {
        return Err(Error::domain("superlevel envelope needs r > 0"));
    }
    let nf = n as f64;
    let tol = 1e-13;
    // measure density of the circle |1 − r u| = t inside the disk
    let density = |t: f64| -> f64 {
        let kappa = ((1.0 + t * t - r * r) / (2.0 * t)).clamp(-1.0, 1.0);
        let b0 = libm::acos(kappa);
        let arc = if n == 2 {
            2.0 * b0
        } else {
            quad1d::adaptive(
                |b| {
                    let u2 = (1.0 + t * t - 2.0 * t * libm::cos(b)) / (r * r);
                    libm::pow((1.0 - u2).max(0.0), nf - 2.0)
                },
                -b0,
                b0,
                tol,
            )
        };
        (nf - 1.0) / PI * arc * t / (r * r)
    };
    let (lo, hi) = (1.0 - r, 1.0 + r);
    let measure = |rho: f64| quad1d::adaptive(density, lo, rho, tol);
    let (mut a, mut b) = (lo, hi);
    for _ in 0..80 {
        let mid = 0.5 * (a + b);
        if measure(mid) < c {
            a = mid;
        } else {
            b = mid;
        }
    }
    let rho = 0.5 * (a + b);
    let k = libm::pow(1.0 - r * r, nf);
    let value = quad1d::adaptive(|t| density(t) * k / libm::pow(t, 2.0 * nf), lo, rho, tol);
    Ok((2.0 * value - 1.0, rho))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quadrature::product_rule;

    #[test]
    fn closed_form_anchors() {
        assert!((m_closed_n1(0.5, 0.5).unwrap() - 0.590_334_470_601_733_096_7).abs() < 1e-15);
        for c in [0.1, 0.3, 0.77] {
            assert!((m_closed_n1(c, 0.0).unwrap() - (2.0 * c - 1.0)).abs() < 1e-15);
        }
        for r in [0.1, 0.4, 0.9] {
            let want = 4.0 / PI * libm::atan(r);
            assert!((m_closed_n1(0.5, r).unwrap() - want).abs() < 1e-14);
        }
        assert!(m_closed_n1(0.5, 1.0).is_err());
        assert!(m_closed_n1(1.0, 0.5).is_err());
    }

    #[test]
    fn double_integral_at_origin() {
        for n in 2..=3 {
            for c in [0.2, 0.5, 0.9] {
                let m = m_double_integral(n, c, 0.0, 64).unwrap();
                assert!((m - (2.0 * c - 1.0)).abs() < 1e-10, "n={n} c={c}");
            }
        }
        assert!(m_double_integral(1, 0.5, 0.2, 64).is_err());
    }

    #[test]
    fn indicator_quadrature_matches_closed_form_n1() {
        for (c, r) in [(0.5, 0.5), (0.2, 0.7), (0.8, 0.3)] {
            let m = m_envelope_zonal(1, c, r, 64).unwrap();
            assert!((m - m_closed_n1(c, r).unwrap()).abs() < 1e-10, "c={c} r={r}");
        }
    }

    #[test]
    fn indicator_quadrature_matches_double_integral_n2() {
        let m = m_envelope_zonal(2, 0.5, 0.5, 32).unwrap();
        let d = m_double_integral(2, 0.5, 0.5, 96).unwrap();
        assert!((m - d).abs() < 1e-8, "{m} vs {d}");
        assert!((d - 0.735_736_160_163_944_7).abs() < 1e-9);
    }

    #[test]
    fn cap_indicator_center_and_mass() {
        let spec = CapSpec::new(CPoint::basis(2, 1), 0.25).unwrap();
        let f = cap_indicator(&spec).unwrap();
        assert_eq!(f.evaluate(CPoint::basis(2, 1).coords()), 1.0);
        assert_eq!(f.evaluate(CPoint::basis(2, 0).coords()), 0.0);
        let rule = product_rule(2, 48).unwrap();
        let m = crate::quadrature::integrate(&rule, |w| f.evaluate(w)).unwrap() / rule.sigma();
        assert!((m - 0.25).abs() < 1e-2);
    }

    #[test]
    fn superlevel_set_beats_the_cap_for_n2() {
        let (m, _) = superlevel_envelope(2, 0.5, 0.5).unwrap();
        assert!((m - 0.738_745_139_257_892_1).abs() < 1e-8, "{m}");
        assert!(m > m_double_integral(2, 0.5, 0.5, 96).unwrap());
    }
}
