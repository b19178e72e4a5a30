//! Randomised invariant checks, one function per property. Each returns a
//! single aggregated [`VerificationReport`] whose `lhs` is the worst observed
//! value and whose `rhs` is the bound it must stay under.

use std::f64::consts::PI;
use std::sync::Arc;

use ballharm_core::ball::{self, bergman_metric, bergman_metric_inverse, hyperbolic_distance, lemma_a_pair, mobius, HermitianMatrix};
use ballharm_core::bounds::{bergman_bound_check, largest_singular_value, lipschitz_check, operator_norm_check, VectorField};
use ballharm_core::burgeth::{cap_indicator, m_closed_n1, m_envelope_zonal, m_reference, schwarz_check, superlevel_envelope};
use ballharm_core::poisson::{ps_kernel, ps_kernel_dbar, EvalStrategy, KernelAt};
use ballharm_core::quadrature::{cap_alpha, cap_measure, integrate, mc_rule, product_rule, zonal_rule, CapSpec};
use ballharm_core::sharpness::{
    aligned_rule, c_closed, c_quadrature_split, c_transformed_aligned, extremal_field, gradient_bound_check, khavinson_argmax,
    radial_direction, sharp_constant, tangential_direction, v_vector,
};
use ballharm_core::{BoundaryFunction, CPoint, Complex64, Error, HarmonicField, QuadratureRule, Result, Tolerances, VerificationReport};

use crate::random::Sampler;

/// A non-failing observation reported next to the asserted checks.
#[derive(Debug, Clone, PartialEq)]
pub struct Diagnostic {
    pub name: String,
    pub message: String,
    pub values: Vec<(String, f64)>,
}

/// The reports and diagnostics of one module's checks.
#[derive(Debug, Clone, PartialEq)]
pub struct Suite {
    pub name: String,
    pub reports: Vec<VerificationReport>,
    pub diagnostics: Vec<Diagnostic>,
}

impl Suite {
    pub fn new(name: &str) -> Self {
        Self { name: name.into(), reports: Vec::new(), diagnostics: Vec::new() }
    }

    /// Keeps a report, or turns an error into a failing one.
    pub fn record(&mut self, name: &str, r: Result<VerificationReport>) {
        self.reports.push(r.unwrap_or_else(|e| failed(name, &e)));
    }

    pub fn passed(&self) -> bool {
        self.reports.iter().all(|r| r.pass)
    }

    pub fn report(&self, name: &str) -> Option<&VerificationReport> {
        self.reports.iter().find(|r| r.name == name)
    }

    /// Total number of underlying cases over all reports.
    pub fn cases(&self) -> usize {
        self.reports.iter().map(|r| r.meta("cases").and_then(|c| c.parse().ok()).unwrap_or(1)).sum()
    }
}

pub fn failed(name: &str, e: &Error) -> VerificationReport {
    VerificationReport::with_slack(name, f64::NAN, f64::NAN, f64::NAN, 0.0).with_meta("error", e)
}

/// Running maximum that keeps the first NaN it sees.
#[derive(Debug, Clone)]
pub struct Worst {
    value: f64,
    cases: usize,
    at: String,
}

impl Default for Worst {
    fn default() -> Self {
        Self { value: f64::NEG_INFINITY, cases: 0, at: String::new() }
    }
}

impl Worst {
    pub fn push(&mut self, v: f64, at: impl FnOnce() -> String) {
        self.cases += 1;
        if self.value.is_nan() {
            return;
        }
        if v.is_nan() || v > self.value {
            self.value = v;
            self.at = at();
        }
    }

    pub fn value(&self) -> f64 {
        self.value
    }

    /// `value ≤ bound`.
    pub fn report(&self, name: &str, bound: f64) -> VerificationReport {
        VerificationReport::new(name, self.value, bound, 0.0).with_meta("cases", self.cases).with_meta("worst_at", &self.at)
    }
}

fn coords(p: &CPoint) -> String {
    p.coords().iter().map(|c| format!("{c:.6}")).collect::<Vec<_>>().join(",")
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs().max(f64::MIN_POSITIVE)
}

// ---------------------------------------------------------------- ball

pub fn involution(ns: &[usize], cases: usize, rng: &mut Sampler) -> Result<VerificationReport> {
    let mut worst = Worst::default();
    for k in 0..cases {
        let n = ns[k % ns.len()];
        let a = rng.in_ball(n, 0.95);
        let z = rng.in_ball(n, 0.95);
        let back = mobius(&a, &mobius(&a, &z)?)?;
        worst.push(back.max_abs_diff(&z), || format!("a={} z={}", coords(&a), coords(&z)));
    }
    Ok(worst.report("involution", 1e-10))
}

pub fn lemma_a(ns: &[usize], cases: usize, rng: &mut Sampler) -> Result<VerificationReport> {
    let mut worst = Worst::default();
    for k in 0..cases {
        let n = ns[k % ns.len()];
        let a = rng.in_ball(n, 0.9);
        let z = rng.in_ball(n, 0.9);
        let w = rng.in_ball(n, 0.9);
        let (lhs, rhs) = lemma_a_pair(&a, &z, &w)?;
        worst.push((lhs - rhs).norm() / rhs.norm(), || format!("a={} z={} w={}", coords(&a), coords(&z), coords(&w)));
    }
    Ok(worst.report("lemma_a", 1e-12))
}

pub fn metric_inverse(ns: &[usize], cases: usize, rng: &mut Sampler) -> Result<VerificationReport> {
    let mut worst = Worst::default();
    for k in 0..cases {
        let n = ns[k % ns.len()];
        let z = rng.in_ball(n, 0.95);
        let prod = bergman_metric(&z)?.contract_barred(&bergman_metric_inverse(&z)?);
        worst.push(prod.max_abs_diff(&HermitianMatrix::identity(n)), || coords(&z));
    }
    Ok(worst.report("metric_inverse", 1e-10))
}

/// Symmetry, triangle inequality and Möbius invariance of the distance,
/// as three reports.
pub fn distance_axioms(ns: &[usize], cases: usize, rng: &mut Sampler) -> Result<Vec<VerificationReport>> {
    let (mut sym, mut tri, mut inv) = (Worst::default(), Worst::default(), Worst::default());
    for k in 0..cases {
        let n = ns[k % ns.len()];
        let (z, w, x) = (rng.in_ball(n, 0.9), rng.in_ball(n, 0.9), rng.in_ball(n, 0.9));
        let a = rng.in_ball(n, 0.9);
        let dzw = hyperbolic_distance(&z, &w)?;
        let at = || format!("z={} w={}", coords(&z), coords(&w));
        sym.push((dzw - hyperbolic_distance(&w, &z)?).abs() / dzw.max(1.0), at);
        let excess = hyperbolic_distance(&z, &x)? - dzw - hyperbolic_distance(&w, &x)?;
        tri.push(excess, at);
        let moved = hyperbolic_distance(&mobius(&a, &z)?, &mobius(&a, &w)?)?;
        inv.push((moved - dzw).abs() / dzw.max(1.0), at);
    }
    Ok(vec![sym.report("distance_symmetry", 1e-9), tri.report("distance_triangle", 1e-9), inv.report("distance_mobius_invariance", 1e-9)])
}

/// Interior points stay interior; sphere points stay on the sphere.
pub fn norm_shrink(ns: &[usize], cases: usize, rng: &mut Sampler) -> Result<Vec<VerificationReport>> {
    let (mut inner, mut outer) = (Worst::default(), Worst::default());
    for k in 0..cases {
        let n = ns[k % ns.len()];
        let a = rng.in_ball(n, 0.95);
        let z = rng.in_ball(n, 0.999);
        let zeta = rng.sphere(n);
        inner.push(mobius(&a, &z)?.norm(), || format!("a={} z={}", coords(&a), coords(&z)));
        outer.push((mobius(&a, &zeta)?.norm() - 1.0).abs(), || format!("a={} zeta={}", coords(&a), coords(&zeta)));
    }
    let mut r = inner.report("norm_shrink_interior", 1.0);
    r.pass = r.lhs < 1.0;
    Ok(vec![r, outer.report("norm_shrink_boundary", 1e-10)])
}

/// Largest `|φ_a(0) − a|`, reported as a diagnostic.
pub fn involution_at_origin(ns: &[usize], cases: usize, rng: &mut Sampler) -> Result<Diagnostic> {
    let mut worst = Worst::default();
    for k in 0..cases {
        let n = ns[k % ns.len()];
        let a = rng.in_ball(n, 0.95);
        worst.push(mobius(&a, &CPoint::zeros(n))?.max_abs_diff(&a), String::new);
    }
    Ok(Diagnostic {
        name: "involution_at_origin".into(),
        message: "phi_a swaps 0 and a, so phi_a(0) = a rather than 0"
            .into(),
        values: vec![("max_abs_phi_a0_minus_a".into(), worst.value())],
    })
}

pub fn ball_suite(ns: &[usize], cases: usize, seed: u64) -> Suite {
    let mut s = Suite::new("ball");
    let mut rng = Sampler::new(seed, 1);
    s.record("involution", involution(ns, cases, &mut rng));
    s.record("lemma_a", lemma_a(ns, cases, &mut rng));
    s.record("metric_inverse", metric_inverse(ns, cases, &mut rng));
    push_all(&mut s, "distance_axioms", distance_axioms(ns, cases, &mut rng));
    push_all(&mut s, "norm_shrink", norm_shrink(ns, cases, &mut rng));
    match involution_at_origin(ns, cases, &mut rng) {
        Ok(d) => s.diagnostics.push(d),
        Err(e) => s.record("involution_at_origin", Err(e)),
    }
    s
}

fn push_all(s: &mut Suite, name: &str, r: Result<Vec<VerificationReport>>) {
    match r {
        Ok(v) => s.reports.extend(v),
        Err(e) => s.record(name, Err(e)),
    }
}

// ---------------------------------------------------------- quadrature

pub fn weight_sums(ns: &[usize], levels: &[usize]) -> Result<VerificationReport> {
    let mut worst = Worst::default();
    for &n in ns {
        for &l in levels {
            let rule = product_rule(n, l)?;
            let total = integrate(&rule, |_| 1.0)?;
            worst.push(rel(total, rule.sigma()), || format!("n={n} level={l}"));
        }
    }
    Ok(worst.report("product_weight_sum", 1e-12))
}

pub fn mc_weight_sums(ns: &[usize], samples: usize, seed: u64) -> Result<VerificationReport> {
    let mut worst = Worst::default();
    for &n in ns {
        let rule = mc_rule(n, samples, seed)?;
        worst.push(rel(integrate(&rule, |_| 1.0)?, rule.sigma()), || format!("n={n}"));
    }
    Ok(worst.report("mc_weight_sum", 1e-13).with_meta("seed", seed))
}

/// A fixed smooth test integrand.
fn smooth_test(w: &[f64]) -> f64 {
    (0.4 * w[0] - 0.3 * w[w.len() - 1]).exp() * (1.0 + 0.2 * w[1] * w[1])
}

/// Levels `L` and `L+2` agree on a smooth integrand.
pub fn product_convergence(ns: &[usize], level: usize) -> Result<VerificationReport> {
    let mut worst = Worst::default();
    for &n in ns {
        let a = integrate(&product_rule(n, level)?, smooth_test)?;
        let b = integrate(&product_rule(n, level + 2)?, smooth_test)?;
        worst.push(rel(a, b), || format!("n={n} level={level}"));
    }
    Ok(worst.report("product_convergence", 1e-8))
}

pub fn rotation_invariance(ns: &[usize], level: usize, rng: &mut Sampler) -> Result<VerificationReport> {
    let mut worst = Worst::default();
    for &n in ns {
        let u = rng.unitary(n)?;
        let rule = product_rule(n, level)?;
        let plain = integrate(&rule, smooth_test)?;
        let mut buf = vec![0.0; 2 * n];
        let turned = integrate(&rule, |w| {
            u.apply_into(w, &mut buf);
            smooth_test(&buf)
        })?;
        worst.push(rel(turned, plain), || format!("n={n} level={level}"));
    }
    Ok(worst.report("rotation_invariance", 1e-8))
}

pub fn mc_determinism(ns: &[usize], samples: usize, seed: u64) -> Result<VerificationReport> {
    let mut mismatches = 0usize;
    for &n in ns {
        let (a, b) = (mc_rule(n, samples, seed)?, mc_rule(n, samples, seed)?);
        let (x, y) = (integrate(&a, smooth_test)?, integrate(&b, smooth_test)?);
        let (mut p, mut q) = (vec![0.0; 2 * n], vec![0.0; 2 * n]);
        a.node(0, &mut p);
        b.node(0, &mut q);
        if x.to_bits() != y.to_bits() || p != q {
            mismatches += 1;
        }
    }
    Ok(VerificationReport::new("mc_determinism", mismatches as f64, 0.0, 0.0).with_meta("cases", ns.len()).with_meta("seed", seed))
}

/// Round trip `cap_measure ∘ cap_alpha` and monotonicity on a grid.
pub fn cap_roundtrip(ns: &[usize], cases: usize, rng: &mut Sampler) -> Result<VerificationReport> {
    let mut worst = Worst::default();
    for k in 0..cases {
        let n = ns[k % ns.len()];
        let c = rng.uniform(1e-3, 1.0 - 1e-3);
        worst.push((cap_measure(n, cap_alpha(n, c)?)? - c).abs(), || format!("n={n} c={c}"));
    }
    let mut monotone = true;
    for &n in ns {
        let vals = (0..=64).map(|k| cap_measure(n, PI * k as f64 / 64.0)).collect::<Result<Vec<_>>>()?;
        monotone &= vals.windows(2).all(|w| w[1] > w[0]);
    }
    let mut r = worst.report("cap_roundtrip", 1e-10).with_meta("monotone", monotone);
    r.pass &= monotone;
    Ok(r)
}

pub fn quadrature_suite(ns: &[usize], cases: usize, seed: u64) -> Suite {
    let mut s = Suite::new("quadrature");
    let mut rng = Sampler::new(seed, 2);
    s.record("product_weight_sum", weight_sums(ns, &[4, 8]));
    s.record("mc_weight_sum", mc_weight_sums(ns, 1000, seed));
    s.record("product_convergence", product_convergence(ns, 12));
    s.record("rotation_invariance", rotation_invariance(ns, 16, &mut rng));
    s.record("mc_determinism", mc_determinism(ns, 1000, seed));
    s.record("cap_roundtrip", cap_roundtrip(ns, cases, &mut rng));
    s
}

// ------------------------------------------------------------- poisson

/// Product level at which the trapezoidal phase axis resolves the kernel
/// at radius `r` to about `1e-9`: the error decays like `2n r^L`.
pub fn normalization_level(n: usize, r: f64) -> usize {
    if r <= 0.0 {
        return 4;
    }
    let l = ((5e-10 / (2.0 * n as f64)).ln() / r.ln()).ceil() as usize;
    l.max(4).next_multiple_of(4)
}

/// `|∫ P_z dσ − 1|` at the given points, each with its own level.
pub fn normalization(points: &[CPoint]) -> Result<VerificationReport> {
    let mut worst = Worst::default();
    let mut min_kernel = f64::INFINITY;
    let mut max_level = 0;
    for z in points {
        let level = normalization_level(z.dim(), z.norm());
        max_level = max_level.max(level);
        let rule = product_rule(z.dim(), level)?;
        let k = KernelAt::new(z)?;
        let total = integrate(&rule, |w| {
            let v = k.value(w);
            min_kernel = min_kernel.min(v);
            v
        })?;
        worst.push((total - 1.0).abs(), || format!("z={} level={level}", coords(z)));
    }
    let mut r = worst.report("poisson_normalization", 1e-8).with_meta("max_level", max_level).with_meta_f64("min_kernel", min_kernel);
    r.pass &= min_kernel > 0.0;
    Ok(r)
}

/// Analytic `∂P_z(w)/∂z̄_j` against central differences in `z`, relative
/// to the largest component.
pub fn kernel_dbar_fd(ns: &[usize], cases: usize, rmax: f64, rng: &mut Sampler) -> Result<VerificationReport> {
    let mut worst = Worst::default();
    let h = 1e-5;
    for k in 0..cases {
        let n = ns[k % ns.len()];
        let z = rng.in_ball(n, rmax);
        let w = rng.sphere(n);
        let exact = ps_kernel_dbar(&z, &w)?;
        let scale = exact.iter().map(|d| d.norm()).fold(0.0, f64::max);
        let mut err: f64 = 0.0;
        for j in 0..n {
            let mut part = [0.0; 2];
            for (t, slot) in part.iter_mut().enumerate() {
                let mut plus = z.coords().to_vec();
                let mut minus = plus.clone();
                plus[2 * j + t] += h;
                minus[2 * j + t] -= h;
                *slot = (ps_kernel(&CPoint::new(plus)?, &w)? - ps_kernel(&CPoint::new(minus)?, &w)?) / (2.0 * h);
            }
            let fd = Complex64::new(0.5 * part[0], 0.5 * part[1]);
            err = err.max((fd - exact[j]).norm());
        }
        worst.push(err / scale, || format!("z={} w={}", coords(&z), coords(&w)));
    }
    Ok(worst.report("kernel_dbar_fd", 1e-6))
}

/// Smooth random fields on a shared rule.
pub fn random_fields(
    n: usize,
    count: usize,
    rule: Arc<QuadratureRule>,
    strategy: EvalStrategy,
    rng: &mut Sampler,
) -> Result<Vec<HarmonicField>> {
    (0..count)
        .map(|k| {
            let sup = rng.uniform(0.3, 1.0);
            let f = rng.smooth_boundary(n, sup, &format!("smooth{k}"))?;
            Ok(HarmonicField::new(f, rule.clone())?.with_strategy(strategy))
        })
        .collect()
}

/// Quadrature gradient against differences of the quadrature values.
pub fn field_gradient_fd(fields: &[HarmonicField], points: usize, rmax: f64, rng: &mut Sampler) -> Result<VerificationReport> {
    let mut worst = Worst::default();
    for f in fields {
        for _ in 0..points {
            let z = rng.in_ball(f.dim(), rmax);
            let g = f.gradient(&z)?;
            let fd = f.gradient_fd(&z)?;
            let scale = ball::norm_sqr(&g).sqrt().max(1e-3 * f.sup_bound());
            let err = g.iter().zip(&fd).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
            worst.push(err / scale, || format!("{} z={}", f.boundary().label(), coords(&z)));
        }
    }
    Ok(worst.report("field_gradient_fd", 1e-6))
}

/// `|Δ_B h(z)| / sup_bound`.
pub fn invariant_laplacian(fields: &[HarmonicField], points: usize, rmax: f64, rng: &mut Sampler) -> Result<VerificationReport> {
    let mut worst = Worst::default();
    for f in fields {
        for _ in 0..points {
            let z = rng.in_ball(f.dim(), rmax);
            let lap = f.invariant_laplacian(&z, ballharm_core::poisson::DEFAULT_FD_STEP2)?;
            worst.push(lap.abs() / f.sup_bound(), || format!("{} z={}", f.boundary().label(), coords(&z)));
        }
    }
    Ok(worst.report("invariant_laplacian", 1e-3))
}

/// `|h(z)| − sup_bound`.
pub fn maximum_principle(fields: &[HarmonicField], points: usize, rmax: f64, rng: &mut Sampler) -> Result<VerificationReport> {
    let mut worst = Worst::default();
    for f in fields {
        for _ in 0..points {
            let z = rng.in_ball(f.dim(), rmax);
            worst.push(f.eval(&z)?.abs() - f.sup_bound(), || format!("{} z={}", f.boundary().label(), coords(&z)));
        }
    }
    Ok(worst.report("maximum_principle", 1e-6))
}

/// `h(a)` from the fixed rule against `σ⁻¹∫ h*∘φ_a dσ`, the pulled-back
/// integral at the origin, both on a product rule of the given level.
pub fn mobius_covariance(
    fields: &[HarmonicField],
    points: usize,
    rmax: f64,
    level: usize,
    tol: f64,
    rng: &mut Sampler,
) -> Result<VerificationReport> {
    let mut worst = Worst::default();
    let rule = Arc::new(product_rule(fields.first().map_or(1, |f| f.dim()), level)?);
    for f in fields {
        let f = &HarmonicField::new(f.boundary().clone(), rule.clone())?;
        let fixed = f.clone().with_strategy(EvalStrategy::Fixed);
        for _ in 0..points {
            let a = rng.in_ball(f.dim(), rmax);
            let phi = ball::Involution::new(&a)?;
            let mut buf = vec![0.0; 2 * f.dim()];
            let pulled = integrate(f.rule(), |eta| match phi.apply_into(eta, &mut buf) {
                Ok(()) => f.boundary().evaluate(&buf),
                Err(_) => f64::NAN,
            })? / f.rule().sigma();
            worst.push((fixed.eval(&a)? - pulled).abs(), || format!("{} a={}", f.boundary().label(), coords(&a)));
        }
    }
    Ok(worst.report("mobius_covariance", tol).with_meta("level", level))
}

/// Change of variables `∫ f dσ = ∫ (f∘φ_z) J_z dσ` on smooth
/// integrands.
pub fn change_of_variables(ns: &[usize], cases: usize, level: usize, rmax: f64, tol: f64, rng: &mut Sampler) -> Result<VerificationReport> {
    let mut worst = Worst::default();
    for k in 0..cases {
        let n = ns[k % ns.len()];
        let rule = product_rule(n, level)?;
        let z = rng.in_ball(n, rmax);
        let f = rng.smooth_boundary(n, 1.0, "cov")?;
        let g = |w: &[f64]| 2.0 + f.evaluate(w);
        let phi = ball::Involution::new(&z)?;
        let direct = integrate(&rule, g)?;
        let mut buf = vec![0.0; 2 * n];
        let pulled = integrate(&rule, |eta| {
            if phi.apply_into(eta, &mut buf).is_err() {
                return f64::NAN;
            }
            let jac = ballharm_core::poisson::boundary_jacobian(&z, &CPoint::from_slice(eta).expect("node")).unwrap_or(f64::NAN);
            g(&buf) * jac
        })?;
        worst.push(rel(pulled, direct), || format!("n={n} z={}", coords(&z)));
    }
    Ok(worst.report("change_of_variables", tol).with_meta("level", level))
}

pub fn poisson_suite(n: usize, level: usize, fields: usize, points: usize, seed: u64, tol: &Tolerances) -> Suite {
    let mut s = Suite::new("poisson");
    let mut rng = Sampler::new(seed, 3);
    let radii: Vec<f64> = [0.3, 0.5, 0.7].into_iter().filter(|&r| node_budget(n, normalization_level(n, r))).collect();
    let pts: Vec<CPoint> = radii.iter().map(|&r| rng.at_radius(n, r)).collect();
    s.record("poisson_normalization", normalization(&pts).map(|r| r.with_meta("radii", format!("{radii:?}"))));
    s.record("kernel_dbar_fd", kernel_dbar_fd(&[n], 200, 0.8, &mut rng));
    let cov_cases = if n <= 2 { 4 } else { 2 };
    let cov_level = if n == 1 { level.max(64) } else { level.max(32) };
    s.record("change_of_variables", change_of_variables(&[n], cov_cases, cov_level, 0.5, 1e-6, &mut rng));
    let fs = product_rule(n, level).map(Arc::new).and_then(|rule| random_fields(n, fields, rule, EvalStrategy::Fixed, &mut rng));
    match fs {
        Ok(fs) => {
            s.record("field_gradient_fd", field_gradient_fd(&fs, points, 0.7, &mut rng));
            s.record("invariant_laplacian", invariant_laplacian(&fs, points, 0.6, &mut rng));
            s.record("maximum_principle", maximum_principle(&fs, points, 0.9, &mut rng));
            s.record("mobius_covariance", mobius_covariance(&fs, points, 0.5, level.max(32), tol.smooth, &mut rng));
        }
        Err(e) => s.record("random_fields", Err(e)),
    }
    s
}

/// Whether a product rule stays under 5·10⁷ nodes.
pub fn node_budget(n: usize, level: usize) -> bool {
    (level as f64).powi(2 * n as i32 - 1) <= 5e7
}

// ----------------------------------------------------------- sharpness

/// `sharp_constant(n)` against `4/π`, `16/(3π)`, `32/(5π)`.
pub fn closed_forms() -> Result<VerificationReport> {
    let mut worst = Worst::default();
    for (n, want) in [(1, 4.0 / PI), (2, 16.0 / (3.0 * PI)), (3, 32.0 / (5.0 * PI))] {
        worst.push(rel(sharp_constant(n)?, want), || format!("n={n}"));
    }
    Ok(worst.report("sharp_constant_closed_forms", 1e-12))
}

/// `‖v(z,l)‖² = 1 − ‖z‖² + |⟨l,z⟩|²`.
pub fn eq13(ns: &[usize], cases: usize, rng: &mut Sampler) -> Result<VerificationReport> {
    let mut worst = Worst::default();
    for k in 0..cases {
        let n = ns[k % ns.len()];
        let z = rng.in_ball(n, 0.99);
        let l = rng.sphere(n);
        let v = v_vector(&z, &l)?;
        let want = 1.0 - z.norm_sqr() + ball::inner_slices(l.coords(), z.coords()).norm_sqr();
        worst.push((v.norm_sqr() - want).abs(), || format!("z={} l={}", coords(&z), coords(&l)));
    }
    Ok(worst.report("v_norm_identity", 1e-12))
}

/// `C(z,l)(1−‖z‖²) ≤ C_n` for random `l`, with equality for `l = ẑ`.
pub fn directional_upper_bound(ns: &[usize], cases: usize, rng: &mut Sampler) -> Result<Vec<VerificationReport>> {
    let (mut over, mut radial) = (Worst::default(), Worst::default());
    for k in 0..cases {
        let n = ns[k % ns.len()];
        let z = rng.in_ball(n, 0.95);
        let l = rng.sphere(n);
        let s = sharp_constant(n)?;
        let r2 = z.norm_sqr();
        over.push((c_closed(&z, &l)? * (1.0 - r2) - s) / s, || format!("z={} l={}", coords(&z), coords(&l)));
        radial.push(rel(c_closed(&z, &radial_direction(&z))? * (1.0 - r2), s), || coords(&z));
    }
    Ok(vec![over.report("directional_upper_bound", 1e-12), radial.report("directional_equality_radial", 1e-12)])
}

/// Radial, tangential and `oblique` random directions at each radius.
pub fn test_directions(z: &CPoint, oblique: usize, rng: &mut Sampler) -> Result<Vec<CPoint>> {
    let mut dirs = vec![radial_direction(z), tangential_direction(z)?];
    for _ in 0..oblique {
        dirs.push(rng.sphere(z.dim()));
    }
    Ok(dirs)
}

/// Relative deviation of the transformed and the (split) product forms
/// from the closed form.
pub fn three_way(
    n: usize,
    radii: &[f64],
    oblique: usize,
    level_transformed: usize,
    level_split: usize,
    rng: &mut Sampler,
) -> Result<Vec<VerificationReport>> {
    let (mut tr, mut qu) = (Worst::default(), Worst::default());
    for &r in radii {
        let z = if r == 0.0 { CPoint::zeros(n) } else { rng.at_radius(n, r) };
        for l in test_directions(&z, oblique, rng)? {
            let exact = c_closed(&z, &l)?;
            let at = || format!("z={} l={}", coords(&z), coords(&l));
            tr.push(rel(c_transformed_aligned(&z, &l, level_transformed)?, exact), at);
            qu.push(rel(c_quadrature_split(&z, &l, level_split)?, exact), at);
        }
    }
    Ok(vec![
        tr.report("c_transformed_vs_closed", 1e-4).with_meta("n", n).with_meta("level", level_transformed),
        qu.report("c_quadrature_vs_closed", 1e-3).with_meta("n", n).with_meta("level", level_split),
    ])
}

/// `1 − |⟨argmax, ẑ⟩|` over random `z ≠ 0`.
pub fn khavinson(n: usize, points: usize, grid: usize, rng: &mut Sampler) -> Result<VerificationReport> {
    let mut worst = Worst::default();
    for _ in 0..points {
        let r = rng.uniform(0.05, 0.95);
        let z = rng.at_radius(n, r);
        let p = khavinson_argmax(&z, grid, None)?;
        worst.push(1.0 - p.alignment(), || coords(&z));
    }
    Ok(worst.report("khavinson_alignment", 1e-9).with_meta("n", n).with_meta("grid", grid))
}

/// `‖∇h_{z,ẑ}(z)‖(1−‖z‖²) / C_n` for the extremal field, evaluated by the
/// pulled-back integral on a rule aligned with the sign change.
pub fn extremal_ratio(z: &CPoint, level: usize) -> Result<f64> {
    let l = radial_direction(z);
    let rule = Arc::new(aligned_rule(z, &l, level)?);
    let f = extremal_field(z, &l, rule)?.with_strategy(EvalStrategy::Mobius).allow_near_boundary();
    let g = f.gradient(z)?;
    Ok(ball::norm_sqr(&g).sqrt() * (1.0 - z.norm_sqr()) / sharp_constant(z.dim())?)
}

/// The extremal ratio at `r e_1` for each radius must lie in `[0.99, 1 + tol]`.
pub fn sharpness_witness(n: usize, radii: &[f64], level: usize, tol: &Tolerances) -> Result<VerificationReport> {
    let mut low = f64::INFINITY;
    let mut high = f64::NEG_INFINITY;
    for &r in radii {
        let q = extremal_ratio(&CPoint::radial(n, r), level)?;
        low = low.min(q);
        high = high.max(q);
    }
    let mut rep = VerificationReport::new("sharpness_witness", 0.99, low, 0.0)
        .with_meta("n", n)
        .with_meta("level", level)
        .with_meta("cases", radii.len())
        .with_meta_f64("max_ratio", high);
    rep.pass &= high <= 1.0 + tol.nonsmooth;
    Ok(rep)
}

/// `‖∇h(z)‖(1−‖z‖²) − C_n` for `|h| ≤ 1`.
pub fn gradient_bound_sweep(fields: &[HarmonicField], points: usize, rmax: f64, tol: &Tolerances, rng: &mut Sampler) -> Result<VerificationReport> {
    let mut worst = Worst::default();
    let mut fails = 0usize;
    for f in fields {
        for _ in 0..points {
            let z = rng.in_ball(f.dim(), rmax);
            let r = gradient_bound_check(f, &z, tol)?;
            fails += usize::from(!r.pass);
            worst.push(r.lhs - r.rhs, || format!("{} z={}", f.boundary().label(), coords(&z)));
        }
    }
    Ok(worst.report("gradient_bound", tol.smooth).with_meta("failures", fails))
}

/// `|∇h(z)·l| − C(z,l)·sup_bound`.
pub fn directional_domination(
    fields: &[HarmonicField],
    points: usize,
    rmax: f64,
    tol: &Tolerances,
    rng: &mut Sampler,
) -> Result<VerificationReport> {
    let mut worst = Worst::default();
    for f in fields {
        for _ in 0..points {
            let z = rng.in_ball(f.dim(), rmax);
            let l = rng.sphere(f.dim());
            let g = f.gradient(&z)?;
            let d = ball::real_dot(&g, l.coords()).abs();
            worst.push(d - c_closed(&z, &l)? * f.sup_bound(), || format!("{} z={}", f.boundary().label(), coords(&z)));
        }
    }
    Ok(worst.report("directional_domination", tol.smooth))
}

pub fn sharpness_suite(n: usize, level: usize, fields: usize, points: usize, seed: u64, tol: &Tolerances) -> Suite {
    let mut s = Suite::new("sharpness");
    let mut rng = Sampler::new(seed, 4);
    let ns: Vec<usize> = (1..=n.min(4)).collect();
    s.record("sharp_constant_closed_forms", closed_forms());
    s.record("v_norm_identity", eq13(&ns, 1000, &mut rng));
    push_all(&mut s, "directional_upper_bound", directional_upper_bound(&ns, 1000, &mut rng));
    if n <= 3 {
        let split = if n == 3 { 24 } else { 32 };
        push_all(&mut s, "three_way", three_way(n, &[0.0, 0.3, 0.6], 3, 32, split, &mut rng));
    } else {
        s.diagnostics.push(Diagnostic {
            name: "three_way".into(),
            message: format!("three-way agreement is run for n <= 3 only (n = {n})"),
            values: vec![],
        });
    }
    if n >= 2 {
        s.record("khavinson_alignment", khavinson(n, 5, 200, &mut rng));
    }
    if n <= 2 {
        s.record("sharpness_witness", sharpness_witness(n, &[0.0, 0.5], 24, tol));
    }
    let fs = product_rule(n, level).map(Arc::new).and_then(|rule| random_fields(n, fields, rule, EvalStrategy::Mobius, &mut rng));
    match fs {
        Ok(fs) => {
            s.record("gradient_bound", gradient_bound_sweep(&fs, points, 0.8, tol, &mut rng));
            s.record("directional_domination", directional_domination(&fs, points, 0.6, tol, &mut rng));
        }
        Err(e) => s.record("random_fields", Err(e)),
    }
    s
}

// -------------------------------------------------------------- bounds

/// Bergman-gradient bounds on random fields: the algebraic lower inequality, the upper
/// inequality and the Lipschitz estimate.
pub fn bergman_bounds(
    fields: &[HarmonicField],
    points: usize,
    rmax: f64,
    tol: &Tolerances,
    rng: &mut Sampler,
) -> Result<Vec<VerificationReport>> {
    let (mut lower, mut upper, mut lip) = (Worst::default(), Worst::default(), Worst::default());
    for f in fields {
        for _ in 0..points {
            let z = rng.in_ball(f.dim(), rmax);
            let w = rng.in_ball(f.dim(), rmax);
            let r = bergman_bound_check(f, &z, tol)?;
            let a: f64 = r.meta("a").and_then(|s| s.parse().ok()).unwrap_or(f64::NAN);
            let at = || format!("{} z={}", f.boundary().label(), coords(&z));
            lower.push(a - r.lhs, at);
            upper.push(r.lhs - r.rhs, at);
            let l = lipschitz_check(f, &z, &w, tol)?;
            lip.push(l.lhs - l.rhs, at);
        }
    }
    Ok(vec![lower.report("bergman_lower", 1e-10), upper.report("bergman_upper", tol.smooth), lip.report("lipschitz", tol.smooth)])
}

/// Ratio `b/c` of the Bergman gradient norm to the Bergman constant on
/// extremal fields.
pub fn bc_ratio(n: usize, radii: &[f64], level: usize) -> Result<Diagnostic> {
    let mut values = Vec::new();
    for &r in radii {
        let z = CPoint::radial(n, r);
        let l = radial_direction(&z);
        let f = extremal_field(&z, &l, Arc::new(aligned_rule(&z, &l, level)?))?.with_strategy(EvalStrategy::Mobius);
        let rep = bergman_bound_check(&f, &z, &Tolerances::default())?;
        values.push((format!("r={r}"), rep.meta("b_over_c").and_then(|s| s.parse().ok()).unwrap_or(f64::NAN)));
    }
    Ok(Diagnostic {
        name: "bergman_ratio".into(),
        message: "b/c of the Bergman gradient norm to the Bergman constant on extremal fields; the upper inequality is not sharp under the pinned norm".into(),
        values,
    })
}

/// Random vector fields with `Σ sup_k² ≤ 1`, so `‖H‖ ≤ 1` on the sphere.
pub fn random_vector_field(n: usize, m: usize, rule: &Arc<QuadratureRule>, rng: &mut Sampler) -> Result<VectorField> {
    let comps = (0..m)
        .map(|k| {
            let sup = rng.uniform(0.3, 1.0) / (m as f64).sqrt();
            let f = rng.smooth_boundary(n, sup, &format!("component{k}"))?;
            HarmonicField::new(f, rule.clone())
        })
        .collect::<Result<Vec<_>>>()?;
    VectorField::new(comps)
}

/// The operator-norm bound with its structural checks: the bound itself, `m = 1`
/// against the scalar gradient, a zero component leaving `σ_max` unchanged
/// and `‖∇(H·u)‖ ≤ σ_max` for sampled unit `u`.
pub fn operator_norm_bounds(n: usize, count: usize, level: usize, rmax: f64, tol: &Tolerances, rng: &mut Sampler) -> Result<Vec<VerificationReport>> {
    let rule = Arc::new(product_rule(n, level)?);
    let (mut bound, mut scalar, mut zero, mut unit) = (Worst::default(), Worst::default(), Worst::default(), Worst::default());
    let mut fails = 0usize;
    for k in 0..count {
        let m = 1 + k % 3;
        let h = random_vector_field(n, m, &rule, rng)?;
        let z = rng.in_ball(n, rmax);
        let at = || format!("m={m} z={}", coords(&z));
        let rep = operator_norm_check(&h, &z, tol)?;
        fails += usize::from(!rep.pass);
        bound.push(rep.lhs - rep.rhs, at);
        let jac = h.jacobian(&z)?;
        if m == 1 {
            scalar.push((rep.lhs - ball::norm_sqr(&jac[0]).sqrt()).abs() / rep.lhs.max(1e-300), at);
        }
        let mut padded = jac.clone();
        padded.push(vec![0.0; 2 * n]);
        zero.push((largest_singular_value(&padded)? - rep.lhs).abs() / rep.lhs.max(1e-300), at);
        for _ in 0..4 {
            let u: Vec<f64> = {
                let g = rng.gaussian_vec(m);
                let r = ball::norm_sqr(&g).sqrt();
                g.iter().map(|x| x / r).collect()
            };
            let grad: Vec<f64> = (0..2 * n).map(|i| (0..m).map(|j| u[j] * jac[j][i]).sum()).collect();
            unit.push(ball::norm_sqr(&grad).sqrt() - rep.lhs * (1.0 + 1e-12), at);
        }
    }
    Ok(vec![
        bound.report("operator_norm", tol.smooth / (1.0 - rmax * rmax)).with_meta("failures", fails),
        scalar.report("operator_norm_scalar", 1e-12),
        zero.report("operator_norm_zero_component", 1e-12),
        unit.report("operator_norm_unit_vector", 0.0),
    ])
}

pub fn bounds_suite(n: usize, level: usize, fields: usize, points: usize, seed: u64, tol: &Tolerances) -> Suite {
    let mut s = Suite::new("bounds");
    let mut rng = Sampler::new(seed, 5);
    match product_rule(n, level).map(Arc::new).and_then(|rule| random_fields(n, fields, rule, EvalStrategy::Mobius, &mut rng)) {
        Ok(fs) => push_all(&mut s, "bergman_bounds", bergman_bounds(&fs, points, 0.8, tol, &mut rng)),
        Err(e) => s.record("random_fields", Err(e)),
    }
    push_all(&mut s, "operator_norm_bounds", operator_norm_bounds(n, fields, level, 0.8, tol, &mut rng));
    match bc_ratio(n, &[0.0, 0.5], 24.min(level.next_multiple_of(4)).max(8)) {
        Ok(d) => s.diagnostics.push(d),
        Err(e) => s.record("bergman_ratio", Err(e)),
    }
    s
}

// ------------------------------------------------------------- burgeth

/// Largest `|M_indicator − M_reference|` on a `(c, r)` grid.
pub fn burgeth_cross(n: usize, cs: &[f64], rs: &[f64], level: usize) -> Result<VerificationReport> {
    let mut worst = Worst::default();
    let mut inside = true;
    for &c in cs {
        for &r in rs {
            let m = m_envelope_zonal(n, c, r, level)?;
            let reference = m_reference(n, c, r)?;
            inside &= m > -1.0 && m < 1.0 && reference > -1.0 && reference < 1.0;
            worst.push((m - reference).abs() / reference.abs().max(1.0), || format!("c={c} r={r}"));
        }
    }
    let mut rep = worst.report("burgeth_cross_method", 1e-3).with_meta("n", n).with_meta("level", level).with_meta("range_ok", inside);
    rep.pass &= inside;
    Ok(rep)
}

/// `M_c(0) = 2c − 1` by the indicator quadrature.
pub fn burgeth_anchor(n: usize, cs: &[f64], level: usize) -> Result<VerificationReport> {
    let mut worst = Worst::default();
    for &c in cs {
        worst.push((m_envelope_zonal(n, c, 0.0, level)? - (2.0 * c - 1.0)).abs(), || format!("c={c}"));
    }
    Ok(worst.report("burgeth_anchor_origin", 1e-3).with_meta("n", n))
}

/// `M_{1/2}^1(0.5) = (4/π) atan 0.5` by the closed form.
pub fn burgeth_schwarz_anchor() -> Result<VerificationReport> {
    Ok(VerificationReport::agreement("burgeth_anchor_schwarz", m_closed_n1(0.5, 0.5)?, 4.0 / PI * 0.5f64.atan(), 1e-8))
}

/// Envelope domination for random smooth fields.
pub fn burgeth_domination(fields: &[HarmonicField], radii: &[f64], tol: &Tolerances, rng: &mut Sampler) -> Result<VerificationReport> {
    let mut worst = Worst::default();
    let mut fails = 0usize;
    for f in fields {
        for &r in radii {
            let z = rng.at_radius(f.dim(), r);
            let rep = schwarz_check(f, &z, tol)?;
            fails += usize::from(!rep.pass);
            worst.push(rep.lhs - rep.rhs, || format!("{} z={}", f.boundary().label(), coords(&z)));
        }
    }
    Ok(worst.report("burgeth_domination", tol.nonsmooth).with_meta("failures", fails))
}

/// A cap indicator `2·𝟙_S − 1` centred at `ẑ` attains the envelope at `z`.
pub fn burgeth_cap_witness(n: usize, c: f64, r: f64, level: usize, tol: &Tolerances, rng: &mut Sampler) -> Result<VerificationReport> {
    let center = rng.sphere(n);
    let spec = CapSpec::new(center.clone(), c)?;
    let ind = cap_indicator(&spec)?;
    let data = BoundaryFunction::new(n, 1.0, "cap_witness", move |w| 2.0 * ind.evaluate(w) - 1.0)?.with_discontinuities();
    let u = ball::Unitary::with_first_column(&center)?;
    let rule = Arc::new(zonal_rule(n, level, Some(cap_alpha(n, c)?))?.rotated(u)?);
    let field = HarmonicField::new(data, rule)?;
    let z = center.scale(r);
    let rep = schwarz_check(&field, &z, tol)?;
    Ok(VerificationReport::agreement("burgeth_cap_witness", rep.lhs, rep.rhs, 2.0 * rep.tolerance)
        .with_meta("n", n)
        .with_meta_f64("c", c)
        .with_meta_f64("r", r))
}

/// The superlevel-set competitor exceeding the cap value for `n ≥ 2`.
pub fn superlevel_diagnostic(n: usize, c: f64, r: f64) -> Result<Diagnostic> {
    let cap = m_reference(n, c, r)?;
    let (sup, rho) = superlevel_envelope(n, c, r)?;
    Ok(Diagnostic {
        name: "burgeth_superlevel".into(),
        message: "for n >= 2 the superlevel set {|1 - <w, r e_1>| < rho} of measure c gives a larger value than the cap, so the cap envelope is not the pointwise maximum; random smooth fields still stay below it".into(),
        values: vec![
            ("n".into(), n as f64),
            ("c".into(), c),
            ("r".into(), r),
            ("cap_value".into(), cap),
            ("superlevel_value".into(), sup),
            ("rho".into(), rho),
        ],
    })
}

pub fn burgeth_suite(n: usize, level: usize, fields: usize, seed: u64, tol: &Tolerances) -> Suite {
    let mut s = Suite::new("burgeth");
    let mut rng = Sampler::new(seed, 6);
    let zl = level.max(24);
    let cs = [0.1, 0.3, 0.5, 0.7, 0.9];
    let ns: Vec<usize> = if n == 1 { vec![1] } else { vec![1, 2] };
    for &m in &ns {
        s.record("burgeth_cross_method", burgeth_cross(m, &[0.1, 0.5, 0.9], &[0.0, 0.4, 0.8], zl));
        s.record("burgeth_anchor_origin", burgeth_anchor(m, &cs, zl));
    }
    s.record("burgeth_anchor_schwarz", burgeth_schwarz_anchor());
    for &m in &ns {
        let fs = product_rule(m, level).map(Arc::new).and_then(|rule| random_fields(m, fields, rule, EvalStrategy::Mobius, &mut rng));
        match fs {
            Ok(fs) => s.record("burgeth_domination", burgeth_domination(&fs, &[0.2, 0.5, 0.7], tol, &mut rng)),
            Err(e) => s.record("random_fields", Err(e)),
        }
        s.record("burgeth_cap_witness", burgeth_cap_witness(m, 0.3, 0.5, zl, tol, &mut rng));
    }
    if n >= 2 {
        match superlevel_diagnostic(2, 0.5, 0.5) {
            Ok(d) => s.diagnostics.push(d),
            Err(e) => s.record("burgeth_superlevel", Err(e)),
        }
    }
    s
}
