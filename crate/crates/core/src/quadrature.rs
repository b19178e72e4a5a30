//! Integration over the unit sphere `∂B^n = S^{2n-1}`.
//!
//! Two families of rules are provided:
//!
//! * **product rules** in polar-torus coordinates `w_j = e^{iψ_j} r_j`, with
//!   `(r_1, …, r_n)` on the positive orthant of `S^{n-1}` parametrised by
//!   angles `θ_1, …, θ_{n-1} ∈ [0, π/2]` (`r_1 = cos θ_1`,
//!   `r_2 = sin θ_1 cos θ_2`, …). The surface element factorises as
//!   `Π_k cos θ_k sin^{2n-2k-1} θ_k dθ_k · Π_j dψ_j`, so each θ axis gets a
//!   Gauss–Legendre rule carrying its own Jacobian and each ψ axis gets the
//!   periodic trapezoid rule;
//! * **Monte Carlo rules**: normalised Gaussian vectors drawn from a
//!   counter-based generator, so node `k` depends only on `(seed, k)`.
//!
//! Nodes are generated on demand from compact tables, never stored, which
//! keeps memory flat for rules with 10^8 nodes.
//!
//! [`integrate`] walks the nodes in fixed-size chunks; each chunk is summed
//! with compensation and the chunk totals are folded in chunk order. The
//! result therefore does not depend on how chunks are scheduled.

use alloc::boxed::Box;
use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;

use rand_chacha::ChaCha8Rng;
use rand_core::SeedableRng;
use rand_distr::{Distribution, StandardNormal};

use crate::ball::{CPoint, Unitary, SPHERE_TOL};
use crate::error::{Error, Result};
use crate::quad1d::{self, GaussLegendre};
use crate::special::{ball_boundary_area, gamma};
use crate::sum::CompensatedSum;

/// Nodes per reduction chunk.
pub const CHUNK: usize = 4096;
/// Upper limit on the number of nodes a rule may have.
pub const MAX_NODES: u64 = 1 << 40;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RuleKind {
    Product,
    MonteCarlo,
}

impl RuleKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            RuleKind::Product => "product",
            RuleKind::MonteCarlo => "mc",
        }
    }
}

/// Discretisation of the angular ψ axes of a product rule.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PsiScheme {
    /// `level` equispaced points at half-step offsets, `ψ_k = 2π(k+½)/level`.
    Uniform,
    /// Gauss–Legendre with `level/4` points on each quadrant
    /// `[qπ/2, (q+1)π/2]`. Integrands with kinks on `Re w_j = 0` or
    /// `Im w_j = 0` stay spectrally accurate. `level` must be divisible by 4.
    QuadrantGauss,
}

#[derive(Debug, Clone, PartialEq)]
struct AxisNode {
    cos: f64,
    sin: f64,
    weight: f64,
}

#[derive(Debug, Clone, PartialEq)]
struct ProductTables {
    psi: Vec<AxisNode>,
    theta: Vec<Vec<AxisNode>>,
}

#[derive(Debug, Clone, PartialEq)]
struct ZonalTables {
    polar: Vec<Vec<AxisNode>>,
    phi: Vec<AxisNode>,
}

#[derive(Debug, Clone, PartialEq)]
enum Repr {
    Product(ProductTables),
    Zonal(ZonalTables),
    MonteCarlo { rng: Box<ChaCha8Rng> },
    Tabulated { nodes: Vec<f64>, weights: Vec<f64> },
}

/// Nodes and weights on `S^{2n-1}`.
#[derive(Debug, Clone, PartialEq)]
pub struct QuadratureRule {
    dim: usize,
    kind: RuleKind,
    size: usize,
    seed: Option<u64>,
    sigma: f64,
    count: usize,
    rotation: Option<Unitary>,
    repr: Repr,
}

impl QuadratureRule {
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn kind(&self) -> RuleKind {
        self.kind
    }

    /// Level of a product rule or sample count of a Monte Carlo rule.
    pub fn size_parameter(&self) -> usize {
        self.size
    }

    pub fn seed(&self) -> Option<u64> {
        self.seed
    }

    /// `σ(S^{2n-1})`, the exact total mass.
    pub fn sigma(&self) -> f64 {
        self.sigma
    }

    pub fn len(&self) -> usize {
        self.count
    }

    pub fn is_empty(&self) -> bool {
        self.count == 0
    }

    /// Same weights, nodes mapped by `u`. `dσ` is unitarily invariant, so the
    /// result is again a rule for the sphere; it is used to align a product
    /// grid with a known kink of the integrand.
    pub fn rotated(&self, u: Unitary) -> Result<Self> {
        if u.dim() != self.dim {
            return Err(Error::DimensionMismatch { expected: self.dim, got: u.dim() });
        }
        let mut out = self.clone();
        out.rotation = Some(u);
        Ok(out)
    }

    /// Writes node `k` into `out` (length `2n`) and returns its weight.
    #[inline]
    pub fn node(&self, k: usize, out: &mut [f64]) -> f64 {
        let w = self.raw_node(k, out);
        if let Some(u) = &self.rotation {
            let mut tmp = [0.0; 12];
            let t = &mut tmp[..out.len()];
            t.copy_from_slice(out);
            u.apply_into(t, out);
        }
        w
    }

    fn raw_node(&self, k: usize, out: &mut [f64]) -> f64 {
        let n = self.dim;
        match &self.repr {
            Repr::Product(t) => {
                let lp = t.psi.len();
                let mut rem = k;
                let mut weight = 1.0;
                // ψ digits first, then θ digits
                let mut psi_idx = [0usize; 6];
                for slot in psi_idx.iter_mut().take(n) {
                    *slot = rem % lp;
                    rem /= lp;
                }
                let mut s = 1.0;
                for j in 0..n {
                    let r = if j + 1 < n {
                        let axis = &t.theta[j];
                        let a = &axis[rem % axis.len()];
                        rem /= axis.len();
                        weight *= a.weight;
                        let r = s * a.cos;
                        s *= a.sin;
                        r
                    } else {
                        s
                    };
                    let p = &t.psi[psi_idx[j]];
                    weight *= p.weight;
                    out[2 * j] = r * p.cos;
                    out[2 * j + 1] = r * p.sin;
                }
                weight
            }
            Repr::Zonal(t) => {
                let d = 2 * n;
                let mut rem = k;
                let mut weight = 1.0;
                let mut s = 1.0;
                for (i, axis) in t.polar.iter().enumerate() {
                    let a = &axis[rem % axis.len()];
                    rem /= axis.len();
                    out[i] = s * a.cos;
                    s *= a.sin;
                    weight *= a.weight;
                }
                let p = &t.phi[rem % t.phi.len()];
                out[d - 2] = s * p.cos;
                out[d - 1] = s * p.sin;
                weight * p.weight
            }
            Repr::MonteCarlo { rng } => {
                let mut g = rng.clone();
                g.set_stream(k as u64);
                g.set_word_pos(0);
                loop {
                    let mut r2 = 0.0;
                    for x in out.iter_mut() {
                        let v: f64 = StandardNormal.sample(&mut g);
                        *x = v;
                        r2 += v * v;
                    }
                    if r2 > 1e-200 {
                        let inv = 1.0 / libm::sqrt(r2);
                        out.iter_mut().for_each(|x| *x *= inv);
                        break;
                    }
                }
                self.sigma / self.count as f64
            }
            Repr::Tabulated { nodes, weights } => {
                out.copy_from_slice(&nodes[2 * n * k..2 * n * (k + 1)]);
                weights[k]
            }
        }
    }

    /// Calls `f(k, node, weight)` for every node in index order.
    pub fn for_each_node<F: FnMut(usize, &[f64], f64)>(&self, mut f: F) {
        let mut buf = vec![0.0; 2 * self.dim];
        for k in 0..self.count {
            let w = self.node(k, &mut buf);
            f(k, &buf, w);
        }
    }

    pub fn chunk_count(&self) -> usize {
        self.count.div_ceil(CHUNK)
    }

    /// A rule read back from a node table, e.g. a serialised rule file.
    pub fn tabulated(dim: usize, kind: RuleKind, size: usize, seed: Option<u64>, nodes: Vec<f64>, weights: Vec<f64>) -> Result<Self> {
        let sigma = ball_boundary_area(dim)?;
        if nodes.len() != 2 * dim * weights.len() {
            return Err(Error::DimensionMismatch { expected: 2 * dim * weights.len(), got: nodes.len() });
        }
        if weights.is_empty() {
            return Err(Error::domain("rule has no nodes"));
        }
        for (k, node) in nodes.chunks_exact(2 * dim).enumerate() {
            let r = libm::sqrt(crate::ball::norm_sqr(node));
            if libm::fabs(r - 1.0) > SPHERE_TOL {
                return Err(Error::NotOnSphere(r));
            }
            if !(weights[k] > 0.0) {
                return Err(Error::domain("weights must be positive"));
            }
        }
        Ok(Self { dim, kind, size, seed, sigma, count: weights.len(), rotation: None, repr: Repr::Tabulated { nodes, weights } })
    }
}

/// Product rule with uniform ψ points; `level^{2n-1}` nodes.
pub fn product_rule(n: usize, level: usize) -> Result<QuadratureRule> {
    product_rule_with(n, level, PsiScheme::Uniform)
}

pub fn product_rule_with(n: usize, level: usize, scheme: PsiScheme) -> Result<QuadratureRule> {
    if n < 1 {
        return Err(Error::ZeroDimension);
    }
    if n > 6 {
        return Err(Error::domain("product rules are limited to n <= 6"));
    }
    if level < 1 {
        return Err(Error::domain("level must be at least 1"));
    }
    let count = (level as u64).checked_pow((2 * n - 1) as u32).filter(|&c| c <= MAX_NODES);
    let count = count.ok_or_else(|| Error::domain("product rule too large"))? as usize;

    let psi = match scheme {
        PsiScheme::Uniform => {
            let h = 2.0 * PI / level as f64;
            (0..level)
                .map(|k| {
                    let a = h * (k as f64 + 0.5);
                    AxisNode { cos: libm::cos(a), sin: libm::sin(a), weight: h }
                })
                .collect()
        }
        PsiScheme::QuadrantGauss => {
            if !level.is_multiple_of(4) {
                return Err(Error::domain("quadrant Gauss scheme needs a level divisible by 4"));
            }
            let gl = GaussLegendre::new(level / 4);
            let mut v = Vec::with_capacity(level);
            for q in 0..4 {
                let a0 = q as f64 * 0.5 * PI;
                for (a, w) in gl.on_interval(a0, a0 + 0.5 * PI) {
                    v.push(AxisNode { cos: libm::cos(a), sin: libm::sin(a), weight: w });
                }
            }
            v
        }
    };

    let gl = GaussLegendre::new(level);
    let theta = (0..n.saturating_sub(1))
        .map(|k| {
            // Jacobian cos θ sin^p θ with p = 2n − 2k − 3 (0-based k); its
            // exact integral over [0, π/2] is 1/(p+1).
            let p = (2 * n - 2 * k - 3) as i32;
            let mut axis: Vec<AxisNode> = gl
                .on_interval(0.0, 0.5 * PI)
                .map(|(t, w)| {
                    let (s, c) = (libm::sin(t), libm::cos(t));
                    AxisNode { cos: c, sin: s, weight: w * c * powi(s, p) }
                })
                .collect();
            let total: f64 = axis.iter().map(|a| a.weight).sum();
            let scale = 1.0 / ((p + 1) as f64 * total);
            axis.iter_mut().for_each(|a| a.weight *= scale);
            axis
        })
        .collect();

    Ok(QuadratureRule {
        dim: n,
        kind: RuleKind::Product,
        size: level,
        seed: None,
        sigma: ball_boundary_area(n)?,
        count,
        rotation: None,
        repr: Repr::Product(ProductTables { psi, theta }),
    })
}

/// Product rule in real hyperspherical coordinates of `R^{2n}` about the
/// first real axis: `x_1 = cos t_1`, `x_2 = sin t_1 cos t_2`, …, with
/// Gauss–Legendre points in each polar angle `t_k ∈ [0, π]` and the
/// periodic trapezoid rule in the last angle.
///
/// With `cap = Some(α)` the first polar axis is split at `α`, each side
/// receiving `level` Gauss points, so integrands that jump on
/// `Re w_1 = cos α` are integrated without loss of order. When `n = 1` the
/// azimuth is split at `±α` and at `0`, where kernels centred on the axis
/// peak.
pub fn zonal_rule(n: usize, level: usize, cap: Option<f64>) -> Result<QuadratureRule> {
    if n < 1 {
        return Err(Error::ZeroDimension);
    }
    if n > 6 {
        return Err(Error::domain("product rules are limited to n <= 6"));
    }
    if level < 1 {
        return Err(Error::domain("level must be at least 1"));
    }
    if let Some(a) = cap {
        if !(a > 0.0 && a < PI) {
            return Err(Error::domain("cap angle must lie in (0, π)"));
        }
    }
    let d = 2 * n;
    let gl = GaussLegendre::new(level);
    let axis_on = |pieces: &[(f64, f64)], p: i32| -> Vec<AxisNode> {
        pieces
            .iter()
            .flat_map(|&(a, b)| gl.on_interval(a, b).collect::<Vec<_>>())
            .map(|(t, w)| {
                let (s, c) = (libm::sin(t), libm::cos(t));
                AxisNode { cos: c, sin: s, weight: w * powi(s, p) }
            })
            .collect()
    };
    let mut polar = Vec::with_capacity(d - 2);
    for k in 0..d - 2 {
        let p = (d - 2 - k) as i32;
        let pieces: &[(f64, f64)] = match (k, cap) {
            (0, Some(a)) => &[(0.0, a), (a, PI)],
            _ => &[(0.0, PI)],
        };
        let mut axis = axis_on(pieces, p);
        // ∫_0^π sin^p = √π Γ((p+1)/2) / Γ(p/2 + 1)
        let exact = libm::sqrt(PI) * gamma(0.5 * (p as f64 + 1.0))? / gamma(0.5 * p as f64 + 1.0)?;
        let total: f64 = axis.iter().map(|a| a.weight).sum();
        axis.iter_mut().for_each(|a| a.weight *= exact / total);
        polar.push(axis);
    }
    let phi = match (n, cap) {
        (1, Some(a)) => {
            let mut axis = axis_on(&[(-a, 0.0), (0.0, a), (a, 2.0 * PI - a)], 0);
            let total: f64 = axis.iter().map(|x| x.weight).sum();
            axis.iter_mut().for_each(|x| x.weight *= 2.0 * PI / total);
            axis
        }
        _ => {
            let h = 2.0 * PI / level as f64;
            (0..level)
                .map(|k| {
                    let a = h * (k as f64 + 0.5);
                    AxisNode { cos: libm::cos(a), sin: libm::sin(a), weight: h }
                })
                .collect()
        }
    };
    let count = polar.iter().map(|a| a.len() as u64).product::<u64>() * phi.len() as u64;
    if count > MAX_NODES {
        return Err(Error::domain("product rule too large"));
    }
    Ok(QuadratureRule {
        dim: n,
        kind: RuleKind::Product,
        size: level,
        seed: None,
        sigma: ball_boundary_area(n)?,
        count: count as usize,
        rotation: None,
        repr: Repr::Zonal(ZonalTables { polar, phi }),
    })
}

fn powi(x: f64, p: i32) -> f64 {
    let mut acc = 1.0;
    for _ in 0..p {
        acc *= x;
    }
    acc
}

/// `samples` independent uniform points with weights `σ/samples`.
pub fn mc_rule(n: usize, samples: usize, seed: u64) -> Result<QuadratureRule> {
    if n < 1 {
        return Err(Error::ZeroDimension);
    }
    if n > 6 {
        return Err(Error::domain("rules are limited to n <= 6"));
    }
    if samples == 0 {
        return Err(Error::domain("Monte Carlo rule needs at least one sample"));
    }
    Ok(QuadratureRule {
        dim: n,
        kind: RuleKind::MonteCarlo,
        size: samples,
        seed: Some(seed),
        sigma: ball_boundary_area(n)?,
        count: samples,
        rotation: None,
        repr: Repr::MonteCarlo { rng: Box::new(ChaCha8Rng::seed_from_u64(seed)) },
    })
}

/// `Σ_k w_k f(node_k)`.
pub fn integrate<F: FnMut(&[f64]) -> f64>(rule: &QuadratureRule, mut f: F) -> Result<f64> {
    let mut out = [0.0];
    integrate_vec(rule, &mut out, |w, o| o[0] = f(w))?;
    Ok(out[0])
}

/// Vector-valued version of [`integrate`]: `f` writes `out.len()` values per
/// node and `out` receives the weighted sums.
pub fn integrate_vec<F: FnMut(&[f64], &mut [f64])>(rule: &QuadratureRule, out: &mut [f64], mut f: F) -> Result<()> {
    let m = out.len();
    let mut total = vec![CompensatedSum::new(); m];
    for chunk in 0..rule.chunk_count() {
        let part = integrate_chunk(rule, chunk, m, &mut f)?;
        for (t, p) in total.iter_mut().zip(&part) {
            t.merge(p);
        }
    }
    for (o, t) in out.iter_mut().zip(&total) {
        *o = t.value();
    }
    Ok(())
}

/// `∫ |g| dσ` with the product rule of the given level, except that the
/// first phase axis `ψ_1` is integrated piecewise: for every outer node the
/// sign changes of `ψ_1 ↦ g` are located on `level` equispaced samples,
/// refined by false position, and each piece between consecutive zeros gets
/// `level/2` (at least 8) Gauss points. Without sign changes the periodic
/// trapezoid rule on the samples is used.
///
/// With `rotation = Some(u)` the integrand is evaluated at `u w`, which lets
/// the caller point the split axis where the zero set is expected to cross.
pub fn integrate_abs_split<G: FnMut(&[f64]) -> f64>(n: usize, level: usize, rotation: Option<&Unitary>, mut g: G) -> Result<f64> {
    if rotation.is_some_and(|u| u.dim() != n) {
        return Err(Error::DimensionMismatch { expected: n, got: rotation.map_or(0, |u| u.dim()) });
    }
    let rule = product_rule(n, level)?;
    let t = match &rule.repr {
        Repr::Product(t) => t,
        _ => unreachable!("product_rule builds product tables"),
    };
    let m = level.max(8);
    let gl = GaussLegendre::new((level / 2).max(8));
    let outer_count = rule.count / level;
    let mut node = vec![0.0; 2 * n];
    let mut rotated = vec![0.0; 2 * n];
    let mut radii = vec![0.0; n];
    let mut samples = vec![0.0; m];
    let mut zeros: Vec<f64> = Vec::new();
    let mut total = CompensatedSum::new();
    let h = 2.0 * PI / m as f64;
    for outer in 0..outer_count {
        // digits: ψ_2..ψ_n, then θ_1..θ_{n-1}
        let mut rem = outer;
        let mut weight = 1.0;
        for j in 1..n {
            let p = &t.psi[rem % level];
            rem /= level;
            weight *= p.weight;
            node[2 * j] = p.cos;
            node[2 * j + 1] = p.sin;
        }
        let mut s = 1.0;
        for (j, r) in radii.iter_mut().enumerate() {
            *r = if j + 1 < n {
                let a = &t.theta[j][rem % level];
                rem /= level;
                weight *= a.weight;
                let r = s * a.cos;
                s *= a.sin;
                r
            } else {
                s
            };
        }
        for j in 1..n {
            node[2 * j] *= radii[j];
            node[2 * j + 1] *= radii[j];
        }
        let r1 = radii[0];
        let mut eval = |psi: f64, node: &mut [f64]| {
            node[0] = r1 * libm::cos(psi);
            node[1] = r1 * libm::sin(psi);
            match rotation {
                Some(u) => {
                    u.apply_into(node, &mut rotated);
                    g(&rotated)
                }
                None => g(node),
            }
        };
        for (k, v) in samples.iter_mut().enumerate() {
            *v = eval(h * k as f64, &mut node);
            if !v.is_finite() {
                return Err(Error::NonFinite(outer));
            }
        }
        zeros.clear();
        for k in 0..m {
            let (a, b) = (samples[k], samples[(k + 1) % m]);
            if (a < 0.0) != (b < 0.0) {
                zeros.push(false_position(&mut |x| eval(x, &mut node), h * k as f64, h * (k + 1) as f64, a, b));
            }
        }
        let mut inner = CompensatedSum::new();
        if zeros.is_empty() {
            samples.iter().for_each(|v| inner.add(h * libm::fabs(*v)));
        } else {
            let first = zeros[0];
            zeros.push(first + 2.0 * PI);
            for w in zeros.windows(2) {
                for (x, wx) in gl.on_interval(w[0], w[1]) {
                    inner.add(wx * libm::fabs(eval(x, &mut node)));
                }
            }
        }
        total.add(weight * inner.value());
    }
    Ok(total.value())
}

/// A zero of `f` in `[a, b]` given `f(a)`, `f(b)` of opposite sign
/// (Illinois variant of regula falsi).
fn false_position<F: FnMut(f64) -> f64>(f: &mut F, mut a: f64, mut b: f64, mut fa: f64, mut fb: f64) -> f64 {
    let mut side = 0i8;
    for _ in 0..100 {
        if fa == 0.0 {
            return a;
        }
        if fb == 0.0 {
            return b;
        }
        let x = (a * fb - b * fa) / (fb - fa);
        if !(x > a && x < b) {
            break;
        }
        let fx = f(x);
        if (fx < 0.0) == (fb < 0.0) {
            b = x;
            fb = fx;
            if side == -1 {
                fa *= 0.5;
            }
            side = -1;
        } else {
            a = x;
            fa = fx;
            if side == 1 {
                fb *= 0.5;
            }
            side = 1;
        }
        if libm::fabs(fx) < 1e-300 || b - a < 1e-14 {
            break;
        }
    }
    if libm::fabs(fa) < libm::fabs(fb) {
        a
    } else {
        b
    }
}

/// Compensated partial sums over chunk `chunk`; folding the partials of all
/// chunks in chunk order reproduces [`integrate_vec`] bit for bit.
pub fn integrate_chunk<F: FnMut(&[f64], &mut [f64])>(
    rule: &QuadratureRule,
    chunk: usize,
    m: usize,
    f: &mut F,
) -> Result<Vec<CompensatedSum>> {
    let mut node = vec![0.0; 2 * rule.dim];
    let mut vals = vec![0.0; m];
    let mut acc = vec![CompensatedSum::new(); m];
    let start = chunk * CHUNK;
    let end = (start + CHUNK).min(rule.count);
    for k in start..end {
        let w = rule.node(k, &mut node);
        f(&node, &mut vals);
        for (a, v) in acc.iter_mut().zip(&vals) {
            if !v.is_finite() {
                return Err(Error::NonFinite(k));
            }
            a.add(w * v);
        }
    }
    Ok(acc)
}

/// Normalised measure of the cap `{w : Re⟨ẑ, w⟩ > cos α}`,
/// `∫_0^α sin^{2n-2} t dt / ∫_0^π sin^{2n-2} t dt`.
pub fn cap_measure(n: usize, alpha: f64) -> Result<f64> {
    if n < 1 {
        return Err(Error::ZeroDimension);
    }
    if !(0.0..=PI).contains(&alpha) {
        return Err(Error::domain("cap angle must lie in [0, π]"));
    }
    let p = (2 * n - 2) as i32;
    let density = |t: f64| powi(libm::sin(t), p);
    let total = quad1d::adaptive(density, 0.0, PI, 1e-15);
    if alpha <= 0.5 * PI {
        Ok(quad1d::adaptive(density, 0.0, alpha, 1e-15) / total)
    } else {
        // integrate the short side to keep the relative error small near 1
        Ok(1.0 - quad1d::adaptive(density, alpha, PI, 1e-15) / total)
    }
}

/// The angle `α` with `cap_measure(n, α) = c`.
pub fn cap_alpha(n: usize, c: f64) -> Result<f64> {
    if !(c > 0.0 && c < 1.0) {
        return Err(Error::domain("cap measure must lie in (0, 1)"));
    }
    if n == 1 {
        return Ok(PI * c);
    }
    let (mut lo, mut hi) = (0.0, PI);
    while hi - lo > 1e-9 {
        let mid = 0.5 * (lo + hi);
        if cap_measure(n, mid)? < c {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    // Newton polish: d/dα measure = sin^{2n-2}α / ∫_0^π sin^{2n-2}
    let norm = libm::sqrt(PI) * gamma(n as f64 - 0.5)? / gamma(n as f64)?;
    let mut alpha = 0.5 * (lo + hi);
    for _ in 0..4 {
        let resid = cap_measure(n, alpha)? - c;
        if libm::fabs(resid) <= 1e-15 {
            break;
        }
        let deriv = powi(libm::sin(alpha), (2 * n - 2) as i32) / norm;
        if deriv <= 0.0 {
            break;
        }
        alpha = (alpha - resid / deriv).clamp(lo, hi);
    }
    Ok(alpha)
}

/// A spherical cap `S(c, ẑ) = {w : Re⟨ẑ, w⟩ > cos α(c)}` of normalised
/// measure `c`.
#[derive(Debug, Clone, PartialEq)]
pub struct CapSpec {
    pub center: CPoint,
    pub c: f64,
    pub alpha: f64,
}

impl CapSpec {
    pub fn new(center: CPoint, c: f64) -> Result<Self> {
        center.require_boundary()?;
        let alpha = cap_alpha(center.dim(), c)?;
        Ok(Self { center, c, alpha })
    }

    pub fn dim(&self) -> usize {
        self.center.dim()
    }

    pub fn contains(&self, w: &[f64]) -> bool {
        crate::ball::real_dot(self.center.coords(), w) > libm::cos(self.alpha)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rel(a: f64, b: f64) -> f64 {
        libm::fabs((a - b) / b)
    }

    #[test]
    fn product_weights_sum_to_sigma() {
        for n in 1..=3 {
            for level in [1, 2, 4, 7] {
                let rule = product_rule(n, level).unwrap();
                let s = integrate(&rule, |_| 1.0).unwrap();
                assert!(rel(s, rule.sigma()) < 1e-12, "n={n} level={level}");
                assert_eq!(rule.len(), level.pow((2 * n - 1) as u32));
            }
        }
    }

    #[test]
    fn nodes_lie_on_sphere() {
        for rule in [product_rule(3, 5).unwrap(), mc_rule(3, 500, 9).unwrap()] {
            rule.for_each_node(|_, w, wt| {
                assert!((crate::ball::norm_sqr(w).sqrt() - 1.0).abs() < 1e-12);
                assert!(wt > 0.0);
            });
        }
    }

    #[test]
    fn second_moment_n2() {
        let rule = product_rule(2, 8).unwrap();
        let got = integrate(&rule, |w| w[0] * w[0]).unwrap();
        assert!(rel(got, PI * PI / 2.0) < 1e-13);
    }

    #[test]
    fn quadrant_scheme_needs_multiple_of_four() {
        assert!(product_rule_with(2, 6, PsiScheme::QuadrantGauss).is_err());
        let rule = product_rule_with(2, 8, PsiScheme::QuadrantGauss).unwrap();
        let s = integrate(&rule, |_| 1.0).unwrap();
        assert!(rel(s, 2.0 * PI * PI) < 1e-13);
    }

    #[test]
    fn mc_rule_is_deterministic() {
        let a = mc_rule(2, 100, 42).unwrap();
        let b = mc_rule(2, 100, 42).unwrap();
        let c = mc_rule(2, 100, 43).unwrap();
        let (mut x, mut y, mut z) = ([0.0; 4], [0.0; 4], [0.0; 4]);
        a.node(7, &mut x);
        b.node(7, &mut y);
        c.node(7, &mut z);
        assert_eq!(x, y);
        assert_ne!(x, z);
        assert_eq!(integrate(&a, |_| 1.0).unwrap(), integrate(&b, |_| 1.0).unwrap());
        assert!(mc_rule(2, 0, 1).is_err());
    }

    #[test]
    fn non_finite_values_name_the_node() {
        let rule = product_rule(1, 8).unwrap();
        let err = integrate(&rule, |w| if w[0] > 0.9 { f64::NAN } else { 1.0 }).unwrap_err();
        assert!(matches!(err, Error::NonFinite(_)));
    }

    #[test]
    fn cap_measure_anchors() {
        for n in 1..=4 {
            assert!((cap_measure(n, 0.5 * PI).unwrap() - 0.5).abs() < 1e-14);
            assert!((cap_measure(n, PI).unwrap() - 1.0).abs() < 1e-14);
            assert_eq!(cap_measure(n, 0.0).unwrap(), 0.0);
        }
        assert!((cap_measure(1, 1.0).unwrap() - 1.0 / PI).abs() < 1e-15);
        assert!(cap_measure(2, -0.1).is_err());
        assert!(cap_measure(2, 3.2).is_err());
    }

    #[test]
    fn cap_alpha_anchors() {
        assert!((cap_alpha(3, 0.5).unwrap() - 0.5 * PI).abs() < 1e-12);
        assert!((cap_alpha(1, 0.25).unwrap() - 0.25 * PI).abs() < 1e-15);
        assert!(cap_alpha(2, 0.0).is_err());
        assert!(cap_alpha(2, 1.0).is_err());
    }

    #[test]
    fn zonal_rule_weights_and_caps() {
        for n in 1..=3 {
            let rule = zonal_rule(n, 6, None).unwrap();
            let s = integrate(&rule, |_| 1.0).unwrap();
            assert!(rel(s, rule.sigma()) < 1e-12, "n={n}");
            rule.for_each_node(|_, w, _| assert!((crate::ball::norm_sqr(w) - 1.0).abs() < 1e-13));
            let alpha = cap_alpha(n, 0.3).unwrap();
            let rule = zonal_rule(n, 8, Some(alpha)).unwrap();
            let ca = libm::cos(alpha);
            let m = integrate(&rule, |w| if w[0] > ca { 1.0 } else { 0.0 }).unwrap();
            assert!((m / rule.sigma() - 0.3).abs() < 1e-10, "n={n}");
        }
    }
}
