//! Geometry of the complex unit ball `B^n = {z ∈ C^n : ‖z‖ < 1}`.
//!
//! Points of `C^n` are stored as `2n` interleaved reals
//! `(Re z_1, Im z_1, …, Re z_n, Im z_n)`. The same layout is used for
//! quadrature nodes, so the slice-level helpers here are shared with the
//! integration code.

use alloc::vec;
use alloc::vec::Vec;

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Tolerance for "this point is on the unit sphere".
pub const SPHERE_TOL: f64 = 1e-12;
/// Below this norm the involution `φ_a` is replaced by `z ↦ −z`.
pub const MOBIUS_ZERO_TOL: f64 = 1e-14;

/// A point of `C^n`.
#[derive(Debug, Clone, PartialEq)]
pub struct CPoint {
    coords: Vec<f64>,
}

impl CPoint {
    pub fn new(coords: Vec<f64>) -> Result<Self> {
        if coords.is_empty() {
            return Err(Error::ZeroDimension);
        }
        if !coords.len().is_multiple_of(2) {
            return Err(Error::OddLength(coords.len()));
        }
        Ok(Self { coords })
    }

    pub fn from_slice(coords: &[f64]) -> Result<Self> {
        Self::new(coords.to_vec())
    }

    pub fn from_complex(values: &[Complex64]) -> Result<Self> {
        let mut coords = Vec::with_capacity(2 * values.len());
        for v in values {
            coords.push(v.re);
            coords.push(v.im);
        }
        Self::new(coords)
    }

    pub fn zeros(n: usize) -> Self {
        assert!(n >= 1, "dimension must be positive");
        Self { coords: vec![0.0; 2 * n] }
    }

    /// The standard basis vector `e_j` (0-based `j`).
    pub fn basis(n: usize, j: usize) -> Self {
        let mut p = Self::zeros(n);
        p.coords[2 * j] = 1.0;
        p
    }

    /// `r · e_1`.
    pub fn radial(n: usize, r: f64) -> Self {
        let mut p = Self::zeros(n);
        p.coords[0] = r;
        p
    }

    pub fn dim(&self) -> usize {
        self.coords.len() / 2
    }

    pub fn coords(&self) -> &[f64] {
        &self.coords
    }

    pub fn into_coords(self) -> Vec<f64> {
        self.coords
    }

    pub fn component(&self, j: usize) -> Complex64 {
        Complex64::new(self.coords[2 * j], self.coords[2 * j + 1])
    }

    pub fn components(&self) -> impl Iterator<Item = Complex64> + '_ {
        self.coords.chunks_exact(2).map(|c| Complex64::new(c[0], c[1]))
    }

    pub fn norm_sqr(&self) -> f64 {
        norm_sqr(&self.coords)
    }

    pub fn norm(&self) -> f64 {
        libm::sqrt(self.norm_sqr())
    }

    pub fn scale(&self, s: f64) -> Self {
        Self { coords: self.coords.iter().map(|x| s * x).collect() }
    }

    /// Multiplication by a complex scalar.
    pub fn scale_complex(&self, s: Complex64) -> Self {
        let mut out = self.clone();
        for c in out.coords.chunks_exact_mut(2) {
            let v = s * Complex64::new(c[0], c[1]);
            c[0] = v.re;
            c[1] = v.im;
        }
        out
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        check_dims(self, other)?;
        Ok(Self { coords: self.coords.iter().zip(&other.coords).map(|(a, b)| a + b).collect() })
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        check_dims(self, other)?;
        Ok(Self { coords: self.coords.iter().zip(&other.coords).map(|(a, b)| a - b).collect() })
    }

    pub fn neg(&self) -> Self {
        self.scale(-1.0)
    }

    /// `z / ‖z‖`, or `None` for the origin.
    pub fn normalized(&self) -> Option<Self> {
        let r = self.norm();
        (r > 0.0).then(|| self.scale(1.0 / r))
    }

    /// Real dot product of the underlying `R^{2n}` vectors, `Re⟨z, w⟩`.
    pub fn real_dot(&self, other: &Self) -> Result<f64> {
        check_dims(self, other)?;
        Ok(real_dot(&self.coords, &other.coords))
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        self.coords.iter().zip(&other.coords).map(|(a, b)| libm::fabs(a - b)).fold(0.0, f64::max)
    }

    pub fn require_interior(&self) -> Result<f64> {
        let r2 = self.norm_sqr();
        if !(r2 < 1.0) {
            return Err(Error::NotInterior(libm::sqrt(r2)));
        }
        Ok(r2)
    }

    pub fn require_boundary(&self) -> Result<()> {
        let r = self.norm();
        if libm::fabs(r - 1.0) > SPHERE_TOL {
            return Err(Error::NotOnSphere(r));
        }
        Ok(())
    }

    pub fn require_unit(&self, tol: f64) -> Result<()> {
        let r = self.norm();
        if libm::fabs(r - 1.0) > tol {
            return Err(Error::NotUnit(r));
        }
        Ok(())
    }
}

pub(crate) fn check_dims(a: &CPoint, b: &CPoint) -> Result<()> {
    if a.dim() != b.dim() {
        return Err(Error::DimensionMismatch { expected: a.dim(), got: b.dim() });
    }
    Ok(())
}

#[inline]
pub fn norm_sqr(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum()
}

#[inline]
pub fn real_dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// `⟨z, w⟩ = Σ_j z_j conj(w_j)` on interleaved slices.
#[inline]
pub fn inner_slices(z: &[f64], w: &[f64]) -> Complex64 {
    let mut re = 0.0;
    let mut im = 0.0;
    for (a, b) in z.chunks_exact(2).zip(w.chunks_exact(2)) {
        // (a0 + i a1)(b0 − i b1)
        re += a[0] * b[0] + a[1] * b[1];
        im += a[1] * b[0] - a[0] * b[1];
    }
    Complex64::new(re, im)
}

/// The Hermitian inner product `⟨z, w⟩ = Σ_j z_j conj(w_j)`.
pub fn hermitian_inner(z: &CPoint, w: &CPoint) -> Result<Complex64> {
    check_dims(z, w)?;
    Ok(inner_slices(&z.coords, &w.coords))
}

/// The involutive automorphism `φ_a` of the ball.
///
/// `φ_a(z) = (a − P_a z − s_a Q_a z) / (1 − ⟨z, a⟩)` where `P_a` projects onto
/// the complex line through `a`, `Q_a = I − P_a` and `s_a = √(1 − ‖a‖²)`.
/// For `a = 0` the map is `z ↦ −z`. It swaps `0` and `a` and satisfies
/// `φ_a ∘ φ_a = id`.
#[derive(Debug, Clone)]
pub struct Involution {
    a: CPoint,
    a_norm_sqr: f64,
    s: f64,
}

impl Involution {
    pub fn new(a: &CPoint) -> Result<Self> {
        let a_norm_sqr = a.require_interior()?;
        Ok(Self { a: a.clone(), a_norm_sqr, s: libm::sqrt(1.0 - a_norm_sqr) })
    }

    pub fn center(&self) -> &CPoint {
        &self.a
    }

    pub fn dim(&self) -> usize {
        self.a.dim()
    }

    fn is_trivial(&self) -> bool {
        self.a_norm_sqr < MOBIUS_ZERO_TOL * MOBIUS_ZERO_TOL
    }

    /// Checked application; `z` must lie in the closed ball.
    pub fn apply(&self, z: &CPoint) -> Result<CPoint> {
        check_dims(&self.a, z)?;
        let r = z.norm();
        if r > 1.0 + SPHERE_TOL {
            return Err(Error::OutsideBall(r));
        }
        let mut out = vec![0.0; z.coords.len()];
        self.apply_into(&z.coords, &mut out)?;
        CPoint::new(out)
    }

    /// Unchecked slice version used in quadrature loops. Only the pole is
    /// reported.
    #[inline]
    pub fn apply_into(&self, z: &[f64], out: &mut [f64]) -> Result<()> {
        if self.is_trivial() {
            for (o, x) in out.iter_mut().zip(z) {
                *o = -x;
            }
            return Ok(());
        }
        let za = inner_slices(z, &self.a.coords);
        let denom = Complex64::new(1.0 - za.re, -za.im);
        if denom.norm_sqr() < 1e-300 {
            return Err(Error::Singular);
        }
        let inv = denom.inv();
        let proj = za / self.a_norm_sqr;
        for ((o, zc), ac) in out.chunks_exact_mut(2).zip(z.chunks_exact(2)).zip(self.a.coords.chunks_exact(2)) {
            let a_j = Complex64::new(ac[0], ac[1]);
            let z_j = Complex64::new(zc[0], zc[1]);
            let p_j = a_j * proj;
            let q_j = z_j - p_j;
            let v = (a_j - p_j - q_j * self.s) * inv;
            o[0] = v.re;
            o[1] = v.im;
        }
        Ok(())
    }
}

/// `φ_a(z)`.
pub fn mobius(a: &CPoint, z: &CPoint) -> Result<CPoint> {
    check_dims(a, z)?;
    Involution::new(a)?.apply(z)
}

/// Both sides of `1 − ⟨φ_a(z), φ_a(w)⟩ = (1−⟨a,a⟩)(1−⟨z,w⟩) / ((1−⟨z,a⟩)(1−⟨a,w⟩))`,
/// left side first.
pub fn lemma_a_pair(a: &CPoint, z: &CPoint, w: &CPoint) -> Result<(Complex64, Complex64)> {
    check_dims(a, z)?;
    check_dims(a, w)?;
    let phi = Involution::new(a)?;
    let lhs = Complex64::new(1.0, 0.0) - hermitian_inner(&phi.apply(z)?, &phi.apply(w)?)?;
    let one = Complex64::new(1.0, 0.0);
    let den = (one - hermitian_inner(z, a)?) * (one - hermitian_inner(a, w)?);
    if den.norm_sqr() < 1e-300 {
        return Err(Error::Singular);
    }
    let rhs = (one - hermitian_inner(a, a)?) * (one - hermitian_inner(z, w)?) / den;
    Ok((lhs, rhs))
}

/// A square complex matrix, row-major. Used for the Bergman metric and its
/// inverse, which are Hermitian.
#[derive(Debug, Clone, PartialEq)]
pub struct HermitianMatrix {
    dim: usize,
    entries: Vec<Complex64>,
}

impl HermitianMatrix {
    pub fn from_fn<F: FnMut(usize, usize) -> Complex64>(dim: usize, mut f: F) -> Self {
        let mut entries = Vec::with_capacity(dim * dim);
        for i in 0..dim {
            for j in 0..dim {
                entries.push(f(i, j));
            }
        }
        Self { dim, entries }
    }

    pub fn identity(dim: usize) -> Self {
        Self::from_fn(dim, |i, j| if i == j { Complex64::new(1.0, 0.0) } else { Complex64::new(0.0, 0.0) })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn get(&self, i: usize, j: usize) -> Complex64 {
        self.entries[i * self.dim + j]
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        self.entries.iter().zip(&other.entries).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max)
    }

    /// Largest `|m_ij − conj(m_ji)|` relative to the largest entry.
    pub fn hermitian_defect(&self) -> f64 {
        let scale = self.entries.iter().map(|e| e.norm()).fold(0.0, f64::max).max(1e-300);
        let mut worst: f64 = 0.0;
        for i in 0..self.dim {
            for j in 0..self.dim {
                worst = worst.max((self.get(i, j) - self.get(j, i).conj()).norm());
            }
        }
        worst / scale
    }

    /// Contraction over the barred index, `Σ_k m_{i k̄} o_{j k̄}`.
    ///
    /// With `m = g` and `o = g^{-1}` this is the identity.
    pub fn contract_barred(&self, other: &Self) -> Self {
        Self::from_fn(self.dim, |i, j| (0..self.dim).map(|k| self.get(i, k) * other.get(j, k)).sum())
    }

    /// `Σ_{ij} m_{i j̄} v_i conj(v_j)`.
    pub fn quadratic_form(&self, v: &CPoint) -> f64 {
        let mut acc = Complex64::new(0.0, 0.0);
        for i in 0..self.dim {
            for j in 0..self.dim {
                acc += self.get(i, j) * v.component(i) * v.component(j).conj();
            }
        }
        acc.re
    }

    /// Cholesky factorisation of the Hermitian form `v ↦ Σ m_{ij̄} v_i v̄_j`,
    /// failing on any pivot at or below `pivot_tol`.
    pub fn is_positive_definite(&self, pivot_tol: f64) -> bool {
        let n = self.dim;
        // Form matrix A with A_{ji} = m_{ij̄}, so that v* A v equals the form.
        let mut l = vec![Complex64::new(0.0, 0.0); n * n];
        for i in 0..n {
            for j in 0..=i {
                let mut s = self.get(j, i);
                for k in 0..j {
                    s -= l[i * n + k] * l[j * n + k].conj();
                }
                if i == j {
                    if !(s.re > pivot_tol) || libm::fabs(s.im) > 1e-10 * s.re.max(1.0) {
                        return false;
                    }
                    l[i * n + i] = Complex64::new(libm::sqrt(s.re), 0.0);
                } else {
                    l[i * n + j] = s / l[j * n + j].re;
                }
            }
        }
        true
    }
}

/// The Bergman metric
/// `g_{ij̄} = (n+1)(δ_ij/(1−‖z‖²) + conj(z_i) z_j/(1−‖z‖²)²)`.
pub fn bergman_metric(z: &CPoint) -> Result<HermitianMatrix> {
    let r2 = z.require_interior()?;
    let n = z.dim();
    let d = 1.0 - r2;
    let np1 = (n + 1) as f64;
    Ok(HermitianMatrix::from_fn(n, |i, j| {
        let delta = if i == j { 1.0 / d } else { 0.0 };
        (Complex64::new(delta, 0.0) + z.component(i).conj() * z.component(j) / (d * d)) * np1
    }))
}

/// The inverse metric `g^{ij̄} = (1−‖z‖²)/(n+1) · (δ_ij − z_i conj(z_j))`.
pub fn bergman_metric_inverse(z: &CPoint) -> Result<HermitianMatrix> {
    let r2 = z.require_interior()?;
    let n = z.dim();
    let f = (1.0 - r2) / (n + 1) as f64;
    Ok(HermitianMatrix::from_fn(n, |i, j| {
        let delta = if i == j { 1.0 } else { 0.0 };
        (Complex64::new(delta, 0.0) - z.component(i) * z.component(j).conj()) * f
    }))
}

/// The normalised Bergman kernel `K(z, w) = (1 − ⟨z, w⟩)^{−(n+1)}`.
pub fn bergman_kernel(z: &CPoint, w: &CPoint) -> Result<Complex64> {
    z.require_interior()?;
    w.require_interior()?;
    let base = Complex64::new(1.0, 0.0) - hermitian_inner(z, w)?;
    Ok(base.powi(-((z.dim() + 1) as i32)))
}

/// `‖∇_B h(z)‖_B` from the Wirtinger derivatives `∂h/∂z̄_j` of a real `h`:
/// `√((1−‖z‖²)/(n+1) · (Σ|∂h/∂z_j|² − |Σ z_j ∂h/∂z_j|²))`.
pub fn bergman_grad_norm(z: &CPoint, dbar: &[Complex64]) -> Result<f64> {
    let r2 = z.require_interior()?;
    if dbar.len() != z.dim() {
        return Err(Error::DimensionMismatch { expected: z.dim(), got: dbar.len() });
    }
    let mut sum_sq = 0.0;
    let mut radial = Complex64::new(0.0, 0.0);
    for (j, d) in dbar.iter().enumerate() {
        // h real ⇒ ∂h/∂z_j = conj(∂h/∂z̄_j)
        let dz = d.conj();
        sum_sq += dz.norm_sqr();
        radial += z.component(j) * dz;
    }
    let val = (1.0 - r2) / (z.dim() + 1) as f64 * (sum_sq - radial.norm_sqr());
    Ok(libm::sqrt(val.max(0.0)))
}

/// `1 − ‖φ_z(w)‖² = (1−‖z‖²)(1−‖w‖²)/|1−⟨z,w⟩|²` without forming `φ_z(w)`.
pub fn pseudo_hyperbolic_sqr(z: &CPoint, w: &CPoint) -> Result<f64> {
    let rz = z.require_interior()?;
    let rw = w.require_interior()?;
    check_dims(z, w)?;
    let den = (Complex64::new(1.0, 0.0) - hermitian_inner(z, w)?).norm_sqr();
    Ok((1.0 - (1.0 - rz) * (1.0 - rw) / den).max(0.0))
}

/// Bergman geodesic distance `√(n+1) · atanh(‖φ_z(w)‖)`.
pub fn hyperbolic_distance(z: &CPoint, w: &CPoint) -> Result<f64> {
    let rho = libm::sqrt(pseudo_hyperbolic_sqr(z, w)?);
    Ok(libm::sqrt((z.dim() + 1) as f64) * libm::atanh(rho.min(1.0)))
}

/// A unitary map of `C^n`, stored as a dense complex matrix acting on column
/// vectors.
#[derive(Debug, Clone, PartialEq)]
pub struct Unitary {
    dim: usize,
    m: Vec<Complex64>,
}

impl Unitary {
    /// Gram–Schmidt on the given columns. Fails if they are linearly
    /// dependent.
    pub fn from_columns(columns: &[CPoint]) -> Result<Self> {
        let n = columns.first().ok_or(Error::ZeroDimension)?.dim();
        if columns.len() != n {
            return Err(Error::DimensionMismatch { expected: n, got: columns.len() });
        }
        let mut basis: Vec<CPoint> = Vec::with_capacity(n);
        for c in columns {
            check_dims(c, &columns[0])?;
            let mut v = c.clone();
            // two passes for stability
            for _ in 0..2 {
                for b in &basis {
                    let p = hermitian_inner(&v, b)?;
                    v = v.sub(&b.scale_complex(p))?;
                }
            }
            let r = v.norm();
            if r < 1e-12 {
                return Err(Error::Degenerate("columns are linearly dependent".into()));
            }
            basis.push(v.scale(1.0 / r));
        }
        let mut m = vec![Complex64::new(0.0, 0.0); n * n];
        for (j, b) in basis.iter().enumerate() {
            for i in 0..n {
                m[i * n + j] = b.component(i);
            }
        }
        Ok(Self { dim: n, m })
    }

    /// A unitary whose first column is `u / ‖u‖`, completed with the
    /// standard basis.
    pub fn with_first_column(u: &CPoint) -> Result<Self> {
        let n = u.dim();
        let first = u.normalized().ok_or_else(|| Error::Degenerate("zero vector".into()))?;
        let mut cols = vec![first.clone()];
        // pick the n-1 basis vectors least aligned with u
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by(|&a, &b| first.component(a).norm().total_cmp(&first.component(b).norm()));
        for &j in order.iter().take(n - 1) {
            cols.push(CPoint::basis(n, j));
        }
        Self::from_columns(&cols)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn apply(&self, v: &CPoint) -> Result<CPoint> {
        if v.dim() != self.dim {
            return Err(Error::DimensionMismatch { expected: self.dim, got: v.dim() });
        }
        let mut out = vec![0.0; 2 * self.dim];
        self.apply_into(v.coords(), &mut out);
        CPoint::new(out)
    }

    #[inline]
    pub fn apply_into(&self, v: &[f64], out: &mut [f64]) {
        let n = self.dim;
        for i in 0..n {
            let mut acc = Complex64::new(0.0, 0.0);
            for j in 0..n {
                acc += self.m[i * n + j] * Complex64::new(v[2 * j], v[2 * j + 1]);
            }
            out[2 * i] = acc.re;
            out[2 * i + 1] = acc.im;
        }
    }
}
