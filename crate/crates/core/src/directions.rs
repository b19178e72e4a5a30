//! Deterministic, well-spread direction sets on `S^{2n-1}`.
//!
//! Points of the additive-recurrence sequence with generalised golden-ratio
//! increments fill `[0,1)^{2n-1}`; each point is sent to the sphere through
//! polar-torus coordinates so the image is equidistributed for `dσ`.

use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;

use crate::ball::CPoint;
use crate::error::{Error, Result};

/// The unique positive root of `x^{d+1} = x + 1`.
fn generalised_golden(d: usize) -> f64 {
    let mut x = 2.0_f64;
    for _ in 0..64 {
        x = libm::pow(1.0 + x, 1.0 / (d as f64 + 1.0));
    }
    x
}

/// The first `count` points of the `d`-dimensional sequence
/// `frac(½ + k·(φ_d^{-1}, …, φ_d^{-d}))`.
pub fn recurrence_points(d: usize, count: usize) -> Vec<Vec<f64>> {
    let g = generalised_golden(d);
    let alpha: Vec<f64> = (1..=d).map(|j| libm::pow(g, -(j as f64))).collect();
    (0..count)
        .map(|k| {
            alpha
                .iter()
                .map(|a| {
                    let x = 0.5 + (k as f64 + 1.0) * a;
                    x - libm::floor(x)
                })
                .collect()
        })
        .collect()
}

/// Maps `u ∈ [0,1)^{2n-1}` to a unit vector of `C^n`: the first `n−1`
/// entries pick `(|w_1|², …, |w_n|²)` uniformly on the simplex by stick
/// breaking, the last `n` the phases.
pub fn cube_to_sphere(n: usize, u: &[f64]) -> Result<CPoint> {
    if n < 1 {
        return Err(Error::ZeroDimension);
    }
    if u.len() != 2 * n - 1 {
        return Err(Error::DimensionMismatch { expected: 2 * n - 1, got: u.len() });
    }
    let mut shares = vec![0.0; n];
    let mut rest = 1.0;
    for j in 0..n - 1 {
        let b = 1.0 - libm::pow(1.0 - u[j], 1.0 / (n - 1 - j) as f64);
        shares[j] = rest * b;
        rest -= shares[j];
    }
    shares[n - 1] = rest.max(0.0);
    let mut coords = vec![0.0; 2 * n];
    for j in 0..n {
        let r = libm::sqrt(shares[j]);
        let psi = 2.0 * PI * u[n - 1 + j];
        coords[2 * j] = r * libm::cos(psi);
        coords[2 * j + 1] = r * libm::sin(psi);
    }
    let p = CPoint::new(coords)?;
    // absorb rounding so the result is unit to working precision
    Ok(p.normalized().unwrap_or_else(|| CPoint::basis(n, 0)))
}

/// `count` unit directions in `C^n`.
pub fn sphere_grid(n: usize, count: usize) -> Result<Vec<CPoint>> {
    if n < 1 {
        return Err(Error::ZeroDimension);
    }
    recurrence_points(2 * n - 1, count).iter().map(|u| cube_to_sphere(n, u)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn golden_roots() {
        assert!((generalised_golden(1) - 1.618_033_988_749_895).abs() < 1e-14);
        assert!((generalised_golden(2) - 1.324_717_957_244_746).abs() < 1e-14);
    }

    #[test]
    fn grid_is_unit_and_spread() {
        for n in 1..=4 {
            let g = sphere_grid(n, 500).unwrap();
            assert_eq!(g.len(), 500);
            let mut mean = vec![0.0; 2 * n];
            for p in &g {
                assert!((p.norm() - 1.0).abs() < 1e-14);
                for (m, c) in mean.iter_mut().zip(p.coords()) {
                    *m += c / 500.0;
                }
            }
            assert!(mean.iter().all(|m| m.abs() < 0.05), "n={n} {mean:?}");
        }
    }

    #[test]
    fn second_moments_match_uniform_measure() {
        // E|w_1|² = 1/n under dσ/σ
        for n in 2..=3 {
            let g = sphere_grid(n, 4000).unwrap();
            let m: f64 = g.iter().map(|p| p.component(0).norm_sqr()).sum::<f64>() / 4000.0;
            assert!((m - 1.0 / n as f64).abs() < 5e-3, "n={n} m={m}");
        }
    }
}
