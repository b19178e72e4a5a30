//! Seeded sampling of points, directions, rotations and test boundary data.

use ballharm_core::ball::Unitary;
use ballharm_core::{BoundaryFunction, CPoint, Result};
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal, StandardUniform};

/// A ChaCha stream keyed by `(seed, stream)`. Each suite draws from its own
/// stream so adding checks to one suite leaves the others unchanged.
#[derive(Debug, Clone)]
pub struct Sampler {
    rng: ChaCha8Rng,
}

impl Sampler {
    pub fn new(seed: u64, stream: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(stream);
        Self { rng }
    }

    pub fn unit(&mut self) -> f64 {
        StandardUniform.sample(&mut self.rng)
    }

    pub fn uniform(&mut self, a: f64, b: f64) -> f64 {
        a + (b - a) * self.unit()
    }

    pub fn normal(&mut self) -> f64 {
        StandardNormal.sample(&mut self.rng)
    }

    pub fn index(&mut self, len: usize) -> usize {
        ((self.unit() * len as f64) as usize).min(len - 1)
    }

    pub fn gaussian_vec(&mut self, d: usize) -> Vec<f64> {
        (0..d).map(|_| self.normal()).collect()
    }

    /// Uniform on `S^{2n-1}`.
    pub fn sphere(&mut self, n: usize) -> CPoint {
        loop {
            let v = self.gaussian_vec(2 * n);
            let r = v.iter().map(|x| x * x).sum::<f64>().sqrt();
            if r > 1e-12 {
                return CPoint::new(v.into_iter().map(|x| x / r).collect()).expect("even length");
            }
        }
    }

    /// A point of norm exactly `r` in a uniform direction.
    pub fn at_radius(&mut self, n: usize, r: f64) -> CPoint {
        self.sphere(n).scale(r)
    }

    /// A point with norm uniform in `[0, rmax]`.
    pub fn in_ball(&mut self, n: usize, rmax: f64) -> CPoint {
        let r = rmax * self.unit();
        self.at_radius(n, r)
    }

    /// Gram–Schmidt applied to Gaussian columns.
    pub fn unitary(&mut self, n: usize) -> Result<Unitary> {
        let cols: Vec<CPoint> = (0..n).map(|_| self.sphere(n)).collect();
        Unitary::from_columns(&cols)
    }

    /// Smooth boundary data with `|f| ≤ sup` on the sphere. Alternates at
    /// random between a normalised trigonometric sum
    /// `sup · Σ a_k cos(b_k·w + c_k) / Σ|a_k|` and a ridge
    /// `sup · tanh(β (u·w − t))`.
    pub fn smooth_boundary(&mut self, n: usize, sup: f64, tag: &str) -> Result<BoundaryFunction> {
        let d = 2 * n;
        if self.unit() < 0.5 {
            let terms = 3;
            let amps: Vec<f64> = (0..terms).map(|_| self.normal()).collect();
            let total: f64 = amps.iter().map(|a| a.abs()).sum::<f64>().max(1e-12);
            let amps: Vec<f64> = amps.iter().map(|a| sup * a / total).collect();
            let freqs: Vec<Vec<f64>> = (0..terms).map(|_| self.gaussian_vec(d).iter().map(|b| 1.5 * b).collect()).collect();
            let phases: Vec<f64> = (0..terms).map(|_| self.uniform(0.0, std::f64::consts::TAU)).collect();
            BoundaryFunction::new(n, sup, format!("{tag}:trig"), move |w| {
                let mut acc = 0.0;
                for k in 0..terms {
                    let arg: f64 = freqs[k].iter().zip(w).map(|(b, x)| b * x).sum::<f64>() + phases[k];
                    acc += amps[k] * arg.cos();
                }
                acc
            })
        } else {
            let u = self.sphere(n).into_coords();
            let beta = self.uniform(0.5, 4.0);
            let shift = self.uniform(-0.5, 0.5);
            BoundaryFunction::new(n, sup, format!("{tag}:ridge"), move |w| {
                let s: f64 = u.iter().zip(w).map(|(a, b)| a * b).sum();
                sup * (beta * (s - shift)).tanh()
            })
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn streams_are_reproducible_and_distinct() {
        let mut s = Sampler::new(7, 1);
        let a: Vec<f64> = (0..5).map(|_| s.unit()).collect();
        let mut s = Sampler::new(7, 1);
        let b: Vec<f64> = (0..5).map(|_| s.unit()).collect();
        assert_eq!(a, b);
        let mut t = Sampler::new(7, 2);
        assert_ne!(a[0], t.unit());
    }

    #[test]
    fn smooth_data_respects_bound() {
        let mut s = Sampler::new(3, 0);
        for k in 0..20 {
            let f = s.smooth_boundary(2, 0.8, &format!("f{k}")).unwrap();
            for _ in 0..50 {
                let w = s.sphere(2);
                assert!(f.evaluate(w.coords()).abs() <= 0.8 + 1e-15);
            }
        }
    }

    #[test]
    fn ball_points_stay_inside() {
        let mut s = Sampler::new(1, 0);
        for _ in 0..100 {
            assert!(s.in_ball(3, 0.8).norm() <= 0.8 + 1e-15);
            assert!((s.at_radius(2, 0.5).norm() - 0.5).abs() < 1e-15);
        }
    }
}
