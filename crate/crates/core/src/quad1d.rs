//! One-dimensional quadrature: Gauss–Legendre tables and adaptive
//! Gauss–Kronrod integration.

use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;

use crate::sum::CompensatedSum;

/// Gauss–Legendre nodes and weights on `[-1, 1]`.
#[derive(Debug, Clone, PartialEq)]
pub struct GaussLegendre {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl GaussLegendre {
    /// Builds the `n`-point rule by Newton iteration on `P_n`.
    pub fn new(n: usize) -> Self {
        assert!(n >= 1, "Gauss–Legendre rule needs at least one node");
        let mut nodes = vec![0.0; n];
        let mut weights = vec![0.0; n];
        let nf = n as f64;
        for i in 0..n.div_ceil(2) {
            let mut x = libm::cos(PI * (i as f64 + 0.75) / (nf + 0.5));
            let mut dp = 1.0;
            for _ in 0..100 {
                let (p, d) = legendre_with_derivative(n, x);
                dp = d;
                let dx = p / d;
                x -= dx;
                if libm::fabs(dx) < 1e-16 {
                    let (_, d) = legendre_with_derivative(n, x);
                    dp = d;
                    break;
                }
            }
            let w = 2.0 / ((1.0 - x * x) * dp * dp);
            nodes[i] = -x;
            nodes[n - 1 - i] = x;
            weights[i] = w;
            weights[n - 1 - i] = w;
        }
        if n % 2 == 1 {
            nodes[n / 2] = 0.0;
        }
        Self { nodes, weights }
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// Nodes and weights mapped affinely onto `[a, b]`.
    pub fn on_interval(&self, a: f64, b: f64) -> impl Iterator<Item = (f64, f64)> + '_ {
        let half = 0.5 * (b - a);
        let mid = 0.5 * (a + b);
        self.nodes.iter().zip(&self.weights).map(move |(x, w)| (mid + half * x, half * w))
    }

    pub fn integrate<F: FnMut(f64) -> f64>(&self, a: f64, b: f64, mut f: F) -> f64 {
        let mut acc = CompensatedSum::new();
        for (x, w) in self.on_interval(a, b) {
            acc.add(w * f(x));
        }
        acc.value()
    }
}

fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    if n == 0 {
        return (1.0, 0.0);
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

// 15-point Kronrod extension of the 7-point Gauss rule.
const XGK: [f64; 8] = [
    0.991_455_371_120_812_639_206_854_697_526_329,
    0.949_107_912_342_758_524_526_189_684_047_851,
    0.864_864_423_359_769_072_789_712_788_640_926,
    0.741_531_185_599_394_439_863_864_773_280_788,
    0.586_087_235_467_691_130_294_144_845_693_013,
    0.405_845_151_377_397_166_906_606_412_076_961,
    0.207_784_955_007_898_467_600_689_403_773_245,
    0.000_000_000_000_000_000_000_000_000_000_000,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_224_963_732_008_058_970,
    0.063_092_092_629_978_553_290_700_663_189_204,
    0.104_790_010_322_250_183_839_876_322_541_518,
    0.140_653_259_715_525_918_745_189_590_510_238,
    0.169_004_726_639_267_902_826_583_426_598_550,
    0.190_350_578_064_785_409_913_256_402_421_014,
    0.204_432_940_075_298_892_414_161_999_234_649,
    0.209_482_141_084_727_828_012_999_174_891_714,
];
const WG: [f64; 4] = [
    0.129_484_966_168_869_693_270_611_432_679_082,
    0.279_705_391_489_276_667_901_467_771_423_780,
    0.381_830_050_505_118_944_950_369_775_488_975,
    0.417_959_183_673_469_387_755_102_040_816_327,
];

fn kronrod15<F: FnMut(f64) -> f64>(f: &mut F, a: f64, b: f64) -> (f64, f64) {
    let mid = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = f(mid);
    let mut kronrod = WGK[7] * fc;
    let mut gauss = WG[3] * fc;
    for j in 0..7 {
        let dx = half * XGK[j];
        let s = f(mid - dx) + f(mid + dx);
        kronrod += WGK[j] * s;
        if j % 2 == 1 {
            gauss += WG[j / 2] * s;
        }
    }
    (kronrod * half, libm::fabs((kronrod - gauss) * half))
}

/// Adaptive Gauss–Kronrod (G7/K15) integration of `f` over `[a, b]`.
///
/// Subintervals are bisected until the Kronrod–Gauss difference falls below
/// `tol` scaled by the interval fraction, or the depth limit is reached.
pub fn adaptive<F: FnMut(f64) -> f64>(mut f: F, a: f64, b: f64, tol: f64) -> f64 {
    if a == b {
        return 0.0;
    }
    let total = libm::fabs(b - a);
    let mut acc = CompensatedSum::new();
    let mut stack: Vec<(f64, f64, u32)> = vec![(a, b, 0)];
    while let Some((lo, hi, depth)) = stack.pop() {
        let (val, err) = kronrod15(&mut f, lo, hi);
        let budget = tol * libm::fabs(hi - lo) / total;
        if err <= budget.max(1e-300) || depth >= 48 {
            acc.add(val);
        } else {
            let mid = 0.5 * (lo + hi);
            stack.push((mid, hi, depth + 1));
            stack.push((lo, mid, depth + 1));
        }
    }
    acc.value()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gauss_legendre_exact_for_polynomials() {
        for n in 1..=12 {
            let rule = GaussLegendre::new(n);
            // ∫_{-1}^{1} x^k = 2/(k+1) for even k
            for k in (0..2 * n).step_by(2) {
                let got = rule.integrate(-1.0, 1.0, |x| libm::pow(x, k as f64));
                let want = 2.0 / (k as f64 + 1.0);
                assert!((got - want).abs() < 1e-13, "n={n} k={k}");
            }
        }
    }

    #[test]
    fn gauss_legendre_large_rule() {
        let rule = GaussLegendre::new(200);
        let s: f64 = rule.weights.iter().sum();
        assert!((s - 2.0).abs() < 1e-13);
        let got = rule.integrate(0.0, PI, libm::sin);
        assert!((got - 2.0).abs() < 1e-13);
        assert!(rule.nodes.windows(2).all(|w| w[0] < w[1]));
    }

    #[test]
    fn adaptive_handles_kinks_and_peaks() {
        let got = adaptive(|x| libm::fabs(x - 0.3), -1.0, 1.0, 1e-13);
        assert!((got - (1.3 * 1.3 + 0.7 * 0.7) / 2.0).abs() < 1e-12);
        let got = adaptive(|x| 1.0 / (1e-4 + x * x), -1.0, 1.0, 1e-12);
        let want = 2.0 * libm::atan(1.0 / 1e-2) / 1e-2;
        assert!(((got - want) / want).abs() < 1e-12);
    }
}
