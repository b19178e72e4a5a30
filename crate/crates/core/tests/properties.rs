use ballharm_core::ball::{bergman_metric, bergman_metric_inverse, hyperbolic_distance, lemma_a_pair, mobius, Involution, Unitary};
use ballharm_core::burgeth::m_closed_n1;
use ballharm_core::poisson::ps_kernel;
use ballharm_core::quadrature::{cap_alpha, cap_measure, integrate, mc_rule, product_rule};
use ballharm_core::sharpness::{c_closed, radial_direction, sharp_constant, v_vector};
use ballharm_core::{CPoint, HermitianMatrix};
use proptest::prelude::*;

/// Points with norm below `rmax`; the radius is drawn separately so that
/// points near the boundary are as likely as points near the origin.
fn point_in_ball(n: usize, rmax: f64) -> impl Strategy<Value = CPoint> {
    (prop::collection::vec(-1.0f64..1.0, 2 * n), 0.0..rmax).prop_map(move |(v, r)| {
        let len = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        if len < 1e-6 {
            return CPoint::radial(n, r);
        }
        CPoint::new(v.iter().map(|x| x * r / len).collect()).unwrap()
    })
}

fn sphere_point(n: usize) -> impl Strategy<Value = CPoint> {
    prop::collection::vec(-1.0f64..1.0, 2 * n).prop_map(move |v| {
        let len = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        if len < 1e-6 {
            return CPoint::basis(n, 0);
        }
        CPoint::new(v.iter().map(|x| x / len).collect()).unwrap()
    })
}

fn pair(rmax: f64) -> impl Strategy<Value = (CPoint, CPoint)> {
    (1usize..=4).prop_flat_map(move |n| (point_in_ball(n, rmax), point_in_ball(n, rmax)))
}

fn triple(rmax: f64) -> impl Strategy<Value = (CPoint, CPoint, CPoint)> {
    (1usize..=4).prop_flat_map(move |n| (point_in_ball(n, rmax), point_in_ball(n, rmax), point_in_ball(n, rmax)))
}

proptest! {
    #[test]
    fn involution_is_self_inverse((a, z) in pair(0.95)) {
        let phi = Involution::new(&a).unwrap();
        let back = phi.apply(&phi.apply(&z).unwrap()).unwrap();
        prop_assert!(back.max_abs_diff(&z) < 1e-12);
        prop_assert!(phi.apply(&CPoint::zeros(a.dim())).unwrap().max_abs_diff(&a) < 1e-15);
        prop_assert!(phi.apply(&a).unwrap().norm() < 1e-12);
    }

    #[test]
    fn involution_keeps_ball_and_sphere(a in (1usize..=4).prop_flat_map(|n| point_in_ball(n, 0.95)), seed in any::<u64>()) {
        let n = a.dim();
        let z = CPoint::radial(n, (seed % 1000) as f64 / 1000.0 * 0.999);
        prop_assert!(mobius(&a, &z).unwrap().norm() < 1.0);
        let zeta = CPoint::basis(n, (seed % n as u64) as usize);
        prop_assert!((mobius(&a, &zeta).unwrap().norm() - 1.0).abs() < 1e-10);
    }

    #[test]
    fn lemma_a_identity((a, z, w) in triple(0.9)) {
        let (lhs, rhs) = lemma_a_pair(&a, &z, &w).unwrap();
        prop_assert!((lhs - rhs).norm() <= 1e-12 * rhs.norm());
    }

    #[test]
    fn metric_times_inverse_is_identity(z in (1usize..=4).prop_flat_map(|n| point_in_ball(n, 0.95))) {
        let prod = bergman_metric(&z).unwrap().contract_barred(&bergman_metric_inverse(&z).unwrap());
        prop_assert!(prod.max_abs_diff(&HermitianMatrix::identity(z.dim())) < 1e-10);
    }

    #[test]
    fn distance_is_an_invariant_metric((z, w, x) in triple(0.9), a in prop::collection::vec(-0.4f64..0.4, 8)) {
        let n = z.dim();
        let a = CPoint::new(a[..2 * n].to_vec()).unwrap();
        let d = hyperbolic_distance(&z, &w).unwrap();
        prop_assert!(d >= 0.0);
        prop_assert!((d - hyperbolic_distance(&w, &z).unwrap()).abs() <= 1e-9 * d.max(1.0));
        prop_assert!(hyperbolic_distance(&z, &x).unwrap() <= d + hyperbolic_distance(&w, &x).unwrap() + 1e-9);
        let moved = hyperbolic_distance(&mobius(&a, &z).unwrap(), &mobius(&a, &w).unwrap()).unwrap();
        prop_assert!((moved - d).abs() <= 1e-9 * d.max(1.0));
        prop_assert!(hyperbolic_distance(&z, &z).unwrap() < 1e-7);
    }

    #[test]
    fn v_norm_identity((z, l) in (1usize..=4).prop_flat_map(|n| (point_in_ball(n, 0.99), sphere_point(n)))) {
        let v = v_vector(&z, &l).unwrap();
        let zl = z.components().zip(l.components()).map(|(a, b)| a * b.conj()).sum::<ballharm_core::Complex64>();
        prop_assert!((v.norm_sqr() - (1.0 - z.norm_sqr() + zl.norm_sqr())).abs() < 1e-12);
    }

    #[test]
    fn directional_functional_is_bounded_by_the_sharp_constant((z, l) in (1usize..=5).prop_flat_map(|n| (point_in_ball(n, 0.95), sphere_point(n)))) {
        let s = sharp_constant(z.dim()).unwrap();
        let scale = 1.0 - z.norm_sqr();
        prop_assert!(c_closed(&z, &l).unwrap() * scale <= s * (1.0 + 1e-12));
        let radial = c_closed(&z, &radial_direction(&z)).unwrap() * scale;
        prop_assert!((radial - s).abs() <= 1e-12 * s);
    }

    #[test]
    fn poisson_kernel_is_positive((z, w) in (1usize..=4).prop_flat_map(|n| (point_in_ball(n, 0.99), sphere_point(n)))) {
        prop_assert!(ps_kernel(&z, &w).unwrap() > 0.0);
    }

    #[test]
    fn cap_measure_inverts_cap_alpha(n in 1usize..=5, c in 1e-3f64..0.999) {
        let alpha = cap_alpha(n, c).unwrap();
        prop_assert!((0.0..=std::f64::consts::PI).contains(&alpha));
        prop_assert!((cap_measure(n, alpha).unwrap() - c).abs() < 1e-10);
    }

    #[test]
    fn envelope_is_monotone(c in 0.01f64..0.98, dc in 0.001f64..0.02, r in 0.0f64..0.9, dr in 0.001f64..0.09) {
        let m = m_closed_n1(c, r).unwrap();
        prop_assert!(m > -1.0 && m < 1.0);
        prop_assert!(m_closed_n1(c + dc, r).unwrap() > m);
        prop_assert!(m_closed_n1(c, r + dr).unwrap() >= m - 1e-14);
        prop_assert!(m >= 2.0 * c - 1.0 - 1e-14);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn monte_carlo_rules_are_deterministic(n in 1usize..=3, seed in any::<u64>()) {
        let f = |w: &[f64]| (w[0] + 0.5 * w[1]).exp();
        let a = integrate(&mc_rule(n, 2000, seed).unwrap(), f).unwrap();
        let b = integrate(&mc_rule(n, 2000, seed).unwrap(), f).unwrap();
        prop_assert_eq!(a.to_bits(), b.to_bits());
    }

    #[test]
    fn product_rule_is_rotation_invariant(n in 1usize..=3, cols in prop::collection::vec(-1.0f64..1.0, 18)) {
        let columns: Vec<CPoint> = (0..n).map(|j| CPoint::new(cols[2 * n * j..2 * n * (j + 1)].to_vec()).unwrap()).collect();
        prop_assume!(columns.iter().all(|c| c.norm() > 1e-3));
        let u = Unitary::from_columns(&columns);
        prop_assume!(u.is_ok());
        let u = u.unwrap();
        let f = |w: &[f64]| (0.7 * w[0] - 0.3 * w[w.len() - 1]).cos() + w[0] * w[0];
        let rule = product_rule(n, 20).unwrap();
        let plain = integrate(&rule, f).unwrap();
        let mut buf = vec![0.0; 2 * n];
        let turned = integrate(&rule, |w| {
            u.apply_into(w, &mut buf);
            f(&buf)
        })
        .unwrap();
        prop_assert!((turned - plain).abs() <= 1e-8 * plain.abs());
    }
}
