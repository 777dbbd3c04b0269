use num_complex::Complex64;
use plurikernel::domain::DomainSpec;
use plurikernel::envelope::{circumscribed_candidate, lower_envelope, peak_candidate, sandwich_bounds};
use plurikernel::extrapolate::richardson;
use plurikernel::geodesics::geodesic_through;
use plurikernel::julia::MapSpec;
use plurikernel::kernels::{green_ball, kobayashi, mobius_ball, mobius_defect, omega_ball, rescale_couple};
use plurikernel::linalg::{norm, norm_sqr, CVector};
use plurikernel::reproducing::{reproduce, sphere_quadrature};
use proptest::prelude::*;

fn vec2(max: f64) -> impl Strategy<Value = CVector> {
    prop::array::uniform4(-1.0f64..1.0).prop_filter_map("inside", move |x| {
        let v = CVector::from_vec(vec![Complex64::new(x[0], x[1]), Complex64::new(x[2], x[3])]);
        (norm(&v) < max).then_some(v)
    })
}

fn sphere2() -> impl Strategy<Value = CVector> {
    prop::array::uniform4(-1.0f64..1.0).prop_filter_map("nonzero", |x| {
        let v = CVector::from_vec(vec![Complex64::new(x[0], x[1]), Complex64::new(x[2], x[3])]);
        let r = norm(&v);
        (r > 0.1).then(|| &v / Complex64::new(r, 0.0))
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn ball_kernel_is_negative_inside(p in sphere2(), z in vec2(0.999)) {
        let v = omega_ball(&p, &z).unwrap();
        prop_assert!(v < 0.0);
        prop_assert!(v <= -(1.0 - norm_sqr(&z)) / 4.0 + 1e-15);
    }

    #[test]
    fn mobius_is_an_involution(a in vec2(0.95), w in vec2(0.95)) {
        let fw = mobius_ball(&a, &w).unwrap();
        prop_assert!(norm(&(mobius_ball(&a, &fw).unwrap() - &w)) < 1e-10);
        let lhs = 1.0 - norm_sqr(&fw);
        prop_assert!((lhs - mobius_defect(&a, &w)).abs() < 1e-12);
    }

    #[test]
    fn kobayashi_is_symmetric_and_invariant(z in vec2(0.9), w in vec2(0.9), u in vec2(0.8)) {
        let b = DomainSpec::unit_ball(2);
        let k = kobayashi(&b, &z, &w).unwrap();
        prop_assert!(k >= 0.0);
        prop_assert!((k - kobayashi(&b, &w, &z).unwrap()).abs() < 1e-10);
        let kz = mobius_ball(&u, &z).unwrap();
        let kw = mobius_ball(&u, &w).unwrap();
        prop_assert!((k - kobayashi(&b, &kz, &kw).unwrap()).abs() < 1e-8 * (1.0 + k));
    }

    #[test]
    fn green_is_symmetric_and_nonpositive(z in vec2(0.95), w in vec2(0.95)) {
        let b = DomainSpec::unit_ball(2);
        if let (Some(g1), Some(g2)) = (green_ball(&b, &z, &w).unwrap().finite(), green_ball(&b, &w, &z).unwrap().finite()) {
            prop_assert!(g1 <= 0.0);
            prop_assert!((g1 - g2).abs() < 1e-10 * (1.0 + g1.abs()));
        }
    }

    #[test]
    fn rescaling_scales_inversely(v in -10.0f64..-1e-3, rho in 0.01f64..100.0) {
        prop_assert!((rescale_couple(v, rho) * rho - v).abs() < 1e-12 * v.abs());
    }

    #[test]
    fn candidates_sit_below_the_ball_kernel(p in sphere2(), z in vec2(0.99)) {
        let b = DomainSpec::unit_ball(2);
        let cands = [peak_candidate(&b, &p).unwrap(), circumscribed_candidate(&b, &p).unwrap()];
        let lo = lower_envelope(&cands, &z).unwrap();
        let exact = omega_ball(&p, &z).unwrap();
        prop_assert!(lo <= exact + 1e-12 * exact.abs());
        prop_assert!(cands[0].eval(&z).unwrap() <= exact + 1e-12 * exact.abs());
    }

    #[test]
    fn sandwich_is_ordered(x in prop::array::uniform4(-1.0f64..1.0), t in 0.0f64..1.0) {
        let e = DomainSpec::ellipsoid(vec![1.0, 2.0]).unwrap();
        let dir = CVector::from_vec(vec![Complex64::new(x[0], x[1]), Complex64::new(x[2], x[3])]);
        prop_assume!(norm(&dir) > 0.1);
        let p = e.boundary_point_along(&dir).unwrap();
        let z = CVector::from_vec(vec![Complex64::new(x[1] * 0.9, x[3] * 0.3), Complex64::new(x[0] * 0.3, x[2] * 0.3)]);
        let z = &z * Complex64::new(t, 0.0);
        prop_assume!(e.contains(&z));
        let kv = sandwich_bounds(&e, &p, &z).unwrap();
        prop_assert!(kv.lower() <= kv.upper());
        prop_assert!(kv.upper() <= 0.0);
    }

    #[test]
    fn richardson_is_exact_on_first_order_sequences(a in -5.0f64..5.0, b in -5.0f64..5.0) {
        let values: Vec<f64> = (1..12).map(|k| a + b * 0.5f64.powi(k)).collect();
        let e = richardson(&values, 2.0, 1.0);
        prop_assert!((e.value - a).abs() < 1e-9 * (1.0 + a.abs() + b.abs()));
    }

    #[test]
    fn left_inverse_inverts_the_geodesic(z in vec2(0.9), p in sphere2(), zr in 0.0f64..0.95, za in 0.0f64..6.283) {
        let b = DomainSpec::unit_ball(2);
        prop_assume!(norm(&(&z - &p)) > 1e-3);
        let g = geodesic_through(&b, &z, &p, true).unwrap();
        let zeta = Complex64::from_polar(zr, za);
        let w = g.phi(zeta);
        prop_assert!(norm(&w) < 1.0);
        prop_assert!((g.left_inverse(&w).unwrap() - zeta).norm() < 1e-8);
        let pw = g.projection(&w).unwrap();
        prop_assert!(norm(&(pw - &w)) < 1e-8);
    }

    #[test]
    fn schwarz_pick_ratio_bounded_by_lambda(a in -0.9f64..0.9, r in 0.0f64..0.99, t in 0.0f64..6.283) {
        let one = CVector::from_element(1, Complex64::new(1.0, 0.0));
        let z = CVector::from_element(1, Complex64::from_polar(r, t));
        let m = MapSpec::Blaschke { a: Complex64::new(a, 0.0) };
        let ratio = omega_ball(&one, &z).unwrap() / omega_ball(&one, &m.apply(&z)).unwrap();
        let lambda = (1.0 - a) / (1.0 + a);
        prop_assert!(ratio <= lambda * (1.0 + 1e-9));
        let sq = MapSpec::Power(2);
        let ratio = omega_ball(&one, &z).unwrap() / omega_ball(&one, &sq.apply(&z)).unwrap();
        prop_assert!(ratio <= 2.0 * (1.0 + 1e-9));
    }

    #[test]
    fn map_json_round_trips(a in -0.9f64..0.9, k in 1u32..5, d in prop::array::uniform2(-1.0f64..1.0)) {
        let m = MapSpec::Compose(vec![
            MapSpec::Diag(vec![Complex64::new(d[0], 0.0), Complex64::new(0.0, d[1])]),
            MapSpec::BallAuto { anchor: CVector::from_vec(vec![Complex64::new(a * 0.5, 0.0), Complex64::new(0.0, a * 0.5)]) },
            MapSpec::Power(k),
        ]);
        prop_assert_eq!(MapSpec::parse(&m.to_json().to_string()).unwrap(), m);
    }

    #[test]
    fn domain_json_round_trips(a in 0.5f64..4.0, b in 0.5f64..4.0, r in 0.1f64..3.0) {
        for d in [
            DomainSpec::ellipsoid(vec![a, b]).unwrap(),
            DomainSpec::ball(CVector::from_vec(vec![Complex64::new(a, -b), Complex64::new(0.0, 1.0)]), r).unwrap(),
            DomainSpec::unit_ball(3),
            DomainSpec::Disc,
        ] {
            prop_assert_eq!(DomainSpec::parse(&d.to_json().to_string()).unwrap(), d);
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn reproduction_is_positive_and_linear(z in vec2(0.7), c0 in -2.0f64..2.0, c1 in -2.0f64..2.0) {
        let b = DomainSpec::unit_ball(2);
        let rule = sphere_quadrature(2, 64).unwrap();
        let pos = reproduce(&b, |x| norm_sqr(x) * (1.0 + x[0].re).powi(2), &z, &rule).unwrap();
        prop_assert!(pos >= 0.0);
        let f = |x: &CVector| c0 + c1 * (x[0] * x[1]).im;
        let v = reproduce(&b, f, &z, &rule).unwrap();
        prop_assert!((v - f(&z)).abs() < 1e-6, "{} vs {}", v, f(&z));
    }
}
