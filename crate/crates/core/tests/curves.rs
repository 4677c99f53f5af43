use std::f64::consts::PI;

use moment_kernel::Curve;
use num_complex::Complex64 as C;
use proptest::prelude::*;

fn curves() -> Vec<Curve> {
    let o = C::new(0.0, 0.0);
    vec![
        Curve::unit_circle(),
        Curve::square(o, 1.0),
        Curve::circle_times(C::new(0.2, -0.1), 1.3, 2),
        Curve::polygon(&[C::new(-1.0, -1.0), C::new(2.0, -0.5), C::new(0.5, 1.5), C::new(-1.5, 0.5)], true).unwrap(),
    ]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn winding_survives_subdivision(k in 0usize..4, x in -2.5f64..2.5, y in -2.5f64..2.5, pieces in 2usize..7) {
        let g = &curves()[k];
        let w = C::new(x, y);
        prop_assume!(g.distance(w) > 1e-3);
        prop_assert_eq!(g.winding_number(w).unwrap(), g.subdivided(pieces).winding_number(w).unwrap());
    }

    #[test]
    fn exact_derivatives_integrate_to_zero(k in 0usize..4, a in -3.0f64..3.0, b in -3.0f64..3.0, n in 1i32..6) {
        let g = &curves()[k];
        let c = C::new(a, b);
        let (v, _) = g.contour_integral(|z| (z - c).powi(n - 1) * n as f64 + (z * 0.5).exp() * 0.5).unwrap();
        prop_assert!(v.norm() < 1e-9, "{v}");
    }
}

#[test]
fn cauchy_formula_on_the_circle() {
    let s1 = Curve::unit_circle();
    for r in [0.3, 2.0] {
        for k in 0..8 {
            let w = C::from_polar(r, k as f64 * PI / 4.0 + 0.1);
            let (v, _) = s1.contour_integral(|z| 1.0 / (z - w)).unwrap();
            let want = C::new(0.0, 2.0 * PI) * s1.winding_number(w).unwrap() as f64;
            assert!((v - want).norm() < 1e-9, "w = {w}: {v}");
        }
    }
}

#[test]
fn named_curves_and_json_round_trip() {
    for name in ["unit_circle", "unit_circle_twice", "square", "unit_interval", "symmetric_interval"] {
        let g = Curve::named(name).unwrap();
        let back = Curve::from_json(&g.to_json()).unwrap();
        assert!((g.length() - back.length()).abs() < 1e-12);
        assert_eq!(g.is_closed(), back.is_closed());
    }
    assert!(Curve::named("figure_eight").is_err());
    assert_eq!(Curve::named("unit_circle_twice").unwrap().winding_number(C::new(0.0, 0.0)).unwrap(), 2);
}
