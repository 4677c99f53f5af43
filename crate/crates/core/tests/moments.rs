use std::f64::consts::PI;

use moment_kernel::algebra::parse_rational;
use moment_kernel::moments::{
    detect_common_factor, eval_i, eval_i_quadrature, moment_sequence, rationality_test, FactorVerdict,
};
use moment_kernel::{Curve, RationalFunction};
use num_complex::Complex64 as C;
use proptest::prelude::*;

fn rf(s: &str) -> RationalFunction {
    parse_rational(s).unwrap()
}

fn max_on(p: &RationalFunction, g: &Curve) -> f64 {
    (0..=512).map(|k| p.eval_f(g.point(k as f64 / 512.0)).norm()).fold(0.0, f64::max)
}

fn curve(k: usize) -> Curve {
    match k {
        0 => Curve::unit_circle(),
        1 => Curve::square(C::new(0.1, 0.0), 1.2),
        2 => Curve::segment(C::new(0.5, 0.2), C::new(1.5, -0.4)),
        _ => Curve::polygon(&[C::new(0.4, 0.0), C::new(1.0, 1.0), C::new(2.0, 0.3)], false).unwrap(),
    }
}

const PS: [&str; 4] = ["z^2 + 1/z", "z^3 - z", "(z^2 + 1)/(z - 3)", "z + 1/(z - 1/2)"];
const QS: [&str; 4] = ["1", "z^2 + 2", "1/(z + 3)", "z^-2 + z"];

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn residue_formula_matches_quadrature(pi in 0usize..4, qi in 0usize..4, k in 0usize..4, scale in 10.0f64..40.0, arg in 0.0f64..(2.0 * PI)) {
        let (p, q, g) = (rf(PS[pi]), rf(QS[qi]), curve(k));
        let t = C::from_polar(scale * max_on(&p, &g).max(1.0), arg);
        let a = eval_i(&p, &q, &g, t).unwrap();
        let b = eval_i_quadrature(&p, &q, &g, t).unwrap();
        prop_assert!((a - b).norm() <= 1e-10 * (1.0 + b.norm()), "{} / {}: {} vs {}", p, q, a, b);
    }

    #[test]
    fn generating_series_matches_moments(pi in 0usize..4, qi in 0usize..4, k in 0usize..4, arg in 0.0f64..(2.0 * PI)) {
        let (p, q, g) = (rf(PS[pi]), rf(QS[qi]), curve(k));
        let r = max_on(&p, &g).max(1.0);
        let t = C::from_polar(20.0 * r, arg);
        let m = moment_sequence(&p, &q, &g, 30).unwrap();
        // I(t) = −(1/2πi) Σ m_i t^{−i−1}
        let series: C = m.values.iter().enumerate().map(|(i, v)| -v * t.powi(-(i as i32) - 1)).sum::<C>() / C::new(0.0, 2.0 * PI);
        let direct = eval_i(&p, &q, &g, t).unwrap();
        let scale = m.values.iter().map(|v| v.norm()).fold(1.0, f64::max);
        prop_assert!((series - direct).norm() <= 1e-9 * scale, "{} vs {}", series, direct);
    }

    /// ∫_{W(γ)} Pⁱq dz = ∫_γ P(W)ⁱ q(W) W′ dz.
    #[test]
    fn substitution_law(pi in 0usize..4, qi in 0usize..4, k in 0usize..4, a in -0.3f64..0.3, b in 0.6f64..1.2) {
        let (p, q, g) = (rf(PS[pi]), rf(QS[qi]), curve(k));
        let w_expr = format!("{a} + {b}z + z^2/5");
        let w = rf(&w_expr);
        let wg = g.image(|z| w.eval_f(z)).unwrap();
        prop_assume!(p.finite_poles().iter().chain(q.finite_poles().iter()).all(|pl| wg.distance(pl.at) > 0.05));
        let lhs = moment_sequence(&p, &q, &wg, 4).unwrap();
        let pw = p.compose(&w);
        let qw = &q.compose(&w) * &w.derivative();
        let rhs = moment_sequence(&pw, &qw, &g, 4).unwrap();
        for (x, y) in lhs.values.iter().zip(&rhs.values) {
            prop_assert!((x - y).norm() <= 1e-8 * (1.0 + y.norm()), "W = {}: {} vs {}", w_expr, x, y);
        }
    }
}

#[test]
fn common_factor_classes_form_blocks() {
    for (p, q, size) in [
        ("(z^2 + z)^2", "z^2 + z", 2),
        ("(z^3 - z)^2 + 1", "(z^3 - z)^3 - 2", 3),
        ("(z + 1/z)^3", "z^2 + 1/z^2", 2),
        ("z^4 + z", "z^2 - 3z", 1),
    ] {
        let r = detect_common_factor(&rf(p), &rf(q)).unwrap();
        assert_eq!(r.factor_degree, size, "{p}, {q}");
        assert!(r.block_system, "{p}, {q}");
        let n: usize = r.classes.iter().map(|c| c.len()).sum();
        let mut all: Vec<usize> = r.classes.concat();
        all.sort();
        assert_eq!(all, (1..=n).collect::<Vec<_>>());
        let expected = match size {
            1 => FactorVerdict::None,
            s if s == n => FactorVerdict::QFunctionOfP,
            _ => FactorVerdict::CommonFactor,
        };
        assert_eq!(r.verdict, expected);
    }
}

#[test]
fn composite_data_is_rational() {
    // q = q̃(P)P′ always gives a rational I
    for (p, qt) in [("z^3 - z", "1"), ("z + 1/z", "z^2"), ("z^2 + 1/z", "1/(z - 7)")] {
        let (p, qt) = (rf(p), rf(qt));
        let q = &qt.compose(&p) * &p.derivative();
        let v = rationality_test(&p, &q, &Curve::unit_circle()).unwrap();
        assert!(v.verdict.is_rational(), "{p}, {q}");
    }
}
