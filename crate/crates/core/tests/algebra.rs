use std::collections::BTreeMap;

use moment_kernel::algebra::{circle_residue, parse_rational, Poly};
use moment_kernel::{GaussianRational as Gq, LaurentPolynomial, RationalFunction};
use num_complex::Complex64 as C;
use num_traits::Zero;
use proptest::prelude::*;

fn poly(cs: &[i64]) -> Poly {
    Poly::from_ints(cs)
}

prop_compose! {
    fn small_rational(max_deg: usize)(
        num in prop::collection::vec(-3i64..=3, 1..=max_deg + 1),
        den in prop::collection::vec(-3i64..=3, 1..=max_deg.min(3) + 1),
    ) -> Option<RationalFunction> {
        let (n, d) = (poly(&num), poly(&den));
        if n.is_zero() || d.is_zero() {
            return None;
        }
        RationalFunction::new(n, d).ok().filter(|f| !f.is_constant() && f.degree() <= max_deg)
    }
}

prop_compose! {
    fn sparse_laurent()(terms in prop::collection::vec((-4i64..=4, -3i64..=3), 1..4)) -> LaurentPolynomial {
        let mut m = BTreeMap::new();
        for (e, c) in terms {
            if c != 0 {
                m.insert(e, Gq::from_int(c));
            }
        }
        if m.is_empty() {
            m.insert(1, Gq::from_int(1));
        }
        LaurentPolynomial::new(m)
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn compose_degree_is_multiplicative(f in small_rational(3), g in small_rational(2)) {
        if let (Some(f), Some(g)) = (f, g) {
            prop_assert_eq!(f.compose(&g).degree(), f.degree() * g.degree());
        }
    }

    #[test]
    fn principal_part_removes_the_singularity(f in small_rational(4)) {
        if let Some(f) = f {
            for pole in f.finite_poles() {
                let pp = f.principal_part_f(pole.clone());
                let near: Vec<C> = (0..4)
                    .map(|k| {
                        let z = pole.at + C::from_polar(1e-3, k as f64 * std::f64::consts::FRAC_PI_2 + 0.3);
                        f.eval_f(z) - pp.eval(z)
                    })
                    .collect();
                let top = near.iter().map(|v| v.norm()).fold(0.0, f64::max);
                let spread = near.iter().map(|v| (v - near[0]).norm()).fold(0.0, f64::max);
                prop_assert!(spread <= 0.05 * (1.0 + top), "{f} at {}: {near:?}", pole.at);
            }
        }
    }

    #[test]
    fn antiderivative_law(l in sparse_laurent(), m in sparse_laurent()) {
        // (M·Lⁱ)′ = M′Lⁱ + i·M·L′·Lⁱ⁻¹ has no residue
        let dl = l.derivative();
        let dm = m.derivative();
        let ml = &m * &dl;
        for i in 1..=20usize {
            let a = circle_residue(&l, &dm, i).unwrap();
            let b = circle_residue(&l, &ml, i - 1).unwrap();
            prop_assert!((&a + &(&b * &Gq::from_int(i as i64))).is_zero(), "i = {i}");
        }
    }

    #[test]
    fn bidegree_is_additive(a in sparse_laurent(), b in sparse_laurent()) {
        let (a1, a2) = a.bidegree().unwrap();
        let (b1, b2) = b.bidegree().unwrap();
        prop_assert_eq!((&a * &b).bidegree().unwrap(), (a1 + b1, a2 + b2));
    }
}

#[test]
fn parse_and_partial_fractions_agree() {
    let f = parse_rational("(z^3 + 2)/((z - 1)^2 (z + i))").unwrap();
    let (poly_part, parts) = f.partial_fractions_f();
    let z = C::new(0.3, 0.7);
    let mut v: C = poly_part.iter().rev().fold(C::new(0.0, 0.0), |acc, c| acc * z + c);
    for p in &parts {
        v += p.eval(z);
    }
    assert!((v - f.eval_f(z)).norm() < 1e-12);
}
