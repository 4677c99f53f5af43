use moment_kernel::algebra::{circle_residue, parse_laurent};
use moment_kernel::laurent_moment::{bautin_index, condition_lau, d2_witness, dvdk_check, DvdkResult};
use moment_kernel::LaurentPolynomial;
use num_traits::Zero;
use proptest::prelude::*;

fn lp(s: &str) -> LaurentPolynomial {
    parse_laurent(s).unwrap()
}

prop_compose! {
    fn proper_laurent()(a in 1i64..=3, b in -2i64..=2, c in 1i64..=3, n1 in 1i32..=3, n2 in 1i32..=3) -> LaurentPolynomial {
        lp(&format!("{a}z^{n2} + {b} + {c}z^-{n1}"))
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn congruence_index_is_within_the_bautin_bound(l in proper_laurent(), k in 1i64..=3, c in -2i64..=2) {
        let (n1, _) = l.bidegree().unwrap();
        let m1 = k * (-n1) - 1;
        let m = lp(&format!("z^{m1} + {c}z^{}", m1 + 1));
        prop_assume!(m1 >= 1);
        let w = d2_witness(&l, &m).unwrap();
        let bound = bautin_index(&l, m.degree()).unwrap().bound;
        prop_assert!(w.index <= bound, "{} vs {}", w.index, bound);
        prop_assert!(!circle_residue(&l, &m, w.index).unwrap().is_zero());
    }

    #[test]
    fn lau_condition_agrees_with_exact_moments(l in proper_laurent(), a in -2i64..=2, b in -2i64..=2, e in 1i32..=3) {
        let m = lp(&format!("{a}z^{e} + {b}z^-{e} + z^2"));
        let r = condition_lau(&l, &m).unwrap();
        prop_assert_eq!(r.holds, r.moments_vanish);
        prop_assert_eq!(r.witness.is_none(), r.moments_vanish);
    }

    #[test]
    fn composite_pairs_satisfy_the_lau_condition(a in 1i64..=3, b in -2i64..=2, c in 1i64..=3, d in -2i64..=2, e in 1i64..=2) {
        // L and M both polynomials in z + 1/z
        let l = lp(&format!("{a}(z + 1/z)^2 + {b}(z + 1/z) + {c}(z + 1/z)^3"));
        let m = lp(&format!("{d}(z + 1/z) + {e}(z + 1/z)^2"));
        let r = condition_lau(&l, &m).unwrap();
        prop_assert!(r.holds && r.moments_vanish);
    }

    #[test]
    fn dvdk_constant_term_is_nonzero(l in proper_laurent()) {
        match dvdk_check(&l).unwrap() {
            DvdkResult::Witness { index, constant_term, bound } => {
                prop_assert!(index <= bound);
                prop_assert!(constant_term != ["0/1".to_string(), "0/1".to_string()]);
            }
            DvdkResult::NotProper => prop_assert!(false, "{} should be proper", l),
        }
    }
}

#[test]
fn known_witnesses() {
    let w = d2_witness(&lp("z^-4 + z^2"), &lp("z^3")).unwrap();
    assert_eq!((w.side.as_str(), w.index), ("l1", 1));
    let r = condition_lau(&lp("z + 1/z"), &lp("z^2")).unwrap();
    assert!(!r.holds);
    assert!(r.witness.is_some());
    assert!(matches!(dvdk_check(&lp("z^2 + 3")).unwrap(), DvdkResult::NotProper));
}
