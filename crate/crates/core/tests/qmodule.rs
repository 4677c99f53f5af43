use moment_kernel::branches::{PermGroup, Permutation};
use moment_kernel::qmodule::{
    admissibility_from_data, invariant_closure, s5_example_suite, Admissibility, RationalSubspace,
};
use num_bigint::BigInt;
use num_rational::BigRational as Q;
use proptest::prelude::*;

fn q(x: i64) -> Q {
    Q::from_integer(BigInt::from(x))
}

fn qv(v: &[i64]) -> Vec<Q> {
    v.iter().map(|&x| q(x)).collect()
}

fn group(kind: usize, n: usize) -> PermGroup {
    let cycle = Permutation::from_images((0..n).map(|i| (i + 1) % n).collect()).unwrap();
    let gens = match kind {
        // Sₙ
        0 => vec![Permutation::parse(n, "(1 2)").unwrap(), cycle],
        // cyclic
        1 => vec![cycle],
        // a product of two disjoint transpositions, intransitive for n ≥ 5
        _ => vec![Permutation::parse(n, "(1 2)(3 4)").unwrap()],
    };
    PermGroup::new(n, gens).unwrap()
}

prop_compose! {
    fn setup()(n in 4usize..=6, kind in 0usize..3)
        (rows in prop::collection::vec(prop::collection::vec(-3i64..=3, n), 1..=2), kind in Just(kind), n in Just(n))
        -> (PermGroup, Vec<Vec<Q>>) {
        (group(kind, n), rows.iter().map(|r| qv(r)).collect())
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn closure_is_idempotent_and_monotone((g, rows) in setup()) {
        let w = invariant_closure(&rows, &g).unwrap();
        prop_assert_eq!(&invariant_closure(w.basis(), &g).unwrap(), &w);
        let smaller = invariant_closure(&rows[..1], &g).unwrap();
        prop_assert!(w.contains_subspace(&smaller));
        for r in &rows {
            prop_assert!(w.contains(r));
        }
    }

    #[test]
    fn closure_ignores_scaling_and_group_moves((g, rows) in setup(), c in 1i64..=5, neg in any::<bool>()) {
        let w = invariant_closure(&rows, &g).unwrap();
        let c = if neg { q(-c) } else { q(c) };
        let scaled: Vec<Vec<Q>> = rows.iter().map(|r| r.iter().map(|x| x * &c).collect()).collect();
        prop_assert_eq!(&invariant_closure(&scaled, &g).unwrap(), &w);
        for s in g.generators() {
            let moved: Vec<Vec<Q>> = rows.iter().map(|r| s.permute_coords(r)).collect();
            prop_assert_eq!(&invariant_closure(&moved, &g).unwrap(), &w);
        }
    }

    #[test]
    fn doubly_transitive_closure_fills_the_sum_zero_space(n in 3usize..=7, row in prop::collection::vec(-3i64..=3, 7)) {
        let mut row: Vec<i64> = row[..n].to_vec();
        let s: i64 = row.iter().sum();
        row[n - 1] -= s;
        prop_assume!(row.iter().any(|&x| x != row[0]));
        let g = group(0, n);
        prop_assert!(g.is_doubly_transitive());
        let w = invariant_closure(&[qv(&row)], &g).unwrap();
        prop_assert_eq!(&w, &RationalSubspace::sum_zero(n));
        let r = admissibility_from_data(&g, &[row]).unwrap();
        prop_assert_eq!(r.verdict, Admissibility::ReducibilityForced);
        prop_assert_eq!(r.dimension, n - 1);
    }
}

#[test]
fn cyclic_group_can_be_admissible() {
    // the circulant span of (1, −1, 1, −1) is one-dimensional
    let g = group(1, 4);
    let r = admissibility_from_data(&g, &[vec![1, -1, 1, -1]]).unwrap();
    assert_eq!(r.dimension, 1);
    assert_eq!(r.verdict, Admissibility::Admissible);
    let r = admissibility_from_data(&g, &[vec![1, -1, 0, 0]]).unwrap();
    assert_eq!(r.verdict, Admissibility::ReducibilityForced);
    assert_eq!(r.difference_pair, Some((1, 2)));
}

#[test]
fn s5_example_is_admissible() {
    let r = s5_example_suite().unwrap();
    assert_eq!(r.group_order, 120);
    assert_eq!(r.closure_dimension, 5);
    assert!(r.permutes_vs && r.orthogonal && r.closure_in_v_perp && r.differences_detected);
    assert_eq!(r.difference_pair, None);
    assert_eq!(r.verdict, Admissibility::Admissible);
}
