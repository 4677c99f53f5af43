//! Exact ℚ-linear algebra for subspaces of ℚⁿ invariant under a permutation
//! group, and the e_i − e_j admissibility test built on it.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::Serialize;

use crate::algebra::gaussian::ratio_to_string;
use crate::algebra::linalg::rref;
use crate::algebra::RationalFunction;
use crate::branches::{closure_cap, Permutation, PermGroup};
use crate::constellation::skeleton;
use crate::curves::Curve;
use crate::error::{Error, Result};
use crate::moments::rationality::avoid_values;

type Q = BigRational;

fn q(n: i64) -> Q {
    Q::from_integer(BigInt::from(n))
}

/// A subspace of ℚⁿ stored as its canonical reduced row echelon basis.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RationalSubspace {
    n: usize,
    basis: Vec<Vec<Q>>,
}

impl RationalSubspace {
    pub fn zero(n: usize) -> Self {
        Self { n, basis: Vec::new() }
    }

    pub fn span(n: usize, vectors: &[Vec<Q>]) -> Result<Self> {
        if vectors.iter().any(|v| v.len() != n) {
            return Err(Error::InvalidInput(format!("vectors must have length {n}")));
        }
        let (basis, _) = rref(vectors.to_vec(), n);
        Ok(Self { n, basis })
    }

    pub fn span_int(n: usize, vectors: &[Vec<i64>]) -> Result<Self> {
        let vs: Vec<Vec<Q>> = vectors.iter().map(|v| v.iter().map(|&x| q(x)).collect()).collect();
        Self::span(n, &vs)
    }

    /// E_ℚ^⊥: vectors with zero coordinate sum.
    pub fn sum_zero(n: usize) -> Self {
        let vs: Vec<Vec<Q>> = (1..n).map(|i| difference(n, 0, i)).collect();
        Self::span(n, &vs).expect("lengths match")
    }

    pub fn ambient_dimension(&self) -> usize {
        self.n
    }

    pub fn dimension(&self) -> usize {
        self.basis.len()
    }

    pub fn basis(&self) -> &[Vec<Q>] {
        &self.basis
    }

    pub fn basis_strings(&self) -> Vec<Vec<String>> {
        self.basis.iter().map(|r| r.iter().map(ratio_to_string).collect()).collect()
    }

    pub fn contains(&self, v: &[Q]) -> bool {
        if v.len() != self.n {
            return false;
        }
        let mut rows = self.basis.clone();
        rows.push(v.to_vec());
        rref(rows, self.n).0.len() == self.basis.len()
    }

    pub fn contains_subspace(&self, other: &RationalSubspace) -> bool {
        other.basis.iter().all(|v| self.contains(v))
    }

    fn with(&self, extra: Vec<Vec<Q>>) -> Self {
        let mut rows = self.basis.clone();
        rows.extend(extra);
        let (basis, _) = rref(rows, self.n);
        Self { n: self.n, basis }
    }

    /// Orthogonal complement under the standard inner product.
    pub fn orthogonal_complement(&self) -> Self {
        let ker = crate::algebra::linalg::nullspace(self.basis.clone(), self.n);
        Self::span(self.n, &ker).expect("lengths match")
    }
}

fn difference(n: usize, i: usize, j: usize) -> Vec<Q> {
    let mut v = vec![Q::zero(); n];
    v[i] = Q::one();
    v[j] = -Q::one();
    v
}

pub fn dot(a: &[Q], b: &[Q]) -> Q {
    a.iter().zip(b).fold(Q::zero(), |acc, (x, y)| acc + x * y)
}

/// Smallest subspace containing `vectors` and closed under coordinate
/// permutation by the generators of `g`.
pub fn invariant_closure(vectors: &[Vec<Q>], g: &PermGroup) -> Result<RationalSubspace> {
    let n = g.degree();
    let mut w = RationalSubspace::span(n, vectors)?;
    loop {
        let images: Vec<Vec<Q>> = w
            .basis
            .iter()
            .flat_map(|v| g.generators().iter().map(move |s| s.permute_coords(v)))
            .collect();
        let next = w.with(images);
        if next.dimension() == w.dimension() {
            return Ok(w);
        }
        w = next;
    }
}

/// First e_i − e_j (i < j, 1-based) lying in `w`.
pub fn contains_difference_pair(w: &RationalSubspace) -> Option<(usize, usize)> {
    let n = w.ambient_dimension();
    (0..n)
        .flat_map(|i| (i + 1..n).map(move |j| (i, j)))
        .find(|&(i, j)| w.contains(&difference(n, i, j)))
        .map(|(i, j)| (i + 1, j + 1))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Admissibility {
    ReducibilityForced,
    Admissible,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct AdmissibilityReport {
    pub verdict: Admissibility,
    pub degree: usize,
    pub group_order: Option<usize>,
    pub generators: Vec<String>,
    pub rows: Vec<Vec<i64>>,
    pub dimension: usize,
    pub basis: Vec<Vec<String>>,
    /// 1-based.
    pub difference_pair: Option<(usize, usize)>,
}

/// Decision from a group and coefficient rows.
pub fn admissibility_from_data(g: &PermGroup, rows: &[Vec<i64>]) -> Result<AdmissibilityReport> {
    let n = g.degree();
    let vs: Vec<Vec<Q>> = rows.iter().map(|r| r.iter().map(|&x| q(x)).collect()).collect();
    let w = invariant_closure(&vs, g)?;
    let pair = contains_difference_pair(&w);
    Ok(AdmissibilityReport {
        verdict: if pair.is_some() { Admissibility::ReducibilityForced } else { Admissibility::Admissible },
        degree: n,
        group_order: g.order(closure_cap()).ok(),
        generators: g.generators().iter().map(Permutation::cycle_notation).collect(),
        rows: rows.to_vec(),
        dimension: w.dimension(),
        basis: w.basis_strings(),
        difference_pair: pair,
    })
}

/// Whether some q gives a rational but non-reducible I(t) for (P, γ).
pub fn admissibility(p: &RationalFunction, gamma: &Curve) -> Result<AdmissibilityReport> {
    if gamma.is_closed() && gamma.poles_one_side(p)?.one_side() {
        return Err(Error::PolesOneSide);
    }
    let sk = skeleton(p, gamma, &avoid_values(p, &RationalFunction::zero()))?;
    if sk.system.is_zero() {
        return Err(Error::PolesOneSide);
    }
    admissibility_from_data(&sk.branches.group(), &sk.system.rows)
}

/// Stored data of the ten-branch example with group S₅ acting on 2-subsets.
pub struct S5Example {
    pub alpha: Permutation,
    pub beta: Permutation,
    pub v: Vec<i64>,
    pub vs: [Vec<i64>; 5],
}

impl S5Example {
    pub fn new() -> Self {
        Self {
            alpha: Permutation::from_cycles(10, &[&[2, 5, 7, 6, 10, 9], &[3, 8, 4]]).expect("valid cycles"),
            beta: Permutation::from_cycles(10, &[&[1, 5], &[2, 8], &[4, 7]]).expect("valid cycles"),
            v: vec![0, 1, 0, 1, 0, 0, -1, -1, 0, 0],
            vs: [
                vec![1, 0, 0, 0, 1, 1, 0, 0, 1, 0],
                vec![1, 1, 0, 0, 0, 0, 1, 0, 0, 1],
                vec![0, 1, 1, 0, 0, 1, 0, 1, 0, 0],
                vec![0, 0, 1, 1, 0, 0, 1, 0, 1, 0],
                vec![0, 0, 0, 1, 1, 0, 0, 1, 0, 1],
            ],
        }
    }

    pub fn group(&self) -> PermGroup {
        PermGroup::new(10, vec![self.alpha.clone(), self.beta.clone()]).expect("same degree")
    }
}

impl Default for S5Example {
    fn default() -> Self {
        Self::new()
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct S5Report {
    pub group_order: usize,
    pub alpha: String,
    pub beta: String,
    pub v: Vec<i64>,
    /// Index (1-based) of α·vᵢ and β·vᵢ among v₁..v₅, if present.
    pub alpha_images: Vec<Option<usize>>,
    pub beta_images: Vec<Option<usize>>,
    pub permutes_vs: bool,
    pub dots: Vec<i64>,
    pub orthogonal: bool,
    pub closure_dimension: usize,
    pub closure_in_v_perp: bool,
    pub closure_basis: Vec<Vec<String>>,
    pub difference_pair: Option<(usize, usize)>,
    /// Every e_i − e_j pairs nontrivially with some vₖ.
    pub differences_detected: bool,
    pub verdict: Admissibility,
}

fn int_vec(v: &[i64]) -> Vec<Q> {
    v.iter().map(|&x| q(x)).collect()
}

pub fn s5_example_suite() -> Result<S5Report> {
    let ex = S5Example::new();
    let g = ex.group();
    let order = g.order(closure_cap())?;
    let index_of = |w: &[i64]| ex.vs.iter().position(|u| u.as_slice() == w).map(|k| k + 1);
    let alpha_images: Vec<_> = ex.vs.iter().map(|u| index_of(&ex.alpha.permute_coords(u))).collect();
    let beta_images: Vec<_> = ex.vs.iter().map(|u| index_of(&ex.beta.permute_coords(u))).collect();
    let permutes_vs = alpha_images.iter().chain(&beta_images).all(Option::is_some);
    let dots: Vec<i64> = ex.vs.iter().map(|u| u.iter().zip(&ex.v).map(|(a, b)| a * b).sum()).collect();
    let closure = invariant_closure(&[int_vec(&ex.v)], &g)?;
    let v_span = RationalSubspace::span_int(10, &ex.vs)?;
    let v_perp = v_span.orthogonal_complement();
    let pair = contains_difference_pair(&closure);
    let differences_detected = (0..10).all(|i| {
        (i + 1..10).all(|j| {
            let w = difference(10, i, j);
            ex.vs.iter().any(|u| !dot(&w, &int_vec(u)).is_zero())
        })
    });
    Ok(S5Report {
        group_order: order,
        alpha: ex.alpha.cycle_notation(),
        beta: ex.beta.cycle_notation(),
        v: ex.v.clone(),
        alpha_images,
        beta_images,
        permutes_vs,
        orthogonal: dots.iter().all(|&d| d == 0),
        dots,
        closure_dimension: closure.dimension(),
        closure_in_v_perp: v_perp.contains_subspace(&closure),
        closure_basis: closure.basis_strings(),
        difference_pair: pair,
        differences_detected,
        verdict: if pair.is_some() { Admissibility::ReducibilityForced } else { Admissibility::Admissible },
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::parse_rational;

    fn sym(n: usize) -> PermGroup {
        let cyc: Vec<usize> = (1..=n).collect();
        PermGroup::new(
            n,
            vec![Permutation::from_cycles(n, &[&[1, 2]]).unwrap(), Permutation::from_cycles(n, &[&cyc]).unwrap()],
        )
        .unwrap()
    }

    #[test]
    fn closure_examples() {
        let w = invariant_closure(&[int_vec(&[1, -1])], &sym(2)).unwrap();
        assert_eq!(w.dimension(), 1);
        let w = invariant_closure(&[int_vec(&[1, 0, 0, 0])], &sym(4)).unwrap();
        assert_eq!(w.dimension(), 4);
    }

    #[test]
    fn difference_pair_examples() {
        let w = RationalSubspace::span_int(3, &[vec![1, -1, 0]]).unwrap();
        assert_eq!(contains_difference_pair(&w), Some((1, 2)));
        assert_eq!(contains_difference_pair(&RationalSubspace::sum_zero(3)), Some((1, 2)));
        assert_eq!(contains_difference_pair(&RationalSubspace::zero(3)), None);
    }

    #[test]
    fn s5_suite() {
        let r = s5_example_suite().unwrap();
        assert_eq!(r.group_order, 120);
        assert!(r.permutes_vs && r.orthogonal && r.closure_in_v_perp && r.differences_detected);
        assert_eq!(r.dots[0], 0);
        assert!(r.alpha_images[0].is_some());
        assert_eq!(r.difference_pair, None);
        assert_eq!(r.verdict, Admissibility::Admissible);
        assert!(r.closure_dimension >= 1 && r.closure_dimension <= 5);
    }

    #[test]
    fn stored_difference_row_forces_reducibility() {
        let g = sym(3);
        let r = admissibility_from_data(&g, &[vec![0, 1, -1]]).unwrap();
        assert_eq!(r.verdict, Admissibility::ReducibilityForced);
    }

    #[test]
    fn laurent_degree_two_forces_reducibility() {
        let p = parse_rational("z + 1/z").unwrap();
        let r = admissibility(&p, &Curve::unit_circle()).unwrap();
        assert_eq!(r.verdict, Admissibility::ReducibilityForced);
        assert_eq!(r.difference_pair, Some((1, 2)));
    }

    #[test]
    fn one_sided_poles_rejected() {
        let p = parse_rational("z^2").unwrap();
        assert_eq!(admissibility(&p, &Curve::unit_circle()), Err(Error::PolesOneSide));
    }
}
