//! Exact moment machinery for Laurent polynomials on the unit circle:
//! constant terms of powers, the congruence witnesses, the J₀/J_∞ branch-sum identity,
//! the structure checks for bi-degrees (−1, ·), (·, 1) and (n, p), and the
//! Bautin index.

use num_complex::Complex64;
use num_traits::Zero;
use serde::Serialize;

use crate::algebra::laurent::{circle_residue, circle_residues};
use crate::algebra::{GaussianRational as Gq, LaurentPolynomial};
use crate::branches::{closure_cap, BranchSystem};
use crate::error::{Error, Result};
use crate::moments::MomentWitness;

type C = Complex64;

/// Hard ceiling on exact searches for a nonzero moment.
pub const SEARCH_CEILING: usize = 200;
const LAU_SAMPLES: usize = 20;

fn require_proper(l: &LaurentPolynomial) -> Result<(i64, i64)> {
    let (n1, n2) = l.bidegree()?;
    if n1 >= 0 || n2 <= 0 {
        return Err(Error::DegenerateInput(format!("{l} is not proper")));
    }
    Ok((n1, n2))
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BautinCertificate {
    /// Number of distinct G_L-images of the J₀ indicator; None past the cap.
    pub n_l: Option<usize>,
    pub m: usize,
    pub degree: usize,
    pub group_order: Option<usize>,
    /// m(N(L) − 1) + 1, or the fallback when N(L) is unavailable.
    pub bound: usize,
    pub fallback_bound: usize,
    /// m(N(L) − 1): vanishing to a higher order at ∞ forces I ≡ 0.
    pub ord_threshold: Option<usize>,
    /// 1-based J₀.
    pub j0: Vec<usize>,
}

fn factorial_sat(n: usize) -> usize {
    (1..=n).fold(1usize, |a, k| a.saturating_mul(k))
}

/// The bound m(N(L)−1)+1 for ∫ Lⁱ dM with deg M = m.
pub fn bautin_index(l: &LaurentPolynomial, m_deg: usize) -> Result<BautinCertificate> {
    require_proper(l)?;
    let n = l.degree();
    let fallback = m_deg.saturating_mul(factorial_sat(n).saturating_sub(1)).saturating_add(1);
    let bs = BranchSystem::new(&l.to_rational())?;
    let j0: Vec<usize> = bs.j_set(Some(C::new(0.0, 0.0))).map(|j| j.indices.clone()).unwrap_or_default();
    let group = bs.group();
    let order = group.order(closure_cap()).ok();
    let n_l = order.map(|_| group.set_orbit_size(&j0));
    let bound = match n_l {
        Some(nl) => m_deg * (nl - 1) + 1,
        None => fallback,
    };
    Ok(BautinCertificate {
        n_l,
        m: m_deg,
        degree: n,
        group_order: order,
        bound,
        fallback_bound: fallback,
        ord_threshold: n_l.map(|nl| m_deg * (nl - 1)),
        j0: j0.iter().map(|i| i + 1).collect(),
    })
}

/// M with M′ = m and M has no constant term; None when res m ≠ 0.
pub fn antiderivative(m: &LaurentPolynomial) -> Option<LaurentPolynomial> {
    if !m.residue().is_zero() {
        return None;
    }
    Some(LaurentPolynomial::new(
        m.coeffs().iter().map(|(k, c)| (k + 1, c / &Gq::from_int(k + 1))).collect(),
    ))
}

/// First nonzero ∫_{kS¹} Lⁱ m dz overall and with i ≥ 1.
pub fn moment_witnesses(
    l: &LaurentPolynomial,
    m: &LaurentPolynomial,
    turns: i64,
) -> Result<(Option<MomentWitness>, Option<MomentWitness>)> {
    let bound = match require_proper(l) {
        Ok(_) => {
            let mdeg = antiderivative(&(m - &LaurentPolynomial::monomial(m.residue(), -1)))
                .map(|mm| mm.degree())
                .unwrap_or(0)
                .max(1);
            bautin_index(l, mdeg).map(|c| c.bound).unwrap_or(SEARCH_CEILING)
        }
        Err(_) => SEARCH_CEILING,
    };
    let k = Gq::from_int(turns);
    let mut first = None;
    let mut positive = None;
    let mut limit = bound.clamp(1, SEARCH_CEILING);
    loop {
        let rs = circle_residues(l, m, limit)?;
        for (i, r) in rs.iter().enumerate() {
            if r.is_zero() {
                continue;
            }
            let w = MomentWitness::new(i, &(r * &k));
            if first.is_none() {
                first = Some(w.clone());
            }
            if i >= 1 && positive.is_none() {
                positive = Some(w);
            }
        }
        if positive.is_some() || limit == SEARCH_CEILING {
            return Ok((first, positive));
        }
        limit = (limit * 4).min(SEARCH_CEILING);
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "result", rename_all = "snake_case")]
pub enum DvdkResult {
    NotProper,
    Witness { index: usize, constant_term: [String; 2], bound: usize },
}

/// Smallest i ≥ 1 with a nonzero constant term of Lⁱ, for proper L.
pub fn dvdk_check(l: &LaurentPolynomial) -> Result<DvdkResult> {
    if l.is_zero() {
        return Err(Error::ZeroInput);
    }
    if require_proper(l).is_err() {
        return Ok(DvdkResult::NotProper);
    }
    let bound = bautin_index(l, 1)?.bound;
    let inv_z = LaurentPolynomial::monomial(Gq::from_int(1), -1);
    let rs = circle_residues(l, &inv_z, bound)?;
    for (i, r) in rs.iter().enumerate().skip(1) {
        if !r.is_zero() {
            return Ok(DvdkResult::Witness { index: i, constant_term: r.to_strings(), bound });
        }
    }
    Err(Error::WitnessNotFoundWithinBound(bound))
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct D2Witness {
    /// "l1" (m a polynomial in z) or "l2" (m a polynomial in 1/z).
    pub side: String,
    pub index: usize,
    pub residue: [String; 2],
}

/// The index from the bi-degree congruence with a verified nonzero residue.
pub fn d2_witness(l: &LaurentPolynomial, m: &LaurentPolynomial) -> Result<D2Witness> {
    let (n1, n2) = require_proper(l)?;
    let (m1, m2) = m.bidegree()?;
    let mut candidates = Vec::new();
    if m1 >= 0 && (m1 + 1) % (-n1) == 0 {
        candidates.push(("l1", ((m1 + 1) / (-n1)) as usize));
    }
    if m2 <= 0 && (-1 - m2) % n2 == 0 && -1 - m2 >= 0 {
        candidates.push(("l2", ((-1 - m2) / n2) as usize));
    }
    let (side, index) = candidates
        .into_iter()
        .next()
        .ok_or_else(|| Error::CongruenceUnmet(format!("bi-degrees ({n1},{n2}) and ({m1},{m2})")))?;
    let r = circle_residue(l, m, index)?;
    if r.is_zero() {
        return Err(Error::VerificationFailure("residue vanished at the congruence index".into()));
    }
    Ok(D2Witness { side: side.into(), index, residue: r.to_strings() })
}

/// Exact vanishing of ∫ Lⁱ dM for i ≤ the Bautin bound, with the first
/// nonzero moment otherwise.
pub fn exact_vanishing(l: &LaurentPolynomial, mm: &LaurentPolynomial) -> Result<(bool, usize, Option<MomentWitness>)> {
    let bound = bautin_index(l, mm.degree())?.bound;
    let dm = mm.derivative();
    let rs = circle_residues(l, &dm, bound)?;
    let w = rs.iter().enumerate().find(|(_, r)| !r.is_zero()).map(|(i, r)| MomentWitness::new(i, r));
    Ok((w.is_none(), bound, w))
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LauSample {
    pub t: [f64; 2],
    pub left: [f64; 2],
    pub right: [f64; 2],
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LauReport {
    pub holds: bool,
    pub max_residual: f64,
    pub scale: f64,
    pub moments_vanish: bool,
    pub bound: usize,
    pub witness: Option<MomentWitness>,
    pub samples: Vec<LauSample>,
}

/// Σ_{J₀} M_∞(L⁻¹ᵢ) ≡ Σ_{J_∞} M₀(L⁻¹ᵢ), cross-checked against exact moments.
pub fn condition_lau(l: &LaurentPolynomial, mm: &LaurentPolynomial) -> Result<LauReport> {
    let (n1, n2) = require_proper(l)?;
    let m0 = mm.restrict(i64::MIN, -1);
    let minf = mm.restrict(1, i64::MAX);
    let bs = BranchSystem::new(&l.to_rational())?;
    let j0: Vec<usize> = bs.j_set(Some(C::new(0.0, 0.0))).map(|j| j.indices.clone()).unwrap_or_default();
    let jinf: Vec<usize> = bs.j_set(None).map(|j| j.indices.clone()).unwrap_or_default();
    if j0.len() != (-n1) as usize || jinf.len() != n2 as usize {
        return Err(Error::VerificationFailure("J₀/J_∞ sizes disagree with the bi-degree".into()));
    }
    let mut samples = Vec::new();
    let mut max_res: f64 = 0.0;
    let mut scale: f64 = 0.0;
    for (t, xs) in bs.samples(LAU_SAMPLES)? {
        let left: C = j0.iter().map(|&i| minf.eval_f(xs[i])).sum();
        let right: C = jinf.iter().map(|&i| m0.eval_f(xs[i])).sum();
        for &i in &j0 {
            scale = scale.max(minf.eval_f(xs[i]).norm());
        }
        for &i in &jinf {
            scale = scale.max(m0.eval_f(xs[i]).norm());
        }
        max_res = max_res.max((left - right).norm());
        samples.push(LauSample { t: [t.re, t.im], left: [left.re, left.im], right: [right.re, right.im] });
    }
    let scale = scale.max(f64::MIN_POSITIVE);
    let holds = mm.is_zero() || max_res < 1e-9 * scale;
    let (vanish, bound, witness) = exact_vanishing(l, mm)?;
    if holds != vanish {
        return Err(Error::CrossCheckMismatch(format!(
            "branch-sum identity {holds} but exact moments vanish = {vanish} (residual {max_res:e}, scale {scale:e})"
        )));
    }
    Ok(LauReport { holds, max_residual: max_res, scale, moments_vanish: vanish, bound, witness, samples })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct StructureReport {
    pub bidegree: (i64, i64),
    pub moments_vanish: bool,
    pub bound: usize,
    pub witness: Option<MomentWitness>,
    /// n₁ = −1 or n₂ = 1.
    pub d3_applies: bool,
    /// Vanishing only for constant M, as required when `d3_applies`.
    pub d3_consistent: Option<bool>,
    /// n₂ when it is prime.
    pub prime: Option<i64>,
    pub l_in_z_p: Option<bool>,
    pub j_inf_block: Option<bool>,
    pub m_support_avoids_multiples: Option<bool>,
    /// Vanishing moments imply the support condition.
    pub d4_consistent: Option<bool>,
}

fn is_prime(p: i64) -> bool {
    p >= 2 && (2..).take_while(|d| d * d <= p).all(|d| p % d != 0)
}

/// Structural consequences of vanishing for M a polynomial in z.
pub fn d3_d4_check(l: &LaurentPolynomial, mm: &LaurentPolynomial) -> Result<StructureReport> {
    let (n1, n2) = require_proper(l)?;
    if mm.coeffs().keys().any(|&k| k < 0) {
        return Err(Error::InvalidInput("M must be a polynomial in z".into()));
    }
    let (vanish, bound, witness) = exact_vanishing(l, mm)?;
    let nonconstant = mm.coeffs().keys().any(|&k| k > 0);
    let d3_applies = n1 == -1 || n2 == 1;
    let d3_consistent = d3_applies.then_some(!(vanish && nonconstant));
    let mut rep = StructureReport {
        bidegree: (n1, n2),
        moments_vanish: vanish,
        bound,
        witness,
        d3_applies,
        d3_consistent,
        prime: None,
        l_in_z_p: None,
        j_inf_block: None,
        m_support_avoids_multiples: None,
        d4_consistent: None,
    };
    if is_prime(n2) {
        let p = n2;
        rep.prime = Some(p);
        rep.l_in_z_p = Some(l.coeffs().keys().all(|k| k % p == 0));
        let bs = BranchSystem::new(&l.to_rational())?;
        let jinf: Vec<usize> = bs.j_set(None).map(|j| j.indices.clone()).unwrap_or_default();
        rep.j_inf_block = Some(jinf.len() < bs.degree() && bs.group().is_block(&jinf));
        let avoids = mm.coeffs().keys().filter(|&&k| k > 0).all(|k| k % p != 0);
        rep.m_support_avoids_multiples = Some(avoids);
        rep.d4_consistent = Some(!vanish || avoids);
    }
    Ok(rep)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::parse_laurent;

    fn lp(s: &str) -> LaurentPolynomial {
        parse_laurent(s).unwrap()
    }

    #[test]
    fn dvdk_examples() {
        match dvdk_check(&lp("z + 1/z")).unwrap() {
            DvdkResult::Witness { index, constant_term, .. } => {
                assert_eq!(index, 2);
                assert_eq!(constant_term, ["2/1".to_string(), "0/1".to_string()]);
            }
            other => panic!("{other:?}"),
        }
        match dvdk_check(&lp("z^3 + 1/z")).unwrap() {
            DvdkResult::Witness { index, constant_term, .. } => {
                assert_eq!(index, 4);
                assert_eq!(constant_term[0], "4/1");
            }
            other => panic!("{other:?}"),
        }
        assert_eq!(dvdk_check(&lp("z^2")).unwrap(), DvdkResult::NotProper);
        assert_eq!(dvdk_check(&lp("z^-3 + 2z^-1")).unwrap(), DvdkResult::NotProper);
    }

    #[test]
    fn d2_examples() {
        let w = d2_witness(&lp("z^3 + z^-2"), &lp("z^3")).unwrap();
        assert_eq!((w.side.as_str(), w.index), ("l1", 2));
        let w = d2_witness(&lp("z^3 + z^-2"), &lp("1/z")).unwrap();
        assert_eq!((w.side.as_str(), w.index, w.residue[0].as_str()), ("l2", 0, "1/1"));
        let w = d2_witness(&lp("z + 1/z"), &lp("z^2")).unwrap();
        assert_eq!((w.index, w.residue[0].as_str()), (3, "1/1"));
        assert!(matches!(d2_witness(&lp("z^3 + z^-2"), &lp("z^2")), Err(Error::CongruenceUnmet(_))));
    }

    #[test]
    fn bautin_examples() {
        let c = bautin_index(&lp("z + 1/z"), 3).unwrap();
        assert_eq!((c.n_l, c.bound), (Some(2), 4));
        let c = bautin_index(&lp("z^2 + 1/z"), 3).unwrap();
        assert_eq!((c.n_l, c.bound, c.group_order), (Some(3), 7, Some(6)));
        let c = bautin_index(&lp("z^2 + 1/z"), 4).unwrap();
        assert_eq!(c.fallback_bound, 21);
        assert!(c.bound <= c.fallback_bound);
    }

    #[test]
    fn lau_examples() {
        let r = condition_lau(&lp("z + 1/z"), &lp("z")).unwrap();
        assert!(!r.holds && !r.moments_vanish);
        assert_eq!(r.witness.as_ref().unwrap().index, 1);
        let r = condition_lau(&lp("z^2 + z^-2"), &lp("z")).unwrap();
        assert!(r.holds && r.moments_vanish);
        let l = lp("z^2 - 3z + 1/z");
        let mm = &(&l * &l) - &l.scale(&Gq::from_int(5));
        let r = condition_lau(&l, &mm).unwrap();
        assert!(r.holds && r.moments_vanish);
    }

    #[test]
    fn structure_examples() {
        let r = d3_d4_check(&lp("z^-4 + z^2"), &lp("z")).unwrap();
        assert!(r.moments_vanish);
        assert_eq!(r.prime, Some(2));
        assert_eq!((r.l_in_z_p, r.j_inf_block, r.m_support_avoids_multiples), (Some(true), Some(true), Some(true)));
        let r = d3_d4_check(&lp("z^-4 + z^2"), &lp("z^2")).unwrap();
        assert!(!r.moments_vanish);
        let w = r.witness.unwrap();
        assert_eq!((w.index, w.over_two_pi_i[0].as_str()), (2, "4/1"));
        assert_eq!(r.d4_consistent, Some(true));
        let r = d3_d4_check(&lp("z^2 + 1/z"), &lp("z")).unwrap();
        assert!(r.d3_applies && r.d3_consistent == Some(true) && r.witness.is_some());
    }

    #[test]
    fn moment_witness_search() {
        let (first, pos) = moment_witnesses(&lp("z^2 + 1/z"), &lp("1/z"), 1).unwrap();
        assert_eq!(first.unwrap().index, 0);
        let pos = pos.unwrap();
        assert_eq!((pos.index, pos.exact()), (3, Gq::from_int(3)));
    }
}
