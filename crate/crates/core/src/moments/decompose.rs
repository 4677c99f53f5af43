//! Compositional structure: common right factors of P and Q, recovery of
//! q̃ with q = q̃(P)P′, the doubly transitive criterion and double moments.

use num_complex::Complex64;
use num_traits::{One, Zero};
use serde::Serialize;

use super::rationality::{avoid_values, g_values, rationality_test, MomentWitness, RationalityVerdict, Verdict};
use super::{exact_circle_data, quad_moment};
use crate::algebra::json::{rational_to_json, RationalJson};
use crate::algebra::laurent::circle_residue;
use crate::algebra::linalg::nullspace;
use crate::algebra::{GaussianRational as Gq, Poly, RationalFunction};
use crate::branches::{closure_cap, BranchSystem};
use crate::curves::{Curve, PoleWinding};
use crate::error::{Error, Result};
use crate::laurent_moment::moment_witnesses;

type C = Complex64;

const FACTOR_SAMPLES: usize = 5;
const AGREE_TOL: f64 = 1e-9;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum FactorVerdict {
    /// Q separates all branches of P.
    None,
    /// P and Q share a right factor of degree `factor_degree`.
    CommonFactor,
    /// Q = Q̃(P).
    QFunctionOfP,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CommonFactorReport {
    /// Branch classes, 1-based.
    pub classes: Vec<Vec<usize>>,
    pub factor_degree: usize,
    pub verdict: FactorVerdict,
    pub block_system: bool,
}

fn partition(values: &[C]) -> Vec<Vec<usize>> {
    let scale = values.iter().map(|v| v.norm()).fold(1.0, f64::max);
    let mut classes: Vec<Vec<usize>> = Vec::new();
    for (i, v) in values.iter().enumerate() {
        match classes.iter_mut().find(|c| (values[c[0]] - v).norm() <= AGREE_TOL * scale) {
            Some(c) => c.push(i),
            None => classes.push(vec![i]),
        }
    }
    classes
}

/// Group the branches of P⁻¹ by the value of Q on them.
pub fn detect_common_factor(p: &RationalFunction, q: &RationalFunction) -> Result<CommonFactorReport> {
    if p.is_constant() || q.is_constant() {
        return Err(Error::DegenerateInput("P and Q must be non-constant".into()));
    }
    let bs = BranchSystem::build(p, &[], &avoid_values(p, q))?;
    let mut classes: Option<Vec<Vec<usize>>> = None;
    for (_, xs) in bs.samples(FACTOR_SAMPLES)? {
        let vals: Vec<C> = xs.iter().map(|&x| q.eval_f(x)).collect();
        let part = partition(&vals);
        match &classes {
            None => classes = Some(part),
            Some(c) if *c != part => return Err(Error::InconsistentPartition),
            _ => {}
        }
    }
    let classes = classes.unwrap_or_default();
    let n = bs.degree();
    if classes.iter().any(|c| c.len() != classes[0].len()) {
        return Err(Error::InconsistentPartition);
    }
    let block_system = bs.group().is_block_system(&classes);
    let size = classes[0].len();
    let verdict = if size == 1 {
        FactorVerdict::None
    } else if size == n {
        FactorVerdict::QFunctionOfP
    } else {
        FactorVerdict::CommonFactor
    };
    Ok(CommonFactorReport {
        classes: classes.iter().map(|c| c.iter().map(|i| i + 1).collect()).collect(),
        factor_degree: size,
        verdict,
        block_system,
    })
}

fn poly_from(c: &[Gq]) -> Poly {
    Poly::new(c.to_vec())
}

/// q̃ with q = q̃(P)·P′, by exact interpolation of t ↦ (q/P′)(P⁻¹ᵢ(t)).
pub fn reconstruct_qtilde(p: &RationalFunction, q: &RationalFunction) -> Result<RationalFunction> {
    if p.is_constant() {
        return Err(Error::DegenerateInput("P is constant".into()));
    }
    if q.is_zero() {
        return Ok(RationalFunction::zero());
    }
    let bs = BranchSystem::build(p, &[], &avoid_values(p, q))?;
    for (_, xs) in bs.samples(FACTOR_SAMPLES)? {
        let g = g_values(p, q, &xs);
        if partition(&g).len() != 1 {
            return Err(Error::InterpolationFailure("q/P′ differs between branches".into()));
        }
    }
    let dp = p.derivative();
    let g = q / &dp;
    let d = q.degree() + p.degree();
    let unknowns = 2 * (d + 1);
    let needed = unknowns + 2;
    let mut ts: Vec<Gq> = Vec::new();
    let mut rows: Vec<Vec<Gq>> = Vec::new();
    let mut z = 0i64;
    while rows.len() < needed {
        if z.abs() > 100_000 {
            return Err(Error::InterpolationFailure("not enough regular points".into()));
        }
        let zq = Gq::from_int(z);
        z = if z <= 0 { 1 - z } else { -z };
        let (Ok(t), Ok(gv)) = (p.eval(&zq), g.eval(&zq)) else { continue };
        if ts.contains(&t) {
            continue;
        }
        // A(t) − g·B(t) = 0, unknowns a_0..a_d, b_0..b_d
        let mut row = Vec::with_capacity(unknowns);
        let mut pw = Gq::one();
        let mut powers = Vec::with_capacity(d + 1);
        for _ in 0..=d {
            powers.push(pw.clone());
            pw = &pw * &t;
        }
        row.extend(powers.iter().cloned());
        row.extend(powers.iter().map(|x| -(x * &gv)));
        rows.push(row);
        ts.push(t);
    }
    let ker = nullspace(rows, unknowns);
    let v = ker
        .into_iter()
        .find(|v| v[d + 1..].iter().any(|x| !x.is_zero()))
        .ok_or_else(|| Error::InterpolationFailure("no solution within the degree bound".into()))?;
    let qt = RationalFunction::new(poly_from(&v[..=d]), poly_from(&v[d + 1..]))?;
    let back = &qt.compose(p) * &dp;
    if back != *q {
        return Err(Error::VerificationFailure("q ≠ q̃(P)·P′".into()));
    }
    Ok(qt)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GenericVerdict {
    pub verdict: Verdict,
    pub certificate: String,
    pub doubly_transitive: bool,
    pub group_order: Option<usize>,
    pub poles_one_side: Option<bool>,
    pub image_closed: bool,
    pub qtilde: Option<RationalJson>,
    /// Winding numbers of P(γ) around the finite poles of q̃.
    pub qtilde_pole_windings: Vec<PoleWinding>,
    pub moments_vanish: Option<bool>,
    pub moment_witness: Option<MomentWitness>,
    pub positive_power_witness: Option<MomentWitness>,
    /// Verdict of the general test when the group is not doubly transitive.
    pub fallback: Option<RationalityVerdict>,
    pub notes: Vec<String>,
}

/// P(γ) as a closed polyline (γ closed, or P(a) = P(b)).
fn closed_image(gamma: &Curve, p: &RationalFunction) -> Result<Curve> {
    let img = gamma.image(|z| p.eval_f(z))?;
    if img.is_closed() {
        return Ok(img);
    }
    let mut pts: Vec<C> = std::iter::once(img.start()).chain(img.segments().iter().map(|s| s.end())).collect();
    pts.pop();
    Curve::polygon(&pts, true)
}

/// For doubly transitive monodromy: rational iff the poles of P lie on one
/// side of γ, or P(γ) is closed and q = q̃(P)P′.
pub fn generic_criterion(p: &RationalFunction, q: &RationalFunction, gamma: &Curve) -> Result<GenericVerdict> {
    let mut out = GenericVerdict {
        verdict: Verdict::Inconclusive,
        certificate: String::new(),
        doubly_transitive: false,
        group_order: None,
        poles_one_side: None,
        image_closed: false,
        qtilde: None,
        qtilde_pole_windings: Vec::new(),
        moments_vanish: None,
        moment_witness: None,
        positive_power_witness: None,
        fallback: None,
        notes: Vec::new(),
    };
    if q.is_zero() {
        out.verdict = Verdict::RationalAndZero;
        out.certificate = "q_zero".into();
        out.moments_vanish = Some(true);
        return Ok(out);
    }
    let bs = BranchSystem::build(p, &[], &avoid_values(p, q))?;
    let group = bs.group();
    out.doubly_transitive = group.is_doubly_transitive();
    out.group_order = group.order(closure_cap()).ok();
    if !out.doubly_transitive {
        let fb = rationality_test(p, q, gamma)?;
        out.verdict = fb.verdict;
        out.certificate = "fallback".into();
        out.moment_witness = fb.moment_witness.clone();
        out.positive_power_witness = fb.positive_power_witness.clone();
        out.notes.push(Error::NotDoublyTransitive.to_string());
        out.fallback = Some(fb);
        return Ok(out);
    }
    let (a, b) = (gamma.start(), gamma.end());
    out.image_closed = gamma.is_closed()
        || (p.try_eval_f(a).map_err(|_| Error::PoleOnCurve(format!("{a}")))?
            - p.try_eval_f(b).map_err(|_| Error::PoleOnCurve(format!("{b}")))?)
        .norm()
            <= 1e-9;
    if gamma.is_closed() {
        let sides = gamma.poles_one_side(p)?;
        out.poles_one_side = Some(sides.one_side());
        if sides.one_side() {
            out.verdict = Verdict::Rational;
            out.certificate = "poles_one_side".into();
            if sides.outside() && q.finite_poles().iter().all(|z| gamma.winding_number(z.at).is_ok_and(|w| w == 0)) {
                out.verdict = Verdict::RationalAndZero;
                out.moments_vanish = Some(true);
            }
            return Ok(out);
        }
    }
    if out.image_closed {
        match reconstruct_qtilde(p, q) {
            Ok(qt) => {
                out.verdict = Verdict::Rational;
                out.certificate = "composition".into();
                let image = closed_image(gamma, p)?;
                let mut vanish = true;
                for pole in qt.finite_poles() {
                    let w = image.winding_number(pole.at)?;
                    vanish &= w == 0;
                    out.qtilde_pole_windings.push(PoleWinding { pole: Some([pole.at.re, pole.at.im]), winding: w });
                }
                out.moments_vanish = Some(vanish);
                if vanish {
                    out.verdict = Verdict::RationalAndZero;
                }
                out.qtilde = Some(rational_to_json(&qt));
                return Ok(out);
            }
            Err(e) => out.notes.push(format!("no q̃: {e}")),
        }
    }
    out.verdict = Verdict::NotRational;
    out.certificate = "generic_not_rational".into();
    out.moments_vanish = Some(false);
    if let Some((l, m, k)) = exact_circle_data(p, q, gamma) {
        match moment_witnesses(&l, &m, k) {
            Ok((first, positive)) => {
                out.moment_witness = first;
                out.positive_power_witness = positive;
            }
            Err(e) => out.notes.push(format!("exact moment search skipped: {e}")),
        }
    }
    Ok(out)
}

/// A supplied decomposition P = P̃(W), Q = Q̃(W).
#[derive(Clone, Debug)]
pub struct Decomposition {
    pub w: RationalFunction,
    pub p_tilde: RationalFunction,
    pub q_tilde: RationalFunction,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ForwardCheck {
    pub decomposition_verified: bool,
    pub image_closed: bool,
    pub poles_one_side: bool,
    pub applies: bool,
    pub max_abs: f64,
    pub holds: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DoubleMomentReport {
    /// m_ij = ∫ Pⁱ Qʲ Q′ dz, indexed [i][j].
    pub moments: Vec<Vec<[f64; 2]>>,
    /// m_ij/(2πi) exactly, when P and Q are Laurent and γ is the unit circle.
    pub exact: Option<Vec<Vec<[String; 2]>>>,
    pub max_abs: f64,
    pub forward: Option<ForwardCheck>,
    pub common_factor: Option<CommonFactorReport>,
    pub common_factor_error: Option<String>,
    /// Rank of the Vandermonde matrix (Q(P⁻¹ᵢ)^j): the number of branch classes.
    pub vandermonde_rank: Option<usize>,
    pub degree: usize,
}

/// The array ∫ Pⁱ Qʲ Q′ dz with optional forward verification.
pub fn double_moment_check(
    p: &RationalFunction,
    q: &RationalFunction,
    gamma: &Curve,
    i_max: usize,
    j_max: usize,
    decomposition: Option<&Decomposition>,
) -> Result<DoubleMomentReport> {
    let dq = q.derivative();
    let mut moments = vec![vec![[0.0; 2]; j_max + 1]; i_max + 1];
    let mut exact = None;
    let mut max_abs: f64 = 0.0;
    if let Some((l, m, k)) = exact_circle_data(p, q, gamma) {
        let dm = m.derivative();
        let kq = Gq::from_int(k);
        let mut ex = vec![vec![[String::new(), String::new()]; j_max + 1]; i_max + 1];
        let mut mj = dm.clone();
        for j in 0..=j_max {
            for i in 0..=i_max {
                let r = &circle_residue(&l, &mj, i)? * &kq;
                let v = C::new(0.0, 2.0 * std::f64::consts::PI) * r.to_c64();
                max_abs = max_abs.max(v.norm());
                moments[i][j] = [v.re, v.im];
                ex[i][j] = r.to_strings();
            }
            mj = &mj * &m;
        }
        exact = Some(ex);
    } else {
        for i in 0..=i_max {
            for j in 0..=j_max {
                let (v, _) = quad_moment(gamma, |z| {
                    p.eval_f(z).powu(i as u32) * q.eval_f(z).powu(j as u32) * dq.eval_f(z)
                })?;
                max_abs = max_abs.max(v.norm());
                moments[i][j] = [v.re, v.im];
            }
        }
    }
    let forward = match decomposition {
        None => None,
        Some(d) => {
            let verified = d.p_tilde.compose(&d.w) == *p && d.q_tilde.compose(&d.w) == *q;
            let image = gamma.image(|z| d.w.eval_f(z))?;
            let closed = image.is_closed();
            let one_side = closed && image.poles_one_side(&d.p_tilde).map(|s| s.one_side()).unwrap_or(false);
            let applies = verified && closed && one_side;
            Some(ForwardCheck {
                decomposition_verified: verified,
                image_closed: closed,
                poles_one_side: one_side,
                applies,
                max_abs,
                holds: !applies || max_abs < 1e-8,
            })
        }
    };
    let (common_factor, common_factor_error) = if p.is_constant() || q.is_constant() {
        (None, Some("constant input".to_string()))
    } else {
        match detect_common_factor(p, q) {
            Ok(r) => (Some(r), None),
            Err(e) => (None, Some(e.to_string())),
        }
    };
    let vandermonde_rank = common_factor.as_ref().map(|c| c.classes.len());
    Ok(DoubleMomentReport {
        moments,
        exact,
        max_abs,
        forward,
        common_factor,
        common_factor_error,
        vandermonde_rank,
        degree: p.degree(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::parse_rational;

    fn r(s: &str) -> RationalFunction {
        parse_rational(s).unwrap()
    }

    #[test]
    fn common_factor_examples() {
        let rep = detect_common_factor(&r("z^4"), &r("z^2")).unwrap();
        assert_eq!(rep.verdict, FactorVerdict::CommonFactor);
        assert_eq!((rep.classes.len(), rep.factor_degree), (2, 2));
        assert!(rep.block_system);
        let rep = detect_common_factor(&r("z^2"), &r("z")).unwrap();
        assert_eq!(rep.verdict, FactorVerdict::None);
        let rep = detect_common_factor(&r("z^2"), &r("z^2")).unwrap();
        assert_eq!(rep.verdict, FactorVerdict::QFunctionOfP);
        let rep = detect_common_factor(&r("(z^2 + 1/z^2)^3 - z^2"), &r("z^2 + 1/z^2 + 3")).unwrap();
        assert!(rep.block_system);
    }

    #[test]
    fn qtilde_examples() {
        assert_eq!(reconstruct_qtilde(&r("z^3 - 3z"), &r("3z^2 - 3")).unwrap(), r("1"));
        assert_eq!(reconstruct_qtilde(&r("z^2"), &r("2z^3")).unwrap(), r("z"));
        let l = r("z + 1/z");
        let q = &l * &l.derivative();
        assert_eq!(reconstruct_qtilde(&l, &q).unwrap(), r("z"));
        let l = r("z^2 + 1/z");
        let qt = r("1/(z - 5)");
        let q = &qt.compose(&l) * &l.derivative();
        assert_eq!(reconstruct_qtilde(&l, &q).unwrap(), qt);
        assert!(matches!(reconstruct_qtilde(&r("z^2"), &r("1")), Err(Error::InterpolationFailure(_))));
    }

    #[test]
    fn generic_examples() {
        let s1 = Curve::unit_circle();
        let l = r("z^2 + 1/z");
        let v = generic_criterion(&l, &l.derivative(), &s1).unwrap();
        assert!(v.doubly_transitive && v.group_order == Some(6));
        assert!(v.verdict.is_rational() && v.moments_vanish == Some(true));
        let v = generic_criterion(&l, &r("1/z"), &s1).unwrap();
        assert_eq!(v.verdict, Verdict::NotRational);
        let w = v.positive_power_witness.unwrap();
        assert_eq!((w.index, w.exact()), (3, Gq::from_int(3)));
        assert_eq!(v.moment_witness.unwrap().index, 0);
        let v = generic_criterion(&l, &RationalFunction::zero(), &s1).unwrap();
        assert_eq!(v.verdict, Verdict::RationalAndZero);
    }

    #[test]
    fn double_moment_examples() {
        let s1 = Curve::unit_circle();
        let d = Decomposition { w: r("z^2"), p_tilde: r("z + 1"), q_tilde: r("z") };
        let rep = double_moment_check(&r("z^2 + 1"), &r("z^2"), &s1, 5, 5, Some(&d)).unwrap();
        assert_eq!(rep.max_abs, 0.0);
        let f = rep.forward.unwrap();
        assert!(f.applies && f.holds);
        let rep = double_moment_check(&r("z + 1/z"), &r("z"), &s1, 2, 2, None).unwrap();
        assert_eq!(rep.exact.as_ref().unwrap()[1][0], ["1/1".to_string(), "0/1".to_string()]);
        assert_eq!(rep.vandermonde_rank, Some(2));
        let d = Decomposition { w: r("z + 1/z"), p_tilde: r("z^2"), q_tilde: r("z") };
        let rep = double_moment_check(&r("(z + 1/z)^2"), &r("z + 1/z"), &s1, 5, 5, Some(&d)).unwrap();
        assert_eq!(rep.max_abs, 0.0);
        assert!(rep.forward.unwrap().applies);
        assert_eq!(rep.common_factor.unwrap().verdict, FactorVerdict::CommonFactor);
    }
}
