//! Rationality and vanishing of I_∞ from the coefficient system φ_s, and
//! the necessary conditions for non-closed curves.

use num_complex::Complex64;
use serde::Serialize;

use super::{exact_circle_data, moment_sequence};
use num_traits::Zero;

use crate::algebra::{GaussianRational as Gq, RationalFunction};
use crate::branches::BranchSystem;
use crate::constellation::{skeleton, Skeleton};
use crate::curves::Curve;
use crate::error::{Error, Result};
use crate::laurent_moment::moment_witnesses;

type C = Complex64;

/// Relative threshold below which φ_s counts as zero.
pub const ZERO_TOL: f64 = 1e-9;
/// Upper edge of the inconclusive band.
pub const INCONCLUSIVE_TOL: f64 = 1e-6;
pub const DEFAULT_SAMPLES: usize = 20;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TestOptions {
    pub tol: f64,
    pub inconclusive: f64,
    pub samples: usize,
}

impl Default for TestOptions {
    fn default() -> Self {
        Self { tol: ZERO_TOL, inconclusive: INCONCLUSIVE_TOL, samples: DEFAULT_SAMPLES }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Rational,
    NotRational,
    RationalAndZero,
    Inconclusive,
}

impl Verdict {
    pub fn is_rational(self) -> bool {
        matches!(self, Verdict::Rational | Verdict::RationalAndZero)
    }
}

/// A sample t and a color s with φ_s(t) far from zero.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Witness {
    pub sample: [f64; 2],
    /// 1-based color index.
    pub color: usize,
    pub value: [f64; 2],
}

/// An exact nonzero moment m_i = 2πi · `over_two_pi_i`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MomentWitness {
    pub index: usize,
    pub over_two_pi_i: [String; 2],
    pub value: [f64; 2],
}

impl MomentWitness {
    pub fn new(index: usize, r: &Gq) -> Self {
        let v = C::new(0.0, 2.0 * std::f64::consts::PI) * r.to_c64();
        Self { index, over_two_pi_i: r.to_strings(), value: [v.re, v.im] }
    }

    pub fn exact(&self) -> Gq {
        Gq::from_strings(&self.over_two_pi_i[0], &self.over_two_pi_i[1]).expect("stored exact value")
    }
}

/// Σ f_{s,i} Q(P⁻¹ᵢ) for an antiderivative Q of q.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct IntegratedCheck {
    pub max_abs: f64,
    pub scale: f64,
    pub vanishes: bool,
    /// Whether this agrees with the φ_s verdict.
    pub consistent: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RationalityVerdict {
    pub verdict: Verdict,
    pub certificate: String,
    pub witness: Option<Witness>,
    /// First nonzero exact moment.
    pub moment_witness: Option<MomentWitness>,
    /// First nonzero exact moment with i ≥ 1.
    pub positive_power_witness: Option<MomentWitness>,
    pub max_phi: f64,
    pub scale: f64,
    pub coefficient_system: Option<Vec<Vec<i64>>>,
    pub integrated_check: Option<IntegratedCheck>,
    pub notes: Vec<String>,
}

impl RationalityVerdict {
    fn simple(verdict: Verdict, certificate: &str) -> Self {
        Self {
            verdict,
            certificate: certificate.into(),
            witness: None,
            moment_witness: None,
            positive_power_witness: None,
            max_phi: 0.0,
            scale: 0.0,
            coefficient_system: None,
            integrated_check: None,
            notes: Vec::new(),
        }
    }
}

/// Finite poles of `q` are among those of `p` (exact divisibility).
pub fn poles_contained(q: &RationalFunction, p: &RationalFunction) -> bool {
    let rad = q.den().squarefree_part();
    rad.is_constant() || p.den().divrem(&rad).1.is_zero()
}

/// All finite poles have winding number zero (closed γ).
fn poles_outside(f: &RationalFunction, gamma: &Curve) -> Result<bool> {
    for pole in f.finite_poles() {
        if gamma.winding_number(pole.at)? != 0 {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Values of P at the poles of q that are not poles of P.
pub fn avoid_values(p: &RationalFunction, q: &RationalFunction) -> Vec<C> {
    q.finite_poles().iter().map(|z| p.eval_f(z.at)).filter(|v| v.is_finite()).collect()
}

pub(crate) fn g_values(p: &RationalFunction, q: &RationalFunction, xs: &[C]) -> Vec<C> {
    let dp = p.derivative();
    xs.iter().map(|&x| q.eval_f(x) / dp.eval_f(x)).collect()
}

/// Floating antiderivative of q when every residue vanishes.
fn antiderivative(q: &RationalFunction) -> Option<impl Fn(C) -> C> {
    let (poly, parts) = q.partial_fractions_f();
    let size = poly.iter().chain(parts.iter().flat_map(|p| p.coeffs.iter())).map(|c| c.norm()).fold(1.0, f64::max);
    if parts.iter().any(|p| p.residue().norm() > 1e-10 * size) {
        return None;
    }
    Some(move |z: C| {
        let mut acc = C::new(0.0, 0.0);
        for (l, c) in poly.iter().enumerate() {
            acc += c * z.powu(l as u32 + 1) / (l as f64 + 1.0);
        }
        for part in &parts {
            let u = z - part.pole;
            for (j, c) in part.coeffs.iter().enumerate().skip(1) {
                let e = -(j as i32);
                acc += c * u.powi(e) / e as f64;
            }
        }
        acc
    })
}

pub fn rationality_test(p: &RationalFunction, q: &RationalFunction, gamma: &Curve) -> Result<RationalityVerdict> {
    rationality_test_with(p, q, gamma, &TestOptions::default())
}

/// Decide rationality of I_∞ from φ_s ≡ 0 at sample points.
pub fn rationality_test_with(
    p: &RationalFunction,
    q: &RationalFunction,
    gamma: &Curve,
    opts: &TestOptions,
) -> Result<RationalityVerdict> {
    if p.is_constant() {
        return Err(Error::DegenerateInput("P is constant".into()));
    }
    if q.is_zero() {
        return Ok(RationalityVerdict::simple(Verdict::RationalAndZero, "q_zero"));
    }
    if gamma.is_closed() {
        gamma.poles_one_side(p)?;
        gamma.poles_one_side(q)?;
        if poles_outside(p, gamma)? && poles_outside(q, gamma)? {
            let mut v = RationalityVerdict::simple(Verdict::RationalAndZero, "poles_outside");
            v.coefficient_system = Some(Vec::new());
            return Ok(v);
        }
    }
    let sk = skeleton(p, gamma, &avoid_values(p, q))?;
    let mut out = RationalityVerdict::simple(Verdict::Rational, "phi_identically_zero");
    out.coefficient_system = Some(sk.system.rows.clone());
    let samples = sk.branches.samples(opts.samples)?;
    let mut scale: f64 = 0.0;
    let mut best: Option<(f64, C, usize, C)> = None;
    for (t, xs) in &samples {
        let g = g_values(p, q, xs);
        scale = g.iter().map(|v| v.norm()).fold(scale, f64::max);
        for (s, phi) in sk.system.apply(&g).into_iter().enumerate() {
            if best.as_ref().is_none_or(|b| phi.norm() > b.0) {
                best = Some((phi.norm(), *t, s, phi));
            }
        }
    }
    let scale = scale.max(f64::MIN_POSITIVE);
    out.scale = scale;
    out.max_phi = best.as_ref().map(|b| b.0).unwrap_or(0.0);
    let rel = out.max_phi / scale;
    if sk.system.is_zero() {
        out.certificate = "zero_coefficient_system".into();
    } else if rel < opts.tol {
        out.certificate = "phi_identically_zero".into();
    } else if rel > opts.inconclusive {
        let (_, t, s, phi) = best.expect("nonempty samples");
        out.verdict = Verdict::NotRational;
        out.certificate = "phi_nonzero".into();
        out.witness = Some(Witness { sample: [t.re, t.im], color: s + 1, value: [phi.re, phi.im] });
    } else {
        out.verdict = Verdict::Inconclusive;
        out.certificate = "borderline".into();
        out.notes.push(format!("max |phi| / scale = {rel:e} lies in the inconclusive band"));
    }
    out.integrated_check = integrated_check(p, q, gamma, &sk, &samples, out.verdict, opts);
    if out.verdict == Verdict::NotRational {
        if let Some((l, m, k)) = exact_circle_data(p, q, gamma) {
            match moment_witnesses(&l, &m, k) {
                Ok((first, positive)) => {
                    out.moment_witness = first;
                    out.positive_power_witness = positive;
                }
                Err(e) => out.notes.push(format!("exact moment search skipped: {e}")),
            }
        }
    }
    if let Some(ic) = &out.integrated_check {
        if !ic.consistent {
            out.notes.push("integrated form disagrees with the phi_s test".into());
        }
    }
    Ok(out)
}

fn integrated_check(
    p: &RationalFunction,
    q: &RationalFunction,
    gamma: &Curve,
    sk: &Skeleton,
    samples: &[(C, Vec<C>)],
    verdict: Verdict,
    opts: &TestOptions,
) -> Option<IntegratedCheck> {
    if !gamma.is_closed() && !(poles_contained(q, p) && p.value_at_infinity().is_none()) {
        return None;
    }
    let anti = antiderivative(q)?;
    let shift = if gamma.is_closed() { C::new(0.0, 0.0) } else { anti(gamma.start()) };
    let qf = |z: C| anti(z) - shift;
    let mut max_abs: f64 = 0.0;
    let mut scale: f64 = 0.0;
    for (_, xs) in samples {
        let vals: Vec<C> = xs.iter().map(|&x| qf(x)).collect();
        scale = vals.iter().map(|v| v.norm()).fold(scale, f64::max);
        for v in sk.system.apply(&vals) {
            max_abs = max_abs.max(v.norm());
        }
    }
    let scale = scale.max(f64::MIN_POSITIVE);
    let vanishes = max_abs < opts.tol * scale;
    let consistent = match verdict {
        Verdict::Rational | Verdict::RationalAndZero => vanishes,
        Verdict::NotRational => max_abs > opts.inconclusive * scale,
        Verdict::Inconclusive => true,
    };
    Some(IntegratedCheck { max_abs, scale, vanishes, consistent })
}

/// Rational ⇔ identically zero when the poles of q lie over those of P and
/// P(∞) = ∞; otherwise falls back to the plain rationality test.
pub fn vanishing_test(p: &RationalFunction, q: &RationalFunction, gamma: &Curve) -> Result<RationalityVerdict> {
    vanishing_test_with(p, q, gamma, &TestOptions::default())
}

pub fn vanishing_test_with(
    p: &RationalFunction,
    q: &RationalFunction,
    gamma: &Curve,
    opts: &TestOptions,
) -> Result<RationalityVerdict> {
    let pre = p.value_at_infinity().is_none() && poles_contained(q, p);
    let mut v = rationality_test_with(p, q, gamma, opts)?;
    if !pre {
        v.notes.push("vanishing preconditions unmet; verdict from the rationality test".into());
        return Ok(v);
    }
    if v.verdict == Verdict::Rational {
        v.verdict = Verdict::RationalAndZero;
        v.certificate = "rational_implies_zero".into();
    }
    Ok(v)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TailCheck {
    pub preconditions: bool,
    pub i0: usize,
    pub checked_through: usize,
    pub tail_vanishes: bool,
    /// Under the preconditions a vanishing tail forces every moment to vanish.
    pub implies_all_zero: bool,
    pub head_vanishes: bool,
}

/// Checks m_{i0}..m_{i0+count} and reports what the tail rule gives.
pub fn kak_tail_check(
    p: &RationalFunction,
    q: &RationalFunction,
    gamma: &Curve,
    i0: usize,
    count: usize,
) -> Result<TailCheck> {
    let pre = p.value_at_infinity().is_none() && poles_contained(q, p);
    let n = i0 + count;
    let ms = moment_sequence(p, q, gamma, n)?;
    let zero = |i: usize| match &ms.exact {
        Some(e) => e[i].is_zero(),
        None => ms.values[i].norm() <= 1e-8_f64.max(10.0 * ms.errors[i]),
    };
    let tail = (i0..=n).all(zero);
    let head = (0..i0).all(zero);
    Ok(TailCheck {
        preconditions: pre,
        i0,
        checked_through: n,
        tail_vanishes: tail,
        implies_all_zero: pre && tail,
        head_vanishes: head,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct NonclosedReport {
    pub p_a: [f64; 2],
    pub p_b: [f64; 2],
    pub same_value: bool,
    /// 1-based branch indices tending to a and b.
    pub j_a: Vec<usize>,
    pub j_b: Vec<usize>,
    pub a_ramified: bool,
    pub b_ramified: bool,
    pub fo1: Option<bool>,
    pub fo2: Option<bool>,
    pub fo3: Option<bool>,
    pub max_residual: f64,
    pub scale: f64,
    /// Rationality would force q ≡ 0.
    pub forces_q_zero: bool,
    /// The necessary conditions leave rationality possible.
    pub rational_possible: bool,
}

/// The J_a / J_b sum conditions for a non-closed γ.
pub fn nonclosed_necessary(p: &RationalFunction, q: &RationalFunction, gamma: &Curve) -> Result<NonclosedReport> {
    if gamma.is_closed() {
        return Err(Error::InvalidCurve("curve is closed".into()));
    }
    let (a, b) = (gamma.start(), gamma.end());
    let pa = p.try_eval_f(a).map_err(|_| Error::PoleOnCurve(format!("{a}")))?;
    let pb = p.try_eval_f(b).map_err(|_| Error::PoleOnCurve(format!("{b}")))?;
    let bs = BranchSystem::build(p, &[pa, pb], &avoid_values(p, q))?;
    let j_of = |x: C, v: C| -> Result<Vec<usize>> {
        let s = bs.color_of(v).ok_or_else(|| Error::VerificationFailure(format!("{v} is not marked")))?;
        let tol = 1e-6 * x.norm().max(1.0);
        Ok((0..bs.degree()).filter(|&i| (bs.vertex(s, i) - x).norm() <= tol).collect())
    };
    let ja = j_of(a, pa)?;
    let jb = j_of(b, pb)?;
    if ja.is_empty() || jb.is_empty() {
        return Err(Error::VerificationFailure("endpoint is not a vertex of the constellation".into()));
    }
    let same = (pa - pb).norm() <= 1e-9 * pa.norm().max(1.0);
    let (da, db) = (ja.len() as f64, jb.len() as f64);
    let mut scale: f64 = 0.0;
    let (mut ra, mut rb, mut r3): (f64, f64, f64) = (0.0, 0.0, 0.0);
    for (_, xs) in bs.samples(DEFAULT_SAMPLES)? {
        let g = g_values(p, q, &xs);
        scale = g.iter().map(|v| v.norm()).fold(scale, f64::max);
        let sa: C = ja.iter().map(|&i| g[i]).sum();
        let sb: C = jb.iter().map(|&i| g[i]).sum();
        ra = ra.max(sa.norm());
        rb = rb.max(sb.norm());
        r3 = r3.max((sb / db - sa / da).norm());
    }
    let scale = scale.max(f64::MIN_POSITIVE);
    let holds = |r: f64| r < ZERO_TOL * scale;
    let (fo1, fo2, fo3, max_residual) = if same {
        (None, None, Some(holds(r3)), r3)
    } else {
        (Some(holds(ra)), Some(holds(rb)), None, ra.max(rb))
    };
    let forces = !same && (ja.len() == 1 || jb.len() == 1);
    let conditions = fo1.unwrap_or(true) && fo2.unwrap_or(true) && fo3.unwrap_or(true);
    Ok(NonclosedReport {
        p_a: [pa.re, pa.im],
        p_b: [pb.re, pb.im],
        same_value: same,
        j_a: ja.iter().map(|i| i + 1).collect(),
        j_b: jb.iter().map(|i| i + 1).collect(),
        a_ramified: ja.len() > 1,
        b_ramified: jb.len() > 1,
        fo1,
        fo2,
        fo3,
        max_residual,
        scale,
        forces_q_zero: forces,
        rational_possible: conditions && !(forces && !q.is_zero()),
    })
}
