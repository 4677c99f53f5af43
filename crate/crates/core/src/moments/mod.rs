//! Moments m_i = ∫_γ Pⁱ q dz and the generating function
//! I(t) = (1/2πi)∫_γ q dz/(P − t), by quadrature and by residues.

pub mod decompose;
pub mod rationality;

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::Serialize;

use crate::algebra::laurent::circle_residues;
use crate::algebra::{GaussianRational as Gq, LaurentPolynomial, RationalFunction};
use crate::branches::tracking::{solve_fiber, Tracker};
use crate::curves::{Curve, Segment, CURVE_TOL, QUAD_TOL};
use crate::error::{Error, Result};

pub use decompose::{
    detect_common_factor, double_moment_check, generic_criterion, reconstruct_qtilde, CommonFactorReport,
    Decomposition, DoubleMomentReport, FactorVerdict, GenericVerdict,
};
pub use rationality::{
    kak_tail_check, nonclosed_necessary, rationality_test, rationality_test_with, vanishing_test, vanishing_test_with,
    MomentWitness,
    NonclosedReport, RationalityVerdict, TailCheck, TestOptions, Verdict, Witness,
};

type C = Complex64;

const TWO_PI_I: C = C::new(0.0, 2.0 * PI);

/// m₀..m_N with quadrature error estimates; `exact` holds m_i/(2πi) when
/// the values come from exact Laurent arithmetic.
#[derive(Clone, Debug, PartialEq)]
pub struct MomentSequence {
    pub values: Vec<C>,
    pub errors: Vec<f64>,
    pub exact: Option<Vec<Gq>>,
}

#[derive(Clone, Debug, Serialize)]
pub struct MomentReport {
    pub values: Vec<[f64; 2]>,
    pub errors: Vec<f64>,
    pub exact: bool,
    /// m_i/(2πi) as exact rationals, when available.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub over_two_pi_i: Option<Vec<[String; 2]>>,
}

impl MomentSequence {
    pub fn is_exact(&self) -> bool {
        self.exact.is_some()
    }

    pub fn report(&self) -> MomentReport {
        MomentReport {
            values: self.values.iter().map(|v| [v.re, v.im]).collect(),
            errors: self.errors.clone(),
            exact: self.is_exact(),
            over_two_pi_i: self.exact.as_ref().map(|e| e.iter().map(Gq::to_strings).collect()),
        }
    }
}

/// Number of turns when γ is the unit circle traversed k ≠ 0 times.
pub fn unit_circle_turns(gamma: &Curve) -> Option<i64> {
    if !gamma.is_closed() {
        return None;
    }
    let mut total = 0.0;
    for s in gamma.segments() {
        match *s {
            Segment::Arc { center, radius, from_angle, to_angle }
                if center.norm() < 1e-14 && (radius - 1.0).abs() < 1e-14 =>
            {
                total += to_angle - from_angle;
            }
            _ => return None,
        }
    }
    let k = total / (2.0 * PI);
    (k.round() != 0.0 && (k - k.round()).abs() < 1e-12).then_some(k.round() as i64)
}

/// P and q as Laurent polynomials with γ the unit circle k times.
pub fn exact_circle_data(
    p: &RationalFunction,
    q: &RationalFunction,
    gamma: &Curve,
) -> Option<(LaurentPolynomial, LaurentPolynomial, i64)> {
    let k = unit_circle_turns(gamma)?;
    Some((LaurentPolynomial::from_rational(p)?, LaurentPolynomial::from_rational(q)?, k))
}

fn check_poles_off_curve(f: &RationalFunction, gamma: &Curve) -> Result<()> {
    for pole in f.finite_poles() {
        if gamma.distance(pole.at) <= CURVE_TOL {
            return Err(Error::PoleOnCurve(format!("{}", pole.at)));
        }
    }
    Ok(())
}

/// m₀..m_N. Laurent data on the unit circle use exact residues; everything
/// else goes through adaptive quadrature.
pub fn moment_sequence(p: &RationalFunction, q: &RationalFunction, gamma: &Curve, n: usize) -> Result<MomentSequence> {
    check_poles_off_curve(p, gamma)?;
    check_poles_off_curve(q, gamma)?;
    if let Some((l, m, k)) = exact_circle_data(p, q, gamma) {
        let kq = Gq::from_int(k);
        let exact: Vec<Gq> = circle_residues(&l, &m, n)?.into_iter().map(|r| &r * &kq).collect();
        let values = exact.iter().map(|r| TWO_PI_I * r.to_c64()).collect();
        return Ok(MomentSequence { values, errors: vec![0.0; n + 1], exact: Some(exact) });
    }
    let mut values = Vec::with_capacity(n + 1);
    let mut errors = Vec::with_capacity(n + 1);
    for i in 0..=n {
        let (v, e) = quad_moment(gamma, |z| p.eval_f(z).powu(i as u32) * q.eval_f(z))?;
        values.push(v);
        errors.push(e);
    }
    Ok(MomentSequence { values, errors, exact: None })
}

/// ∫_γ f with the absolute target scaled by the size of the integrand.
pub(crate) fn quad_moment<F: Fn(C) -> C>(gamma: &Curve, f: F) -> Result<(C, f64)> {
    let mut mag: f64 = 0.0;
    for k in 0..=256 {
        mag = mag.max(f(gamma.point(k as f64 / 256.0)).norm());
    }
    if !mag.is_finite() {
        return Err(Error::SingularOnPath);
    }
    let tol = QUAD_TOL * (mag * gamma.length()).max(1.0);
    gamma.contour_integral_tol(f, tol)
}

/// (1/2πi)∫_γ q dz/(P − t) by direct quadrature.
pub fn eval_i_quadrature(p: &RationalFunction, q: &RationalFunction, gamma: &Curve, t: C) -> Result<C> {
    let (v, _) = quad_moment(gamma, |z| q.eval_f(z) / (p.eval_f(z) - t))?;
    Ok(v / TWO_PI_I)
}

/// ∫ (z−β)^{−m} dz along γ.
fn u_term(gamma: &Curve, beta: C, m: usize) -> Result<C> {
    let (a, b) = (gamma.start(), gamma.end());
    if m == 1 {
        let arg = gamma.angle_increment(beta).map_err(|_| Error::PoleOnCurve(format!("{beta}")))?;
        let re = if gamma.is_closed() { 0.0 } else { ((b - beta).norm() / (a - beta).norm()).ln() };
        Ok(C::new(re, arg))
    } else if gamma.is_closed() {
        Ok(C::new(0.0, 0.0))
    } else {
        let e = 1.0 - m as f64;
        Ok(((b - beta).powf(e) - (a - beta).powf(e)) / e)
    }
}

fn powi_c(z: C, e: i32) -> C {
    if e >= 0 {
        z.powu(e as u32)
    } else {
        z.powu((-e) as u32).inv()
    }
}

/// ∫_γ q dz in closed form from the partial fractions of q.
pub fn integral_of(q: &RationalFunction, gamma: &Curve) -> Result<C> {
    let (poly, parts) = q.partial_fractions_f();
    let (a, b) = (gamma.start(), gamma.end());
    let mut acc = C::new(0.0, 0.0);
    if !gamma.is_closed() {
        for (l, c) in poly.iter().enumerate() {
            acc += c * (b.powu(l as u32 + 1) - a.powu(l as u32 + 1)) / (l as f64 + 1.0);
        }
    }
    for part in &parts {
        for (j, c) in part.coeffs.iter().enumerate() {
            acc += c * u_term(gamma, part.pole, j + 1)?;
        }
    }
    Ok(acc)
}

/// q̂(x) = ∫_γ (q(z) − q(x))/(z − x) dz, term by term over the polynomial
/// part and the principal parts of q.
pub fn qhat(q: &RationalFunction, gamma: &Curve, x: C) -> Result<C> {
    let (poly, parts) = q.partial_fractions_f();
    let (a, b) = (gamma.start(), gamma.end());
    let mut acc = C::new(0.0, 0.0);
    if !gamma.is_closed() {
        for (l, c) in poly.iter().enumerate().skip(1) {
            let mut s = C::new(0.0, 0.0);
            for j in 0..l {
                let int_zj = (b.powu(j as u32 + 1) - a.powu(j as u32 + 1)) / (j as f64 + 1.0);
                s += x.powu((l - 1 - j) as u32) * int_zj;
            }
            acc += c * s;
        }
    }
    for part in &parts {
        let v = x - part.pole;
        let us: Vec<C> = (1..=part.coeffs.len()).map(|m| u_term(gamma, part.pole, m)).collect::<Result<_>>()?;
        for (idx, c) in part.coeffs.iter().enumerate() {
            let l = idx + 1;
            let mut s = C::new(0.0, 0.0);
            for m in 1..=l {
                s += powi_c(v, -((l - m + 1) as i32)) * us[m - 1];
            }
            acc -= c * s;
        }
    }
    Ok(acc)
}

/// Branches of P⁻¹(t) and, for each, the pole of P it tends to as t → ∞
/// along a ray (None for ∞).
pub fn far_limits(p: &RationalFunction, t: C) -> Result<(Vec<C>, Vec<Option<C>>)> {
    let xs = solve_fiber(p, t);
    let scale = xs.iter().map(|x| x.norm()).fold(1.0, f64::max);
    for i in 0..xs.len() {
        for j in 0..i {
            if (xs[i] - xs[j]).norm() < 1e-8 * scale {
                return Err(Error::TNotInRange(format!("{t} is (nearly) a critical value")));
            }
        }
    }
    let poles = p.finite_poles();
    if poles.is_empty() {
        return Ok((xs.clone(), vec![None; xs.len()]));
    }
    let at_inf = p.pole_order_at_infinity();
    let big = 4.0 * poles.iter().map(|z| z.at.norm()).fold(1.0, f64::max);
    let sep = poles
        .iter()
        .enumerate()
        .flat_map(|(i, a)| poles[..i].iter().map(move |b| (a.at - b.at).norm()))
        .fold(big, f64::min);
    let classify = |ys: &[C]| -> Option<Vec<Option<C>>> {
        let mut counts = vec![0usize; poles.len()];
        let mut inf = 0usize;
        let mut out = Vec::with_capacity(ys.len());
        for &y in ys {
            let (k, d) = poles
                .iter()
                .enumerate()
                .map(|(k, z)| (k, (y - z.at).norm()))
                .min_by(|u, v| u.1.partial_cmp(&v.1).unwrap())
                .unwrap();
            if d < 0.25 * sep {
                counts[k] += 1;
                out.push(Some(poles[k].at));
            } else if y.norm() > 2.0 * big {
                inf += 1;
                out.push(None);
            } else {
                return None;
            }
        }
        (inf == at_inf && counts.iter().zip(&poles).all(|(c, z)| *c == z.order)).then_some(out)
    };
    let tracker = Tracker::new(p);
    let dir = if t.norm() > 0.0 { t / t.norm() } else { C::new(1.0, 0.0) };
    let mut cur = t;
    let mut ys = xs.clone();
    if cur.norm() < 1.0 {
        let next = dir;
        ys = tracker.track(&Curve::segment(cur, next), &ys).map_err(|e| Error::TNotInRange(e.to_string()))?;
        cur = next;
    }
    for _ in 0..120 {
        if let Some(lim) = classify(&ys) {
            return Ok((xs, lim));
        }
        let next = cur * 2.0;
        ys = tracker.track(&Curve::segment(cur, next), &ys).map_err(|e| Error::TNotInRange(e.to_string()))?;
        cur = next;
    }
    Err(Error::TNotInRange(format!("branches at {t} did not settle near the poles")))
}

/// I_∞(t) for closed γ from the residue formula
/// Σ_e μ(γ,z_e) Σ_{J_e} (q/P′)(x_i) − Σ_s μ(γ,z_s) ψ_s(t) + (P(∞) − t)⁻¹ (1/2πi)∫_γ q.
pub fn eval_i_closed(p: &RationalFunction, q: &RationalFunction, gamma: &Curve, t: C) -> Result<C> {
    if !gamma.is_closed() {
        return Err(Error::NotClosed);
    }
    check_poles_off_curve(p, gamma)?;
    check_poles_off_curve(q, gamma)?;
    let p_inf = p.value_at_infinity().map(|v| v.to_c64());
    if let Some(v) = p_inf {
        if (v - t).norm() <= 1e-9 * v.norm().max(1.0) {
            return Err(Error::TNotInRange(format!("{t} equals P(∞)")));
        }
    }
    let (xs, limits) = far_limits(p, t)?;
    let dp = p.derivative();
    let mut total = C::new(0.0, 0.0);
    for (&x, lim) in xs.iter().zip(&limits) {
        let mu_e = match lim {
            Some(z) => gamma.winding_number(*z)?,
            None => 0,
        };
        let mu_x = gamma.winding_number(x).map_err(|_| Error::TNotInRange(format!("{t}: a branch lies on γ")))?;
        if mu_x != mu_e {
            return Err(Error::TNotInRange(format!("{t} is not in the component of ∞")));
        }
        if mu_e != 0 {
            total += mu_e as f64 * q.eval_f(x) / dp.eval_f(x);
        }
    }
    let (_, parts) = q.partial_fractions_f();
    let mut res_sum = C::new(0.0, 0.0);
    for part in &parts {
        let mu = gamma.winding_number(part.pole)?;
        if mu == 0 {
            continue;
        }
        let psi: C = xs.iter().map(|&x| part.eval(x) / dp.eval_f(x)).sum();
        total -= mu as f64 * psi;
        res_sum += mu as f64 * part.residue();
    }
    if let Some(v) = p_inf {
        total += res_sum / (v - t);
    }
    Ok(total)
}

fn segments_cross(a: C, b: C, c: C, d: C) -> bool {
    let cross = |u: C, v: C| u.re * v.im - u.im * v.re;
    let d1 = cross(b - a, c - a);
    let d2 = cross(b - a, d - a);
    let d3 = cross(d - c, a - c);
    let d4 = cross(d - c, b - c);
    (d1 * d2 <= 0.0) && (d3 * d4 <= 0.0)
}

/// Whether t can be joined to ∞ by a ray missing the polyline.
fn reaches_infinity(image: &Curve, t: C) -> bool {
    let pts: Vec<C> = std::iter::once(image.start()).chain(image.segments().iter().map(|s| s.end())).collect();
    let reach = 2.0 * (pts.iter().map(|z| z.norm()).fold(0.0, f64::max) + t.norm()) + 1.0;
    (0..32).any(|k| {
        let far = t + C::from_polar(reach, 2.0 * PI * (k as f64 + 0.37) / 32.0);
        pts.windows(2).all(|w| !segments_cross(t, far, w[0], w[1]))
    })
}

/// I_∞(t) for non-closed γ from the three-term formula with q̂ and the
/// logarithms continued along γ.
pub fn eval_i_nonclosed(p: &RationalFunction, q: &RationalFunction, gamma: &Curve, t: C) -> Result<C> {
    if gamma.is_closed() {
        return Err(Error::InvalidCurve("curve is closed".into()));
    }
    check_poles_off_curve(p, gamma)?;
    check_poles_off_curve(q, gamma)?;
    let p_inf = p.value_at_infinity().map(|v| v.to_c64());
    if let Some(v) = p_inf {
        if (v - t).norm() <= 1e-9 * v.norm().max(1.0) {
            return Err(Error::TNotInRange(format!("{t} equals P(∞)")));
        }
    }
    let image = gamma.image(|z| p.eval_f(z))?;
    if !reaches_infinity(&image, t) {
        return Err(Error::TNotInRange(format!("{t} is not in the component of ∞")));
    }
    let xs = solve_fiber(p, t);
    let dp = p.derivative();
    let (a, b) = (gamma.start(), gamma.end());
    let mut total = C::new(0.0, 0.0);
    for &x in &xs {
        let arg = gamma.angle_increment(x).map_err(|_| Error::LogTrackingFailure)?;
        let log = C::new(((b - x).norm() / (a - x).norm()).ln(), arg);
        total += (qhat(q, gamma, x)? + q.eval_f(x) * log) / dp.eval_f(x);
    }
    if let Some(v) = p_inf {
        total += integral_of(q, gamma)? / (v - t);
    }
    Ok(total / TWO_PI_I)
}

/// Dispatch on whether γ is closed.
pub fn eval_i(p: &RationalFunction, q: &RationalFunction, gamma: &Curve, t: C) -> Result<C> {
    if gamma.is_closed() {
        eval_i_closed(p, q, gamma, t)
    } else {
        eval_i_nonclosed(p, q, gamma, t)
    }
}
