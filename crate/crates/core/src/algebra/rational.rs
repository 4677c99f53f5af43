//! Normalized rational functions N(z)/D(z) with exact coefficients.

use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};

use num_complex::Complex64;
use num_traits::{One, Zero};

use super::gaussian::GaussianRational as Gq;
use super::poly::{horner, Poly};
use super::principal::{deflate_f, series_quotient, taylor_shift_f, PrincipalPart};
use super::roots::roots;
use crate::error::{Error, Result};

/// A rational function with coprime numerator and monic denominator.
#[derive(Clone, Debug)]
pub struct RationalFunction {
    num: Poly,
    den: Poly,
    num_f: Vec<Complex64>,
    den_f: Vec<Complex64>,
}

impl PartialEq for RationalFunction {
    fn eq(&self, o: &Self) -> bool {
        self.num == o.num && self.den == o.den
    }
}

impl Eq for RationalFunction {}

/// A finite pole with its order.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Pole {
    pub at: Complex64,
    pub order: usize,
}

impl RationalFunction {
    pub fn new(num: Poly, den: Poly) -> Result<Self> {
        if den.is_zero() {
            return Err(Error::DegenerateInput("zero denominator".into()));
        }
        Ok(Self::normalized(num, den))
    }

    fn normalized(num: Poly, den: Poly) -> Self {
        let (num, den) = if num.is_zero() {
            (Poly::zero(), Poly::one())
        } else {
            let g = Poly::gcd(&num, &den);
            let (n, _) = num.divrem(&g);
            let (d, _) = den.divrem(&g);
            let l = d.lead().inv();
            (n.scale(&l), d.scale(&l))
        };
        Self::raw(num, den)
    }

    fn raw(num: Poly, den: Poly) -> Self {
        let num_f = num.to_c64();
        let den_f = den.to_c64();
        Self { num, den, num_f, den_f }
    }

    pub fn from_poly(p: Poly) -> Self {
        Self::raw(p, Poly::one())
    }

    pub fn constant(c: Gq) -> Self {
        Self::from_poly(Poly::constant(c))
    }

    pub fn from_int(c: i64) -> Self {
        Self::constant(Gq::from_int(c))
    }

    pub fn z() -> Self {
        Self::from_poly(Poly::x())
    }

    pub fn zero() -> Self {
        Self::from_poly(Poly::zero())
    }

    pub fn num(&self) -> &Poly {
        &self.num
    }

    pub fn den(&self) -> &Poly {
        &self.den
    }

    pub fn num_f(&self) -> &[Complex64] {
        &self.num_f
    }

    pub fn den_f(&self) -> &[Complex64] {
        &self.den_f
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn is_constant(&self) -> bool {
        self.num.is_constant() && self.den.is_constant()
    }

    pub fn is_polynomial(&self) -> bool {
        self.den.degree() == 0
    }

    /// max(deg N, deg D), the number of preimages of a generic value.
    pub fn degree(&self) -> usize {
        self.num.degree().max(self.den.degree())
    }

    pub fn eval(&self, z: &Gq) -> Result<Gq> {
        let d = self.den.eval(z);
        if d.is_zero() {
            return Err(Error::PoleHit(z.to_string()));
        }
        Ok(&self.num.eval(z) / &d)
    }

    /// Floating evaluation; large |z| is handled through 1/z for accuracy.
    pub fn eval_f(&self, z: Complex64) -> Complex64 {
        if z.norm() <= 1.0 {
            return horner(&self.num_f, z) / horner(&self.den_f, z);
        }
        let w = 1.0 / z;
        let dn = self.num.degree();
        let dd = self.den.degree();
        let ratio = rev_eval(&self.num_f, w) / rev_eval(&self.den_f, w);
        let e = dn as i32 - dd as i32;
        ratio * z.powi(e)
    }

    /// Floating evaluation that reports a pole when the denominator is tiny.
    pub fn try_eval_f(&self, z: Complex64) -> Result<Complex64> {
        let v = self.eval_f(z);
        if !v.is_finite() {
            return Err(Error::PoleHit(format!("{z}")));
        }
        Ok(v)
    }

    pub fn derivative(&self) -> Self {
        let n = &(&self.num.derivative() * &self.den) - &(&self.num * &self.den.derivative());
        Self::normalized(n, &self.den * &self.den)
    }

    pub fn pow(&self, e: i32) -> Result<Self> {
        if e >= 0 {
            Ok(Self::normalized(self.num.pow(e as u32), self.den.pow(e as u32)))
        } else {
            if self.is_zero() {
                return Err(Error::PoleHit("0".into()));
            }
            let k = (-e) as u32;
            Ok(Self::normalized(self.den.pow(k), self.num.pow(k)))
        }
    }

    pub fn recip(&self) -> Result<Self> {
        self.pow(-1)
    }

    /// self ∘ inner.
    pub fn compose(&self, inner: &RationalFunction) -> Self {
        let m = self.num.degree().max(self.den.degree());
        let a = &inner.num;
        let b = &inner.den;
        let mut apow = vec![Poly::one()];
        let mut bpow = vec![Poly::one()];
        for k in 1..=m {
            apow.push(&apow[k - 1] * a);
            bpow.push(&bpow[k - 1] * b);
        }
        let hom = |p: &Poly| {
            let mut acc = Poly::zero();
            for (k, c) in p.coeffs().iter().enumerate() {
                if !c.is_zero() {
                    acc = &acc + &(&apow[k] * &bpow[m - k]).scale(c);
                }
            }
            acc
        };
        Self::normalized(hom(&self.num), hom(&self.den))
    }

    /// P(∞), with None meaning ∞.
    pub fn value_at_infinity(&self) -> Option<Gq> {
        let dn = self.num.degree();
        let dd = self.den.degree();
        if self.num.is_zero() || dn < dd {
            Some(Gq::zero())
        } else if dn == dd {
            Some(&self.num.lead() / &self.den.lead())
        } else {
            None
        }
    }

    /// Pole order at ∞ (zero when P(∞) is finite).
    pub fn pole_order_at_infinity(&self) -> usize {
        if self.num.is_zero() {
            return 0;
        }
        self.num.degree().saturating_sub(self.den.degree())
    }

    /// Finite poles with orders, via exact squarefree factorization of D.
    pub fn finite_poles(&self) -> Vec<Pole> {
        let mut out = Vec::new();
        for (f, m) in self.den.squarefree_factors() {
            for r in roots(&f.to_c64()) {
                out.push(Pole { at: r, order: m });
            }
        }
        out.sort_by(|a, b| (a.at.re, a.at.im).partial_cmp(&(b.at.re, b.at.im)).unwrap());
        out
    }

    /// Finite zeros with multiplicities.
    pub fn finite_zeros(&self) -> Vec<Pole> {
        let mut out = Vec::new();
        for (f, m) in self.num.squarefree_factors() {
            for r in roots(&f.to_c64()) {
                out.push(Pole { at: r, order: m });
            }
        }
        out
    }

    /// Exact principal part at a Gaussian-rational pole.
    pub fn principal_part(&self, pole: &Gq) -> Result<PrincipalPart<Gq>> {
        if !self.den.eval(pole).is_zero() {
            return Err(Error::NotAPole(pole.to_string()));
        }
        let lin = Poly::linear_root(pole);
        let mut h = self.den.clone();
        let mut k = 0;
        loop {
            let (q, r) = h.divrem(&lin);
            if !r.is_zero() {
                break;
            }
            h = q;
            k += 1;
        }
        let n = self.num.taylor_shift(pole);
        let hs = h.taylor_shift(pole);
        let s = series_quotient(n.coeffs(), hs.coeffs(), k);
        let coeffs = (1..=k).map(|j| s[k - j].clone()).collect();
        Ok(PrincipalPart { pole: pole.clone(), coeffs })
    }

    /// Floating principal part at a numerically located pole of known order.
    pub fn principal_part_f(&self, pole: Pole) -> PrincipalPart<Complex64> {
        let k = pole.order;
        let mut h = self.den_f.clone();
        for _ in 0..k {
            h = deflate_f(&h, pole.at);
        }
        let n = taylor_shift_f(&self.num_f, pole.at);
        let hs = taylor_shift_f(&h, pole.at);
        let s = series_quotient(&n, &hs, k);
        PrincipalPart { pole: pole.at, coeffs: (1..=k).map(|j| s[k - j]).collect() }
    }

    /// Polynomial part and all finite principal parts (floating).
    pub fn partial_fractions_f(&self) -> (Vec<Complex64>, Vec<PrincipalPart<Complex64>>) {
        let (q, _) = self.num.divrem(&self.den);
        let parts = self.finite_poles().into_iter().map(|p| self.principal_part_f(p)).collect();
        (q.to_c64(), parts)
    }

    /// Exact gaussian-rational roots of D are those that the float roots
    /// round to; returns them when every pole is such a point.
    pub fn exact_poles(&self) -> Option<Vec<Gq>> {
        let mut out = Vec::new();
        for (f, _) in self.den.squarefree_factors() {
            if f.degree() != 1 {
                // try splitting into linear factors with small rational roots
                let mut rem = f.clone();
                for r in roots(&f.to_c64()) {
                    let g = snap(r)?;
                    let (q, rr) = rem.divrem(&Poly::linear_root(&g));
                    if !rr.is_zero() {
                        return None;
                    }
                    rem = q;
                    out.push(g);
                }
            } else {
                out.push(-&f.coeff(0));
            }
        }
        Some(out)
    }

    /// Laurent form when the denominator is a pure power of z.
    pub fn laurent_exponents(&self) -> Option<Vec<(i64, Gq)>> {
        let d = self.den.degree();
        if self.den != Poly::monomial(Gq::one(), d) {
            return None;
        }
        Some(
            self.num
                .coeffs()
                .iter()
                .enumerate()
                .filter(|(_, c)| !c.is_zero())
                .map(|(k, c)| (k as i64 - d as i64, c.clone()))
                .collect(),
        )
    }

    pub fn is_real(&self) -> bool {
        self.num.is_real() && self.den.is_real()
    }
}

/// Σ c_k w^{deg−k}, the reversed polynomial at w.
fn rev_eval(cs: &[Complex64], w: Complex64) -> Complex64 {
    cs.iter().fold(Complex64::new(0.0, 0.0), |acc, c| acc * w + c)
}

/// Round a float to a nearby Gaussian rational with small denominator.
fn snap(z: Complex64) -> Option<Gq> {
    let part = |x: f64| -> Option<num_rational::BigRational> {
        for den in 1..=64i64 {
            let n = (x * den as f64).round();
            if (n / den as f64 - x).abs() < 1e-9 * x.abs().max(1.0) {
                return Some(num_rational::BigRational::new((n as i64).into(), den.into()));
            }
        }
        None
    };
    Some(Gq::new(part(z.re)?, part(z.im)?))
}

impl From<Poly> for RationalFunction {
    fn from(p: Poly) -> Self {
        Self::from_poly(p)
    }
}

impl<'a> Add<&'a RationalFunction> for &'a RationalFunction {
    type Output = RationalFunction;
    fn add(self, o: &RationalFunction) -> RationalFunction {
        let n = &(&self.num * &o.den) + &(&o.num * &self.den);
        RationalFunction::normalized(n, &self.den * &o.den)
    }
}

impl<'a> Sub<&'a RationalFunction> for &'a RationalFunction {
    type Output = RationalFunction;
    fn sub(self, o: &RationalFunction) -> RationalFunction {
        let n = &(&self.num * &o.den) - &(&o.num * &self.den);
        RationalFunction::normalized(n, &self.den * &o.den)
    }
}

impl<'a> Mul<&'a RationalFunction> for &'a RationalFunction {
    type Output = RationalFunction;
    fn mul(self, o: &RationalFunction) -> RationalFunction {
        RationalFunction::normalized(&self.num * &o.num, &self.den * &o.den)
    }
}

impl<'a> Div<&'a RationalFunction> for &'a RationalFunction {
    type Output = RationalFunction;
    /// Panics when dividing by the zero function.
    fn div(self, o: &RationalFunction) -> RationalFunction {
        assert!(!o.is_zero(), "division by the zero rational function");
        RationalFunction::normalized(&self.num * &o.den, &self.den * &o.num)
    }
}

impl Neg for &RationalFunction {
    type Output = RationalFunction;
    fn neg(self) -> RationalFunction {
        RationalFunction::raw(-&self.num, self.den.clone())
    }
}

impl fmt::Display for RationalFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.den.degree() == 0 {
            write!(f, "{}", self.num)
        } else {
            write!(f, "({}) / ({})", self.num, self.den)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rf(n: &[i64], d: &[i64]) -> RationalFunction {
        RationalFunction::new(Poly::from_ints(n), Poly::from_ints(d)).unwrap()
    }

    #[test]
    fn normalization_removes_common_factor() {
        // (z^2-1)/(2z-2) = (z+1)/2
        let f = rf(&[-1, 0, 1], &[-2, 2]);
        assert!(f.is_polynomial());
        assert_eq!(f.num(), &Poly::new(vec![Gq::from_ratio(1, 2), Gq::from_ratio(1, 2)]));
    }

    #[test]
    fn evaluation_examples() {
        let p = rf(&[0, 0, 1], &[1]);
        assert_eq!(p.eval(&Gq::from_int(3)).unwrap(), Gq::from_int(9));
        let l = rf(&[1, 0, 1], &[0, 1]);
        assert!(l.eval(&Gq::i()).unwrap().is_zero());
        assert_eq!(l.eval(&Gq::from_int(2)).unwrap(), Gq::from_ratio(5, 2));
        assert!(matches!(l.eval(&Gq::zero()), Err(Error::PoleHit(_))));
        let big = Complex64::new(1e8, 3e7);
        let exact = big + 1.0 / big;
        assert!(((l.eval_f(big) - exact) / exact).norm() < 1e-15);
    }

    #[test]
    fn derivative_examples() {
        assert_eq!(rf(&[0, 0, 1], &[1]).derivative(), rf(&[0, 2], &[1]));
        assert_eq!(rf(&[1], &[0, 1]).derivative(), rf(&[-1], &[0, 0, 1]));
        assert_eq!(rf(&[1, 1], &[-1, 1]).derivative(), rf(&[-2], &[1, -2, 1]));
    }

    #[test]
    fn composition_examples() {
        let sq = rf(&[0, 0, 1], &[1]);
        assert_eq!(sq.compose(&rf(&[1, 1], &[1])), rf(&[1, 2, 1], &[1]));
        let l = rf(&[1, 0, 1], &[0, 1]);
        assert_eq!(l.compose(&sq), rf(&[1, 0, 0, 0, 1], &[0, 0, 1]));
        let d3 = rf(&[1, 0, 2, 1], &[1]);
        assert_eq!(rf(&[0, 1, 1], &[1]).compose(&d3).degree(), 6);
    }

    #[test]
    fn principal_part_examples() {
        let q = rf(&[2, 1, 0, 1], &[0, 0, 1]); // 1/z + 2/z^2 + z
        let pp = q.principal_part(&Gq::zero()).unwrap();
        assert_eq!(pp.exponent_map(), vec![(-1, Gq::from_int(1)), (-2, Gq::from_int(2))]);
        let q = rf(&[0, 1], &[1, -2, 1]); // z/(z-1)^2
        let pp = q.principal_part(&Gq::one()).unwrap();
        assert_eq!(pp.coeffs, vec![Gq::from_int(1), Gq::from_int(1)]);
        assert!(matches!(q.principal_part(&Gq::from_int(2)), Err(Error::NotAPole(_))));
        let ppf = q.principal_part_f(Pole { at: Complex64::new(1.0, 0.0), order: 2 });
        assert!((ppf.coeffs[0] - 1.0).norm() < 1e-12 && (ppf.coeffs[1] - 1.0).norm() < 1e-12);
    }

    #[test]
    fn value_at_infinity() {
        assert_eq!(rf(&[0, 0, 1], &[1]).value_at_infinity(), None);
        assert_eq!(rf(&[1, 3], &[1, 2]).value_at_infinity(), Some(Gq::from_ratio(3, 2)));
        assert_eq!(rf(&[1], &[-3, 1]).value_at_infinity(), Some(Gq::zero()));
    }
}
