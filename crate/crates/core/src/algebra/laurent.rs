//! Laurent polynomials and the exact unit-circle moment oracle.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{One, Zero};

use super::gaussian::GaussianRational as Gq;
use super::poly::Poly;
use super::rational::RationalFunction;
use crate::error::{Error, Result};

/// Default cap on the dense term count of an expansion.
pub const DEFAULT_EXPANSION_CAP: usize = 1_000_000;

#[derive(Clone, PartialEq, Eq, Hash, Debug, Default)]
pub struct LaurentPolynomial {
    coeffs: BTreeMap<i64, Gq>,
}

impl LaurentPolynomial {
    pub fn new(coeffs: BTreeMap<i64, Gq>) -> Self {
        Self { coeffs: coeffs.into_iter().filter(|(_, c)| !c.is_zero()).collect() }
    }

    /// From (exponent, integer coefficient) pairs; repeated exponents add.
    pub fn from_terms(terms: &[(i64, i64)]) -> Self {
        let mut out = Self::zero();
        for &(e, c) in terms {
            out = &out + &Self::monomial(Gq::from_int(c), e);
        }
        out
    }

    pub fn zero() -> Self {
        Self { coeffs: BTreeMap::new() }
    }

    pub fn one() -> Self {
        Self::monomial(Gq::one(), 0)
    }

    pub fn monomial(c: Gq, e: i64) -> Self {
        let mut m = BTreeMap::new();
        m.insert(e, c);
        Self::new(m)
    }

    pub fn coeffs(&self) -> &BTreeMap<i64, Gq> {
        &self.coeffs
    }

    pub fn coeff(&self, e: i64) -> Gq {
        self.coeffs.get(&e).cloned().unwrap_or_else(Gq::zero)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// (n₁, n₂) = (min exponent, max exponent).
    pub fn bidegree(&self) -> Result<(i64, i64)> {
        match (self.coeffs.keys().next(), self.coeffs.keys().next_back()) {
            (Some(&a), Some(&b)) => Ok((a, b)),
            _ => Err(Error::ZeroInput),
        }
    }

    /// n₁ < 0 < n₂.
    pub fn is_proper(&self) -> Result<bool> {
        let (a, b) = self.bidegree()?;
        Ok(a < 0 && b > 0)
    }

    /// Degree as a rational function: max(n₂,0) − min(n₁,0).
    pub fn degree(&self) -> usize {
        match self.bidegree() {
            Ok((a, b)) => (b.max(0) - a.min(0)) as usize,
            Err(_) => 0,
        }
    }

    /// Part with exponents in the given inclusive range.
    pub fn restrict(&self, lo: i64, hi: i64) -> Self {
        Self { coeffs: self.coeffs.range(lo..=hi).map(|(k, v)| (*k, v.clone())).collect() }
    }

    pub fn scale(&self, c: &Gq) -> Self {
        Self::new(self.coeffs.iter().map(|(k, v)| (*k, v * c)).collect())
    }

    pub fn derivative(&self) -> Self {
        Self::new(
            self.coeffs
                .iter()
                .filter(|(k, _)| **k != 0)
                .map(|(k, v)| (k - 1, v * &Gq::from_int(*k)))
                .collect(),
        )
    }

    pub fn pow(&self, e: u32) -> Self {
        let mut acc = Self::one();
        let mut base = self.clone();
        let mut e = e;
        while e > 0 {
            if e & 1 == 1 {
                acc = &acc * &base;
            }
            e >>= 1;
            if e > 0 {
                base = &base * &base;
            }
        }
        acc
    }

    /// outer(self) for a polynomial `outer`.
    pub fn compose_into(&self, outer: &Poly) -> Self {
        let mut acc = Self::zero();
        for c in outer.coeffs().iter().rev() {
            acc = &(&acc * self) + &Self::monomial(c.clone(), 0);
        }
        acc
    }

    /// Coefficient of z^{-1}.
    pub fn residue(&self) -> Gq {
        self.coeff(-1)
    }

    pub fn eval(&self, z: &Gq) -> Result<Gq> {
        if z.is_zero() && self.coeffs.keys().any(|&k| k < 0) {
            return Err(Error::PoleHit("0".into()));
        }
        let mut acc = Gq::zero();
        for (k, c) in &self.coeffs {
            let p = if *k >= 0 { z.pow(*k as u32) } else { z.inv().pow((-k) as u32) };
            acc += &(c * &p);
        }
        Ok(acc)
    }

    pub fn eval_f(&self, z: Complex64) -> Complex64 {
        self.coeffs.iter().map(|(k, c)| c.to_c64() * z.powi(*k as i32)).sum()
    }

    pub fn to_rational(&self) -> RationalFunction {
        let lo = self.coeffs.keys().next().copied().unwrap_or(0).min(0);
        let hi = self.coeffs.keys().next_back().copied().unwrap_or(0).max(0);
        let mut v = vec![Gq::zero(); (hi - lo + 1) as usize];
        for (k, c) in &self.coeffs {
            v[(k - lo) as usize] = c.clone();
        }
        RationalFunction::new(Poly::new(v), Poly::monomial(Gq::one(), (-lo) as usize))
            .expect("monomial denominator is nonzero")
    }

    /// Inverse of `to_rational` when the denominator is a power of z.
    pub fn from_rational(f: &RationalFunction) -> Option<Self> {
        f.laurent_exponents().map(|t| Self::new(t.into_iter().collect()))
    }

    pub fn is_real(&self) -> bool {
        self.coeffs.values().all(Gq::is_real)
    }
}

impl<'a> Add<&'a LaurentPolynomial> for &'a LaurentPolynomial {
    type Output = LaurentPolynomial;
    fn add(self, o: &LaurentPolynomial) -> LaurentPolynomial {
        let mut m = self.coeffs.clone();
        for (k, v) in &o.coeffs {
            *m.entry(*k).or_insert_with(Gq::zero) += v;
        }
        LaurentPolynomial::new(m)
    }
}

impl<'a> Sub<&'a LaurentPolynomial> for &'a LaurentPolynomial {
    type Output = LaurentPolynomial;
    fn sub(self, o: &LaurentPolynomial) -> LaurentPolynomial {
        self + &(-o)
    }
}

impl<'a> Mul<&'a LaurentPolynomial> for &'a LaurentPolynomial {
    type Output = LaurentPolynomial;
    fn mul(self, o: &LaurentPolynomial) -> LaurentPolynomial {
        let mut m: BTreeMap<i64, Gq> = BTreeMap::new();
        for (a, x) in &self.coeffs {
            for (b, y) in &o.coeffs {
                *m.entry(a + b).or_insert_with(Gq::zero) += &(x * y);
            }
        }
        LaurentPolynomial::new(m)
    }
}

impl Neg for &LaurentPolynomial {
    type Output = LaurentPolynomial;
    fn neg(self) -> LaurentPolynomial {
        LaurentPolynomial { coeffs: self.coeffs.iter().map(|(k, v)| (*k, -v)).collect() }
    }
}

impl fmt::Display for LaurentPolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let parts: Vec<String> = self
            .coeffs
            .iter()
            .rev()
            .map(|(k, c)| match k {
                0 => format!("{c}"),
                1 => format!("{c}*z"),
                _ => format!("{c}*z^{k}"),
            })
            .collect();
        write!(f, "{}", parts.join(" + "))
    }
}

/// Dense Laurent polynomial with Gaussian-integer coefficients, used by the
/// exact moment oracle after clearing denominators.
#[derive(Clone, Debug)]
struct IntLaurent {
    offset: i64,
    re: Vec<BigInt>,
    im: Option<Vec<BigInt>>,
}

impl IntLaurent {
    /// Returns (d·L, d) with d the lcm of all coefficient denominators.
    fn from_laurent(l: &LaurentPolynomial) -> (Self, BigInt) {
        let (lo, hi) = l.bidegree().unwrap_or((0, 0));
        let mut d = BigInt::one();
        for c in l.coeffs.values() {
            d = num_integer::Integer::lcm(&d, &c.denom_lcm());
        }
        let dr = BigRational::from_integer(d.clone());
        let n = (hi - lo + 1) as usize;
        let mut re = vec![BigInt::zero(); n];
        let mut im = vec![BigInt::zero(); n];
        let mut real = true;
        for (k, c) in &l.coeffs {
            let i = (k - lo) as usize;
            re[i] = (&c.re * &dr).to_integer();
            im[i] = (&c.im * &dr).to_integer();
            real &= c.im.is_zero();
        }
        (Self { offset: lo, re, im: if real { None } else { Some(im) } }, d)
    }

    fn one() -> Self {
        Self { offset: 0, re: vec![BigInt::one()], im: None }
    }

    fn len(&self) -> usize {
        self.re.len()
    }

    fn mul(&self, o: &Self) -> Self {
        let n = self.len() + o.len() - 1;
        let conv = |a: &[BigInt], b: &[BigInt]| {
            let mut out = vec![BigInt::zero(); n];
            for (i, x) in a.iter().enumerate() {
                if x.is_zero() {
                    continue;
                }
                for (j, y) in b.iter().enumerate() {
                    if !y.is_zero() {
                        out[i + j] += x * y;
                    }
                }
            }
            out
        };
        let offset = self.offset + o.offset;
        match (&self.im, &o.im) {
            (None, None) => Self { offset, re: conv(&self.re, &o.re), im: None },
            _ => {
                let zero_a = vec![BigInt::zero(); self.len()];
                let zero_b = vec![BigInt::zero(); o.len()];
                let ai = self.im.as_ref().unwrap_or(&zero_a);
                let bi = o.im.as_ref().unwrap_or(&zero_b);
                let rr = conv(&self.re, &o.re);
                let ii = conv(ai, bi);
                let ri = conv(&self.re, bi);
                let ir = conv(ai, &o.re);
                let re = rr.into_iter().zip(ii).map(|(a, b)| a - b).collect();
                let im = ri.into_iter().zip(ir).map(|(a, b)| a + b).collect();
                Self { offset, re, im: Some(im) }
            }
        }
    }

    /// Coefficient of z^{-1} in self·o, as a Gaussian integer.
    fn residue_of_product(&self, o: &Self) -> (BigInt, BigInt) {
        let mut re = BigInt::zero();
        let mut im = BigInt::zero();
        for (j, y) in o.re.iter().enumerate() {
            let ej = o.offset + j as i64;
            let ei = -1 - ej - self.offset;
            if ei < 0 || ei as usize >= self.len() {
                continue;
            }
            let i = ei as usize;
            let xr = &self.re[i];
            let xi = self.im.as_ref().map(|v| &v[i]);
            let yi = o.im.as_ref().map(|v| &v[j]);
            re += xr * y;
            if let (Some(a), Some(b)) = (xi, yi) {
                re -= a * b;
            }
            if let Some(b) = yi {
                im += xr * b;
            }
            if let Some(a) = xi {
                im += a * y;
            }
        }
        (re, im)
    }
}

fn check_cap(l: &LaurentPolynomial, m: &LaurentPolynomial, i: usize, cap: usize) -> Result<()> {
    let width = |p: &LaurentPolynomial| p.bidegree().map(|(a, b)| (b - a + 1) as usize).unwrap_or(1);
    let needed = i.saturating_mul(width(l)).saturating_add(width(m));
    if needed > cap {
        return Err(Error::CapExceeded { needed, cap });
    }
    Ok(())
}

/// Coefficient of z^{-1} in Lⁱ·m, i.e. (1/2πi)∫_{S¹} Lⁱ m dz.
pub fn circle_residue(l: &LaurentPolynomial, m: &LaurentPolynomial, i: usize) -> Result<Gq> {
    circle_residue_capped(l, m, i, DEFAULT_EXPANSION_CAP)
}

pub fn circle_residue_capped(l: &LaurentPolynomial, m: &LaurentPolynomial, i: usize, cap: usize) -> Result<Gq> {
    check_cap(l, m, i, cap)?;
    if m.is_zero() || (l.is_zero() && i > 0) {
        return Ok(Gq::zero());
    }
    let (li, d) = IntLaurent::from_laurent(l);
    let mut p = IntLaurent::one();
    let mut base = li;
    let mut e = i;
    while e > 0 {
        if e & 1 == 1 {
            p = p.mul(&base);
        }
        e >>= 1;
        if e > 0 {
            base = base.mul(&base);
        }
    }
    Ok(residue_scaled(&p, m, &d.pow(i as u32)))
}

fn residue_scaled(p: &IntLaurent, m: &LaurentPolynomial, scale: &BigInt) -> Gq {
    let (mi, dm) = IntLaurent::from_laurent(m);
    let (re, im) = p.residue_of_product(&mi);
    let den = scale * dm;
    Gq::new(BigRational::new(re, den.clone()), BigRational::new(im, den))
}

/// Residues (1/2πi)∫ Lⁱ m dz for i = 0..=n, computed incrementally.
pub fn circle_residues(l: &LaurentPolynomial, m: &LaurentPolynomial, n: usize) -> Result<Vec<Gq>> {
    circle_residues_capped(l, m, n, DEFAULT_EXPANSION_CAP)
}

pub fn circle_residues_capped(l: &LaurentPolynomial, m: &LaurentPolynomial, n: usize, cap: usize) -> Result<Vec<Gq>> {
    check_cap(l, m, n, cap)?;
    if m.is_zero() {
        return Ok(vec![Gq::zero(); n + 1]);
    }
    let (li, d) = IntLaurent::from_laurent(l);
    let (mi, dm) = IntLaurent::from_laurent(m);
    let mut p = IntLaurent::one();
    let mut scale = dm;
    let mut out = Vec::with_capacity(n + 1);
    for i in 0..=n {
        if i > 0 {
            if l.is_zero() {
                out.push(Gq::zero());
                continue;
            }
            p = p.mul(&li);
            scale *= &d;
        }
        let (re, im) = p.residue_of_product(&mi);
        out.push(Gq::new(BigRational::new(re, scale.clone()), BigRational::new(im, scale.clone())));
    }
    Ok(out)
}
