//! Dense univariate polynomials over ℚ(i), coefficients in ascending degree.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_complex::Complex64;
use num_traits::{One, Zero};

use super::gaussian::GaussianRational as Gq;

#[derive(Clone, PartialEq, Eq, Hash, Debug, Default)]
pub struct Poly {
    coeffs: Vec<Gq>,
}

impl Poly {
    pub fn new(mut coeffs: Vec<Gq>) -> Self {
        while coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        Self { coeffs }
    }

    pub fn from_ints(cs: &[i64]) -> Self {
        Self::new(cs.iter().map(|&c| Gq::from_int(c)).collect())
    }

    pub fn zero() -> Self {
        Self { coeffs: Vec::new() }
    }

    pub fn one() -> Self {
        Self::constant(Gq::one())
    }

    pub fn constant(c: Gq) -> Self {
        Self::new(vec![c])
    }

    /// The monomial c·z^k.
    pub fn monomial(c: Gq, k: usize) -> Self {
        let mut v = vec![Gq::zero(); k + 1];
        v[k] = c;
        Self::new(v)
    }

    /// z − a
    pub fn linear_root(a: &Gq) -> Self {
        Self::new(vec![-a, Gq::one()])
    }

    pub fn x() -> Self {
        Self::monomial(Gq::one(), 1)
    }

    pub fn coeffs(&self) -> &[Gq] {
        &self.coeffs
    }

    pub fn coeff(&self, k: usize) -> Gq {
        self.coeffs.get(k).cloned().unwrap_or_else(Gq::zero)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn is_constant(&self) -> bool {
        self.coeffs.len() <= 1
    }

    /// Degree, with the zero polynomial reported as degree 0.
    pub fn degree(&self) -> usize {
        self.coeffs.len().saturating_sub(1)
    }

    pub fn lead(&self) -> Gq {
        self.coeffs.last().cloned().unwrap_or_else(Gq::zero)
    }

    /// Lowest exponent with a nonzero coefficient.
    pub fn valuation(&self) -> usize {
        self.coeffs.iter().position(|c| !c.is_zero()).unwrap_or(0)
    }

    pub fn scale(&self, c: &Gq) -> Self {
        if c.is_zero() {
            return Self::zero();
        }
        Self::new(self.coeffs.iter().map(|a| a * c).collect())
    }

    pub fn monic(&self) -> Self {
        if self.is_zero() {
            return Self::zero();
        }
        self.scale(&self.lead().inv())
    }

    pub fn shift_up(&self, k: usize) -> Self {
        if self.is_zero() {
            return Self::zero();
        }
        let mut v = vec![Gq::zero(); k];
        v.extend(self.coeffs.iter().cloned());
        Self::new(v)
    }

    pub fn derivative(&self) -> Self {
        Self::new(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(k, c)| c * &Gq::from_int(k as i64))
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

    pub fn eval(&self, z: &Gq) -> Gq {
        let mut acc = Gq::zero();
        for c in self.coeffs.iter().rev() {
            acc = &(&acc * z) + c;
        }
        acc
    }

    pub fn to_c64(&self) -> Vec<Complex64> {
        self.coeffs.iter().map(Gq::to_c64).collect()
    }

    /// Quotient and remainder; panics on division by zero.
    pub fn divrem(&self, d: &Poly) -> (Poly, Poly) {
        assert!(!d.is_zero(), "polynomial division by zero");
        if self.coeffs.len() < d.coeffs.len() {
            return (Self::zero(), self.clone());
        }
        let dl = d.lead().inv();
        let dd = d.degree();
        let mut r = self.coeffs.clone();
        let mut q = vec![Gq::zero(); r.len() - dd];
        for k in (0..q.len()).rev() {
            let c = &r[k + dd] * &dl;
            if !c.is_zero() {
                for (j, dc) in d.coeffs.iter().enumerate() {
                    let t = &c * dc;
                    r[k + j] -= &t;
                }
            }
            q[k] = c;
        }
        r.truncate(dd);
        (Self::new(q), Self::new(r))
    }

    /// Monic greatest common divisor (zero if both inputs are zero).
    pub fn gcd(a: &Poly, b: &Poly) -> Poly {
        let mut a = a.clone();
        let mut b = b.clone();
        while !b.is_zero() {
            let (_, r) = a.divrem(&b);
            a = b;
            b = r.monic();
        }
        a.monic()
    }

    /// self(inner(z)) by Horner's scheme.
    pub fn compose(&self, inner: &Poly) -> Poly {
        let mut acc = Poly::zero();
        for c in self.coeffs.iter().rev() {
            acc = &(&acc * inner) + &Poly::constant(c.clone());
        }
        acc
    }

    /// Coefficients of self(z + a), the Taylor expansion at a.
    pub fn taylor_shift(&self, a: &Gq) -> Poly {
        let mut c = self.coeffs.clone();
        let n = c.len();
        for i in 0..n {
            for j in (i..n.saturating_sub(1)).rev() {
                let t = &c[j + 1] * a;
                c[j] += &t;
            }
        }
        Poly::new(c)
    }

    /// Product of the distinct irreducible factors, made monic.
    pub fn squarefree_part(&self) -> Poly {
        if self.degree() == 0 {
            return Poly::one();
        }
        let g = Poly::gcd(self, &self.derivative());
        self.divrem(&g).0.monic()
    }

    /// Yun's squarefree factorization: pairs (f_m, m) with self = c·∏ f_m^m.
    pub fn squarefree_factors(&self) -> Vec<(Poly, usize)> {
        let mut out = Vec::new();
        if self.degree() == 0 {
            return out;
        }
        let f = self.monic();
        let df = f.derivative();
        let a0 = Poly::gcd(&f, &df);
        let mut b = f.divrem(&a0).0;
        let mut c = df.divrem(&a0).0;
        let mut d = &c - &b.derivative();
        let mut m = 1;
        while b.degree() > 0 {
            let a = Poly::gcd(&b, &d);
            if a.degree() > 0 {
                out.push((a.monic(), m));
            }
            b = b.divrem(&a).0;
            c = d.divrem(&a).0;
            d = &c - &b.derivative();
            m += 1;
        }
        out
    }

    /// Reverse coefficients relative to degree d: z^d · p(1/z).
    pub fn reversed(&self, d: usize) -> Poly {
        let mut v = vec![Gq::zero(); d + 1];
        for (k, c) in self.coeffs.iter().enumerate() {
            v[d - k] = c.clone();
        }
        Poly::new(v)
    }

    pub fn is_real(&self) -> bool {
        self.coeffs.iter().all(Gq::is_real)
    }
}

impl<'a> Add<&'a Poly> for &'a Poly {
    type Output = Poly;
    fn add(self, o: &Poly) -> Poly {
        let n = self.coeffs.len().max(o.coeffs.len());
        Poly::new((0..n).map(|k| &self.coeff(k) + &o.coeff(k)).collect())
    }
}

impl<'a> Sub<&'a Poly> for &'a Poly {
    type Output = Poly;
    fn sub(self, o: &Poly) -> Poly {
        let n = self.coeffs.len().max(o.coeffs.len());
        Poly::new((0..n).map(|k| &self.coeff(k) - &o.coeff(k)).collect())
    }
}

impl<'a> Mul<&'a Poly> for &'a Poly {
    type Output = Poly;
    fn mul(self, o: &Poly) -> Poly {
        if self.is_zero() || o.is_zero() {
            return Poly::zero();
        }
        let mut v = vec![Gq::zero(); self.coeffs.len() + o.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in o.coeffs.iter().enumerate() {
                if !b.is_zero() {
                    v[i + j] += &(a * b);
                }
            }
        }
        Poly::new(v)
    }
}

impl Neg for &Poly {
    type Output = Poly;
    fn neg(self) -> Poly {
        Poly::new(self.coeffs.iter().map(|c| -c).collect())
    }
}

impl fmt::Display for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (k, c) in self.coeffs.iter().enumerate().rev() {
            if c.is_zero() {
                continue;
            }
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            match k {
                0 => write!(f, "{c}")?,
                1 => write!(f, "{c}*z")?,
                _ => write!(f, "{c}*z^{k}")?,
            }
        }
        Ok(())
    }
}

/// Horner evaluation of float coefficients (ascending).
pub fn horner(cs: &[Complex64], z: Complex64) -> Complex64 {
    cs.iter().rev().fold(Complex64::new(0.0, 0.0), |acc, c| acc * z + c)
}

/// Value and first derivative in one pass.
pub fn horner_d(cs: &[Complex64], z: Complex64) -> (Complex64, Complex64) {
    let zero = Complex64::new(0.0, 0.0);
    let mut p = zero;
    let mut dp = zero;
    for c in cs.iter().rev() {
        dp = dp * z + p;
        p = p * z + c;
    }
    (p, dp)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn divrem_reconstructs() {
        let a = Poly::from_ints(&[1, -2, 0, 3, 5]);
        let b = Poly::from_ints(&[2, 1, 1]);
        let (q, r) = a.divrem(&b);
        assert!(r.degree() < b.degree());
        assert_eq!(&(&q * &b) + &r, a);
    }

    #[test]
    fn gcd_of_products() {
        let f = Poly::from_ints(&[-1, 1]);
        let g = Poly::from_ints(&[2, 0, 1]);
        let h = Poly::from_ints(&[3, 1]);
        let a = &f * &g;
        let b = &(&f * &g) * &h;
        assert_eq!(Poly::gcd(&a, &b), a.monic());
        assert_eq!(Poly::gcd(&g, &h), Poly::one());
    }

    #[test]
    fn taylor_shift_matches_compose() {
        let p = Poly::from_ints(&[4, -1, 2, 7]);
        let a = Gq::from_parts((1, 2), (-3, 1));
        let shifted = p.compose(&Poly::new(vec![a.clone(), Gq::one()]));
        assert_eq!(p.taylor_shift(&a), shifted);
    }

    #[test]
    fn squarefree() {
        let f = Poly::from_ints(&[-1, 1]);
        let g = Poly::from_ints(&[1, 0, 1]);
        let p = &(&f.pow(3) * &g) * &g;
        assert_eq!(p.squarefree_part(), (&f * &g).monic());
    }

    #[test]
    fn yun_factors() {
        let f = Poly::from_ints(&[-1, 1]);
        let g = Poly::from_ints(&[1, 0, 1]);
        let p = &(&f.pow(3) * &g).scale(&Gq::from_int(5)) * &Poly::x();
        let fac = p.squarefree_factors();
        assert_eq!(fac, vec![((&g * &Poly::x()).monic(), 1), (f, 3)]);
    }

    #[test]
    fn horner_derivative() {
        let cs = Poly::from_ints(&[1, 2, 3]).to_c64();
        let (p, dp) = horner_d(&cs, Complex64::new(2.0, 0.0));
        assert_eq!(p, Complex64::new(17.0, 0.0));
        assert_eq!(dp, Complex64::new(14.0, 0.0));
    }
}
