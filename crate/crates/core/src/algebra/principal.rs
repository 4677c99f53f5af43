//! Principal parts of Laurent expansions at finite poles.

use num_complex::Complex64;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use super::gaussian::GaussianRational as Gq;
use super::poly::Poly;

/// Σ_{j≥1} coeffs[j−1]·(z − pole)^{−j}.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PrincipalPart<T> {
    pub pole: T,
    pub coeffs: Vec<T>,
}

impl<T> PrincipalPart<T> {
    pub fn order(&self) -> usize {
        self.coeffs.len()
    }
}

impl PrincipalPart<Complex64> {
    pub fn eval(&self, z: Complex64) -> Complex64 {
        let w = 1.0 / (z - self.pole);
        let mut acc = Complex64::new(0.0, 0.0);
        for c in self.coeffs.iter().rev() {
            acc = (acc + c) * w;
        }
        acc
    }

    /// Residue, the coefficient of (z − pole)^{−1}.
    pub fn residue(&self) -> Complex64 {
        self.coeffs.first().copied().unwrap_or_default()
    }
}

impl PrincipalPart<Gq> {
    /// Map {−j: c_j} keyed by the (negative) exponent.
    pub fn exponent_map(&self) -> Vec<(i64, Gq)> {
        self.coeffs
            .iter()
            .enumerate()
            .filter(|(_, c)| !c.is_zero())
            .map(|(j, c)| (-(j as i64) - 1, c.clone()))
            .collect()
    }

    pub fn to_c64(&self) -> PrincipalPart<Complex64> {
        PrincipalPart {
            pole: self.pole.to_c64(),
            coeffs: self.coeffs.iter().map(Gq::to_c64).collect(),
        }
    }

    /// Numerator and denominator (z − pole)^k of the principal part.
    pub fn as_fraction(&self) -> (Poly, Poly) {
        let k = self.coeffs.len();
        let lin = Poly::linear_root(&self.pole);
        let mut num = Poly::zero();
        for (j, c) in self.coeffs.iter().enumerate() {
            // c·(z−p)^{k−(j+1)}
            num = &num + &lin.pow((k - j - 1) as u32).scale(c);
        }
        (num, lin.pow(k as u32))
    }
}

/// First `k` coefficients of the power series n(u)/h(u), with h(0) ≠ 0.
pub fn series_quotient<T>(n: &[T], h: &[T], k: usize) -> Vec<T>
where
    T: Clone + Zero + One + std::ops::Sub<Output = T> + std::ops::Mul<Output = T> + std::ops::Div<Output = T>,
{
    let get = |v: &[T], i: usize| v.get(i).cloned().unwrap_or_else(T::zero);
    let h0 = get(h, 0);
    let mut s: Vec<T> = Vec::with_capacity(k);
    for m in 0..k {
        let mut acc = get(n, m);
        for j in 1..=m {
            acc = acc - get(h, j) * s[m - j].clone();
        }
        s.push(acc / h0.clone());
    }
    s
}

/// Float Taylor shift: coefficients of p(z + a).
pub fn taylor_shift_f(cs: &[Complex64], a: Complex64) -> Vec<Complex64> {
    let mut c = cs.to_vec();
    let n = c.len();
    for i in 0..n {
        for j in (i..n.saturating_sub(1)).rev() {
            let t = c[j + 1] * a;
            c[j] += t;
        }
    }
    c
}

/// Float synthetic division of p by (z − a); returns the quotient.
pub fn deflate_f(cs: &[Complex64], a: Complex64) -> Vec<Complex64> {
    let n = cs.len();
    if n <= 1 {
        return Vec::new();
    }
    let mut q = vec![Complex64::new(0.0, 0.0); n - 1];
    let mut acc = Complex64::new(0.0, 0.0);
    for k in (1..n).rev() {
        acc = acc * a + cs[k];
        q[k - 1] = acc;
    }
    q
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn series_division() {
        // 1/(1-u) = 1 + u + u^2 + ...
        let s = series_quotient(&[Gq::one()], &[Gq::one(), Gq::from_int(-1)], 4);
        assert!(s.iter().all(|c| *c == Gq::one()));
    }

    #[test]
    fn fraction_roundtrip() {
        let pp = PrincipalPart { pole: Gq::from_int(1), coeffs: vec![Gq::from_int(1), Gq::from_int(1)] };
        let (n, d) = pp.as_fraction();
        // 1/(z-1) + 1/(z-1)^2 = z/(z-1)^2
        assert_eq!(n, Poly::from_ints(&[0, 1]));
        assert_eq!(d, Poly::from_ints(&[1, -2, 1]));
    }

    #[test]
    fn deflation() {
        let c = |x: f64| Complex64::new(x, 0.0);
        // (z-2)(z+3) = z^2 + z - 6
        let q = deflate_f(&[c(-6.0), c(1.0), c(1.0)], c(2.0));
        assert_eq!(q, vec![c(3.0), c(1.0)]);
    }
}
