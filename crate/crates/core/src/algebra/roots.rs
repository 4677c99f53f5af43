//! Simultaneous polynomial root finding (Aberth–Ehrlich) with Newton polish.

use num_complex::Complex64;

use super::poly::{horner, horner_d};

/// All complex roots of the polynomial with ascending coefficients `cs`,
/// repeated according to numerical multiplicity.
pub fn roots(cs: &[Complex64]) -> Vec<Complex64> {
    let mut cs: Vec<Complex64> = cs.to_vec();
    while cs.last().is_some_and(|c| c.norm() == 0.0) {
        cs.pop();
    }
    if cs.len() <= 1 {
        return Vec::new();
    }
    // strip roots at zero exactly
    let zeros = cs.iter().take_while(|c| c.norm() == 0.0).count();
    let cs = &cs[zeros..];
    let mut out = vec![Complex64::new(0.0, 0.0); zeros];
    let n = cs.len() - 1;
    if n == 0 {
        return out;
    }
    if n == 1 {
        out.push(-cs[0] / cs[1]);
        return out;
    }
    let lead = cs[n];
    let monic: Vec<Complex64> = cs.iter().map(|c| c / lead).collect();
    // Fujiwara-style radius bound for the initial circle
    let radius = (0..n)
        .map(|k| monic[k].norm().powf(1.0 / (n - k) as f64))
        .fold(0.0_f64, f64::max)
        .max(1e-3);
    let mut z: Vec<Complex64> = (0..n)
        .map(|k| Complex64::from_polar(radius, 2.0 * std::f64::consts::PI * (k as f64 + 0.25) / n as f64 + 0.4))
        .collect();
    for _ in 0..500 {
        let mut moved = 0.0_f64;
        for i in 0..n {
            let (p, dp) = horner_d(&monic, z[i]);
            if p.norm() == 0.0 {
                continue;
            }
            let ratio = p / dp;
            let mut s = Complex64::new(0.0, 0.0);
            for j in 0..n {
                if j != i {
                    let d = z[i] - z[j];
                    if d.norm() > 0.0 {
                        s += 1.0 / d;
                    }
                }
            }
            let w = ratio / (Complex64::new(1.0, 0.0) - ratio * s);
            if w.is_finite() {
                z[i] -= w;
                moved = moved.max(w.norm() / z[i].norm().max(1.0));
            }
        }
        if moved < 1e-15 {
            break;
        }
    }
    for r in z.iter_mut() {
        *r = polish(&monic, *r);
    }
    out.extend(z);
    out
}

/// A few Newton steps, kept only while the residual decreases.
pub fn polish(cs: &[Complex64], mut z: Complex64) -> Complex64 {
    let mut res = horner(cs, z).norm();
    for _ in 0..5 {
        let (p, dp) = horner_d(cs, z);
        if dp.norm() == 0.0 {
            break;
        }
        let cand = z - p / dp;
        let r = horner(cs, cand).norm();
        if r < res {
            z = cand;
            res = r;
        } else {
            break;
        }
    }
    z
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn cubic_roots() {
        // z^3 - 3z = z(z - √3)(z + √3)
        let mut r = roots(&[c(0.0, 0.0), c(-3.0, 0.0), c(0.0, 0.0), c(1.0, 0.0)]);
        r.sort_by(|a, b| a.re.partial_cmp(&b.re).unwrap());
        let s3 = 3f64.sqrt();
        assert!((r[0] - c(-s3, 0.0)).norm() < 1e-12);
        assert!(r[1].norm() < 1e-14);
        assert!((r[2] - c(s3, 0.0)).norm() < 1e-12);
    }

    #[test]
    fn roots_of_unity() {
        let n = 7;
        let mut cs = vec![c(0.0, 0.0); n + 1];
        cs[0] = c(-1.0, 0.0);
        cs[n] = c(1.0, 0.0);
        for r in roots(&cs) {
            assert!((r.powu(n as u32) - c(1.0, 0.0)).norm() < 1e-12);
        }
    }
}
