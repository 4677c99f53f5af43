//! Predictor–corrector continuation of the roots of P(x) = t along a path in
//! the t-plane.

use num_complex::Complex64;

use crate::algebra::poly::horner_d;
use crate::algebra::RationalFunction;
use crate::curves::{Curve, Segment};
use crate::error::{Error, Result};

type C = Complex64;

const MAX_NEWTON: usize = 6;
const MIN_STEP: f64 = 1e-10;
const MAX_STEP: f64 = 0.1;
const RESIDUAL_TOL: f64 = 1e-10;

/// Continuation engine for F(x, t) = N(x) − t·D(x).
#[derive(Clone, Debug)]
pub struct Tracker {
    num: Vec<C>,
    den: Vec<C>,
}

impl Tracker {
    pub fn new(p: &RationalFunction) -> Self {
        Self { num: p.num_f().to_vec(), den: p.den_f().to_vec() }
    }

    /// (F, ∂F/∂x, D) at (x, t).
    fn eval(&self, x: C, t: C) -> (C, C, C) {
        let (n, dn) = horner_d(&self.num, x);
        let (d, dd) = horner_d(&self.den, x);
        (n - t * d, dn - t * dd, d)
    }

    /// Relative residual |F| / (Σ|nₖ||x|ᵏ + |t|Σ|dₖ||x|ᵏ).
    pub fn residual(&self, x: C, t: C) -> f64 {
        let (n, _) = horner_d(&self.num, x);
        let (d, _) = horner_d(&self.den, x);
        let r = x.norm();
        let abs_sum = |cs: &[C]| cs.iter().rev().fold(0.0, |acc, c| acc * r + c.norm());
        let scale = abs_sum(&self.num) + t.norm() * abs_sum(&self.den);
        if scale == 0.0 {
            0.0
        } else {
            (n - t * d).norm() / scale
        }
    }

    /// Newton iteration at fixed t; returns (root, iterations) or None.
    fn newton(&self, mut x: C, t: C, max_move: f64) -> Option<(C, usize)> {
        let x0 = x;
        for it in 1..=MAX_NEWTON {
            let (f, df, _) = self.eval(x, t);
            if df.norm() == 0.0 || !df.is_finite() {
                return None;
            }
            let dx = f / df;
            x -= dx;
            if !x.is_finite() || (x - x0).norm() > max_move {
                return None;
            }
            if dx.norm() <= 1e-14 * x.norm().max(1.0) {
                return Some((x, it));
            }
        }
        let (f, df, _) = self.eval(x, t);
        let last = (f / df).norm();
        (last <= 1e-11 * x.norm().max(1.0)).then_some((x, MAX_NEWTON))
    }

    fn min_sep(xs: &[C]) -> Vec<f64> {
        (0..xs.len())
            .map(|i| {
                (0..xs.len()).filter(|&j| j != i).map(|j| (xs[i] - xs[j]).norm()).fold(f64::INFINITY, f64::min)
            })
            .collect()
    }

    /// One segment; `record` receives the values after every accepted step.
    fn segment(&self, seg: &Segment, xs: &mut Vec<C>, mut record: impl FnMut(&[C])) -> Result<()> {
        let mut s = 0.0f64;
        let mut h = 0.02f64;
        while s < 1.0 {
            h = h.min(1.0 - s);
            let t0 = seg.point(s);
            let s1 = if s + h >= 1.0 - 1e-15 { 1.0 } else { s + h };
            let t1 = seg.point(s1);
            let seps = Self::min_sep(xs);
            let mut next = Vec::with_capacity(xs.len());
            let mut worst_it = 0;
            let mut ok = true;
            for (i, &x) in xs.iter().enumerate() {
                let (_, df, d) = self.eval(x, t0);
                let pred = x + (t1 - t0) * d / df;
                if !pred.is_finite() {
                    ok = false;
                    break;
                }
                let lim = 0.25 * seps[i];
                match self.newton(pred, t1, lim) {
                    Some((y, it)) if (y - x).norm() < 0.5 * seps[i] || xs.len() == 1 => {
                        worst_it = worst_it.max(it);
                        next.push(y);
                    }
                    _ => {
                        ok = false;
                        break;
                    }
                }
            }
            if ok {
                let new_seps = Self::min_sep(&next);
                let scale = next.iter().map(|x| x.norm()).fold(1.0, f64::max);
                let min_new = new_seps.iter().copied().fold(f64::INFINITY, f64::min);
                if next.len() > 1 && min_new < 1e-12 * scale {
                    return Err(Error::BranchCollision(min_new));
                }
                // the assignment must stay a bijection: each new root nearest its old one
                for (i, y) in next.iter().enumerate() {
                    if new_seps[i] < 0.5 * (y - xs[i]).norm() {
                        ok = false;
                        break;
                    }
                }
            }
            if ok {
                *xs = next;
                s = s1;
                record(xs);
                if worst_it <= 3 {
                    h = (h * 1.5).min(MAX_STEP);
                }
            } else {
                h *= 0.5;
                if h < MIN_STEP {
                    return Err(Error::PathTooCloseToBranchPoint);
                }
            }
        }
        Ok(())
    }

    fn finish(&self, xs: &mut [C], t: C) -> Result<()> {
        for x in xs.iter_mut() {
            for _ in 0..2 {
                let (f, df, _) = self.eval(*x, t);
                let cand = *x - f / df;
                if cand.is_finite() && self.residual(cand, t) <= self.residual(*x, t) {
                    *x = cand;
                }
            }
            if self.residual(*x, t) > RESIDUAL_TOL {
                return Err(Error::NewtonDivergence(format!("{t}")));
            }
        }
        Ok(())
    }

    /// Continue `start` (roots of P = path start) to the end of `path`.
    pub fn track(&self, path: &Curve, start: &[C]) -> Result<Vec<C>> {
        let mut xs = start.to_vec();
        for seg in path.segments() {
            self.segment(seg, &mut xs, |_| {})?;
        }
        self.finish(&mut xs, path.end())?;
        Ok(xs)
    }

    /// As `track`, also returning each branch's trajectory as a polyline.
    pub fn track_recorded(&self, path: &Curve, start: &[C]) -> Result<(Vec<C>, Vec<Vec<C>>)> {
        let mut xs = start.to_vec();
        let mut trails: Vec<Vec<C>> = xs.iter().map(|&x| vec![x]).collect();
        for seg in path.segments() {
            self.segment(seg, &mut xs, |v| {
                for (tr, &x) in trails.iter_mut().zip(v) {
                    tr.push(x);
                }
            })?;
        }
        self.finish(&mut xs, path.end())?;
        Ok((xs, trails))
    }
}

/// Continue the roots of P(x) = path start along `path`.
pub fn track_branches(p: &RationalFunction, path: &Curve, start: &[C]) -> Result<Vec<C>> {
    Tracker::new(p).track(path, start)
}

/// All roots of P(x) = t, i.e. of N − tD.
pub fn solve_fiber(p: &RationalFunction, t: C) -> Vec<C> {
    let n = p.num_f();
    let d = p.den_f();
    let len = n.len().max(d.len());
    let cs: Vec<C> = (0..len)
        .map(|k| n.get(k).copied().unwrap_or_default() - t * d.get(k).copied().unwrap_or_default())
        .collect();
    let tr = Tracker::new(p);
    crate::algebra::roots::roots(&cs)
        .into_iter()
        .map(|x| {
            let mut x = x;
            for _ in 0..3 {
                let (f, df, _) = tr.eval(x, t);
                let c = x - f / df;
                if c.is_finite() && tr.residual(c, t) <= tr.residual(x, t) {
                    x = c;
                }
            }
            x
        })
        .collect()
}

/// Lexicographic order by (re, im).
pub fn sort_lex(xs: &mut [C]) {
    xs.sort_by(|a, b| (a.re, a.im).partial_cmp(&(b.re, b.im)).unwrap_or(std::cmp::Ordering::Equal));
}

/// Match `ends` to `starts`: returns σ with ends[i] ≈ starts[σ(i)].
pub fn match_fibers(starts: &[C], ends: &[C]) -> Result<Vec<usize>> {
    let seps = Tracker::min_sep(starts);
    let mut used = vec![false; starts.len()];
    let mut out = Vec::with_capacity(ends.len());
    for &e in ends {
        let (j, d) = starts
            .iter()
            .enumerate()
            .map(|(j, &s)| (j, (s - e).norm()))
            .min_by(|a, b| a.1.partial_cmp(&b.1).unwrap())
            .ok_or(Error::InconsistentPartition)?;
        if used[j] || (starts.len() > 1 && d > 0.1 * seps[j]) {
            return Err(Error::BranchCollision(d));
        }
        used[j] = true;
        out.push(j);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::parse_rational;
    use std::f64::consts::PI;

    fn c(re: f64, im: f64) -> C {
        C::new(re, im)
    }

    #[test]
    fn square_root_monodromy() {
        let p = parse_rational("z^2").unwrap();
        let lp = Curve::circle(c(0.0, 0.0), 1.0);
        let end = track_branches(&p, &lp, &[c(1.0, 0.0), c(-1.0, 0.0)]).unwrap();
        assert!((end[0] - c(-1.0, 0.0)).norm() < 1e-10);
        assert!((end[1] - c(1.0, 0.0)).norm() < 1e-10);
        let seg = Curve::segment(c(1.0, 0.0), c(4.0, 0.0));
        let end = track_branches(&p, &seg, &[c(1.0, 0.0), c(-1.0, 0.0)]).unwrap();
        assert!((end[0] - c(2.0, 0.0)).norm() < 1e-10);
        assert!((end[1] - c(-2.0, 0.0)).norm() < 1e-10);
    }

    #[test]
    fn small_loop_is_transposition() {
        let p = parse_rational("z^3 - 3z").unwrap();
        let base = c(2.0, -0.5);
        let mut start = solve_fiber(&p, base);
        sort_lex(&mut start);
        // loop around t = 2 starting from the bottom
        let lp = Curve::new(vec![Segment::arc(c(2.0, 0.0), 0.5, -PI / 2.0, 1.5 * PI)], true).unwrap();
        let end = track_branches(&p, &lp, &start).unwrap();
        let sigma = match_fibers(&start, &end).unwrap();
        let moved = sigma.iter().enumerate().filter(|(i, j)| i != *j).count();
        assert_eq!(moved, 2);
        // a loop not enclosing a branch point gives the identity
        let lp = Curve::circle(c(5.0, 0.0), 2.0);
        let start = solve_fiber(&p, c(7.0, 0.0));
        let end = track_branches(&p, &lp, &start).unwrap();
        let sigma = match_fibers(&start, &end).unwrap();
        assert!(sigma.iter().enumerate().all(|(i, j)| i == *j));
        for (a, b) in start.iter().zip(&end) {
            assert!((a - b).norm() < 1e-10);
        }
    }

    #[test]
    fn fiber_residuals() {
        let p = parse_rational("(z^3 + 2)/(z^2 - z + 5)").unwrap();
        let t = c(3.0, 1.0);
        let xs = solve_fiber(&p, t);
        assert_eq!(xs.len(), 3);
        for x in xs {
            assert!((p.eval_f(x) - t).norm() < 1e-10);
        }
    }
}
