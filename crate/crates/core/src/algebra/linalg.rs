//! Exact Gaussian elimination over any field with by-reference arithmetic.

use std::ops::{Div, Mul, Sub};

use num_traits::{One, Zero};

/// Reduced row echelon form; returns the nonzero rows and pivot columns.
pub fn rref<T>(mut rows: Vec<Vec<T>>, ncols: usize) -> (Vec<Vec<T>>, Vec<usize>)
where
    T: Clone + Zero + One,
    for<'a> &'a T: Sub<&'a T, Output = T> + Mul<&'a T, Output = T> + Div<&'a T, Output = T>,
{
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..ncols {
        if r == rows.len() {
            break;
        }
        let Some(p) = (r..rows.len()).find(|&i| !rows[i][c].is_zero()) else {
            continue;
        };
        rows.swap(r, p);
        let inv = &T::one() / &rows[r][c];
        rows[r] = rows[r].iter().map(|x| x * &inv).collect();
        let pivot = rows[r].clone();
        for (i, row) in rows.iter_mut().enumerate() {
            if i != r && !row[c].is_zero() {
                let f = row[c].clone();
                for (x, y) in row.iter_mut().zip(&pivot) {
                    *x = &*x - &(&f * y);
                }
            }
        }
        pivots.push(c);
        r += 1;
    }
    rows.truncate(r);
    (rows, pivots)
}

/// A basis of {x : A x = 0}.
pub fn nullspace<T>(rows: Vec<Vec<T>>, ncols: usize) -> Vec<Vec<T>>
where
    T: Clone + Zero + One,
    for<'a> &'a T: Sub<&'a T, Output = T> + Mul<&'a T, Output = T> + Div<&'a T, Output = T>,
{
    let (red, pivots) = rref(rows, ncols);
    let mut out = Vec::new();
    for free in (0..ncols).filter(|c| !pivots.contains(c)) {
        let mut v = vec![T::zero(); ncols];
        v[free] = T::one();
        for (row, &pc) in red.iter().zip(&pivots) {
            v[pc] = &T::zero() - &row[free];
        }
        out.push(v);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_rational::BigRational;

    fn q(n: i64) -> BigRational {
        BigRational::from_integer(n.into())
    }

    #[test]
    fn kernel_of_rank_one() {
        let a = vec![vec![q(1), q(2), q(3)], vec![q(2), q(4), q(6)]];
        let (red, piv) = rref(a.clone(), 3);
        assert_eq!(piv, vec![0]);
        assert_eq!(red.len(), 1);
        let ker = nullspace(a.clone(), 3);
        assert_eq!(ker.len(), 2);
        for v in ker {
            for row in &a {
                let s = row.iter().zip(&v).fold(q(0), |acc, (x, y)| acc + x * y);
                assert!(s.is_zero());
            }
        }
    }
}
