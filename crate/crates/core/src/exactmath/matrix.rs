//! Dense matrices over Q, sized for Hecke operators on Brandt modules
//! (dimension in the tens).

use std::ops::Mul;

use num_bigint::BigInt;
use num_traits::{One, Zero};

use super::Rational;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RatMatrix {
    rows: usize,
    cols: usize,
    data: Vec<Rational>,
}

impl RatMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        RatMatrix { rows, cols, data: vec![Rational::zero(); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        Self::from_fn(n, n, |i, j| if i == j { Rational::one() } else { Rational::zero() })
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> Rational) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        RatMatrix { rows, cols, data }
    }

    /// Build from column vectors.
    pub fn from_columns(cols: &[Vec<Rational>]) -> Self {
        let rows = cols.first().map_or(0, Vec::len);
        Self::from_fn(rows, cols.len(), |i, j| cols[j][i].clone())
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> &Rational {
        &self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: Rational) {
        self.data[i * self.cols + j] = v;
    }

    pub fn column(&self, j: usize) -> Vec<Rational> {
        (0..self.rows).map(|i| self.get(i, j).clone()).collect()
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self.get(j, i).clone())
    }

    pub fn mul_vec(&self, v: &[Rational]) -> Vec<Rational> {
        assert_eq!(v.len(), self.cols);
        (0..self.rows)
            .map(|i| (0..self.cols).fold(Rational::zero(), |acc, j| acc + self.get(i, j) * &v[j]))
            .collect()
    }

    pub fn add_scaled_identity(&self, s: &Rational) -> Self {
        let mut out = self.clone();
        for i in 0..self.rows.min(self.cols) {
            let v = out.get(i, i) + s;
            out.set(i, i, v);
        }
        out
    }

    pub fn trace(&self) -> Rational {
        (0..self.rows.min(self.cols)).fold(Rational::zero(), |acc, i| acc + self.get(i, i))
    }

    /// Characteristic polynomial det(xI − A), lowest degree first, by
    /// Faddeev–LeVerrier.
    pub fn char_poly(&self) -> Vec<Rational> {
        assert_eq!(self.rows, self.cols, "char_poly of a non-square matrix");
        let n = self.rows;
        let mut coeffs = vec![Rational::zero(); n + 1];
        coeffs[n] = Rational::one();
        let mut m = RatMatrix::zeros(n, n);
        for k in 1..=n {
            m = (self * &m).add_scaled_identity(&coeffs[n + 1 - k]);
            let t = (self * &m).trace();
            coeffs[n - k] = -t / Rational::from_integer(BigInt::from(k));
        }
        coeffs
    }

    /// p(A) for a polynomial given lowest degree first.
    pub fn eval_poly(&self, poly: &[Rational]) -> Self {
        let n = self.rows;
        poly.iter().rev().fold(RatMatrix::zeros(n, n), |acc, c| (&acc * self).add_scaled_identity(c))
    }

    /// Reduced row echelon form; returns the pivot columns.
    fn rref(&mut self) -> Vec<usize> {
        let mut pivots = Vec::new();
        let mut r = 0;
        for c in 0..self.cols {
            if r == self.rows {
                break;
            }
            let Some(p) = (r..self.rows).find(|&i| !self.get(i, c).is_zero()) else {
                continue;
            };
            for j in 0..self.cols {
                self.data.swap(r * self.cols + j, p * self.cols + j);
            }
            let inv = self.get(r, c).recip();
            for j in 0..self.cols {
                let v = self.get(r, j) * &inv;
                self.set(r, j, v);
            }
            for i in 0..self.rows {
                if i != r && !self.get(i, c).is_zero() {
                    let f = self.get(i, c).clone();
                    for j in 0..self.cols {
                        let v = self.get(i, j) - &f * self.get(r, j);
                        self.set(i, j, v);
                    }
                }
            }
            pivots.push(c);
            r += 1;
        }
        pivots
    }

    pub fn rank(&self) -> usize {
        self.clone().rref().len()
    }

    /// Basis of the right kernel {v : A v = 0}.
    pub fn nullspace(&self) -> Vec<Vec<Rational>> {
        let mut m = self.clone();
        let pivots = m.rref();
        let free: Vec<usize> = (0..self.cols).filter(|c| !pivots.contains(c)).collect();
        free.iter()
            .map(|&f| {
                let mut v = vec![Rational::zero(); self.cols];
                v[f] = Rational::one();
                for (r, &pc) in pivots.iter().enumerate() {
                    v[pc] = -m.get(r, f).clone();
                }
                v
            })
            .collect()
    }

    /// Coordinates of `v` in the column span of `self` (full column rank),
    /// or `None` when `v` is not in the span.
    pub fn solve_in_span(&self, v: &[Rational]) -> Option<Vec<Rational>> {
        let mut aug = RatMatrix::from_fn(self.rows, self.cols + 1, |i, j| {
            if j < self.cols {
                self.get(i, j).clone()
            } else {
                v[i].clone()
            }
        });
        let pivots = aug.rref();
        if pivots.contains(&self.cols) || pivots.len() < self.cols {
            return None;
        }
        Some((0..self.cols).map(|r| aug.get(r, self.cols).clone()).collect())
    }
}

impl Mul for &RatMatrix {
    type Output = RatMatrix;
    fn mul(self, rhs: &RatMatrix) -> RatMatrix {
        assert_eq!(self.cols, rhs.rows);
        RatMatrix::from_fn(self.rows, rhs.cols, |i, j| {
            (0..self.cols).fold(Rational::zero(), |acc, k| {
                let a = self.get(i, k);
                if a.is_zero() {
                    acc
                } else {
                    acc + a * rhs.get(k, j)
                }
            })
        })
    }
}

/// Exact division of a polynomial (lowest degree first) by (x − root).
pub fn deflate(poly: &[Rational], root: &Rational) -> Vec<Rational> {
    let n = poly.len() - 1;
    let mut out = vec![Rational::zero(); n];
    let mut carry = Rational::zero();
    for i in (0..n).rev() {
        carry = &poly[i + 1] + &carry * root;
        out[i] = carry.clone();
    }
    debug_assert!((&poly[0] + &carry * root).is_zero(), "deflate by a non-root");
    out
}

pub fn eval_poly(poly: &[Rational], x: &Rational) -> Rational {
    poly.iter().rev().fold(Rational::zero(), |acc, c| acc * x + c)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactmath::int;

    fn m(rows: &[&[i64]]) -> RatMatrix {
        RatMatrix::from_fn(rows.len(), rows[0].len(), |i, j| int(rows[i][j]))
    }

    #[test]
    fn char_poly_2x2() {
        // [[1,2],[3,4]]: x^2 - 5x - 2
        assert_eq!(m(&[&[1, 2], &[3, 4]]).char_poly(), vec![int(-2), int(-5), int(1)]);
    }

    #[test]
    fn cayley_hamilton() {
        let a = m(&[&[2, 1, 0], &[1, 3, 1], &[0, 1, 4]]);
        let p = a.char_poly();
        let z = a.eval_poly(&p);
        assert_eq!(z, RatMatrix::zeros(3, 3));
    }

    #[test]
    fn kernel_and_solve() {
        let a = m(&[&[1, 2, 3], &[2, 4, 6]]);
        let ker = a.nullspace();
        assert_eq!(ker.len(), 2);
        for v in &ker {
            assert!(a.mul_vec(v).iter().all(Zero::is_zero));
        }
        let basis = RatMatrix::from_columns(&[vec![int(1), int(0), int(1)], vec![int(0), int(1), int(1)]]);
        assert_eq!(basis.solve_in_span(&[int(2), int(3), int(5)]), Some(vec![int(2), int(3)]));
        assert_eq!(basis.solve_in_span(&[int(2), int(3), int(4)]), None);
    }

    #[test]
    fn deflation() {
        // (x-3)(x^2+x-1) = x^3 -2x^2 -4x +3
        let p = vec![int(3), int(-4), int(-2), int(1)];
        assert_eq!(deflate(&p, &int(3)), vec![int(-1), int(1), int(1)]);
    }
}
