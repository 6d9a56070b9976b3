//! Full-rank Z-lattices in Q⁴ (stored as an integer Hermite normal form over
//! a common denominator), LLL reduction of integral Gram matrices and
//! Fincke–Pohst enumeration of short vectors.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exactmath::Rational;

pub type Vec4 = [BigInt; 4];

fn zero4() -> Vec4 {
    [BigInt::zero(), BigInt::zero(), BigInt::zero(), BigInt::zero()]
}

/// The lattice (1/den)·rowspan(basis), with `basis` in row Hermite normal
/// form and gcd(den, entries) = 1, so equal lattices compare equal.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Lattice {
    den: BigInt,
    basis: [Vec4; 4],
}

/// Row-style HNF of an integer matrix with four columns and rank four.
fn hnf(mut rows: Vec<Vec4>) -> [Vec4; 4] {
    let mut pivot_row = 0;
    for col in 0..4 {
        loop {
            let live: Vec<usize> = (pivot_row..rows.len()).filter(|&r| !rows[r][col].is_zero()).collect();
            if live.is_empty() {
                panic!("lattice is not of full rank");
            }
            let best = *live.iter().min_by_key(|&&r| rows[r][col].abs()).unwrap();
            rows.swap(pivot_row, best);
            let mut done = true;
            for r in pivot_row + 1..rows.len() {
                if rows[r][col].is_zero() {
                    continue;
                }
                let q = rows[r][col].div_floor(&rows[pivot_row][col]);
                for c in col..4 {
                    let t = &q * &rows[pivot_row][c];
                    rows[r][c] -= t;
                }
                if !rows[r][col].is_zero() {
                    done = false;
                }
            }
            if done {
                break;
            }
        }
        if rows[pivot_row][col].is_negative() {
            for c in col..4 {
                rows[pivot_row][c] = -&rows[pivot_row][c];
            }
        }
        for r in 0..pivot_row {
            let q = rows[r][col].div_floor(&rows[pivot_row][col]);
            if !q.is_zero() {
                for c in col..4 {
                    let t = &q * &rows[pivot_row][c];
                    rows[r][c] -= t;
                }
            }
        }
        pivot_row += 1;
        rows.retain(|row| row.iter().any(|x| !x.is_zero()));
    }
    [rows[0].clone(), rows[1].clone(), rows[2].clone(), rows[3].clone()]
}

impl Lattice {
    /// The lattice spanned by (1/den)·rows.
    pub fn new(den: BigInt, rows: Vec<Vec4>) -> Self {
        assert!(!den.is_zero());
        let mut basis = hnf(rows);
        let mut den = den;
        if den.is_negative() {
            den = -den;
            for row in basis.iter_mut() {
                for x in row.iter_mut() {
                    *x = -&*x;
                }
            }
            basis = hnf(basis.to_vec());
        }
        let g = basis.iter().flatten().fold(den.clone(), |acc, x| acc.gcd(x));
        if !g.is_one() {
            den /= &g;
            for row in basis.iter_mut() {
                for x in row.iter_mut() {
                    *x /= &g;
                }
            }
        }
        Lattice { den, basis }
    }

    pub fn den(&self) -> &BigInt {
        &self.den
    }

    pub fn basis(&self) -> &[Vec4; 4] {
        &self.basis
    }

    /// |det| of the basis as rational vectors.
    pub fn volume(&self) -> Rational {
        let diag = (0..4).fold(BigInt::one(), |acc, i| acc * &self.basis[i][i]);
        Rational::new(diag, self.den.pow(4))
    }

    pub fn scale(&self, r: &Rational) -> Lattice {
        let rows = self.basis.iter().map(|row| row.clone().map(|x| x * r.numer())).collect();
        Lattice::new(&self.den * r.denom(), rows)
    }

    /// Coordinates of the basis vectors as rationals.
    pub fn rational_basis(&self) -> Vec<[Rational; 4]> {
        self.basis.iter().map(|row| row.clone().map(|x| Rational::new(x, self.den.clone()))).collect()
    }

    /// The element Σ v_a·basis_a, as (numerators, den).
    pub fn element(&self, v: &[i128; 4]) -> Vec4 {
        let mut out = zero4();
        for (a, &va) in v.iter().enumerate() {
            if va == 0 {
                continue;
            }
            let va = BigInt::from(va);
            for c in 0..4 {
                out[c] += &va * &self.basis[a][c];
            }
        }
        out
    }

    /// Whether (1/den)·x lies in the lattice.
    pub fn contains(&self, x: &Vec4, den: &BigInt) -> bool {
        // Bring x over our denominator: x/den = y/self.den requires y = x·self.den/den.
        let mut y = zero4();
        for c in 0..4 {
            let t = &x[c] * &self.den;
            if !(&t % den).is_zero() {
                return false;
            }
            y[c] = t / den;
        }
        for col in 0..4 {
            let p = &self.basis[col][col];
            if !(&y[col] % p).is_zero() {
                return false;
            }
            let q = &y[col] / p;
            for c in col..4 {
                let t = &q * &self.basis[col][c];
                y[c] -= t;
            }
        }
        y.iter().all(Zero::is_zero)
    }

    pub fn contains_lattice(&self, other: &Lattice) -> bool {
        other.basis.iter().all(|row| self.contains(row, &other.den))
    }
}

/// LLL-reduce a positive definite integral Gram matrix. Returns (U, U·G·Uᵀ)
/// with U unimodular; reduced basis rows are U times the original rows.
pub fn lll(gram: &[[i128; 4]; 4]) -> ([[i128; 4]; 4], [[i128; 4]; 4]) {
    let mut g = *gram;
    let mut u = [[0i128; 4]; 4];
    for (i, row) in u.iter_mut().enumerate() {
        row[i] = 1;
    }
    let n = 4;
    let mut k = 1;
    let mut iterations = 0u32;
    while k < n {
        iterations += 1;
        assert!(iterations < 100_000, "LLL failed to converge");
        for j in (0..k).rev() {
            let (mu, _) = gso(&g);
            let r = mu[k][j].round() as i128;
            if r == 0 {
                continue;
            }
            // b_k ← b_k − r·b_j
            for c in 0..n {
                u[k][c] -= r * u[j][c];
            }
            g[k][k] += -2 * r * g[k][j] + r * r * g[j][j];
            for c in (0..n).filter(|&c| c != k) {
                let v = g[k][c] - r * g[j][c];
                g[k][c] = v;
                g[c][k] = v;
            }
        }
        let (mu, b) = gso(&g);
        if b[k] >= (0.99 - mu[k][k - 1] * mu[k][k - 1]) * b[k - 1] {
            k += 1;
        } else {
            u.swap(k, k - 1);
            g.swap(k, k - 1);
            for row in g.iter_mut() {
                row.swap(k, k - 1);
            }
            k = (k - 1).max(1);
        }
    }
    (u, g)
}

/// Gram–Schmidt coefficients and squared lengths from a Gram matrix.
fn gso(g: &[[i128; 4]; 4]) -> ([[f64; 4]; 4], [f64; 4]) {
    let mut mu = [[0f64; 4]; 4];
    let mut b = [0f64; 4];
    for i in 0..4 {
        for j in 0..i {
            let mut s = g[i][j] as f64;
            for l in 0..j {
                s -= mu[j][l] * mu[i][l] * b[l];
            }
            mu[i][j] = s / b[j];
        }
        let mut s = g[i][i] as f64;
        for l in 0..i {
            s -= mu[i][l] * mu[i][l] * b[l];
        }
        b[i] = s;
        mu[i][i] = 1.0;
    }
    (mu, b)
}

/// Calls `visit(v, v·G·vᵀ)` for every nonzero integer vector v with
/// v·G·vᵀ ≤ bound (G positive definite, integral). Vectors are reported in
/// the coordinates of the original Gram matrix. Fails with
/// `EnumerationBound` after `max_nodes` search nodes.
pub fn enumerate(
    gram: &[[i128; 4]; 4],
    bound: i128,
    max_nodes: u64,
    mut visit: impl FnMut(&[i128; 4], i128),
) -> Result<()> {
    if bound <= 0 {
        return Ok(());
    }
    let (u, g) = lll(gram);
    let (mu, b) = gso(&g);
    assert!(b.iter().all(|&x| x > 0.0), "Gram matrix is not positive definite");
    let slack = bound as f64 * (1.0 + 1e-9) + 1e-6;
    let mut x = [0i128; 4];
    let mut nodes = 0u64;
    fn rec(
        level: usize,
        remaining: f64,
        x: &mut [i128; 4],
        ctx: &mut (&[[f64; 4]; 4], &[f64; 4], &[[i128; 4]; 4], &[[i128; 4]; 4], i128, u64, &mut u64),
        visit: &mut dyn FnMut(&[i128; 4], i128),
    ) -> Result<()> {
        let (mu, b, g, u, bound, max_nodes) = (ctx.0, ctx.1, ctx.2, ctx.3, ctx.4, ctx.5);
        let center: f64 = -(level + 1..4).map(|j| mu[j][level] * x[j] as f64).sum::<f64>();
        let r = (remaining.max(0.0) / b[level]).sqrt();
        let lo = (center - r).ceil() as i128;
        let hi = (center + r).floor() as i128;
        for xi in lo..=hi {
            *ctx.6 += 1;
            if *ctx.6 > max_nodes {
                return Err(Error::EnumerationBound(format!("more than {max_nodes} lattice nodes")));
            }
            x[level] = xi;
            let d = xi as f64 - center;
            let rem = remaining - d * d * b[level];
            if level == 0 {
                if x.iter().all(|&t| t == 0) {
                    continue;
                }
                let mut val = 0i128;
                for i in 0..4 {
                    for j in 0..4 {
                        val += x[i] * g[i][j] * x[j];
                    }
                }
                if val <= bound {
                    let mut v = [0i128; 4];
                    for (i, &xi) in x.iter().enumerate() {
                        if xi != 0 {
                            for c in 0..4 {
                                v[c] += xi * u[i][c];
                            }
                        }
                    }
                    visit(&v, val);
                }
            } else {
                rec(level - 1, rem, x, ctx, visit)?;
            }
        }
        x[level] = 0;
        Ok(())
    }
    let mut ctx = (&mu, &b, &g, &u, bound, max_nodes, &mut nodes);
    rec(3, slack, &mut x, &mut ctx, &mut visit)
}

/// Convert a BigInt to i128, failing on overflow.
pub fn to_i128(x: &BigInt) -> Result<i128> {
    x.to_i128().ok_or_else(|| Error::EnumerationBound(format!("integer {x} exceeds 128 bits")))
}
