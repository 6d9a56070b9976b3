//! Simultaneous rational eigenvectors of the Hecke operators on a Brandt
//! module, and central values ⟨c_f, c_f⟩/u² from them.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use super::{gross_points, height_pairing, BrandtModule};
use crate::error::{Error, Result};
use crate::exactmath::matrix::{deflate, eval_poly, RatMatrix};
use crate::exactmath::{self, int, Rational};
use crate::quadfield::ClassGroup;

/// A rational cuspidal eigenvector with its Hecke eigenvalues a_p.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RationalEigenform {
    pub vector: Vec<Rational>,
    pub eigenvalues: Vec<(u64, i64)>,
}

/// A Hecke-stable block that does not split over Q, described by the
/// characteristic polynomial of T_p on it (lowest degree first).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ResidualBlock {
    pub basis: Vec<Vec<Rational>>,
    pub prime: u64,
    pub char_poly: Vec<Rational>,
}

impl ResidualBlock {
    pub fn dimension(&self) -> usize {
        self.basis.len()
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EigenSplit {
    pub eisenstein: Vec<Rational>,
    pub rational: Vec<RationalEigenform>,
    pub residual: Vec<ResidualBlock>,
}

/// Matrix of T_p restricted to span(basis), in that basis.
fn restrict(module: &BrandtModule, p: u64, basis: &[Vec<Rational>]) -> RatMatrix {
    let b = RatMatrix::from_columns(basis);
    let images: Vec<Vec<Rational>> = basis
        .iter()
        .map(|v| b.solve_in_span(&module.hecke(p, v)).expect("subspace is Hecke-stable"))
        .collect();
    RatMatrix::from_columns(&images)
}

fn to_ambient(basis: &[Vec<Rational>], coords: &[Vec<Rational>]) -> Vec<Vec<Rational>> {
    let b = RatMatrix::from_columns(basis);
    coords.iter().map(|c| b.mul_vec(c)).collect()
}

/// Integer roots of a monic rational polynomial within [−bound, bound], with
/// the polynomial left after dividing them all out.
fn integer_roots(poly: &[Rational], bound: i64) -> (Vec<i64>, Vec<Rational>) {
    let mut rest = poly.to_vec();
    let mut roots = Vec::new();
    for r in -bound..=bound {
        let x = int(r);
        let mut found = false;
        while rest.len() > 1 && eval_poly(&rest, &x).is_zero() {
            rest = deflate(&rest, &x);
            found = true;
        }
        if found {
            roots.push(r);
        }
    }
    (roots, rest)
}

/// Scale to a primitive integral vector whose first nonzero entry is positive.
fn primitive(v: &[Rational]) -> Vec<Rational> {
    let l = v.iter().fold(BigInt::one(), |acc, x| acc.lcm(x.denom()));
    let ints: Vec<BigInt> = v.iter().map(|x| (x * Rational::from_integer(l.clone())).to_integer()).collect();
    let g = ints.iter().fold(BigInt::zero(), |acc, x| acc.gcd(x));
    let sign = ints.iter().find(|x| !x.is_zero()).map_or(BigInt::one(), |x| if x.is_negative() { -BigInt::one() } else { BigInt::one() });
    ints.into_iter().map(|x| Rational::from_integer(x * &sign / &g)).collect()
}

enum Piece {
    Open(Vec<Vec<Rational>>),
    Closed(ResidualBlock),
}

pub fn eigen_split(module: &BrandtModule) -> EigenSplit {
    let h = module.dimension();
    let primes: Vec<u64> = exactmath::primes_up_to(module.m_max).into_iter().filter(|&p| p != module.n).collect();
    // Cusp space: Σ x_j = 0, the orthogonal complement of e = (1/w_j).
    let cusp: Vec<Vec<Rational>> = (1..h)
        .map(|k| {
            let mut v = vec![Rational::zero(); h];
            v[0] = int(1);
            v[k] = int(-1);
            v
        })
        .collect();
    let mut pieces = if cusp.is_empty() { vec![] } else { vec![Piece::Open(cusp)] };
    for &p in &primes {
        let mut next = Vec::new();
        for piece in pieces {
            let basis = match piece {
                Piece::Open(b) if b.len() > 1 || p == primes[0] => b,
                other => {
                    next.push(other);
                    continue;
                }
            };
            let a = restrict(module, p, &basis);
            let chi = a.char_poly();
            let (roots, rest) = integer_roots(&chi, p as i64 + 1);
            for r in roots {
                let ker = a.add_scaled_identity(&int(-r)).nullspace();
                next.push(Piece::Open(to_ambient(&basis, &ker)));
            }
            if rest.len() > 1 {
                let ker = a.eval_poly(&rest).nullspace();
                next.push(Piece::Closed(ResidualBlock { basis: to_ambient(&basis, &ker), prime: p, char_poly: rest }));
            }
        }
        pieces = next;
    }
    let mut rational = Vec::new();
    let mut residual = Vec::new();
    for piece in pieces {
        match piece {
            Piece::Open(b) if b.len() == 1 => {
                let vector = primitive(&b[0]);
                let eigenvalues = primes.iter().map(|&p| (p, eigenvalue(module, p, &vector).expect("eigenvector"))).collect();
                rational.push(RationalEigenform { vector, eigenvalues });
            }
            Piece::Open(b) => {
                let p = primes.first().copied().unwrap_or(1);
                let char_poly = if p > 1 { restrict(module, p, &b).char_poly() } else { vec![] };
                residual.push(ResidualBlock { basis: b, prime: p, char_poly });
            }
            Piece::Closed(block) => residual.push(block),
        }
    }
    rational.sort_by(|a, b| a.eigenvalues.cmp(&b.eigenvalues));
    EigenSplit { eisenstein: module.eisenstein_vector(), rational, residual }
}

/// λ with T_p v = λ v, if v is an eigenvector with integral eigenvalue.
fn eigenvalue(module: &BrandtModule, p: u64, v: &[Rational]) -> Option<i64> {
    let tv = module.hecke(p, v);
    let k = v.iter().position(|x| !x.is_zero())?;
    let lambda = &tv[k] / &v[k];
    let ok = tv.iter().zip(v).all(|(a, b)| *a == &lambda * b);
    (ok && lambda.is_integer()).then(|| lambda.to_integer().try_into().ok()).flatten()
}

/// ⟨c_f, c_f⟩/u² for a rational cuspidal eigenvector f, where c_f is the
/// orthogonal projection of the Gross-point vector onto the line of f.
pub fn central_value_ratio(module: &BrandtModule, g: &ClassGroup, f: &[Rational]) -> Result<Rational> {
    let h = module.dimension();
    if f.len() != h {
        return Err(Error::DimensionMismatch { expected: h, got: f.len() });
    }
    let cuspidal = f.iter().any(|x| !x.is_zero())
        && f.iter().fold(Rational::zero(), |acc, x| acc + x).is_zero()
        && exactmath::primes_up_to(module.m_max)
            .into_iter()
            .filter(|&p| p != module.n)
            .all(|p| eigenvalue(module, p, f).is_some());
    if !cuspidal {
        return Err(Error::NotCuspidal);
    }
    let c = gross_points(module, g)?.as_rational();
    let cf = height_pairing(module, &c, f)?;
    let ff = height_pairing(module, f, f)?;
    let u2 = int((g.u() * g.u()) as i64);
    Ok(&cf * &cf / ff / u2)
}

/// ⟨c_W, c_W⟩/u² for the orthogonal projection c_W of the Gross-point
/// vector onto a residual block: the sum of ⟨c_f, c_f⟩/u² over its forms.
pub fn block_central_value(module: &BrandtModule, g: &ClassGroup, block: &ResidualBlock) -> Result<Rational> {
    let c = gross_points(module, g)?.as_rational();
    let k = block.dimension();
    let gram = RatMatrix::from_fn(k, k, |a, b| height_pairing(module, &block.basis[a], &block.basis[b]).unwrap());
    let rhs: Vec<Rational> = block.basis.iter().map(|w| height_pairing(module, w, &c).unwrap()).collect();
    let y = gram.solve_in_span(&rhs).expect("pairing is nondegenerate");
    let u2 = int((g.u() * g.u()) as i64);
    Ok(y.iter().zip(&rhs).fold(Rational::zero(), |acc, (a, b)| acc + a * b) / u2)
}
