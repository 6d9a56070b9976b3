use num_bigint::BigInt;
use num_traits::{One, Zero};

use super::Rational;

/// The standard Legendre polynomial P_r with exact rational coefficients,
/// lowest degree first.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LegendrePoly {
    degree: usize,
    coeffs: Vec<Rational>,
}

impl LegendrePoly {
    /// Builds P_r from the three-term recurrence
    /// (r+1)P_{r+1} = (2r+1)x P_r − r P_{r−1}.
    pub fn new(degree: usize) -> Self {
        let mut prev = vec![Rational::one()];
        if degree == 0 {
            return LegendrePoly { degree, coeffs: prev };
        }
        let mut cur = vec![Rational::zero(), Rational::one()];
        for r in 1..degree {
            let r_big = Rational::from_integer(BigInt::from(r));
            let two_r1 = Rational::from_integer(BigInt::from(2 * r + 1));
            let denom = Rational::from_integer(BigInt::from(r + 1));
            let mut next = vec![Rational::zero(); r + 2];
            for (i, c) in cur.iter().enumerate() {
                next[i + 1] += c * &two_r1;
            }
            for (i, c) in prev.iter().enumerate() {
                next[i] -= c * &r_big;
            }
            for c in next.iter_mut() {
                *c /= &denom;
            }
            prev = std::mem::replace(&mut cur, next);
        }
        LegendrePoly { degree, coeffs: cur }
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn coefficients(&self) -> &[Rational] {
        &self.coeffs
    }

    pub fn eval(&self, x: &Rational) -> Rational {
        self.coeffs.iter().rev().fold(Rational::zero(), |acc, c| acc * x + c)
    }
}

/// P_r(x), exactly.
pub fn legendre_eval(r: usize, x: &Rational) -> Rational {
    match r {
        0 => Rational::one(),
        1 => x.clone(),
        _ => {
            let (mut prev, mut cur) = (Rational::one(), x.clone());
            for k in 1..r {
                let k_r = Rational::from_integer(BigInt::from(k));
                let next = (Rational::from_integer(BigInt::from(2 * k + 1)) * x * &cur - &k_r * &prev)
                    / Rational::from_integer(BigInt::from(k + 1));
                prev = std::mem::replace(&mut cur, next);
            }
            cur
        }
    }
}
